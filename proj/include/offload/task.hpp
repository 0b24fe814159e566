#ifndef OFFLOAD_TASK_HPP_
#define OFFLOAD_TASK_HPP_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "offload/common.hpp"

namespace offload::task {

// A registered, offloadable unit of computation. Inputs and results travel as
// opaque byte strings; each workload defines its own encoding. Splittable
// tasks must satisfy merge(run(parts)) == run(input) for every fan-out.
struct TaskBundle {
  std::string id;
  std::uint32_t version = 1;
  bool splittable = false;

  std::function<Bytes(const Bytes&)> run;
  std::function<std::vector<Bytes>(const Bytes&, int)> split;  // splittable only
  std::function<Bytes(const std::vector<Bytes>&)> merge;       // splittable only
  std::function<double(const Bytes&)> peak_memory_mb;
  std::function<double(const Bytes&)> work_units;  // simulated cloud-ms at unit speed
  std::function<double(const Bytes&)> input_size_proxy;

  std::string integrity_hash() const {
    return std::to_string(fnv1a64(id + "#" + std::to_string(version)));
  }
};

class TaskRegistry {
 public:
  void add(TaskBundle bundle) {
    tasks_[{bundle.id, bundle.version}] = std::move(bundle);
  }

  bool contains(const std::string& id, std::uint32_t version) const {
    return tasks_.count({id, version}) > 0;
  }

  const TaskBundle* find(const std::string& id, std::uint32_t version) const {
    auto it = tasks_.find({id, version});
    return it == tasks_.end() ? nullptr : &it->second;
  }

  std::vector<const TaskBundle*> all() const {
    std::vector<const TaskBundle*> out;
    for (const auto& [key, bundle] : tasks_) out.push_back(&bundle);
    return out;
  }

 private:
  std::map<std::pair<std::string, std::uint32_t>, TaskBundle> tasks_;
};

// --- argument codecs shared by the built-in workloads ---

inline Bytes encode_u32_args(const std::vector<std::uint32_t>& vals) {
  Bytes out;
  for (auto v : vals)
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  return out;
}

inline std::vector<std::uint32_t> decode_u32_args(const Bytes& b) {
  if (b.size() % 4 != 0) throw InputError("bad u32 argument block");
  std::vector<std::uint32_t> vals;
  for (std::size_t i = 0; i < b.size(); i += 4) {
    std::uint32_t v = 0;
    for (int j = 0; j < 4; ++j) v = (v << 8) | b[i + j];
    vals.push_back(v);
  }
  return vals;
}

inline Bytes encode_u64(std::uint64_t v) {
  Bytes out;
  for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  return out;
}

inline std::uint64_t decode_u64(const Bytes& b) {
  if (b.size() != 8) throw InputError("bad u64 result block");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | b[i];
  return v;
}

inline Bytes encode_string(const std::string& s) { return Bytes(s.begin(), s.end()); }
inline std::string decode_string(const Bytes& b) { return std::string(b.begin(), b.end()); }

}  // namespace offload::task

#endif  // OFFLOAD_TASK_HPP_
