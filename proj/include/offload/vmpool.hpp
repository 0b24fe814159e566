#ifndef OFFLOAD_VMPOOL_HPP_
#define OFFLOAD_VMPOOL_HPP_

#include <algorithm>
#include <array>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "offload/clock.hpp"
#include "offload/common.hpp"
#include "offload/config.hpp"
#include "offload/task.hpp"

namespace offload::vmpool {

// Clone configurations. speed_factor is relative single-core throughput;
// effective throughput scales with the CPU count.
struct VmConfig {
  std::string name;
  int cpus = 1;
  int memory_mb = 0;
  int heap_mb = 0;
  double speed_factor = 1.0;

  double throughput() const { return speed_factor * cpus; }
  bool operator==(const VmConfig&) const = default;
};

inline const std::array<VmConfig, 6>& vm_config_table() {
  static const std::array<VmConfig, 6> table = {{
      {"basic", 1, 200, 32, 1.0},
      {"main", 1, 512, 100, 1.0},
      {"large", 1, 1024, 100, 1.0},
      {"x2large", 2, 1024, 100, 1.0},
      {"x4large", 4, 1024, 100, 1.0},
      {"x8large", 8, 1024, 100, 1.0},
  }};
  return table;
}

inline std::optional<VmConfig> find_config(const std::string& name) {
  for (const auto& c : vm_config_table())
    if (c.name == name) return c;
  return std::nullopt;
}

inline int config_index(const std::string& name) {
  const auto& table = vm_config_table();
  for (std::size_t i = 0; i < table.size(); ++i)
    if (table[i].name == name) return static_cast<int>(i);
  return -1;
}

class NoLargerConfig : public std::runtime_error {
 public:
  explicit NoLargerConfig(const std::string& what) : std::runtime_error(what) {}
};

// Successor in escalation order (basic -> main -> large -> x2 -> x4 -> x8).
inline VmConfig escalate(const VmConfig& config) {
  int idx = config_index(config.name);
  if (idx < 0) throw InputError("unknown VM config: " + config.name);
  const auto& table = vm_config_table();
  if (idx + 1 >= static_cast<int>(table.size()))
    throw NoLargerConfig("no config larger than " + config.name);
  return table[idx + 1];
}

enum class VmState { PoweredOff, Paused, Running };

inline const char* to_string(VmState s) {
  switch (s) {
    case VmState::PoweredOff: return "PoweredOff";
    case VmState::Paused: return "Paused";
    case VmState::Running: return "Running";
  }
  return "?";
}

struct VmInstance {
  int id = 0;
  VmConfig config;
  VmState state = VmState::PoweredOff;
  bool busy = false;
  double idle_since_ms = 0;
};

struct PoolPolicy {
  double resume_ms_base = 300.0;
  // Chosen so a 7-way simultaneous resume lands in the observed 6-7 s band:
  // 300 * (1 + c*6) = 6500  =>  c = 31/9.
  double resume_contention_coeff = 31.0 / 9.0;
  double coldstart_ms = 32000.0;
  double pause_after_idle_s = 60.0;
  int max_running = 64;

  static PoolPolicy from_config(const Config& cfg) {
    PoolPolicy p;
    p.resume_ms_base = cfg.get_double("resume_ms_base", p.resume_ms_base);
    p.resume_contention_coeff =
        cfg.get_double("resume_contention_coeff", p.resume_contention_coeff);
    p.coldstart_ms = cfg.get_double("coldstart_ms", p.coldstart_ms);
    p.pause_after_idle_s = cfg.get_double("pause_after_idle_s", p.pause_after_idle_s);
    p.max_running = static_cast<int>(cfg.get_int("max_running", p.max_running));
    return p;
  }
};

class PoolExhausted : public std::runtime_error {
 public:
  explicit PoolExhausted(const std::string& what) : std::runtime_error(what) {}
};

struct Acquisition {
  std::vector<int> vm_ids;
  double overhead_ms = 0;  // resumes run in parallel: max of per-VM latencies
  std::vector<double> per_vm_overhead_ms;
};

// Elastic clone pool. Acquisition picks warm (paused) instances first and
// falls back to cold starts; released instances go back to paused, and the
// idle tick powers off anything that has sat paused too long.
class VmPool {
 public:
  VmPool(Clock& clock, PoolPolicy policy = {}) : clock_(&clock), policy_(policy) {}

  // Pre-seed n paused instances of a config (the warm pool).
  void seed_paused(const VmConfig& config, int n) {
    std::lock_guard lock(mu_);
    for (int i = 0; i < n; ++i) {
      VmInstance vm;
      vm.id = next_id_++;
      vm.config = config;
      vm.state = VmState::Paused;
      vm.idle_since_ms = clock_->now_ms();
      instances_.push_back(vm);
    }
  }

  Acquisition acquire(const VmConfig& config, int n) {
    if (n < 1) throw InputError("acquire: need at least one VM");
    std::lock_guard lock(mu_);
    int running = 0;
    for (const auto& vm : instances_)
      if (vm.state == VmState::Running) ++running;
    if (running + n > policy_.max_running)
      throw PoolExhausted("pool limit: " + std::to_string(running) + " running, " +
                          std::to_string(n) + " requested, max " +
                          std::to_string(policy_.max_running));

    std::vector<int> paused, powered_off;
    for (auto& vm : instances_) {
      if (vm.config.name != config.name) continue;
      if (vm.state == VmState::Paused) paused.push_back(vm.id);
      else if (vm.state == VmState::PoweredOff) powered_off.push_back(vm.id);
    }

    Acquisition acq;
    int resumed = std::min<int>(n, static_cast<int>(paused.size()));
    int cold = n - resumed;
    // Simultaneous resumes contend: per-VM resume = base * (1 + c*(k-1)).
    double per_resume =
        policy_.resume_ms_base *
        (1.0 + policy_.resume_contention_coeff * (resumed > 0 ? resumed - 1 : 0));
    for (int i = 0; i < resumed; ++i) {
      start_instance(paused[i]);
      acq.vm_ids.push_back(paused[i]);
      acq.per_vm_overhead_ms.push_back(per_resume);
    }
    for (int i = 0; i < cold; ++i) {
      int id;
      if (i < static_cast<int>(powered_off.size())) {
        id = powered_off[i];
      } else {
        VmInstance vm;
        vm.id = next_id_++;
        vm.config = config;
        vm.state = VmState::PoweredOff;
        instances_.push_back(vm);
        id = vm.id;
      }
      start_instance(id);
      acq.vm_ids.push_back(id);
      acq.per_vm_overhead_ms.push_back(policy_.coldstart_ms);
    }
    acq.overhead_ms =
        *std::max_element(acq.per_vm_overhead_ms.begin(), acq.per_vm_overhead_ms.end());
    return acq;
  }

  void release(const std::vector<int>& vm_ids) {
    std::lock_guard lock(mu_);
    for (int id : vm_ids) {
      VmInstance& vm = instance(id);
      if (vm.state != VmState::Running)
        throw InputError("release: VM " + std::to_string(id) + " is not running");
      if (vm.busy)
        throw InputError("release: VM " + std::to_string(id) + " is still busy");
      vm.state = VmState::Paused;
      vm.idle_since_ms = clock_->now_ms();
    }
  }

  // Idle management pass: paused instances idle past the threshold power off.
  void tick() {
    std::lock_guard lock(mu_);
    double now = clock_->now_ms();
    for (auto& vm : instances_) {
      if (vm.state == VmState::Paused &&
          now - vm.idle_since_ms >= policy_.pause_after_idle_s * 1000.0) {
        vm.state = VmState::PoweredOff;
      }
    }
  }

  void set_busy(int vm_id, bool busy) {
    std::lock_guard lock(mu_);
    VmInstance& vm = instance(vm_id);
    if (busy && vm.state != VmState::Running)
      throw InputError("set_busy: VM not running");
    vm.busy = busy;
  }

  VmInstance get(int vm_id) const {
    std::lock_guard lock(mu_);
    for (const auto& vm : instances_)
      if (vm.id == vm_id) return vm;
    throw InputError("unknown VM id " + std::to_string(vm_id));
  }

  std::vector<VmInstance> snapshot() const {
    std::lock_guard lock(mu_);
    return instances_;
  }

  const PoolPolicy& policy() const { return policy_; }

  // One JSON object per instance, for the bench reporter.
  std::string dump_state_jsonl() const {
    std::lock_guard lock(mu_);
    std::ostringstream out;
    for (const auto& vm : instances_) {
      out << "{\"id\":" << vm.id << ",\"config\":\"" << vm.config.name
          << "\",\"state\":\"" << to_string(vm.state) << "\",\"busy\":"
          << (vm.busy ? "true" : "false") << "}\n";
    }
    return out.str();
  }

 private:
  VmInstance& instance(int id) {
    for (auto& vm : instances_)
      if (vm.id == id) return vm;
    throw InputError("unknown VM id " + std::to_string(id));
  }

  void start_instance(int id) {
    VmInstance& vm = instance(id);
    vm.state = VmState::Running;
    vm.busy = false;
  }

  Clock* clock_;
  PoolPolicy policy_;
  mutable std::mutex mu_;
  std::vector<VmInstance> instances_;
  int next_id_ = 1;
};

struct PartProfile {
  int vm_id = 0;
  double compute_ms = 0;
};

struct SplitResult {
  Bytes merged;
  double makespan_ms = 0;  // max over parts
  std::vector<PartProfile> parts;
};

// Fan a splittable task out over the given instances and merge the partial
// results. Simulated compute time per part is part work divided by the
// instance's effective throughput. A single instance degenerates to plain
// execution. Any part failure fails the whole call.
inline SplitResult split_and_distribute(const task::TaskBundle& bundle,
                                        const Bytes& input,
                                        const std::vector<VmInstance>& instances,
                                        bool run_parts_concurrently = false) {
  if (instances.empty()) throw InputError("split_and_distribute: no instances");
  SplitResult result;
  if (!bundle.splittable || instances.size() == 1) {
    const VmInstance& vm = instances.front();
    result.merged = bundle.run(input);
    result.makespan_ms = bundle.work_units(input) / vm.config.throughput();
    result.parts.push_back({vm.id, result.makespan_ms});
    return result;
  }

  auto parts = bundle.split(input, static_cast<int>(instances.size()));
  if (parts.size() != instances.size())
    throw InputError("split produced " + std::to_string(parts.size()) +
                     " parts for " + std::to_string(instances.size()) + " instances");

  std::vector<Bytes> partials(parts.size());
  if (run_parts_concurrently) {
    std::vector<std::future<Bytes>> futures;
    futures.reserve(parts.size());
    for (const auto& part : parts)
      futures.push_back(std::async(std::launch::async,
                                   [&bundle, &part] { return bundle.run(part); }));
    for (std::size_t i = 0; i < futures.size(); ++i) partials[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < parts.size(); ++i) partials[i] = bundle.run(parts[i]);
  }

  for (std::size_t i = 0; i < parts.size(); ++i) {
    double ms = bundle.work_units(parts[i]) / instances[i].config.throughput();
    result.parts.push_back({instances[i].id, ms});
    result.makespan_ms = std::max(result.makespan_ms, ms);
  }
  result.merged = bundle.merge(partials);
  return result;
}

}  // namespace offload::vmpool

#endif  // OFFLOAD_VMPOOL_HPP_
