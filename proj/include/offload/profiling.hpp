#ifndef OFFLOAD_PROFILING_HPP_
#define OFFLOAD_PROFILING_HPP_

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "offload/common.hpp"
#include "offload/energy.hpp"

namespace offload::profiling {

struct ProgramProfile {
  double wall_time_ms = 0;
  double thread_cpu_time_ms = 0;
  std::uint64_t work_units = 0;  // task-reported progress counter
  std::uint64_t alloc_bytes = 0;
  std::uint64_t gc_or_reclaim_count = 0;
};

enum class LinkType { None, WifiLocal, WifiInternet, Cellular3G };

inline const char* to_string(LinkType t) {
  switch (t) {
    case LinkType::None: return "None";
    case LinkType::WifiLocal: return "WifiLocal";
    case LinkType::WifiInternet: return "WifiInternet";
    case LinkType::Cellular3G: return "Cellular3G";
  }
  return "None";
}

inline bool is_wifi(LinkType t) {
  return t == LinkType::WifiLocal || t == LinkType::WifiInternet;
}

struct NetworkProfile {
  double rtt_ms = 0;  // EWMA
  double bw_up = 0;   // bytes/s
  double bw_down = 0;
  double pkts_tx_per_s = 0;
  double pkts_rx_per_s = 0;
  LinkType link_type = LinkType::None;
};

inline double update_ewma(std::optional<double> old, double sample, double alpha) {
  if (!old) return sample;
  return alpha * sample + (1.0 - alpha) * *old;
}

// Bucket inputs by magnitude so history generalizes across nearby sizes.
inline int input_bucket(double size_proxy) {
  if (size_proxy < 0) throw InputError("input_bucket: negative size proxy");
  return static_cast<int>(std::floor(std::log2(size_proxy + 1.0)));
}

// Where a task ran; remote locations carry the VM config and fan-out used.
struct Location {
  bool remote = false;
  std::string vm_config;  // empty for local
  int n_vms = 1;

  // location-class key used for history aggregation
  std::string cls() const {
    if (!remote) return "local";
    return "remote/" + vm_config + "/" + std::to_string(n_vms);
  }
  static Location local() { return {}; }
  static Location remote_on(std::string config, int n) {
    return Location{true, std::move(config), n};
  }
};

struct ExecutionRecord {
  std::string task_id;
  int input_bucket = 0;
  Location location;
  double wall_time_ms = 0;
  energy::EnergyBreakdown energy;
  std::uint64_t tx_bytes = 0;
  std::uint64_t rx_bytes = 0;
  double overhead_ms = 0;  // serialization + network + VM resume
  double timestamp_ms = 0;

  bool valid() const {
    if (!location.remote && (tx_bytes != 0 || rx_bytes != 0)) return false;
    if (location.remote && overhead_ms > wall_time_ms) return false;
    return true;
  }

  std::string to_line() const {
    std::ostringstream out;
    out << std::setprecision(17);
    out << task_id << '\t' << input_bucket << '\t' << location.cls() << '\t'
        << wall_time_ms << '\t' << energy.cpu << '\t' << energy.screen << '\t'
        << energy.wifi << '\t' << energy.cellular << '\t' << energy.total << '\t'
        << tx_bytes << '\t' << rx_bytes << '\t' << overhead_ms << '\t'
        << timestamp_ms;
    return out.str();
  }

  static ExecutionRecord from_line(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> f;
    std::string tok;
    while (std::getline(in, tok, '\t')) f.push_back(tok);
    if (f.size() != 13) throw InputError("bad execution record line: " + line);
    ExecutionRecord r;
    r.task_id = f[0];
    r.input_bucket = std::stoi(f[1]);
    r.location = location_from_cls(f[2]);
    r.wall_time_ms = std::stod(f[3]);
    r.energy.cpu = std::stod(f[4]);
    r.energy.screen = std::stod(f[5]);
    r.energy.wifi = std::stod(f[6]);
    r.energy.cellular = std::stod(f[7]);
    r.energy.total = std::stod(f[8]);
    r.tx_bytes = std::stoull(f[9]);
    r.rx_bytes = std::stoull(f[10]);
    r.overhead_ms = std::stod(f[11]);
    r.timestamp_ms = std::stod(f[12]);
    return r;
  }

  static Location location_from_cls(const std::string& cls) {
    if (cls == "local") return Location::local();
    auto first = cls.find('/');
    auto last = cls.rfind('/');
    if (first == std::string::npos || first == last || cls.substr(0, first) != "remote")
      throw InputError("bad location class: " + cls);
    return Location::remote_on(cls.substr(first + 1, last - first - 1),
                               std::stoi(cls.substr(last + 1)));
  }
};

struct HistorySummary {
  double ewma_time_ms = 0;
  double ewma_energy_mj = 0;
  double ewma_tx_bytes = 0;
  double ewma_rx_bytes = 0;
  std::uint64_t sample_count = 0;
};

// Per-(task, input bucket, location class) execution history. Single writer,
// many readers; readers get value snapshots.
class HistoryStore {
 public:
  using Key = std::tuple<std::string, int, std::string>;

  void record(const ExecutionRecord& rec, double alpha) {
    if (!rec.valid()) throw InputError("invalid execution record");
    std::lock_guard lock(mu_);
    records_.push_back(rec);
    auto& s = summaries_[{rec.task_id, rec.input_bucket, rec.location.cls()}];
    if (s.sample_count == 0) {
      s.ewma_time_ms = rec.wall_time_ms;
      s.ewma_energy_mj = rec.energy.total;
      s.ewma_tx_bytes = static_cast<double>(rec.tx_bytes);
      s.ewma_rx_bytes = static_cast<double>(rec.rx_bytes);
    } else {
      s.ewma_time_ms = update_ewma(s.ewma_time_ms, rec.wall_time_ms, alpha);
      s.ewma_energy_mj = update_ewma(s.ewma_energy_mj, rec.energy.total, alpha);
      s.ewma_tx_bytes = update_ewma(s.ewma_tx_bytes, static_cast<double>(rec.tx_bytes), alpha);
      s.ewma_rx_bytes = update_ewma(s.ewma_rx_bytes, static_cast<double>(rec.rx_bytes), alpha);
    }
    ++s.sample_count;
  }

  std::optional<HistorySummary> lookup(const std::string& task_id, int bucket,
                                       const std::string& location_cls) const {
    std::lock_guard lock(mu_);
    auto it = summaries_.find({task_id, bucket, location_cls});
    if (it == summaries_.end()) return std::nullopt;
    return it->second;
  }

  // Best remote summary for (task, bucket): the one with the lowest EWMA time.
  std::optional<std::pair<Location, HistorySummary>> best_remote(
      const std::string& task_id, int bucket) const {
    std::lock_guard lock(mu_);
    std::optional<std::pair<Location, HistorySummary>> best;
    for (const auto& [key, summary] : summaries_) {
      if (std::get<0>(key) != task_id || std::get<1>(key) != bucket) continue;
      const auto& cls = std::get<2>(key);
      if (cls == "local") continue;
      if (!best || summary.ewma_time_ms < best->second.ewma_time_ms)
        best = {ExecutionRecord::location_from_cls(cls), summary};
    }
    return best;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return records_.size();
  }

  // One record per line; rebuildable from disk.
  std::string serialize() const {
    std::lock_guard lock(mu_);
    std::string out;
    for (const auto& r : records_) {
      out += r.to_line();
      out += '\n';
    }
    return out;
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write history file: " + path);
    out << serialize();
  }

  // Replays a persisted record file into this store.
  void load(const std::string& path, double alpha) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read history file: " + path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      record(ExecutionRecord::from_line(line), alpha);
    }
  }

 private:
  mutable std::mutex mu_;
  std::vector<ExecutionRecord> records_;
  std::map<Key, HistorySummary> summaries_;
};

}  // namespace offload::profiling

#endif  // OFFLOAD_PROFILING_HPP_
