#ifndef OFFLOAD_BENCH_HPP_
#define OFFLOAD_BENCH_HPP_

#include <functional>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "offload/appserver.hpp"
#include "offload/clock.hpp"
#include "offload/controller.hpp"
#include "offload/netem.hpp"
#include "offload/task.hpp"
#include "offload/vmpool.hpp"
#include "offload/workloads.hpp"

namespace offload::bench {

struct SimOptions {
  bool deterministic = true;
  controller::ControllerOptions controller;
  vmpool::PoolPolicy pool_policy;
  appserver::ServerOptions server;
  energy::PowerCoefficients coeffs;
  int warm_pool_per_config = 8;  // paused instances pre-seeded per config
};

// A complete client + cloud assembly over an in-process transport. In
// deterministic mode everything shares one virtual clock, so runs are
// exactly repeatable.
class SimEnv {
 public:
  explicit SimEnv(netem::LinkScenario scenario, SimOptions options = {})
      : options_(options),
        clock_(make_clock(options.deterministic)),
        registry_(workloads::make_workload_registry()),
        pool_(*clock_, options.pool_policy),
        server_(registry_, pool_, *clock_, options.server),
        session_(server_.open_session()),
        controller_(registry_, history_, *clock_, scenario,
                    [this] { return make_transport(); }, options.controller,
                    options.coeffs) {
    for (const auto& cfg : vmpool::vm_config_table())
      pool_.seed_paused(cfg, options_.warm_pool_per_config);
    if (scenario.has_transport()) controller_.connect();
  }

  controller::Controller& client() { return controller_; }
  appserver::AppServer& server() { return server_; }
  vmpool::VmPool& pool() { return pool_; }
  profiling::HistoryStore& history() { return history_; }
  Clock& clock() { return *clock_; }
  task::TaskRegistry& registry() { return registry_; }

  // Simulate a server outage for reconnect/fallback tests.
  void set_server_up(bool up) { server_up_ = up; }

 private:
  static std::unique_ptr<Clock> make_clock(bool deterministic) {
    if (deterministic) return std::make_unique<VirtualClock>();
    return std::make_unique<WallClock>();
  }

  std::unique_ptr<transport::Transport> make_transport() {
    if (!server_up_) throw ConnectionLost("server unreachable");
    session_ = server_.open_session();
    return std::make_unique<transport::InProcessTransport>([this](const Bytes& frame) {
      if (!server_up_) throw ConnectionLost("server unreachable");
      return server_.handle_frame(*session_, frame);
    });
  }

  SimOptions options_;
  std::unique_ptr<Clock> clock_;
  task::TaskRegistry registry_;
  vmpool::VmPool pool_;
  appserver::AppServer server_;
  std::unique_ptr<appserver::AppServer::Session> session_;
  profiling::HistoryStore history_;
  controller::Controller controller_;
  bool server_up_ = true;
};

struct BenchReport {
  std::string workload;
  std::string input;
  std::string scenario;
  std::string policy;
  int servers = 1;
  std::string location;
  double wall_time_ms = 0;
  energy::EnergyBreakdown energy;
  std::uint64_t tx_bytes = 0;
  std::uint64_t rx_bytes = 0;
  double overhead_ms = 0;
  std::string status = "ok";
};

inline std::string csv_header() {
  return "workload,input,scenario,policy,servers,location,wall_time_ms,cpu_mj,"
         "screen_mj,wifi_mj,cellular_mj,total_mj,tx_bytes,rx_bytes,overhead_ms,status";
}

inline std::string to_csv_row(const BenchReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6);
  out << r.workload << ',' << r.input << ',' << r.scenario << ',' << r.policy << ','
      << r.servers << ',' << r.location << ',' << r.wall_time_ms << ','
      << r.energy.cpu << ',' << r.energy.screen << ',' << r.energy.wifi << ','
      << r.energy.cellular << ',' << r.energy.total << ',' << r.tx_bytes << ','
      << r.rx_bytes << ',' << r.overhead_ms << ',' << r.status;
  return out.str();
}

inline std::string to_json_line(const BenchReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6);
  out << "{\"workload\":\"" << r.workload << "\",\"input\":\"" << r.input
      << "\",\"scenario\":\"" << r.scenario << "\",\"policy\":\"" << r.policy
      << "\",\"servers\":" << r.servers << ",\"location\":\"" << r.location
      << "\",\"wall_time_ms\":" << r.wall_time_ms << ",\"energy_mj\":{\"cpu\":"
      << r.energy.cpu << ",\"screen\":" << r.energy.screen << ",\"wifi\":"
      << r.energy.wifi << ",\"cellular\":" << r.energy.cellular << ",\"total\":"
      << r.energy.total << "},\"tx_bytes\":" << r.tx_bytes << ",\"rx_bytes\":"
      << r.rx_bytes << ",\"overhead_ms\":" << r.overhead_ms << ",\"status\":\""
      << r.status << "\"}";
  return out.str();
}

// Whitespace-separated columns for plotting tools.
inline std::string to_plot_row(const BenchReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6);
  out << r.workload << '-' << r.input << ' ' << r.scenario << ' ' << r.servers << ' '
      << r.wall_time_ms << ' ' << r.energy.total;
  return out.str();
}

// One averaged cell of the evaluation matrix: `runs` repetitions with a
// simulated pause between them.
struct CellSpec {
  std::string workload;
  Bytes args;
  std::string input_label;
  netem::LinkScenario scenario;
  controller::Policy policy = controller::Policy::ExecutionTime;
  int servers = 1;
  int runs = 20;
  double gap_s = 30.0;
};

inline BenchReport run_cell(const CellSpec& cell, const SimOptions& base_options) {
  BenchReport report;
  report.workload = cell.workload;
  report.input = cell.input_label;
  report.scenario = cell.scenario.name;
  report.policy = controller::to_string(cell.policy);
  report.servers = cell.servers;
  try {
    SimOptions options = base_options;
    options.controller.policy = cell.policy;
    SimEnv env(cell.scenario, options);

    using Force = controller::Controller::Force;
    Force force = Force::Auto;
    std::optional<protocol::PowerRequest> power;
    if (!cell.scenario.has_transport()) {
      force = Force::Local;
    } else if (cell.servers > 1) {
      // Parallel fan-out cells request k clones explicitly.
      force = Force::Remote;
      power = protocol::PowerRequest{"main", static_cast<std::uint32_t>(cell.servers)};
    }

    std::optional<Bytes> expected;
    for (int run = 0; run < cell.runs; ++run) {
      auto outcome = env.client().execute(cell.workload, cell.args, force, power);
      if (expected && outcome.result != *expected) {
        report.status = "oracle-mismatch";
        return report;
      }
      expected = outcome.result;
      report.wall_time_ms += outcome.record.wall_time_ms;
      report.energy += outcome.record.energy;
      report.tx_bytes += outcome.record.tx_bytes;
      report.rx_bytes += outcome.record.rx_bytes;
      report.overhead_ms += outcome.record.overhead_ms;
      report.location = outcome.record.location.cls();
      env.clock().sleep_ms(cell.gap_s * 1000.0);
    }
    report.wall_time_ms /= cell.runs;
    report.energy.cpu /= cell.runs;
    report.energy.screen /= cell.runs;
    report.energy.wifi /= cell.runs;
    report.energy.cellular /= cell.runs;
    report.energy.total /= cell.runs;
    report.tx_bytes /= static_cast<std::uint64_t>(cell.runs);
    report.rx_bytes /= static_cast<std::uint64_t>(cell.runs);
    report.overhead_ms /= cell.runs;
  } catch (const std::exception& e) {
    report.status = std::string("error: ") + e.what();
  }
  return report;
}

struct MatrixSpec {
  struct WorkloadSpec {
    std::string workload;
    Bytes args;
    std::string input_label;
  };
  std::vector<WorkloadSpec> workloads;
  std::vector<std::string> scenarios;
  std::vector<controller::Policy> policies;
  std::vector<int> server_counts = {1, 2, 4, 8};
  int runs = 20;
  double gap_s = 30.0;
};

// Individual cell failures are recorded in the report; the matrix continues.
inline std::vector<BenchReport> run_matrix(const MatrixSpec& spec,
                                           const SimOptions& options) {
  std::vector<BenchReport> reports;
  for (const auto& w : spec.workloads) {
    for (const auto& scenario_name : spec.scenarios) {
      auto scenario = netem::LinkScenario::by_name(scenario_name);
      for (auto policy : spec.policies) {
        for (int servers : spec.server_counts) {
          if (!scenario.has_transport() && servers > 1) continue;
          CellSpec cell{w.workload, w.args, w.input_label, scenario,
                        policy, servers, spec.runs, spec.gap_s};
          reports.push_back(run_cell(cell, options));
        }
      }
    }
  }
  return reports;
}

inline std::string matrix_to_csv(const std::vector<BenchReport>& reports) {
  std::string out = csv_header() + "\n";
  for (const auto& r : reports) out += to_csv_row(r) + "\n";
  return out;
}

inline std::string matrix_to_jsonl(const std::vector<BenchReport>& reports) {
  std::string out;
  for (const auto& r : reports) out += to_json_line(r) + "\n";
  return out;
}

// Boundary input value: smallest n in [lo, hi] for which the offloaded run
// beats the local one on wall time under the scenario. Each probe uses a
// fresh environment so history from earlier probes cannot leak in.
inline std::optional<std::uint32_t> find_biv(
    const std::string& workload, const std::function<Bytes(std::uint32_t)>& args_for,
    const netem::LinkScenario& scenario, std::uint32_t lo, std::uint32_t hi,
    const SimOptions& options = {}) {
  if (lo > hi) throw InputError("find_biv: empty range");
  if (!scenario.has_transport()) return std::nullopt;
  using Force = controller::Controller::Force;
  for (std::uint32_t n = lo; n <= hi; ++n) {
    Bytes args = args_for(n);
    SimEnv env(scenario, options);
    double local_ms =
        env.client().execute(workload, args, Force::Local).record.wall_time_ms;
    double remote_ms =
        env.client().execute(workload, args, Force::Remote).record.wall_time_ms;
    if (remote_ms < local_ms) return n;
  }
  return std::nullopt;
}

}  // namespace offload::bench

#endif  // OFFLOAD_BENCH_HPP_
