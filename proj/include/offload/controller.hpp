#ifndef OFFLOAD_CONTROLLER_HPP_
#define OFFLOAD_CONTROLLER_HPP_

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "offload/clock.hpp"
#include "offload/common.hpp"
#include "offload/energy.hpp"
#include "offload/netem.hpp"
#include "offload/profiling.hpp"
#include "offload/protocol.hpp"
#include "offload/task.hpp"
#include "offload/transport.hpp"

namespace offload::controller {

enum class Policy { None, ExecutionTime, Energy, ExecutionTimeAndEnergy };

inline const char* to_string(Policy p) {
  switch (p) {
    case Policy::None: return "None";
    case Policy::ExecutionTime: return "ExecutionTime";
    case Policy::Energy: return "Energy";
    case Policy::ExecutionTimeAndEnergy: return "ExecutionTimeAndEnergy";
  }
  return "None";
}

inline Policy policy_from_string(const std::string& s) {
  if (s == "None") return Policy::None;
  if (s == "ExecutionTime") return Policy::ExecutionTime;
  if (s == "Energy") return Policy::Energy;
  if (s == "ExecutionTimeAndEnergy") return Policy::ExecutionTimeAndEnergy;
  throw InputError("unknown policy: " + s);
}

struct EnvContext {
  profiling::LinkType link_type = profiling::LinkType::None;
  double rtt_ms = 0;
  double bw_up = 0;
  double bw_down = 0;
  double battery_percent = 100;  // collected, not used by any policy
  double good_rtt_threshold_ms = 100;
  bool connected = false;
};

struct OffloadDecision {
  bool remote = false;
  std::string requested_config;  // empty: server default
  int requested_vms = 1;

  static OffloadDecision local() { return {}; }
  static OffloadDecision remote_default() { return {true, "", 1}; }
};

struct ControllerOptions {
  Policy policy = Policy::ExecutionTimeAndEnergy;
  double ewma_alpha = 0.5;
  double good_rtt_threshold_ms = 100;
  double local_slowdown = 10.0;  // phone compute time = work_units * this
  int screen_brightness = 150;
  double response_estimate_factor = 1.0;  // rx estimate = tx estimate * this
  double reconnect_initial_ms = 500;
  double reconnect_max_ms = 30000;
};

// --- radio-aware device traces for energy accounting ---

// Splits an idle interval into RRC-state segments, demoting through the FSM's
// inactivity timeouts as time passes.
inline std::vector<std::pair<energy::CellState, double>> cell_idle_segments(
    energy::CellFsm& fsm, double duration_s) {
  std::vector<std::pair<energy::CellState, double>> segs;
  double remaining = duration_s;
  while (remaining > 1e-12) {
    double until_change = remaining;
    if (fsm.state == energy::CellState::Dch)
      until_change = std::min(remaining, fsm.dch_timeout - fsm.dch_inactivity);
    else if (fsm.state == energy::CellState::Fach)
      until_change = std::min(remaining, fsm.fach_timeout - fsm.fach_inactivity);
    until_change = std::max(until_change, 1e-9);
    segs.emplace_back(fsm.state, until_change);
    fsm.step(0, 0, until_change);
    remaining -= until_change;
  }
  return segs;
}

// Builds the device-state trace of one remote invocation: transmit, wait for
// the server, receive. CPU is near-idle throughout (the phone is waiting) and
// the screen stays on.
class RemoteTraceBuilder {
 public:
  RemoteTraceBuilder(profiling::LinkType link, int brightness,
                     const energy::PowerCoefficients& coeffs)
      : link_(link), brightness_(brightness), coeffs_(coeffs) {}

  void transfer(double duration_s, std::uint64_t bytes, bool uplink) {
    if (duration_s <= 0) return;
    if (profiling::is_wifi(link_)) {
      // Data moving at a high packet rate; uplink overlays the transmit
      // state for its duty-cycle fraction.
      double f = uplink ? wifi_fsm_.transmit_duty : 0.0;
      if (f > 0) {
        append(duration_s * f, energy::WifiState::TransmitFromHigh, energy::CellState::Off);
        append(duration_s * (1 - f), energy::WifiState::HighPower, energy::CellState::Off);
      } else {
        append(duration_s, energy::WifiState::HighPower, energy::CellState::Off);
      }
    } else {
      cell_fsm_.step(uplink ? static_cast<double>(bytes) : 0.0,
                     uplink ? 0.0 : static_cast<double>(bytes), duration_s);
      append(duration_s, energy::WifiState::Off, cell_fsm_.state);
    }
  }

  void wait(double duration_s) {
    if (duration_s <= 0) return;
    if (profiling::is_wifi(link_)) {
      append(duration_s, energy::WifiState::LowPower, energy::CellState::Off);
    } else {
      for (auto [state, dt] : cell_idle_segments(cell_fsm_, duration_s))
        append(dt, energy::WifiState::Off, state);
    }
  }

  std::vector<energy::TraceSegment> take() { return std::move(trace_); }

 private:
  void append(double duration_s, energy::WifiState wifi, energy::CellState cell) {
    energy::TraceSegment seg;
    seg.duration_s = duration_s;
    seg.state.cpu_on = true;
    seg.state.cpu_util = 1;  // waiting, not computing
    seg.state.cpu_freq = energy::CpuFreq::Low246MHz;
    seg.state.brightness = brightness_;
    seg.state.wifi = wifi;
    seg.state.cell = cell;
    trace_.push_back(seg);
  }

  profiling::LinkType link_;
  int brightness_;
  energy::PowerCoefficients coeffs_;
  energy::WifiFsm wifi_fsm_;
  energy::CellFsm cell_fsm_;
  std::vector<energy::TraceSegment> trace_;
};

inline std::vector<energy::TraceSegment> local_run_trace(
    double duration_s, profiling::LinkType link, int brightness) {
  energy::TraceSegment seg;
  seg.duration_s = duration_s;
  seg.state.cpu_on = true;
  seg.state.cpu_util = 100;
  seg.state.cpu_freq = energy::CpuFreq::High385MHz;
  seg.state.brightness = brightness;
  seg.state.wifi = profiling::is_wifi(link) ? energy::WifiState::LowPower
                                            : energy::WifiState::Off;
  seg.state.cell =
      link == profiling::LinkType::Cellular3G ? energy::CellState::Idle : energy::CellState::Off;
  if (duration_s <= 0) return {};
  return {seg};
}

// Projected energy of a remote invocation with the given byte counts and
// server-side time, used by the decision step before any bytes move.
inline energy::EnergyBreakdown project_remote_energy(
    const EnvContext& env, double tx_bytes, double rx_bytes, double remote_ms,
    int brightness, const energy::PowerCoefficients& coeffs) {
  RemoteTraceBuilder builder(env.link_type, brightness, coeffs);
  double tx_s = env.bw_up > 0 ? tx_bytes / env.bw_up : 0;
  double rx_s = env.bw_down > 0 ? rx_bytes / env.bw_down : 0;
  builder.transfer(tx_s, static_cast<std::uint64_t>(tx_bytes), true);
  builder.wait((remote_ms + env.rtt_ms) / 1000.0);
  builder.transfer(rx_s, static_cast<std::uint64_t>(rx_bytes), false);
  return energy::integrate_energy(builder.take(), coeffs);
}

// The offload decision. With no usable history the first-run heuristic
// offloads only on a good WiFi link; with history, the policy compares
// projected remote cost against the local summaries. Ties stay local.
inline OffloadDecision decide(const std::string& task_id, int input_bucket,
                              Policy policy, const EnvContext& env,
                              const profiling::HistoryStore& history,
                              const energy::PowerCoefficients& coeffs,
                              int brightness = 150) {
  if (policy == Policy::None) return OffloadDecision::local();
  if (!env.connected || env.link_type == profiling::LinkType::None)
    return OffloadDecision::local();

  auto local = history.lookup(task_id, input_bucket, "local");
  auto remote = history.best_remote(task_id, input_bucket);
  if (!local || !remote) {
    // First run: offload only over WiFi with good connectivity.
    bool good_wifi =
        profiling::is_wifi(env.link_type) && env.rtt_ms <= env.good_rtt_threshold_ms;
    return good_wifi ? OffloadDecision::remote_default() : OffloadDecision::local();
  }

  const auto& rs = remote->second;
  double transfer_ms = 0;
  if (env.bw_up > 0) transfer_ms += rs.ewma_tx_bytes / env.bw_up * 1000.0;
  if (env.bw_down > 0) transfer_ms += rs.ewma_rx_bytes / env.bw_down * 1000.0;
  double remote_time = rs.ewma_time_ms + transfer_ms + 2.0 * env.rtt_ms;
  double local_time = local->ewma_time_ms;

  double remote_energy =
      project_remote_energy(env, rs.ewma_tx_bytes, rs.ewma_rx_bytes, rs.ewma_time_ms,
                            brightness, coeffs)
          .total;
  double local_energy = local->ewma_energy_mj;

  bool time_better = remote_time < local_time;
  bool energy_better = remote_energy < local_energy;
  bool go_remote = false;
  switch (policy) {
    case Policy::None: break;
    case Policy::ExecutionTime: go_remote = time_better; break;
    case Policy::Energy: go_remote = energy_better; break;
    case Policy::ExecutionTimeAndEnergy: go_remote = time_better && energy_better; break;
  }
  if (!go_remote) return OffloadDecision::local();
  OffloadDecision d = OffloadDecision::remote_default();
  d.requested_config = remote->first.vm_config;
  d.requested_vms = remote->first.n_vms;
  return d;
}

// Connection state machine with bounded exponential backoff. attempt_due()
// drives retries from whatever loop owns the controller; in wall-clock mode a
// background thread can pump it.
class Reconnector {
 public:
  Reconnector(Clock& clock, double initial_ms, double max_ms)
      : clock_(&clock), initial_ms_(initial_ms), max_ms_(max_ms) {}

  void mark_lost() {
    connected_ = false;
    backoff_ms_ = initial_ms_;
    next_attempt_ms_ = clock_->now_ms() + backoff_ms_;
  }

  // A failed retry keeps the schedule attempt_due() already advanced; only a
  // fresh loss (re)starts the backoff.
  void note_failure() {
    if (connected_ || backoff_ms_ == 0) {
      mark_lost();
    } else {
      connected_ = false;
    }
  }

  void mark_connected() {
    connected_ = true;
    backoff_ms_ = initial_ms_;
  }

  bool connected() const { return connected_; }
  bool shutdown() const { return shutdown_; }
  void request_shutdown() { shutdown_ = true; }
  double next_attempt_ms() const { return next_attempt_ms_; }

  // True when a retry should run now. Advances the backoff schedule.
  bool attempt_due() {
    if (connected_ || shutdown_) return false;
    if (clock_->now_ms() < next_attempt_ms_) return false;
    backoff_ms_ = std::min(backoff_ms_ * 2.0, max_ms_);
    next_attempt_ms_ = clock_->now_ms() + backoff_ms_;
    return true;
  }

 private:
  Clock* clock_;
  double initial_ms_;
  double max_ms_;
  double backoff_ms_ = 0;
  double next_attempt_ms_ = 0;
  bool connected_ = false;
  bool shutdown_ = false;
};

struct DecisionLogEntry {
  std::string task_id;
  int input_bucket = 0;
  OffloadDecision decision;
  double est_remote_ms = 0, est_local_ms = 0;
  double actual_ms = 0;
  std::string note;
};

// Client-side execution controller: profile, decide, run locally or
// remotely, fall back on connection failure, record history. One controller
// per client thread of execution; the history store may be shared.
class Controller {
 public:
  using TransportFactory =
      std::function<std::unique_ptr<transport::Transport>()>;

  Controller(task::TaskRegistry& tasks, profiling::HistoryStore& history,
             Clock& clock, netem::LinkScenario scenario,
             TransportFactory factory, ControllerOptions options = {},
             energy::PowerCoefficients coeffs = {})
      : tasks_(&tasks), history_(&history), clock_(&clock),
        scenario_(std::move(scenario)), factory_(std::move(factory)),
        options_(options), coeffs_(coeffs),
        reconnector_(clock, options.reconnect_initial_ms, options.reconnect_max_ms) {
    net_profile_.link_type = scenario_.link_type;
    net_profile_.rtt_ms = scenario_.rtt_ms;
    net_profile_.bw_up = scenario_.bw_up;
    net_profile_.bw_down = scenario_.bw_down;
  }

  // Establish the connection and run the registration handshake. Returns
  // false (and schedules reconnection) if the server is unreachable.
  bool connect() {
    if (!scenario_.has_transport() || !factory_) return false;
    try {
      auto raw = factory_();
      shaped_ = std::make_unique<netem::ShapedTransport>(std::move(raw), scenario_, *clock_);
      register_app();
      measure_rtt(3);
      reconnector_.mark_connected();
      return true;
    } catch (const ConnectionLost&) {
      shaped_.reset();
      reconnector_.note_failure();
      return false;
    }
  }

  // Swap the link scenario (e.g. after an injected failure is repaired).
  // Takes effect on the next connect.
  void set_scenario(netem::LinkScenario scenario) { scenario_ = std::move(scenario); }

  bool connected() const { return reconnector_.connected() && shaped_ != nullptr; }
  Reconnector& reconnector() { return reconnector_; }

  // Run one due reconnection attempt, if any. Never blocks task execution;
  // callers invoke this from their own idle moments.
  void pump_reconnect() {
    if (reconnector_.shutdown() || reconnector_.connected()) return;
    if (!reconnector_.attempt_due()) return;
    connect();
  }

  // Median of k application-level pings; feeds the RTT EWMA.
  double measure_rtt(int k) {
    if (k < 1) throw InputError("measure_rtt: k must be >= 1");
    if (!shaped_) throw ConnectionLost("not connected");
    std::vector<double> samples;
    for (int i = 0; i < k; ++i) {
      double t0 = clock_->now_ms();
      protocol::Message ping{protocol::MsgType::Ping, next_seq_++, protocol::PingPayload{}};
      shaped_->send_frame(protocol::encode(ping));
      expect_reply(protocol::MsgType::Pong, ping.seq);
      samples.push_back(clock_->now_ms() - t0);
    }
    std::nth_element(samples.begin(), samples.begin() + samples.size() / 2, samples.end());
    double median = samples[samples.size() / 2];
    net_profile_.rtt_ms = profiling::update_ewma(net_profile_.rtt_ms > 0
                                                     ? std::optional<double>(net_profile_.rtt_ms)
                                                     : std::nullopt,
                                                 median, options_.ewma_alpha);
    return median;
  }

  EnvContext env() const {
    EnvContext e;
    e.link_type = scenario_.link_type;
    e.rtt_ms = net_profile_.rtt_ms;
    e.bw_up = net_profile_.bw_up;
    e.bw_down = net_profile_.bw_down;
    e.good_rtt_threshold_ms = options_.good_rtt_threshold_ms;
    e.connected = connected();
    return e;
  }

  enum class Force { Auto, Local, Remote };

  struct ExecutionOutcome {
    Bytes result;
    profiling::ExecutionRecord record;
    OffloadDecision decision;
    bool fell_back = false;
  };

  // The full invocation flow. The caller always gets a result (or the task's
  // own exception); transport failures are absorbed by local fallback.
  ExecutionOutcome execute(const std::string& task_id, const Bytes& args,
                           Force force = Force::Auto,
                           std::optional<protocol::PowerRequest> power = std::nullopt) {
    const auto* bundle = tasks_->find(task_id, task_version(task_id));
    if (!bundle) throw InputError("task not registered locally: " + task_id);
    int bucket = profiling::input_bucket(bundle->input_size_proxy(args));

    OffloadDecision decision;
    if (force == Force::Local) {
      decision = OffloadDecision::local();
    } else if (force == Force::Remote) {
      decision = OffloadDecision::remote_default();
    } else {
      decision = decide(task_id, bucket, options_.policy, env(), *history_, coeffs_,
                        options_.screen_brightness);
    }
    if (power && decision.remote) {
      decision.requested_config = power->config_name;
      decision.requested_vms = static_cast<int>(power->n_vms);
    }

    ExecutionOutcome outcome;
    outcome.decision = decision;
    if (decision.remote && connected()) {
      try {
        outcome = execute_remote(*bundle, args, bucket, decision);
        outcome.decision = decision;
        return outcome;
      } catch (const ConnectionLost&) {
        // Transparent fallback: drop the failed attempt's profile, schedule
        // reconnection, run locally.
        shaped_.reset();
        reconnector_.mark_lost();
        outcome.fell_back = true;
      }
    }
    // A fallback run records nothing: the whole invocation's profiler data
    // is discarded along with the failed attempt.
    auto local_outcome = execute_local(*bundle, args, bucket, !outcome.fell_back);
    local_outcome.fell_back = outcome.fell_back;
    local_outcome.decision = decision;
    return local_outcome;
  }

  std::uint64_t execute_frames_sent() const { return execute_frames_sent_; }
  const profiling::NetworkProfile& network_profile() const { return net_profile_; }
  const netem::ShapedTransport* shaped_transport() const { return shaped_.get(); }
  const std::vector<DecisionLogEntry>& decision_log() const { return decision_log_; }
  const ControllerOptions& options() const { return options_; }

 private:
  static std::uint32_t task_version(const std::string&) { return 1; }

  ExecutionOutcome execute_local(const task::TaskBundle& bundle, const Bytes& args,
                                 int bucket, bool record_history = true) {
    double t0 = clock_->now_ms();
    double compute_ms = bundle.work_units(args) * options_.local_slowdown;
    clock_->sleep_ms(compute_ms);
    ExecutionOutcome out;
    out.result = bundle.run(args);
    double wall = clock_->now_ms() - t0;
    auto trace =
        local_run_trace(wall / 1000.0, scenario_.link_type, options_.screen_brightness);
    out.record.task_id = bundle.id;
    out.record.input_bucket = bucket;
    out.record.location = profiling::Location::local();
    out.record.wall_time_ms = wall;
    out.record.energy = energy::integrate_energy(trace, coeffs_);
    out.record.timestamp_ms = clock_->now_ms();
    if (record_history) history_->record(out.record, options_.ewma_alpha);
    return out;
  }

  ExecutionOutcome execute_remote(const task::TaskBundle& bundle, const Bytes& args,
                                  int bucket, const OffloadDecision& decision) {
    double t0 = clock_->now_ms();
    auto counters_before = shaped_->counters();

    protocol::ExecutePayload payload;
    payload.task_id = bundle.id;
    payload.task_version = bundle.version;
    payload.input_bucket = bucket;
    payload.serialized_args = args;
    if (!decision.requested_config.empty() || decision.requested_vms > 1) {
      protocol::PowerRequest pr;
      pr.config_name = decision.requested_config.empty() ? "main" : decision.requested_config;
      pr.n_vms = static_cast<std::uint32_t>(decision.requested_vms);
      payload.power_request = pr;
    }

    protocol::Message msg{protocol::MsgType::Execute, next_seq_++, payload};
    Bytes frame = protocol::encode(msg);

    RemoteTraceBuilder tracer(scenario_.link_type, options_.screen_brightness, coeffs_);
    double send_start = clock_->now_ms();
    shaped_->send_frame(frame);
    execute_frames_sent_ += 1;
    tracer.transfer((clock_->now_ms() - send_start) / 1000.0, frame.size(), true);

    double wait_start = clock_->now_ms();
    protocol::Message reply = recv_reply(msg.seq, tracer, wait_start);

    if (reply.type == protocol::MsgType::Error) {
      const auto& err = std::get<protocol::ErrorPayload>(reply.payload);
      throw RemoteTaskError("ServerError", err.message);
    }
    const auto& result = std::get<protocol::ResultPayload>(reply.payload);
    if (!result.ok) {
      // Remote exceptions are the caller's problem, rethrown unchanged.
      throw RemoteTaskError(result.exception_kind, result.exception_message);
    }

    ExecutionOutcome out;
    out.result = result.result_bytes;
    apply_state_delta(result.state_delta_bytes);

    double wall = clock_->now_ms() - t0;
    auto counters_after = shaped_->counters();
    std::uint64_t tx = counters_after.bytes_sent - counters_before.bytes_sent;
    std::uint64_t rx = counters_after.bytes_received - counters_before.bytes_received;

    out.record.task_id = bundle.id;
    out.record.input_bucket = bucket;
    out.record.location = profiling::Location::remote_on(
        decision.requested_config.empty() ? "main" : decision.requested_config,
        decision.requested_vms);
    out.record.wall_time_ms = wall;
    out.record.tx_bytes = tx;
    out.record.rx_bytes = rx;
    // Overhead: everything except the server-side compute itself.
    out.record.overhead_ms =
        std::max(0.0, wall - result.profiling.program.thread_cpu_time_ms);
    out.record.energy = energy::integrate_energy(tracer.take(), coeffs_);
    out.record.timestamp_ms = clock_->now_ms();
    history_->record(out.record, options_.ewma_alpha);
    last_remote_profile_ = result.profiling;
    return out;
  }

  // Receive frames until the one matching seq arrives, folding the wait and
  // receive time into the energy trace.
  protocol::Message recv_reply(std::uint64_t seq, RemoteTraceBuilder& tracer,
                               double wait_start) {
    for (;;) {
      double before = clock_->now_ms();
      Bytes frame = shaped_->recv_frame();
      double after = clock_->now_ms();
      auto decoded = protocol::decode(frame);
      if (std::holds_alternative<protocol::DecodeError>(decoded))
        throw ConnectionLost("malformed frame from server: " +
                             std::get<protocol::DecodeError>(decoded).detail);
      auto msg = std::get<protocol::Message>(decoded);
      if (msg.seq != seq) continue;  // stale reply from an earlier attempt
      double recv_s = (after - before) / 1000.0;
      double wait_s = std::max(0.0, (before - wait_start) / 1000.0);
      tracer.wait(wait_s);
      tracer.transfer(recv_s, frame.size(), false);
      return msg;
    }
  }

  protocol::Message expect_reply(protocol::MsgType type, std::uint64_t seq) {
    Bytes frame = shaped_->recv_frame();
    auto decoded = protocol::decode(frame);
    if (std::holds_alternative<protocol::DecodeError>(decoded))
      throw ConnectionLost("malformed frame from server");
    auto msg = std::get<protocol::Message>(decoded);
    if (msg.type != type || msg.seq != seq)
      throw ConnectionLost("unexpected reply type/seq");
    return msg;
  }

  void register_app() {
    protocol::RegisterAppPayload reg;
    for (const auto* bundle : tasks_->all())
      reg.manifest.push_back({bundle->id, bundle->version});
    protocol::Message msg{protocol::MsgType::RegisterApp, next_seq_++, reg};
    shaped_->send_frame(protocol::encode(msg));
    Bytes frame = shaped_->recv_frame();
    auto decoded = protocol::decode(frame);
    if (std::holds_alternative<protocol::DecodeError>(decoded))
      throw ConnectionLost("malformed registration reply");
    auto reply = std::get<protocol::Message>(decoded);
    if (reply.type != protocol::MsgType::NeedTask)
      throw ConnectionLost("unexpected registration reply");
    local_only_.clear();
    for (const auto& ref : std::get<protocol::NeedTaskPayload>(reply.payload).unknown) {
      const auto* bundle = tasks_->find(ref.task_id, ref.version);
      if (!bundle) continue;
      protocol::TaskBundleTransferPayload xfer;
      xfer.task = ref;
      xfer.integrity_hash = bundle->integrity_hash();
      protocol::Message xmsg{protocol::MsgType::TaskBundleTransfer, next_seq_++, xfer};
      shaped_->send_frame(protocol::encode(xmsg));
      Bytes ack = shaped_->recv_frame();
      auto ack_decoded = protocol::decode(ack);
      if (std::holds_alternative<protocol::DecodeError>(ack_decoded))
        throw ConnectionLost("malformed bundle ack");
      auto ack_msg = std::get<protocol::Message>(ack_decoded);
      if (ack_msg.type == protocol::MsgType::Error) {
        // Rejected (e.g. restricted server): the task stays local-only.
        local_only_.push_back(ref.task_id);
      }
    }
  }

  void apply_state_delta(const Bytes& delta) {
    // copyState semantics: the returned delta overwrites the client-side
    // object state. The built-in workloads are stateless, so the delta is
    // empty; the hook exists for stateful bundles.
    last_state_delta_ = delta;
  }

 public:
  bool task_local_only(const std::string& task_id) const {
    return std::find(local_only_.begin(), local_only_.end(), task_id) != local_only_.end();
  }
  const std::optional<protocol::RemoteProfile>& last_remote_profile() const {
    return last_remote_profile_;
  }

 private:
  task::TaskRegistry* tasks_;
  profiling::HistoryStore* history_;
  Clock* clock_;
  netem::LinkScenario scenario_;
  TransportFactory factory_;
  ControllerOptions options_;
  energy::PowerCoefficients coeffs_;
  Reconnector reconnector_;
  std::unique_ptr<netem::ShapedTransport> shaped_;
  profiling::NetworkProfile net_profile_;
  std::uint64_t next_seq_ = 1;
  std::uint64_t execute_frames_sent_ = 0;
  std::vector<std::string> local_only_;
  std::vector<DecisionLogEntry> decision_log_;
  std::optional<protocol::RemoteProfile> last_remote_profile_;
  Bytes last_state_delta_;
};

}  // namespace offload::controller

#endif  // OFFLOAD_CONTROLLER_HPP_
