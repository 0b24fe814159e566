#include <catch2/catch_amalgamated.hpp>

#include "offload/bench.hpp"
#include "offload/controller.hpp"

using namespace offload;
using namespace offload::controller;
using offload::bench::SimEnv;
using offload::bench::SimOptions;
using Force = Controller::Force;

namespace {

profiling::ExecutionRecord make_record(const std::string& task, int bucket,
                                       profiling::Location loc, double wall_ms,
                                       double energy_mj, std::uint64_t tx = 0,
                                       std::uint64_t rx = 0) {
  profiling::ExecutionRecord r;
  r.task_id = task;
  r.input_bucket = bucket;
  r.location = loc;
  r.wall_time_ms = wall_ms;
  r.energy.cpu = energy_mj;
  r.energy.total = energy_mj;
  r.tx_bytes = tx;
  r.rx_bytes = rx;
  return r;
}

EnvContext wifi_env(double rtt_ms = 5) {
  EnvContext env;
  env.link_type = profiling::LinkType::WifiLocal;
  env.rtt_ms = rtt_ms;
  env.bw_up = 2'500'000;
  env.bw_down = 2'500'000;
  env.connected = true;
  return env;
}

}  // namespace

TEST_CASE("policy names round-trip") {
  for (auto p : {Policy::None, Policy::ExecutionTime, Policy::Energy,
                 Policy::ExecutionTimeAndEnergy})
    CHECK(policy_from_string(to_string(p)) == p);
  CHECK_THROWS_AS(policy_from_string("Fastest"), InputError);
}

TEST_CASE("the no-offload policy and disconnection both pin execution local") {
  profiling::HistoryStore history;
  energy::PowerCoefficients coeffs;
  CHECK_FALSE(decide("fibonacci", 4, Policy::None, wifi_env(), history, coeffs).remote);

  auto env = wifi_env();
  env.connected = false;
  CHECK_FALSE(decide("fibonacci", 4, Policy::ExecutionTime, env, history, coeffs).remote);
}

TEST_CASE("first run offloads only on a responsive WiFi link") {
  profiling::HistoryStore history;  // empty: no usable history
  energy::PowerCoefficients coeffs;
  CHECK(decide("fibonacci", 4, Policy::ExecutionTime, wifi_env(5), history, coeffs).remote);
  CHECK(decide("fibonacci", 4, Policy::ExecutionTime, wifi_env(100), history, coeffs).remote);
  CHECK_FALSE(
      decide("fibonacci", 4, Policy::ExecutionTime, wifi_env(101), history, coeffs).remote);

  auto cell = wifi_env(5);
  cell.link_type = profiling::LinkType::Cellular3G;
  CHECK_FALSE(decide("fibonacci", 4, Policy::ExecutionTime, cell, history, coeffs).remote);
}

TEST_CASE("one-sided history still routes through the first-run heuristic") {
  profiling::HistoryStore history;
  energy::PowerCoefficients coeffs;
  // Only a local summary exists: there is nothing to compare against.
  history.record(make_record("fibonacci", 4, profiling::Location::local(), 500, 500), 0.5);
  CHECK(decide("fibonacci", 4, Policy::ExecutionTime, wifi_env(5), history, coeffs).remote);
  CHECK_FALSE(
      decide("fibonacci", 4, Policy::ExecutionTime, wifi_env(150), history, coeffs).remote);
}

TEST_CASE("with full history each policy compares its own objective") {
  energy::PowerCoefficients coeffs;
  auto env = wifi_env(5);

  SECTION("remote better on both axes: every active policy offloads") {
    profiling::HistoryStore history;
    history.record(make_record("fibonacci", 4, profiling::Location::local(), 1000, 1000), 0.5);
    history.record(make_record("fibonacci", 4, profiling::Location::remote_on("main", 1),
                               100, 10, 1000, 1000),
                   0.5);
    for (auto p : {Policy::ExecutionTime, Policy::Energy, Policy::ExecutionTimeAndEnergy})
      CHECK(decide("fibonacci", 4, p, env, history, coeffs).remote);
  }

  SECTION("remote faster but costlier: only the time policy offloads") {
    profiling::HistoryStore history;
    // Local: slow but nearly free energy-wise.
    history.record(make_record("fibonacci", 4, profiling::Location::local(), 1000, 0.001), 0.5);
    history.record(make_record("fibonacci", 4, profiling::Location::remote_on("main", 1),
                               100, 10, 1000, 1000),
                   0.5);
    CHECK(decide("fibonacci", 4, Policy::ExecutionTime, env, history, coeffs).remote);
    CHECK_FALSE(decide("fibonacci", 4, Policy::Energy, env, history, coeffs).remote);
    CHECK_FALSE(
        decide("fibonacci", 4, Policy::ExecutionTimeAndEnergy, env, history, coeffs).remote);
  }

  SECTION("remote cheaper but slower: only the energy policy offloads") {
    profiling::HistoryStore history;
    // Local: fast but extremely expensive.
    history.record(make_record("fibonacci", 4, profiling::Location::local(), 1, 1e9), 0.5);
    history.record(make_record("fibonacci", 4, profiling::Location::remote_on("main", 1),
                               1000, 10, 1000, 1000),
                   0.5);
    CHECK_FALSE(decide("fibonacci", 4, Policy::ExecutionTime, env, history, coeffs).remote);
    CHECK(decide("fibonacci", 4, Policy::Energy, env, history, coeffs).remote);
    CHECK_FALSE(
        decide("fibonacci", 4, Policy::ExecutionTimeAndEnergy, env, history, coeffs).remote);
  }
}

TEST_CASE("a projected tie stays local; a strict win goes remote") {
  energy::PowerCoefficients coeffs;
  auto env = wifi_env(0);
  env.bw_up = env.bw_down = 0;  // no transfer term: remote_time == remote EWMA

  profiling::HistoryStore history;
  history.record(make_record("fibonacci", 4, profiling::Location::local(), 100, 1000), 0.5);
  history.record(
      make_record("fibonacci", 4, profiling::Location::remote_on("main", 1), 100, 1), 0.5);
  CHECK_FALSE(decide("fibonacci", 4, Policy::ExecutionTime, env, history, coeffs).remote);

  profiling::HistoryStore history2;
  history2.record(make_record("fibonacci", 4, profiling::Location::local(), 100, 1000), 0.5);
  history2.record(
      make_record("fibonacci", 4, profiling::Location::remote_on("main", 1), 99.999, 1), 0.5);
  CHECK(decide("fibonacci", 4, Policy::ExecutionTime, env, history2, coeffs).remote);
}

TEST_CASE("the decision flips remote-to-local at most once as RTT grows") {
  energy::PowerCoefficients coeffs;
  profiling::HistoryStore history;
  history.record(make_record("fibonacci", 4, profiling::Location::local(), 500, 1e9), 0.5);
  history.record(make_record("fibonacci", 4, profiling::Location::remote_on("main", 1),
                             100, 10, 20000, 20000),
                 0.5);
  bool seen_local = false;
  for (int rtt = 0; rtt <= 400; ++rtt) {
    auto d = decide("fibonacci", 4, Policy::ExecutionTime, wifi_env(rtt), history, coeffs);
    if (!d.remote) seen_local = true;
    if (seen_local) CHECK_FALSE(d.remote);
  }
  CHECK(seen_local);  // far enough out, the round trips dominate
}

TEST_CASE("the fastest remote class drives the resource request") {
  energy::PowerCoefficients coeffs;
  profiling::HistoryStore history;
  history.record(make_record("nqueens", 3, profiling::Location::local(), 5000, 5000), 0.5);
  history.record(make_record("nqueens", 3, profiling::Location::remote_on("main", 1),
                             900, 10, 500, 500),
                 0.5);
  history.record(make_record("nqueens", 3, profiling::Location::remote_on("x4large", 4),
                             300, 10, 500, 500),
                 0.5);
  auto d = decide("nqueens", 3, Policy::ExecutionTime, wifi_env(5), history, coeffs);
  REQUIRE(d.remote);
  CHECK(d.requested_config == "x4large");
  CHECK(d.requested_vms == 4);
}

TEST_CASE("reconnect backoff doubles per attempt and is capped") {
  VirtualClock clock;
  Reconnector rc(clock, 500, 30000);
  rc.mark_lost();
  CHECK_FALSE(rc.attempt_due());  // too early
  clock.advance_ms(500);
  CHECK(rc.attempt_due());  // t=500, next in 1000
  CHECK_FALSE(rc.attempt_due());
  clock.advance_ms(999);
  CHECK_FALSE(rc.attempt_due());
  clock.advance_ms(1);
  CHECK(rc.attempt_due());  // t=1500, next in 2000
  clock.advance_ms(2000);
  CHECK(rc.attempt_due());  // next in 4000

  // Walk the schedule to the cap.
  for (int i = 0; i < 10; ++i) {
    clock.advance_ms(40000);
    rc.attempt_due();
  }
  double before = clock.now_ms();
  clock.advance_ms(40000);
  CHECK(rc.attempt_due());
  CHECK(rc.next_attempt_ms() - clock.now_ms() == 30000.0);
  (void)before;
}

TEST_CASE("a failed retry does not restart the backoff schedule") {
  VirtualClock clock;
  Reconnector rc(clock, 500, 30000);
  rc.mark_lost();
  clock.advance_ms(500);
  REQUIRE(rc.attempt_due());  // schedules the next attempt 1000 ms out
  double next = rc.next_attempt_ms();
  rc.note_failure();  // the attempt itself failed
  CHECK(rc.next_attempt_ms() == next);
  CHECK_FALSE(rc.connected());
}

TEST_CASE("success and shutdown both stop the retry loop") {
  VirtualClock clock;
  Reconnector rc(clock, 500, 30000);
  rc.mark_lost();
  rc.mark_connected();
  clock.advance_ms(100000);
  CHECK_FALSE(rc.attempt_due());

  rc.mark_lost();
  rc.request_shutdown();
  clock.advance_ms(100000);
  CHECK_FALSE(rc.attempt_due());
}

TEST_CASE("RTT measurement reflects link latency plus frame serialization") {
  SimEnv env(netem::LinkScenario::wifi_local());
  double median = env.client().measure_rtt(3);
  // ping/pong frames are 14 bytes: 2 * (2.5 + 14 / 2.5e6 * 1000)
  CHECK(median == Catch::Approx(5.0112).epsilon(1e-9));
}

TEST_CASE("forced remote execution matches the local oracle") {
  SimEnv env(netem::LinkScenario::wifi_internet_good());
  auto args = task::encode_u32_args({15});
  auto local = env.client().execute("fibonacci", args, Force::Local);
  auto remote = env.client().execute("fibonacci", args, Force::Remote);
  CHECK(local.result == remote.result);
  CHECK(task::decode_u64(remote.result) == 610);
  CHECK(remote.record.location.remote);
  CHECK(remote.record.tx_bytes > 0);
  CHECK(remote.record.overhead_ms <= remote.record.wall_time_ms);
}

TEST_CASE("no-offload policy keeps the network silent across executions") {
  SimOptions options;
  options.controller.policy = Policy::None;
  SimEnv env(netem::LinkScenario::wifi_local(), options);
  for (int i = 0; i < 5; ++i) {
    auto outcome = env.client().execute("fibonacci", task::encode_u32_args({12}));
    CHECK_FALSE(outcome.record.location.remote);
  }
  CHECK(env.client().execute_frames_sent() == 0);
}

TEST_CASE("an untried cellular link starts local, a good WiFi link starts remote") {
  SimEnv cell(netem::LinkScenario::three_g());
  auto o1 = cell.client().execute("fibonacci", task::encode_u32_args({12}));
  CHECK_FALSE(o1.record.location.remote);

  SimEnv wifi(netem::LinkScenario::wifi_local());
  auto o2 = wifi.client().execute("fibonacci", task::encode_u32_args({12}));
  CHECK(o2.record.location.remote);
}

TEST_CASE("mid-call link failure falls back locally and leaves no history") {
  // First pass on a clean link to learn the handshake and request sizes.
  std::uint64_t handshake_bytes = 0, execute_bytes = 0;
  auto args = task::encode_u32_args({18});
  {
    SimEnv env(netem::LinkScenario::wifi_local());
    handshake_bytes = env.client().shaped_transport()->counters().bytes_sent;
    env.client().execute("fibonacci", args, Force::Remote);
    execute_bytes =
        env.client().shaped_transport()->counters().bytes_sent - handshake_bytes;
  }
  REQUIRE(execute_bytes > 0);

  // Now cut the link one byte short of the execute request.
  auto scenario = netem::LinkScenario::wifi_local();
  scenario.fail_after_bytes = handshake_bytes + execute_bytes - 1;
  SimEnv env(scenario);
  REQUIRE(env.client().connected());
  std::string history_before = env.history().serialize();

  auto outcome = env.client().execute("fibonacci", args, Force::Remote);
  CHECK(outcome.fell_back);
  CHECK(task::decode_u64(outcome.result) == 2584);
  CHECK_FALSE(env.client().connected());
  // The failed invocation leaves the profiler history byte-identical.
  CHECK(env.history().serialize() == history_before);

  // Repair the link; the next due retry reconnects.
  env.client().set_scenario(netem::LinkScenario::wifi_local());
  env.clock().sleep_ms(600);
  env.client().pump_reconnect();
  CHECK(env.client().connected());
  auto again = env.client().execute("fibonacci", args, Force::Remote);
  CHECK(task::decode_u64(again.result) == 2584);
  CHECK_FALSE(again.fell_back);
  CHECK(env.history().serialize() != history_before);
}

TEST_CASE("an unreachable server fails the retry without resetting its schedule") {
  SimEnv env(netem::LinkScenario::wifi_local());
  env.set_server_up(false);
  auto outcome =
      env.client().execute("fibonacci", task::encode_u32_args({10}), Force::Remote);
  CHECK(outcome.fell_back);
  CHECK(task::decode_u64(outcome.result) == 55);
  CHECK_FALSE(env.client().connected());

  env.clock().sleep_ms(600);
  env.client().pump_reconnect();  // attempt runs, server still down
  CHECK_FALSE(env.client().connected());

  env.set_server_up(true);
  env.clock().sleep_ms(1100);  // past the doubled backoff
  env.client().pump_reconnect();
  CHECK(env.client().connected());
}

TEST_CASE("remote exceptions reach the caller unchanged") {
  SimEnv env(netem::LinkScenario::wifi_local());
  CHECK_THROWS_AS(
      env.client().execute("fibonacci", task::encode_u32_args({99}), Force::Remote),
      RemoteTaskError);
}
