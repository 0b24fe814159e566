#include <catch2/catch_amalgamated.hpp>

#include "offload/netem.hpp"
#include "offload/transport.hpp"

using namespace offload;
using namespace offload::netem;

namespace {

// Echo server: every frame comes straight back.
std::unique_ptr<transport::Transport> make_echo() {
  return std::make_unique<transport::InProcessTransport>(
      [](const Bytes& f) { return std::vector<Bytes>{f}; });
}

}  // namespace

TEST_CASE("scenario catalogue round-trips by name") {
  for (const auto& name : LinkScenario::all_names()) {
    auto s = LinkScenario::by_name(name);
    CHECK(s.name == name);
  }
  CHECK_THROWS_AS(LinkScenario::by_name("Dialup"), InputError);
  CHECK_FALSE(LinkScenario::phone_only().has_transport());
  CHECK(LinkScenario::wifi_local().has_transport());
}

TEST_CASE("one-way delay is rtt/2 plus serialization time") {
  VirtualClock clock;
  ShapedTransport t(make_echo(), LinkScenario::three_g(), clock);
  // 1000 bytes on the cellular profile: 100/2 + 1000/250000 * 1000 = 54 ms
  CHECK(t.one_way_delay_ms(1000, 250'000) == Catch::Approx(54.0).epsilon(1e-12));

  ShapedTransport w(make_echo(), LinkScenario::wifi_local(), clock);
  CHECK(w.one_way_delay_ms(0, 2'500'000) == Catch::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("a small round trip advances the virtual clock by the link RTT") {
  VirtualClock clock;
  ShapedTransport t(make_echo(), LinkScenario::wifi_local(), clock);
  Bytes frame(14, 0xab);
  double t0 = clock.now_ms();
  t.send_frame(frame);
  Bytes back = t.recv_frame();
  double elapsed = clock.now_ms() - t0;
  CHECK(back == frame);
  // 2 * (2.5 + 14 / 2.5e6 * 1000)
  CHECK(elapsed == Catch::Approx(5.0112).epsilon(1e-12));
}

TEST_CASE("byte counters account for every frame byte") {
  VirtualClock clock;
  ShapedTransport t(make_echo(), LinkScenario::wifi_internet_good(), clock);
  std::uint64_t sent = 0;
  for (std::size_t size : {1u, 100u, 4096u}) {
    Bytes frame(size, 0x55);
    t.send_frame(frame);
    t.recv_frame();
    sent += size;
  }
  CHECK(t.counters().bytes_sent == sent);
  CHECK(t.counters().bytes_received == sent);
  CHECK(t.counters().frames_sent == 3);
  CHECK(t.counters().frames_received == 3);
}

TEST_CASE("deterministic clocks make identical runs take identical time") {
  auto run_once = [] {
    VirtualClock clock;
    ShapedTransport t(make_echo(), LinkScenario::three_g(), clock);
    for (int i = 0; i < 10; ++i) {
      t.send_frame(Bytes(static_cast<std::size_t>(50 + i * 37), 0x01));
      t.recv_frame();
    }
    return clock.now_ms();
  };
  CHECK(run_once() == run_once());
}

TEST_CASE("byte-trigger failure poisons the connection mid-stream") {
  VirtualClock clock;
  auto scenario = LinkScenario::wifi_local();
  scenario.fail_after_bytes = 100;
  ShapedTransport t(make_echo(), scenario, clock);

  t.send_frame(Bytes(60, 0x01));  // under the limit
  t.recv_frame();
  CHECK(t.counters().bytes_sent == 60);

  // 60 + 50 > 100: this send dies, and the counter does not move.
  CHECK_THROWS_AS(t.send_frame(Bytes(50, 0x02)), ConnectionLost);
  CHECK(t.counters().bytes_sent == 60);

  // Every later use reports the loss as well.
  CHECK_THROWS_AS(t.send_frame(Bytes(1, 0x03)), ConnectionLost);
  CHECK_THROWS_AS(t.recv_frame(), ConnectionLost);
}

TEST_CASE("time-trigger failure fires once the deadline passes") {
  VirtualClock clock;
  auto scenario = LinkScenario::wifi_local();
  scenario.fail_after_ms = 20.0;
  ShapedTransport t(make_echo(), scenario, clock);

  t.send_frame(Bytes(10, 0x01));  // ~2.5 ms in, still alive
  t.recv_frame();
  clock.advance_ms(30.0);
  CHECK_THROWS_AS(t.send_frame(Bytes(10, 0x02)), ConnectionLost);
  CHECK_THROWS_AS(t.recv_frame(), ConnectionLost);
}
