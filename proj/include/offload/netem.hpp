#ifndef OFFLOAD_NETEM_HPP_
#define OFFLOAD_NETEM_HPP_

#include <memory>
#include <optional>
#include <random>
#include <string>

#include "offload/clock.hpp"
#include "offload/common.hpp"
#include "offload/profiling.hpp"
#include "offload/transport.hpp"

namespace offload::netem {

// A connectivity profile. PhoneOnly has no transport at all; the other four
// reproduce the measured round-trip times of the evaluation setups.
struct LinkScenario {
  std::string name;
  profiling::LinkType link_type = profiling::LinkType::None;
  double rtt_ms = 0;
  double bw_up = 0;    // bytes/s
  double bw_down = 0;  // bytes/s
  double jitter_ms = 0;
  std::optional<std::uint64_t> fail_after_bytes;  // connection dies once total bytes sent exceed this
  std::optional<double> fail_after_ms;            // or once this much time has passed

  bool has_transport() const { return link_type != profiling::LinkType::None; }

  static LinkScenario phone_only() {
    return {"PhoneOnly", profiling::LinkType::None, 0, 0, 0, 0, {}, {}};
  }
  static LinkScenario wifi_local() {
    return {"WifiLocal", profiling::LinkType::WifiLocal, 5, 2'500'000, 2'500'000, 0, {}, {}};
  }
  static LinkScenario wifi_internet_good() {
    return {"WifiInternetGood", profiling::LinkType::WifiInternet, 50, 1'000'000, 1'000'000, 0, {}, {}};
  }
  static LinkScenario wifi_internet_hotspot() {
    return {"WifiInternetHotspot", profiling::LinkType::WifiInternet, 200, 1'000'000, 1'000'000, 0, {}, {}};
  }
  static LinkScenario three_g() {
    return {"ThreeG", profiling::LinkType::Cellular3G, 100, 250'000, 250'000, 0, {}, {}};
  }

  static LinkScenario by_name(const std::string& name) {
    if (name == "PhoneOnly") return phone_only();
    if (name == "WifiLocal") return wifi_local();
    if (name == "WifiInternetGood") return wifi_internet_good();
    if (name == "WifiInternetHotspot") return wifi_internet_hotspot();
    if (name == "ThreeG") return three_g();
    throw InputError("unknown link scenario: " + name);
  }

  static const std::vector<std::string>& all_names() {
    static const std::vector<std::string> names = {
        "PhoneOnly", "WifiLocal", "WifiInternetGood", "WifiInternetHotspot", "ThreeG"};
    return names;
  }
};

struct ByteCounters {
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
  std::uint64_t frames_sent = 0;
  std::uint64_t frames_received = 0;
};

// Delay-shaping transport wrapper. Each frame is delayed by
// rtt/2 + size/bandwidth one-way (plus bounded jitter in wall-clock mode).
// Frames are never reordered within a direction; the fail trigger closes the
// connection mid-stream and every later use reports connection-lost.
class ShapedTransport final : public transport::Transport {
 public:
  ShapedTransport(std::unique_ptr<transport::Transport> inner, LinkScenario scenario,
                  Clock& clock)
      : inner_(std::move(inner)), scenario_(std::move(scenario)), clock_(&clock),
        start_ms_(clock.now_ms()), rng_(0x5eed) {}

  void send_frame(const Bytes& frame) override {
    check_failed();
    check_time_trigger();
    if (scenario_.fail_after_bytes &&
        counters_.bytes_sent + frame.size() > *scenario_.fail_after_bytes) {
      fail("link failure injected after " + std::to_string(counters_.bytes_sent) +
           " bytes");
    }
    clock_->sleep_ms(one_way_delay_ms(frame.size(), scenario_.bw_up));
    check_time_trigger();
    inner_->send_frame(frame);
    counters_.bytes_sent += frame.size();
    counters_.frames_sent += 1;
  }

  Bytes recv_frame() override {
    check_failed();
    Bytes frame = inner_->recv_frame();
    check_time_trigger();
    clock_->sleep_ms(one_way_delay_ms(frame.size(), scenario_.bw_down));
    counters_.bytes_received += frame.size();
    counters_.frames_received += 1;
    return frame;
  }

  void close() override { inner_->close(); }

  const ByteCounters& counters() const { return counters_; }
  const LinkScenario& scenario() const { return scenario_; }

  double one_way_delay_ms(std::size_t size, double bw) {
    double d = scenario_.rtt_ms / 2.0;
    if (bw > 0) d += static_cast<double>(size) / bw * 1000.0;
    if (scenario_.jitter_ms > 0 && !clock_->deterministic()) {
      std::uniform_real_distribution<double> dist(0.0, scenario_.jitter_ms);
      d += dist(rng_);
    }
    return d;
  }

 private:
  void check_failed() {
    if (failed_) throw ConnectionLost(fail_reason_);
  }
  void check_time_trigger() {
    if (scenario_.fail_after_ms && clock_->now_ms() - start_ms_ >= *scenario_.fail_after_ms)
      fail("link failure injected at +" + std::to_string(*scenario_.fail_after_ms) + " ms");
  }
  [[noreturn]] void fail(std::string reason) {
    failed_ = true;
    fail_reason_ = std::move(reason);
    inner_->close();
    throw ConnectionLost(fail_reason_);
  }

  std::unique_ptr<transport::Transport> inner_;
  LinkScenario scenario_;
  Clock* clock_;
  double start_ms_;
  ByteCounters counters_;
  bool failed_ = false;
  std::string fail_reason_;
  std::mt19937 rng_;
};

}  // namespace offload::netem

#endif  // OFFLOAD_NETEM_HPP_
