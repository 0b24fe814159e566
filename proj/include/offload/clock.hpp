#ifndef OFFLOAD_CLOCK_HPP_
#define OFFLOAD_CLOCK_HPP_

#include <chrono>
#include <thread>

namespace offload {

// Time source shared by every component of a runtime instance. The virtual
// clock makes the whole pipeline deterministic: "sleeping" just advances the
// counter, so latencies and makespans are exact and repeatable.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now_ms() const = 0;
  virtual void sleep_ms(double ms) = 0;
  virtual bool deterministic() const = 0;
};

class VirtualClock final : public Clock {
 public:
  double now_ms() const override { return now_; }
  void sleep_ms(double ms) override {
    if (ms > 0) now_ += ms;
  }
  void advance_ms(double ms) { sleep_ms(ms); }
  bool deterministic() const override { return true; }

 private:
  double now_ = 0.0;
};

class WallClock final : public Clock {
 public:
  WallClock() : epoch_(std::chrono::steady_clock::now()) {}
  double now_ms() const override {
    auto d = std::chrono::steady_clock::now() - epoch_;
    return std::chrono::duration<double, std::milli>(d).count();
  }
  void sleep_ms(double ms) override {
    if (ms > 0)
      std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
  }
  bool deterministic() const override { return false; }

 private:
  std::chrono::steady_clock::time_point epoch_;
};

}  // namespace offload

#endif  // OFFLOAD_CLOCK_HPP_
