#pragma once

#include <chrono>
#include <cstdint>

namespace webprobe {

/// Millisecond clock shared by an environment session and everything that
/// budgets against it. The simulated backend uses `VirtualClock`, so a
/// one-hour run completes in well under a second of wall time.
class Clock {
 public:
  virtual ~Clock() = default;

  virtual std::int64_t now_ms() const = 0;
  virtual void sleep_until(std::int64_t t_ms) = 0;
  /// Accounts for simulated work (an agent call, a page load). Real clocks
  /// ignore this since the work already took real time.
  virtual void charge(std::int64_t duration_ms) = 0;
  virtual bool is_virtual() const = 0;
};

class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(std::int64_t start_ms = 0) : now_(start_ms) {}

  std::int64_t now_ms() const override { return now_; }
  void sleep_until(std::int64_t t_ms) override {
    if (t_ms > now_) now_ = t_ms;
  }
  void charge(std::int64_t duration_ms) override {
    if (duration_ms > 0) now_ += duration_ms;
  }
  bool is_virtual() const override { return true; }

 private:
  std::int64_t now_;
};

class SteadyClock final : public Clock {
 public:
  SteadyClock() : origin_(std::chrono::steady_clock::now()) {}

  std::int64_t now_ms() const override;
  void sleep_until(std::int64_t t_ms) override;
  void charge(std::int64_t) override {}
  bool is_virtual() const override { return false; }

 private:
  std::chrono::steady_clock::time_point origin_;
};

}  // namespace webprobe
