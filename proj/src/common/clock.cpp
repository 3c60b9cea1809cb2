#include "common/clock.hpp"

#include <thread>

namespace webprobe {

std::int64_t SteadyClock::now_ms() const {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - origin_)
      .count();
}

void SteadyClock::sleep_until(std::int64_t t_ms) {
  std::this_thread::sleep_until(origin_ + std::chrono::milliseconds(t_ms));
}

}  // namespace webprobe
