#pragma once

#include <chrono>
#include <cstddef>
#include <deque>
#include <memory>
#include <mutex>

namespace litsearch {

// Time source used by the rate limiter and retry backoff. Tests substitute a
// manual clock so waits cost nothing.
class Clock {
 public:
  using time_point = std::chrono::steady_clock::time_point;
  using duration = std::chrono::steady_clock::duration;

  virtual ~Clock() = default;
  virtual time_point now() = 0;
  virtual void sleep_for(duration d) = 0;
};

class SteadyClock final : public Clock {
 public:
  time_point now() override;
  void sleep_for(duration d) override;
};

std::shared_ptr<Clock> default_clock();

// Sliding-window limiter: at most `per_second` acquisitions fall inside any
// half-open one-second interval. Safe to share across threads.
class RateLimiter {
 public:
  explicit RateLimiter(std::size_t per_second, std::shared_ptr<Clock> clock = default_clock());

  // Blocks until a slot is free and returns the timestamp it was granted at.
  Clock::time_point acquire();

  std::size_t per_second() const noexcept { return per_second_; }

 private:
  std::size_t per_second_;
  std::shared_ptr<Clock> clock_;
  std::mutex mutex_;
  std::deque<Clock::time_point> recent_;
};

}  // namespace litsearch
