#include "litsearch/rate_limiter.hpp"

#include <thread>

#include "litsearch/error.hpp"

namespace litsearch {

Clock::time_point SteadyClock::now() { return std::chrono::steady_clock::now(); }

void SteadyClock::sleep_for(duration d) { std::this_thread::sleep_for(d); }

std::shared_ptr<Clock> default_clock() {
  static auto clock = std::make_shared<SteadyClock>();
  return clock;
}

RateLimiter::RateLimiter(std::size_t per_second, std::shared_ptr<Clock> clock)
    : per_second_(per_second), clock_(std::move(clock)) {
  if (per_second_ == 0) throw UsageError("rate limit must allow at least one request per second");
}

Clock::time_point RateLimiter::acquire() {
  using std::chrono::seconds;
  // Holding the lock while sleeping serializes waiters, which keeps the
  // grant order equal to the arrival order.
  std::lock_guard lock(mutex_);
  auto now = clock_->now();
  while (!recent_.empty() && now - recent_.front() >= seconds(1)) recent_.pop_front();
  if (recent_.size() >= per_second_) {
    auto ready = recent_.front() + seconds(1);
    if (ready > now) clock_->sleep_for(ready - now);
    now = clock_->now();
    while (!recent_.empty() && now - recent_.front() >= seconds(1)) recent_.pop_front();
  }
  recent_.push_back(now);
  return now;
}

}  // namespace litsearch
