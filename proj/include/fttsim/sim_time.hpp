#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fttsim {

/// Simulated time at a fixed resolution of one microsecond.
///
/// Used for both instants and spans. Integer storage keeps event ordering
/// independent of floating-point rounding; every channel duration used by the
/// default configuration (320 us backoff unit, 1024 us frame) is exact.
class SimTime {
public:
    constexpr SimTime() = default;

    static constexpr SimTime from_us(std::int64_t us) { return SimTime(us); }

    /// Rounds to the nearest microsecond.
    static SimTime from_seconds(double s) {
        if (!std::isfinite(s)) {
            throw std::invalid_argument("SimTime: non-finite seconds value");
        }
        return SimTime(static_cast<std::int64_t>(std::llround(s * 1e6)));
    }

    static constexpr SimTime zero() { return SimTime(0); }

    constexpr std::int64_t us() const { return us_; }
    constexpr double seconds() const { return static_cast<double>(us_) / 1e6; }

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime& operator+=(SimTime o) {
        us_ += o.us_;
        return *this;
    }
    constexpr SimTime& operator-=(SimTime o) {
        us_ -= o.us_;
        return *this;
    }
    friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime(a.us_ + b.us_); }
    friend constexpr SimTime operator-(SimTime a, SimTime b) { return SimTime(a.us_ - b.us_); }
    friend constexpr SimTime operator*(SimTime a, std::int64_t k) { return SimTime(a.us_ * k); }
    friend constexpr SimTime operator*(std::int64_t k, SimTime a) { return SimTime(a.us_ * k); }

    std::string to_string() const { return std::to_string(us_) + "us"; }

private:
    constexpr explicit SimTime(std::int64_t us) : us_(us) {}

    std::int64_t us_ = 0;
};

}  // namespace fttsim
