#pragma once

#include <cmath>

#include "hadactl/error.hpp"

namespace hadactl {

/// The control horizon [a, b] with a > 0. Every kernel in the toolkit is a
/// function of log-time, so the window also carries L = log(b/a).
class LogTimeWindow {
public:
    LogTimeWindow(double a, double b) : a_(a), b_(b) {
        if (!(a > 0.0) || !std::isfinite(a))
            throw DomainError(detail::concat("time window needs a > 0, got a=", a));
        if (!(b > a) || !std::isfinite(b))
            throw DomainError(detail::concat("time window needs b > a, got a=", a, " b=", b));
    }

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double log_length() const noexcept { return std::log(b_ / a_); }

    /// log(t/a): elapsed log-time since the start.
    double since_start(double t) const { return std::log(t / a_); }
    /// log(b/t): log-time remaining until the horizon.
    double until_end(double t) const { return std::log(b_ / t); }

    double time_from_start(double sigma) const { return a_ * std::exp(sigma); }
    double time_from_end(double tau) const { return b_ * std::exp(-tau); }

    bool contains(double t) const noexcept { return t >= a_ && t <= b_; }

    bool operator==(const LogTimeWindow&) const = default;

private:
    double a_;
    double b_;
};

}  // namespace hadactl
