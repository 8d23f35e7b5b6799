#pragma once

/// Left/right Hadamard fractional integrals, Hadamard-Caputo derivatives,
/// Hadamard (Riemann-Liouville type) derivatives and the reflection
/// Qf(t) = f(ab/t).
///
/// Everything is evaluated in log-time sigma = log(s/a): the kernel
/// (log t/s)^{alpha-1} ds/s becomes (T - sigma)^{alpha-1} d sigma with
/// T = log(t/a), which Gauss-Jacobi absorbs exactly. Right-sided operators go
/// through Q, since Q maps [t, b] onto [a, ab/t] and swaps the kernels.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <span>
#include <vector>

#include "hadactl/error.hpp"
#include "hadactl/quadrature.hpp"
#include "hadactl/time_window.hpp"

namespace hadactl {

template <class F>
concept RealFunction = std::invocable<const F&, double> &&
                       std::convertible_to<std::invoke_result_t<const F&, double>, double>;

struct HadamardOptions {
    int nodes = 64;
    /// Grading exponent for the substitution sigma = T w^gamma. Use 1/alpha (or
    /// 1/p) when the integrand carries a (log s/a)^{alpha-1} type factor.
    double grading = 1.0;
    /// Log-time step of the difference quotient in the Hadamard derivative;
    /// capped at 1/50 of the distance to the singular endpoint.
    double step = 1e-3;
};

/// A real function sampled on [a, b] and interpolated piecewise-cubically in
/// log-time. Nodes may be graded toward t = a (sigma_j = L (j/n)^gamma).
class SampledSignal {
public:
    SampledSignal(LogTimeWindow window, std::vector<double> nodes, std::vector<double> values, double grading = 1.0)
        : window_(window), nodes_(std::move(nodes)), values_(std::move(values)), grading_(grading) {
        if (nodes_.size() < 2) throw ConfigError("sampled signal needs at least two nodes");
        if (nodes_.size() != values_.size())
            throw ConfigError(detail::concat("sampled signal has ", nodes_.size(), " nodes but ", values_.size(),
                                             " values"));
        if (!(grading_ >= 1.0)) throw ParameterError(detail::concat("grading must be >= 1, got ", grading_));
        const double tol = 1e-12 * window_.b();
        if (std::abs(nodes_.front() - window_.a()) > tol || std::abs(nodes_.back() - window_.b()) > tol)
            throw DomainError("sampled signal nodes must start at a and end at b");
        nodes_.front() = window_.a();
        nodes_.back() = window_.b();
        sigma_.resize(nodes_.size());
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (i > 0 && !(nodes_[i] > nodes_[i - 1]))
                throw DomainError(detail::concat("sampled signal nodes must be strictly increasing at index ", i));
            if (!std::isfinite(values_[i]))
                throw DomainError(detail::concat("sampled signal value at index ", i, " is not finite"));
            sigma_[i] = window_.since_start(nodes_[i]);
        }
    }

    /// Samples f on n+1 nodes t_j = a exp(L (j/n)^gamma).
    template <RealFunction F>
    static SampledSignal sample(const LogTimeWindow& window, F&& f, int n, double grading = 1.0) {
        if (n < 3) throw ParameterError(detail::concat("need at least 3 intervals, got ", n));
        std::vector<double> t(n + 1), v(n + 1);
        const double L = window.log_length();
        for (int j = 0; j <= n; ++j) {
            t[j] = (j == n) ? window.b() : window.time_from_start(L * std::pow(double(j) / n, grading));
            v[j] = f(t[j]);
        }
        return SampledSignal(window, std::move(t), std::move(v), grading);
    }

    const LogTimeWindow& window() const noexcept { return window_; }
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> values() const noexcept { return values_; }
    double grading() const noexcept { return grading_; }

    double operator()(double t) const { return eval(t, false); }
    /// d/dt of the interpolant.
    double derivative(double t) const { return eval(t, true); }

private:
    double eval(double t, bool deriv) const {
        if (!(t >= window_.a() * (1 - 1e-14) && t <= window_.b() * (1 + 1e-14)))
            throw DomainError(detail::concat("signal evaluated outside [", window_.a(), ", ", window_.b(), "]: t=", t));
        const double s = window_.since_start(t);
        const auto n = static_cast<std::ptrdiff_t>(sigma_.size());
        std::ptrdiff_t i = std::upper_bound(sigma_.begin(), sigma_.end(), s) - sigma_.begin() - 1;
        i = std::clamp<std::ptrdiff_t>(i, 0, n - 2);
        // Four-point stencil around the containing interval, shifted at the ends.
        std::ptrdiff_t lo = std::clamp<std::ptrdiff_t>(i - 1, 0, std::max<std::ptrdiff_t>(0, n - 4));
        const std::ptrdiff_t hi = std::min(lo + 3, n - 1);
        double value = 0.0;
        double dvalue = 0.0;
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
            double basis = 1.0;
            double dbasis = 0.0;
            for (std::ptrdiff_t k = lo; k <= hi; ++k) {
                if (k == j) continue;
                const double denom = sigma_[j] - sigma_[k];
                dbasis = dbasis * (s - sigma_[k]) / denom + basis / denom;
                basis *= (s - sigma_[k]) / denom;
            }
            value += values_[j] * basis;
            dvalue += values_[j] * dbasis;
        }
        // d/dt = (1/t) d/dsigma
        return deriv ? dvalue / t : value;
    }

    LogTimeWindow window_;
    std::vector<double> nodes_;
    std::vector<double> values_;
    std::vector<double> sigma_;
    double grading_;
};

/// Qf(t) = f(ab/t). The returned callable owns a copy of f.
template <RealFunction F>
auto reflect_Q(F f, const LogTimeWindow& window) {
    const double ab = window.a() * window.b();
    return [f = std::move(f), ab](double t) -> double { return f(ab / t); };
}

namespace detail {

inline void check_order(double alpha, bool open_upper) {
    const bool ok = open_upper ? (alpha > 0.0 && alpha < 1.0) : (alpha > 0.0 && alpha <= 1.0);
    if (!ok)
        throw ParameterError(concat("fractional order must lie in (0,", open_upper ? "1)" : "1]", ", got ", alpha));
}

inline double check_left_time(const LogTimeWindow& w, double t) {
    if (!(t > w.a()) || t > w.b() * (1 + 1e-14))
        throw DomainError(concat("left-sided operator needs t in (", w.a(), ", ", w.b(), "], got ", t));
    return w.since_start(std::min(t, w.b()));
}

inline double check_right_time(const LogTimeWindow& w, double t) {
    if (!(t < w.b()) || t < w.a() * (1 - 1e-14))
        throw DomainError(concat("right-sided operator needs t in [", w.a(), ", ", w.b(), "), got ", t));
    return std::max(t, w.a());
}

// Left integral of order mu in (0, 1] of f at log-time T, without checks.
template <class F>
double left_integral_raw(const F& f, double a, double mu, double T, const HadamardOptions& opt) {
    auto g = [&](double s) { return f(a * std::exp(s)); };
    return power_kernel_integral(g, T, mu - 1.0, opt.grading, opt.nodes) / std::tgamma(mu);
}

// Five-point difference quotient of F in sigma on [0, L], one-sided near the
// ends. F behaves like a fractional power at the singular end, so the step
// shrinks with the distance to it.
template <class G>
double log_time_derivative(const G& F, double sigma, double L, double h, bool singular_at_zero) {
    const double dist = singular_at_zero ? sigma : L - sigma;
    h = std::min({h, 0.25 * L, dist / 50.0});
    if (sigma - 2 * h >= 0.0 && sigma + 2 * h <= L)
        return (F(sigma - 2 * h) - 8 * F(sigma - h) + 8 * F(sigma + h) - F(sigma + 2 * h)) / (12 * h);
    if (sigma - 4 * h >= 0.0)
        return (25 * F(sigma) - 48 * F(sigma - h) + 36 * F(sigma - 2 * h) - 16 * F(sigma - 3 * h) +
                3 * F(sigma - 4 * h)) /
               (12 * h);
    if (sigma + 4 * h <= L)
        return (-25 * F(sigma) + 48 * F(sigma + h) - 36 * F(sigma + 2 * h) + 16 * F(sigma + 3 * h) -
                3 * F(sigma + 4 * h)) /
               (12 * h);
    throw DomainError(concat("log-time stencil does not fit in the window at sigma=", sigma));
}

}  // namespace detail

/// (1/Gamma(alpha)) int_a^t (log t/s)^{alpha-1} f(s) ds/s.
template <RealFunction F>
double hadamard_integral_left(const F& f, double alpha, const LogTimeWindow& window, double t,
                              const HadamardOptions& opt = {}) {
    detail::check_order(alpha, false);
    const double T = detail::check_left_time(window, t);
    return detail::left_integral_raw(f, window.a(), alpha, T, opt);
}

/// (1/Gamma(alpha)) int_t^b (log s/t)^{alpha-1} f(s) ds/s, computed as Q I_left Q f.
template <RealFunction F>
double hadamard_integral_right(const F& f, double alpha, const LogTimeWindow& window, double t,
                               const HadamardOptions& opt = {}) {
    detail::check_order(alpha, false);
    t = detail::check_right_time(window, t);
    const double ab = window.a() * window.b();
    auto qf = [&](double s) { return f(ab / s); };
    return hadamard_integral_left(qf, alpha, window, ab / t, opt);
}

/// Hadamard-Caputo derivative (1/Gamma(1-alpha)) int_a^t (log t/s)^{-alpha} f'(s) ds.
/// Takes the derivative f' directly.
template <RealFunction DF>
double hadamard_caputo_left(const DF& fprime, double alpha, const LogTimeWindow& window, double t,
                            const HadamardOptions& opt = {}) {
    detail::check_order(alpha, true);
    const double T = detail::check_left_time(window, t);
    const double a = window.a();
    // f'(s) ds = (delta f)(s) d sigma with delta = s d/ds.
    auto g = [&](double sigma) {
        const double s = a * std::exp(sigma);
        return s * fprime(s);
    };
    return power_kernel_integral(g, T, -alpha, opt.grading, opt.nodes) / std::tgamma(1.0 - alpha);
}

inline double hadamard_caputo_left(const SampledSignal& f, double alpha, double t, const HadamardOptions& opt = {}) {
    return hadamard_caputo_left([&](double s) { return f.derivative(s); }, alpha, f.window(), t, opt);
}

/// Right Hadamard-Caputo derivative (1/Gamma(1-alpha)) int_t^b (log s/t)^{-alpha} (-f'(s)) ds,
/// computed as Q HC_left Q f.
template <RealFunction DF>
double hadamard_caputo_right(const DF& fprime, double alpha, const LogTimeWindow& window, double t,
                             const HadamardOptions& opt = {}) {
    detail::check_order(alpha, true);
    t = detail::check_right_time(window, t);
    const double ab = window.a() * window.b();
    // (Qf)'(s) = -(ab/s^2) f'(ab/s)
    auto dqf = [&](double s) { return -(ab / (s * s)) * fprime(ab / s); };
    return hadamard_caputo_left(dqf, alpha, window, ab / t, opt);
}

/// Hadamard derivative delta I_left^{1-alpha} f, by a difference quotient in log-time.
template <RealFunction F>
double hadamard_derivative_left(const F& f, double alpha, const LogTimeWindow& window, double t,
                                const HadamardOptions& opt = {}) {
    detail::check_order(alpha, true);
    const double T = detail::check_left_time(window, t);
    const double a = window.a();
    auto I = [&](double sigma) {
        return sigma <= 0.0 ? 0.0 : detail::left_integral_raw(f, a, 1.0 - alpha, sigma, opt);
    };
    return detail::log_time_derivative(I, T, window.log_length(), opt.step, true);
}

/// Right Hadamard derivative -delta I_right^{1-alpha} f, by a difference quotient in log-time.
template <RealFunction F>
double hadamard_derivative_right(const F& f, double alpha, const LogTimeWindow& window, double t,
                                 const HadamardOptions& opt = {}) {
    detail::check_order(alpha, true);
    t = detail::check_right_time(window, t);
    const double L = window.log_length();
    auto I = [&](double sigma) {
        const double s = window.time_from_start(sigma);
        return s >= window.b() ? 0.0 : hadamard_integral_right(f, 1.0 - alpha, window, s, opt);
    };
    return -detail::log_time_derivative(I, window.since_start(t), L, opt.step, false);
}

}  // namespace hadactl
