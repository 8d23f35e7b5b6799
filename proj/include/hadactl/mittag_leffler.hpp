#pragma once

/// Two-parameter Mittag-Leffler function E_{alpha,beta}(z) for real z and
/// 0 < alpha <= 1, and the fractional propagators built from it.
///
/// Evaluation branches (real argument):
///   * Taylor series with compensated summation for z >= -1 (no cancellation
///     to speak of there, and positive z has none at all);
///   * -50 <= z < -1, alpha < 1: the Bromwich inversion of
///     s^{alpha-beta} / (s^alpha - z) collapsed onto the branch cut,
///         E(-x) = (1/pi) int_0^inf e^{-r} r^{alpha-beta}
///                 [r^alpha sin(pi beta) + x sin(pi(beta-alpha))]
///                 / (r^{2 alpha} + 2 x r^alpha cos(pi alpha) + x^2) dr,
///     valid for beta < 1 + alpha (larger beta is reduced by the recurrence);
///     for alpha <= beta <= 1 the integrand is non-negative;
///   * z < -50, alpha < 1: algebraic asymptotic expansion, 10 terms;
///   * alpha = 1: exp, expm1 or the confluent hypergeometric closed form.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "hadactl/error.hpp"
#include "hadactl/time_window.hpp"

namespace hadactl {

struct MLParams {
    double alpha = 1.0;
    double beta = 1.0;

    void validate() const {
        if (!(alpha > 0.0 && alpha <= 1.0))
            throw ParameterError(detail::concat("Mittag-Leffler order alpha must lie in (0,1], got ", alpha));
        if (!(beta > 0.0) || !std::isfinite(beta))
            throw ParameterError(detail::concat("Mittag-Leffler beta must be > 0, got ", beta));
    }
};

struct MLOptions {
    /// Arguments below -asymptotic_threshold use the asymptotic expansion.
    double asymptotic_threshold = 50.0;
    int asymptotic_terms = 10;
    int max_series_terms = 10'000;
};

/// 1/Gamma(x), exactly zero at the poles x = 0, -1, -2, ...
inline double reciprocal_gamma(double x) {
    if (x <= 0.0 && std::abs(x - std::nearbyint(x)) < 1e-14) return 0.0;
    return 1.0 / std::tgamma(x);
}

namespace detail {

inline double ml_series(double alpha, double beta, double z, int max_terms) {
    // Kahan-compensated partial sums; stop once a term is negligible and the
    // terms are already decreasing (they can grow first for |z| > 1). Terms are
    // formed as exp(n log|z| - lgamma(n alpha + beta)) so that neither z^n nor
    // Gamma overflows on the way to the peak.
    const double logz = std::log(std::abs(z));
    const bool alternating = z < 0.0;
    double sum = 0.0;
    double comp = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 0; n < max_terms; ++n) {
        const double arg = n * alpha + beta;
        double term = n == 0 ? reciprocal_gamma(beta) : std::exp(n * logz - std::lgamma(arg));
        if (alternating && (n % 2 == 1)) term = -term;
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        const double mag = std::abs(term);
        if (n > 2 && mag <= 1e-17 * std::abs(sum) && mag <= prev) return sum;
        prev = mag;
        if (!std::isfinite(sum)) break;
    }
    throw EvaluationError(concat("Mittag-Leffler series did not converge (alpha=", alpha, ", beta=", beta,
                                 ", z=", z, ")"),
                          alpha, beta, z);
}

inline double ml_asymptotic(double alpha, double beta, double z, int terms) {
    double sum = 0.0;
    double zinv = 1.0 / z;
    double power = zinv;
    for (int n = 1; n <= terms; ++n) {
        sum -= power * reciprocal_gamma(beta - n * alpha);
        power *= zinv;
    }
    return sum;
}

inline double ml_alpha_one(double beta, double z) {
    if (beta == 1.0) return std::exp(z);
    if (beta == 2.0) return z == 0.0 ? 1.0 : std::expm1(z) / z;
    return boost::math::hypergeometric_1F1(1.0, beta, z) * reciprocal_gamma(beta);
}

inline double ml_branch_cut(double alpha, double beta, double x) {
    const double pi = std::numbers::pi;
    const double sb = std::sin(pi * beta);
    const double sba = std::sin(pi * (beta - alpha));
    const double ca = std::cos(pi * alpha);
    auto integrand = [=](double r) {
        if (r <= 0.0) return 0.0;
        const double ra = std::pow(r, alpha);
        const double den = ra * ra + 2.0 * x * ra * ca + x * x;
        return std::exp(-r) * std::pow(r, alpha - beta) * (ra * sb + x * sba) / den;
    };
    // The denominator is smallest at r^alpha = -x cos(pi alpha) when alpha > 1/2;
    // splitting there keeps both pieces free of interior peaks.
    double split = 1.0;
    if (ca < 0.0) split = std::pow(-x * ca, 1.0 / alpha);
    split = std::clamp(split, 0.5, 60.0);

    thread_local boost::math::quadrature::tanh_sinh<double> finite;
    thread_local boost::math::quadrature::exp_sinh<double> tail;
    const double tol = 1e-14;
    const double head = finite.integrate(integrand, 0.0, split, tol);
    const double rest = tail.integrate(integrand, split, std::numeric_limits<double>::infinity(), tol);
    return (head + rest) / pi;
}

inline double ml_eval(double alpha, double beta, double z, const MLOptions& opt) {
    if (z == 0.0) return reciprocal_gamma(beta);
    if (alpha == 1.0) return ml_alpha_one(beta, z);
    if (z >= -1.0) return ml_series(alpha, beta, z, opt.max_series_terms);
    if (z < -opt.asymptotic_threshold) return ml_asymptotic(alpha, beta, z, opt.asymptotic_terms);
    if (beta >= 1.0 + alpha) {
        // E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z
        return (ml_eval(alpha, beta - alpha, z, opt) - reciprocal_gamma(beta - alpha)) / z;
    }
    return ml_branch_cut(alpha, beta, -z);
}

}  // namespace detail

/// E_{alpha,beta}(z) for real z.
inline double eval_ml(const MLParams& p, double z, const MLOptions& opt = {}) {
    p.validate();
    if (!std::isfinite(z)) throw DomainError(detail::concat("Mittag-Leffler argument must be finite, got ", z));
    const double value = detail::ml_eval(p.alpha, p.beta, z, opt);
    if (!std::isfinite(value))
        throw EvaluationError(detail::concat("Mittag-Leffler evaluation overflowed (alpha=", p.alpha,
                                             ", beta=", p.beta, ", z=", z, ")"),
                              p.alpha, p.beta, z);
    return value;
}

inline double mittag_leffler(double alpha, double beta, double z) { return eval_ml({alpha, beta}, z); }

/// Kernel of the forced and adjoint propagators for one eigenvalue.
struct PropagatorKernelSpec {
    double alpha;
    double lambda;
    LogTimeWindow window;

    void validate() const {
        MLParams{alpha, alpha}.validate();
        if (!(lambda >= 0.0)) throw ParameterError(detail::concat("eigenvalue must be >= 0, got ", lambda));
    }
};

/// tau^{alpha-1} E_{alpha,alpha}(-lambda tau^alpha), tau > 0 in log-time.
inline double kernel_kappa(const PropagatorKernelSpec& spec, double tau) {
    spec.validate();
    if (!(tau > 0.0))
        throw DomainError(detail::concat("propagator kernel is singular at tau <= 0, got tau=", tau));
    const double ta = std::pow(tau, spec.alpha);
    return ta / tau * detail::ml_eval(spec.alpha, spec.alpha, -spec.lambda * ta, MLOptions{});
}

/// E_alpha(-lambda (log t/a)^alpha): the free evolution of one mode.
inline double free_propagator(double alpha, double lambda, const LogTimeWindow& window, double t) {
    MLParams{alpha, 1.0}.validate();
    if (!(lambda >= 0.0)) throw ParameterError(detail::concat("eigenvalue must be >= 0, got ", lambda));
    if (!window.contains(t))
        throw DomainError(detail::concat("free propagator needs t in [", window.a(), ", ", window.b(), "], got ", t));
    const double sigma = window.since_start(t);
    return detail::ml_eval(alpha, 1.0, -lambda * std::pow(sigma, alpha), MLOptions{});
}

}  // namespace hadactl
