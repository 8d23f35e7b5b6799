#pragma once

/// Gauss-type quadrature rules and the weakly singular power-kernel integral
/// that every time integral in the toolkit reduces to.
///
/// Rules are generated by the Golub-Welsch algorithm (eigen-decomposition of
/// the symmetric Jacobi matrix of the three-term recurrence) and memoized per
/// (n, a, b); the cache is guarded so rules can be requested from any thread.

#include <Eigen/Eigenvalues>

#include <cmath>
#include <concepts>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

#include "hadactl/error.hpp"

namespace hadactl {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return nodes.size(); }

    template <std::invocable<double> F>
    double integrate(F&& f) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
        return sum;
    }
};

namespace detail {

// Monic Jacobi recurrence for the weight (1-x)^a (1+x)^b on [-1, 1].
inline QuadratureRule golub_welsch_jacobi(int n, double a, double b) {
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(n > 1 ? n - 1 : 1);
    const double ab = a + b;
    for (int k = 0; k < n; ++k) {
        const double s = 2.0 * k + ab;
        diag(k) = (k == 0) ? (b - a) / (ab + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + ab;
        double beta;
        if (k == 1) {
            beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
        } else {
            beta = 4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
        }
        sub(k - 1) = std::sqrt(beta);
    }
    const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                                std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));

    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    if (n == 1) {
        rule.nodes[0] = diag(0);
        rule.weights[0] = mu0;
        return rule;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw ParameterError(concat("Golub-Welsch eigen-solve failed for n=", n, " a=", a, " b=", b));
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = solver.eigenvalues()(i);
        const double v0 = solver.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v0 * v0;
    }
    return rule;
}

}  // namespace detail

/// Gauss-Jacobi rule on [-1, 1] for the weight (1-x)^a (1+x)^b, a, b > -1.
inline const QuadratureRule& gauss_jacobi(int n, double a, double b) {
    if (n < 1) throw ParameterError(detail::concat("quadrature size must be >= 1, got ", n));
    if (!(a > -1.0) || !(b > -1.0))
        throw ParameterError(detail::concat("Jacobi exponents must exceed -1, got a=", a, " b=", b));
    static std::mutex mutex;
    static std::map<std::tuple<int, double, double>, std::unique_ptr<QuadratureRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{n, a, b}];
    if (!slot) slot = std::make_unique<QuadratureRule>(detail::golub_welsch_jacobi(n, a, b));
    return *slot;
}

inline const QuadratureRule& gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

/// Gauss rule on [0, 1] for the weight v^p (singular end at v = 0).
inline QuadratureRule gauss_jacobi_unit(int n, double p) {
    const auto& ref = gauss_jacobi(n, 0.0, p);
    QuadratureRule rule;
    rule.nodes.resize(ref.size());
    rule.weights.resize(ref.size());
    const double scale = std::pow(2.0, -p - 1.0);
    for (std::size_t i = 0; i < ref.size(); ++i) {
        rule.nodes[i] = 0.5 * (ref.nodes[i] + 1.0);
        rule.weights[i] = ref.weights[i] * scale;
    }
    return rule;
}

/// Gauss-Legendre rule mapped to [lo, hi].
inline QuadratureRule gauss_legendre_on(int n, double lo, double hi) {
    const auto& ref = gauss_legendre(n);
    QuadratureRule rule;
    rule.nodes.resize(ref.size());
    rule.weights.resize(ref.size());
    const double half = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < ref.size(); ++i) {
        rule.nodes[i] = lo + half * (ref.nodes[i] + 1.0);
        rule.weights[i] = ref.weights[i] * half;
    }
    return rule;
}

/// Integrates  \int_0^T (T - s)^mu F(s) ds.
///
/// The (T - s)^mu singularity is absorbed into Gauss-Jacobi weights. A grading
/// exponent gamma > 1 substitutes s = T w^gamma, which turns integrands that
/// behave like s^{k/gamma} near s = 0 (fractional power series, Mittag-Leffler
/// propagators) into smooth functions of w.
template <std::invocable<double> F>
double power_kernel_integral(F&& f, double T, double mu, double gamma, int n) {
    if (!(T > 0.0)) throw DomainError(detail::concat("power-kernel integral needs T > 0, got ", T));
    if (!(gamma >= 1.0)) throw ParameterError(detail::concat("grading exponent must be >= 1, got ", gamma));
    // Reference rule on [0,1] with weight (1-w)^mu: mirror of the v^mu rule.
    const auto& ref = gauss_jacobi(n, mu, 0.0);
    const double scale = std::pow(T, mu + 1.0) * std::pow(2.0, -mu - 1.0);
    double sum = 0.0;
    if (gamma == 1.0) {
        for (std::size_t i = 0; i < ref.size(); ++i) {
            const double w = 0.5 * (ref.nodes[i] + 1.0);
            sum += ref.weights[i] * f(T * w);
        }
        return scale * sum;
    }
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double w = 0.5 * (ref.nodes[i] + 1.0);
        const double lw = std::log(w);
        const double wg = std::exp(gamma * lw);
        // (1 - w^gamma) / (1 - w), evaluated without cancellation near w = 1.
        const double ratio = -std::expm1(gamma * lw) / -std::expm1(lw);
        sum += ref.weights[i] * std::pow(ratio, mu) * gamma * wg / w * f(T * wg);
    }
    return scale * sum;
}

}  // namespace hadactl
