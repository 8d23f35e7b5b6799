#pragma once

/// Mild solutions of the controlled and adjoint systems in spectral
/// coordinates, control signals on graded log-time grids, and final-time
/// gradient extraction.
///
/// Controls are stored as functions of tau = log(b/t), the log-time left until
/// the horizon; every time integral below runs over tau or s = log(t/a).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <ostream>
#include <vector>

#include "hadactl/error.hpp"
#include "hadactl/mittag_leffler.hpp"
#include "hadactl/parallel.hpp"
#include "hadactl/quadrature.hpp"
#include "hadactl/spectral.hpp"
#include "hadactl/time_window.hpp"

namespace hadactl {

/// Quadrature over tau in (0, L] (or [epsilon, L]) for a control that behaves
/// like tau^{endpoint_power} times a smooth function of tau^alpha. The weights
/// integrate kernel-control products tau^{alpha-1+endpoint_power} G(tau^alpha)
/// exactly for polynomial G.
///
/// Nodes live on panels of the Gauss variable v in [0, 1]: v = (tau/L)^alpha
/// without a cutoff, v = log(tau/epsilon)/log(L/epsilon) with one.
struct TimeRule {
    std::vector<double> tau;
    std::vector<double> weights;
    double alpha = 1.0;
    double endpoint_power = 0.0;
    double epsilon = 0.0;
    double L = 0.0;
    std::vector<double> panel_edges{0.0, 1.0};  // in v, ascending
    std::vector<int> panel_start{0};             // first node of each panel

    std::size_t size() const noexcept { return tau.size(); }
    bool has_cutoff() const noexcept { return epsilon > 0.0; }
    std::size_t panels() const noexcept { return panel_start.size(); }
    double variable(double t) const {
        return has_cutoff() ? std::log(t / epsilon) / std::log(L / epsilon) : std::pow(t / L, alpha);
    }
};

/// Without a cutoff: tau = L v^{1/alpha}. The first panel [0, v1] uses the
/// Gauss-Jacobi weight v^{p/alpha}, which absorbs the endpoint power; the
/// remaining panels grow geometrically by 4 up to v = 1, so that factors smooth
/// in tau but not in v (such as 1/t) stay resolved. The product power
/// alpha-1+p must exceed -1. With a cutoff epsilon > 0 a single Gauss-Legendre
/// panel covers [epsilon, L] through tau = epsilon (L/epsilon)^v.
inline TimeRule make_time_rule(double alpha, double L, int n, double endpoint_power, double epsilon = 0.0) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError(detail::concat("alpha must lie in (0,1], got ", alpha));
    if (!(L > 0.0)) throw DomainError(detail::concat("log-time length must be > 0, got ", L));
    if (n < 2) throw ParameterError(detail::concat("time rule needs at least 2 nodes, got ", n));
    if (epsilon < 0.0) throw ParameterError(detail::concat("epsilon cutoff must be >= 0, got ", epsilon));
    TimeRule r;
    r.alpha = alpha;
    r.endpoint_power = endpoint_power;
    r.epsilon = epsilon;
    r.L = L;
    r.tau.resize(n);
    r.weights.resize(n);
    if (epsilon > 0.0) {
        if (!(epsilon < L))
            throw ParameterError(detail::concat("epsilon cutoff ", epsilon, " must be below the log-time length ", L));
        const double span = std::log(L / epsilon);
        const auto g = gauss_legendre_on(n, 0.0, 1.0);
        for (int j = 0; j < n; ++j) {
            r.tau[j] = epsilon * std::exp(span * g.nodes[j]);
            r.weights[j] = g.weights[j] * r.tau[j] * span;
        }
        return r;
    }
    const double q = endpoint_power / alpha;
    if (!(q > -1.0))
        throw DivergenceError(detail::concat(
            "time integral diverges: integrand ~ tau^", alpha - 1 + endpoint_power, " at the horizon (alpha=", alpha,
            "); configure an epsilon cutoff to integrate over [epsilon, L] instead"));
    // Alpha = 1 integrands are smooth in v; otherwise panel when nodes allow.
    const int P = alpha == 1.0 ? 1 : std::clamp(n / 32, 1, 4);
    r.panel_edges.assign(P + 1, 0.0);
    r.panel_start.assign(P, 0);
    for (int k = 1; k <= P; ++k) r.panel_edges[k] = std::pow(4.0, k - P);
    // Rule for int_0^1 v^q psi(v) dv, then w = omega (L/alpha) v^{1/alpha - 1 - q}.
    std::vector<double> v(n), om(n);
    int at = 0;
    for (int k = 0; k < P; ++k) {
        const int m = k + 1 < P ? n / P : n - at;
        r.panel_start[k] = at;
        const double lo = r.panel_edges[k], hi = r.panel_edges[k + 1];
        if (k == 0) {
            const auto g = gauss_jacobi_unit(m, q);
            for (int j = 0; j < m; ++j) {
                v[at + j] = hi * g.nodes[j];
                om[at + j] = g.weights[j] * std::pow(hi, q + 1.0);
            }
        } else {
            const auto g = gauss_legendre_on(m, lo, hi);
            for (int j = 0; j < m; ++j) {
                v[at + j] = g.nodes[j];
                om[at + j] = g.weights[j] * std::pow(g.nodes[j], q);
            }
        }
        at += m;
    }
    const double e = 1.0 / alpha - 1.0 - q;
    for (int j = 0; j < n; ++j) {
        r.tau[j] = L * std::pow(v[j], 1.0 / alpha);
        r.weights[j] = om[j] * (L / alpha) * std::pow(v[j], e);
    }
    return r;
}

/// Vector-valued control u(t) in R^m sampled on the nodes of a TimeRule.
/// Between nodes u = tau^p P(v), where v is the rule's Gauss variable and P is
/// the barycentric polynomial interpolant through the nodes of the panel
/// containing v. Below a cutoff u = 0.
class ControlSignal {
public:
    ControlSignal(LogTimeWindow window, TimeRule rule, Eigen::MatrixXd values)
        : window_(window), rule_(std::move(rule)), values_(std::move(values)) {
        if (values_.cols() != static_cast<Eigen::Index>(rule_.size()))
            throw ConfigError(detail::concat("control has ", values_.cols(), " samples for ", rule_.size(), " nodes"));
        if (values_.rows() < 1) throw ConfigError("control needs at least one channel");
        if (!values_.allFinite()) throw DomainError("control values must be finite");
        const double L = window_.log_length();
        if (std::abs(rule_.L - L) > 1e-12 * L) throw ConfigError("control grid was built for a different window");
        for (double tau : rule_.tau)
            if (!(tau > 0.0 && tau <= L * (1 + 1e-12))) throw DomainError("control grid leaves (0, L]");
        const auto n = static_cast<Eigen::Index>(rule_.size());
        v_.resize(n);
        for (Eigen::Index j = 0; j < n; ++j) v_(j) = rule_.variable(rule_.tau[j]);
        // Barycentric weights 1/prod(v_j - v_k) within each panel, in log form.
        bary_.resize(n);
        for (std::size_t p = 0; p < rule_.panels(); ++p) {
            const auto [lo, hi] = panel_range(p);
            double top = -std::numeric_limits<double>::infinity();
            for (Eigen::Index j = lo; j < hi; ++j) {
                double lw = 0.0;
                int sign = 1;
                for (Eigen::Index k = lo; k < hi; ++k) {
                    if (k == j) continue;
                    const double d = v_(j) - v_(k);
                    if (d == 0.0) throw DomainError("control grid has repeated nodes");
                    lw -= std::log(std::abs(d));
                    if (d < 0) sign = -sign;
                }
                bary_(j) = lw;
                top = std::max(top, lw);
                sign_.push_back(sign);
            }
            for (Eigen::Index j = lo; j < hi; ++j) bary_(j) = sign_[static_cast<std::size_t>(j)] * std::exp(bary_(j) - top);
        }
        scaled_ = values_;
        for (Eigen::Index j = 0; j < n; ++j)
            scaled_.col(j) /= std::pow(rule_.tau[static_cast<std::size_t>(j)], rule_.endpoint_power);
    }

    /// Samples f(t) (returning one value per channel) on the rule nodes.
    template <class F>
    static ControlSignal sample(const LogTimeWindow& window, const TimeRule& rule, int channels, const F& f) {
        Eigen::MatrixXd v(channels, static_cast<Eigen::Index>(rule.size()));
        for (std::size_t j = 0; j < rule.size(); ++j) {
            const Eigen::VectorXd u = f(window.time_from_end(rule.tau[j]));
            if (u.size() != channels) throw ConfigError("control callable returned the wrong channel count");
            v.col(static_cast<Eigen::Index>(j)) = u;
        }
        return ControlSignal(window, rule, std::move(v));
    }

    static ControlSignal zero(const LogTimeWindow& window, const TimeRule& rule, int channels) {
        return ControlSignal(window, rule, Eigen::MatrixXd::Zero(channels, static_cast<Eigen::Index>(rule.size())));
    }

    const LogTimeWindow& window() const noexcept { return window_; }
    const TimeRule& rule() const noexcept { return rule_; }
    const Eigen::MatrixXd& values() const noexcept { return values_; }
    int channels() const noexcept { return static_cast<int>(values_.rows()); }
    std::size_t size() const noexcept { return rule_.size(); }

    /// Node times t_j = b exp(-tau_j).
    std::vector<double> times() const {
        std::vector<double> t(rule_.size());
        for (std::size_t j = 0; j < t.size(); ++j) t[j] = window_.time_from_end(rule_.tau[j]);
        return t;
    }

    /// Channel values at time t in [a, b].
    Eigen::VectorXd at(double t) const {
        if (t < window_.a() * (1 - 1e-14) || t > window_.b())
            throw DomainError(detail::concat("control evaluated outside [", window_.a(), ", ", window_.b(), "]: t=", t));
        return at_tau(std::max(0.0, window_.until_end(t)));
    }

    Eigen::VectorXd at_tau(double tau) const {
        if (rule_.has_cutoff() && tau < rule_.epsilon) return Eigen::VectorXd::Zero(channels());
        if (!(tau > 0.0) && rule_.endpoint_power < 0.0)
            throw DomainError("control is singular at t = b; evaluate strictly inside the window");
        const double v = rule_.variable(tau);
        std::size_t p = 0;
        while (p + 1 < rule_.panels() && v > rule_.panel_edges[p + 1]) ++p;
        const auto [lo, hi] = panel_range(p);
        Eigen::VectorXd num = Eigen::VectorXd::Zero(channels());
        double den = 0.0;
        for (Eigen::Index j = lo; j < hi; ++j) {
            const double d = v - v_(j);
            if (d == 0.0) return values_.col(j);
            const double c = bary_(j) / d;
            num += c * scaled_.col(j);
            den += c;
        }
        return (tau > 0.0 ? std::pow(tau, rule_.endpoint_power) : 1.0) * num / den;
    }

    ControlSignal operator+(const ControlSignal& o) const {
        check_compatible(o);
        return ControlSignal(window_, rule_, values_ + o.values_);
    }
    ControlSignal operator*(double c) const { return ControlSignal(window_, rule_, c * values_); }

private:
    std::pair<Eigen::Index, Eigen::Index> panel_range(std::size_t p) const {
        const Eigen::Index lo = rule_.panel_start[p];
        const Eigen::Index hi = p + 1 < rule_.panels() ? rule_.panel_start[p + 1] : static_cast<Eigen::Index>(rule_.size());
        return {lo, hi};
    }
    void check_compatible(const ControlSignal& o) const {
        if (o.rule_.tau != rule_.tau || o.channels() != channels() || !(o.window_ == window_))
            throw ConfigError("control signals live on different grids");
    }

    LogTimeWindow window_;
    TimeRule rule_;
    Eigen::MatrixXd values_;
    Eigen::MatrixXd scaled_;
    Eigen::VectorXd v_;
    Eigen::VectorXd bary_;
    std::vector<int> sign_;
};

/// Mode coefficients of the state at one time.
struct SpectralState {
    Eigen::VectorXd coefficients;
    double time = 0.0;
    std::vector<std::array<int, 2>> modes;

    static SpectralState zero(const SpectralBasis& basis, double t) {
        return make(basis, Eigen::VectorXd::Zero(basis.size()), t);
    }
    static SpectralState make(const SpectralBasis& basis, Eigen::VectorXd c, double t) {
        if (c.size() != basis.size())
            throw ConfigError(detail::concat("state has ", c.size(), " coefficients, basis has ", basis.size()));
        if (!c.allFinite()) throw DomainError("state coefficients must be finite");
        SpectralState s;
        s.coefficients = std::move(c);
        s.time = t;
        s.modes.reserve(basis.size());
        for (const auto& m : basis.modes()) s.modes.push_back(m.index);
        return s;
    }
    void check_basis(const SpectralBasis& basis) const {
        if (static_cast<int>(modes.size()) != basis.size())
            throw ConfigError("state and basis have different mode lists");
        for (int i = 0; i < basis.size(); ++i)
            if (modes[i] != basis.mode(i).index) throw ConfigError("state and basis have different mode lists");
    }
};

struct SolverOptions {
    /// Gauss nodes for forced solutions at times t < b and for callable controls;
    /// split in halves over geometric panels when the spectrum is stiff.
    int time_nodes = 64;
};

/// kappa_j(tau_k) = tau_k^{alpha-1} E_{alpha,alpha}(-lambda_j tau_k^alpha), N x n.
inline Eigen::MatrixXd kernel_matrix(const Eigen::VectorXd& lambdas, double alpha, const std::vector<double>& taus) {
    MLParams{alpha, alpha}.validate();
    Eigen::MatrixXd K(lambdas.size(), static_cast<Eigen::Index>(taus.size()));
    parallel_for(static_cast<std::size_t>(lambdas.size()), [&](std::size_t j) {
        for (std::size_t k = 0; k < taus.size(); ++k) {
            const double ta = std::pow(taus[k], alpha);
            K(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                ta / taus[k] * detail::ml_eval(alpha, alpha, -lambdas(static_cast<Eigen::Index>(j)) * ta, MLOptions{});
        }
    });
    return K;
}

namespace detail {

inline double check_forced_time(const LogTimeWindow& w, double t) {
    if (!(t > w.a()) || t > w.b() * (1 + 1e-14))
        throw DomainError(concat("forced solution needs t in (", w.a(), ", ", w.b(), "], got ", t));
    return std::min(t, w.b());
}

// z_j(t) = sum_i D_ij int_0^T s^{alpha-1} E(-lambda_j s^alpha) u_i(t e^{-s}) ds with
// s = T w^{1/alpha}, so that s^{alpha-1} ds = (T^alpha/alpha) dw. The kernel in w
// varies on the scale 1/(lambda T^alpha), so [0, 1] is split into geometric
// panels 4^{-k} down to that scale, each with its own Gauss-Legendre rule.
inline QuadratureRule forced_panels(double stiffness, int nodes) {
    std::vector<double> cuts{1.0};
    while (cuts.back() * stiffness > 0.25 && cuts.size() < 40) cuts.push_back(cuts.back() / 4.0);
    cuts.push_back(0.0);
    const int per = std::max(8, nodes / 2);
    QuadratureRule r;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const auto g = gauss_legendre_on(per, cuts[k + 1], cuts[k]);
        r.nodes.insert(r.nodes.end(), g.nodes.begin(), g.nodes.end());
        r.weights.insert(r.weights.end(), g.weights.begin(), g.weights.end());
    }
    return r;
}

template <class U>
Eigen::VectorXd forced_by_substitution(const Eigen::MatrixXd& D, const Eigen::VectorXd& lambdas, double alpha,
                                       double t, double T, const U& u, int nodes) {
    const double Ta = std::pow(T, alpha);
    const auto g = forced_panels(lambdas.size() ? lambdas.maxCoeff() * Ta : 0.0, nodes);
    const auto nq = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd Us(D.rows(), nq);
    for (Eigen::Index q = 0; q < nq; ++q) {
        const double s = T * std::pow(g.nodes[q], 1.0 / alpha);
        Us.col(q) = u(t * std::exp(-s));
    }
    const Eigen::MatrixXd P = D.transpose() * Us;  // N x nq
    Eigen::VectorXd z = Eigen::VectorXd::Zero(lambdas.size());
    parallel_for(static_cast<std::size_t>(lambdas.size()), [&](std::size_t jj) {
        const auto j = static_cast<Eigen::Index>(jj);
        double acc = 0.0;
        for (Eigen::Index q = 0; q < nq; ++q)
            acc += g.weights[q] * ml_eval(alpha, alpha, -lambdas(j) * Ta * g.nodes[q], MLOptions{}) * P(j, q);
        z(j) = acc * Ta / alpha;
    });
    return z;
}

}  // namespace detail

/// Forced mild solution from zero initial data, actuator coefficients D (m x N).
/// At t = b the control's own rule is used, so sampled values enter without
/// interpolation; earlier times integrate the interpolated control.
inline SpectralState forced_solution(const Eigen::MatrixXd& D, const SpectralBasis& basis, const ControlSignal& u,
                                     double alpha, double t, const SolverOptions& opt = {}) {
    const auto& w = u.window();
    t = detail::check_forced_time(w, t);
    if (D.rows() != u.channels())
        throw ConfigError(detail::concat("control has ", u.channels(), " channels but there are ", D.rows(), " actuators"));
    if (D.cols() != basis.size()) throw ConfigError("actuator coefficients do not match the basis");
    MLParams{alpha, alpha}.validate();
    const Eigen::VectorXd lambdas = basis.eigenvalues();
    if (t == w.b()) {
        const auto& r = u.rule();
        if (r.alpha != alpha)
            throw ConfigError(detail::concat("control grid was built for alpha=", r.alpha, ", solving with ", alpha));
        const Eigen::MatrixXd K = kernel_matrix(lambdas, alpha, r.tau);
        Eigen::MatrixXd Uw = u.values();
        for (std::size_t k = 0; k < r.size(); ++k) Uw.col(static_cast<Eigen::Index>(k)) *= r.weights[k];
        // z_j = sum_k K_jk (D^T U w)_jk
        const Eigen::MatrixXd P = D.transpose() * Uw;
        return SpectralState::make(basis, K.cwiseProduct(P).rowwise().sum(), t);
    }
    auto uf = [&](double s) { return u.at(s); };
    return SpectralState::make(
        basis, detail::forced_by_substitution(D, lambdas, alpha, t, w.since_start(t), uf, opt.time_nodes), t);
}

/// Forced solution for a control given as a callable t -> R^m.
template <class U>
    requires std::invocable<const U&, double>
SpectralState forced_solution(const Eigen::MatrixXd& D, const SpectralBasis& basis, const U& u, double alpha,
                              const LogTimeWindow& window, double t, const SolverOptions& opt = {}) {
    t = detail::check_forced_time(window, t);
    if (D.cols() != basis.size()) throw ConfigError("actuator coefficients do not match the basis");
    MLParams{alpha, alpha}.validate();
    auto checked = [&](double s) -> Eigen::VectorXd {
        Eigen::VectorXd v = u(s);
        if (v.size() != D.rows())
            throw ConfigError(detail::concat("control has ", v.size(), " channels but there are ", D.rows(), " actuators"));
        return v;
    };
    return SpectralState::make(basis,
                               detail::forced_by_substitution(D, basis.eigenvalues(), alpha, t, window.since_start(t),
                                                              checked, opt.time_nodes),
                               t);
}

inline SpectralState forced_solution(const ActuatorSet& acts, const SpectralBasis& basis, const ControlSignal& u,
                                     double alpha, double t, const SolverOptions& opt = {}) {
    if (static_cast<int>(acts.size()) != u.channels())
        throw ConfigError(detail::concat("control has ", u.channels(), " channels but there are ", acts.size(), " actuators"));
    return forced_solution(actuator_coefficients(acts, basis), basis, u, alpha, t, opt);
}

/// z_j(t) = E_alpha(-lambda_j (log t/a)^alpha) z0_j.
inline SpectralState free_solution(const Eigen::VectorXd& z0, const SpectralBasis& basis, double alpha,
                                   const LogTimeWindow& window, double t) {
    if (z0.size() != basis.size()) throw ConfigError("initial state does not match the basis");
    Eigen::VectorXd z(z0.size());
    for (int j = 0; j < basis.size(); ++j) z(j) = free_propagator(alpha, basis.mode(j).lambda, window, t) * z0(j);
    return SpectralState::make(basis, std::move(z), t);
}

/// phi_j(t) = (log b/t)^{alpha-1} E_{alpha,alpha}(-lambda_j (log b/t)^alpha) c_j.
inline SpectralState adjoint_solution(const Eigen::VectorXd& c, const SpectralBasis& basis, double alpha,
                                      const LogTimeWindow& window, double t) {
    if (c.size() != basis.size()) throw ConfigError("adjoint datum does not match the basis");
    MLParams{alpha, alpha}.validate();
    if (t < window.a() || t > window.b())
        throw DomainError(detail::concat("adjoint needs t in [", window.a(), ", ", window.b(), "), got ", t));
    const double tau = window.until_end(t);
    if (!(tau > 0.0) && alpha < 1.0)
        throw DomainError("adjoint state is singular at t = b for alpha < 1; use interior times");
    Eigen::VectorXd phi(c.size());
    for (int j = 0; j < basis.size(); ++j) {
        const double lam = basis.mode(j).lambda;
        const double k = alpha == 1.0 ? std::exp(-lam * tau) : kernel_kappa({alpha, lam, window}, tau);
        phi(j) = k * c(j);
    }
    return SpectralState::make(basis, std::move(phi), t);
}

/// p_omega grad z(b) in the restricted gradient span: coefficients and Gram.
struct FinalGradient {
    Eigen::VectorXd coefficients;
    GradientBasisGram gram;

    double norm_squared() const { return coefficients.dot(gram.gamma * coefficients); }
};

inline FinalGradient final_gradient(const SpectralState& state, const SpectralBasis& basis, const Region& region,
                                    const LogTimeWindow& window) {
    state.check_basis(basis);
    if (std::abs(state.time - window.b()) > 1e-12 * window.b())
        throw DomainError(detail::concat("final gradient needs the state at b=", window.b(), ", got t=", state.time));
    return {state.coefficients, gradient_gram(basis, region)};
}

/// CSV: one row per mode (k, l, lambda, coefficient).
inline void write_state_csv(std::ostream& os, const SpectralState& state, const SpectralBasis& basis) {
    state.check_basis(basis);
    os.precision(17);
    os << "k,l,lambda,coefficient\n";
    for (int j = 0; j < basis.size(); ++j)
        os << basis.mode(j).index[0] << ',' << basis.mode(j).index[1] << ',' << basis.mode(j).lambda << ','
           << state.coefficients(j) << '\n';
}

/// CSV of the field sum_j z_j alpha_j on a uniform grid over the domain.
inline void write_field_csv(std::ostream& os, const SpectralState& state, const SpectralBasis& basis, int nx, int ny = 1) {
    state.check_basis(basis);
    const auto& ax = basis.domain().axes;
    os.precision(17);
    os << (basis.dim() == 2 ? "x1,x2,value\n" : "x1,value\n");
    const int my = basis.dim() == 2 ? ny : 1;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < my; ++j) {
            Point x{ax[0].lo + ax[0].length() * i / std::max(1, nx - 1), 0.0};
            if (basis.dim() == 2) x[1] = ax[1].lo + ax[1].length() * j / std::max(1, my - 1);
            double v = 0.0;
            for (int m = 0; m < basis.size(); ++m) v += state.coefficients(m) * basis.eval(m, x);
            os << x[0] << ',';
            if (basis.dim() == 2) os << x[1] << ',';
            os << v << '\n';
        }
}

}  // namespace hadactl
