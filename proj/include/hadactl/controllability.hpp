#pragma once

/// Input-to-gradient map H, its adjoint, the gradient Gramian with its
/// controllability verdict, the strategic actuator rank test, and the
/// coefficient tables of the two-dimensional zone-actuator example.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hadactl/error.hpp"
#include "hadactl/mittag_leffler.hpp"
#include "hadactl/parallel.hpp"
#include "hadactl/solver.hpp"
#include "hadactl/spectral.hpp"
#include "hadactl/time_window.hpp"

namespace hadactl {

/// Everything that fixes the controlled system: modes, horizon, order,
/// target region and actuators (kept both as geometry and as coefficients).
struct ControlSystem {
    SpectralBasis basis;
    LogTimeWindow window;
    double alpha = 0.5;
    Region region;
    ActuatorSet actuators;
    Eigen::MatrixXd D;  // m x N, d^i_j = <chi_{P_i} d_i, alpha_j>
    double epsilon = 0.0;

    static ControlSystem make(SpectralBasis basis, LogTimeWindow window, double alpha, Region region,
                              ActuatorSet actuators, double epsilon = 0.0) {
        validate_actuators(actuators, basis.domain());
        Eigen::MatrixXd D = actuator_coefficients(actuators, basis);
        ControlSystem s{std::move(basis), window, alpha, std::move(region), std::move(actuators), std::move(D), epsilon};
        s.validate();
        return s;
    }

    /// System given directly by its coefficient matrix (synthetic actuators).
    static ControlSystem from_coefficients(SpectralBasis basis, LogTimeWindow window, double alpha, Region region,
                                           Eigen::MatrixXd D, double epsilon = 0.0) {
        ControlSystem s{std::move(basis), window, alpha, std::move(region), {}, std::move(D), epsilon};
        s.validate();
        return s;
    }

    int channels() const noexcept { return static_cast<int>(D.rows()); }
    int modes() const noexcept { return basis.size(); }

    void validate() const {
        MLParams{alpha, alpha}.validate();
        region.validate(basis.domain(), "omega");
        if (D.cols() != basis.size()) throw ConfigError("actuator coefficients do not match the basis");
        if (!D.allFinite()) throw DomainError("actuator coefficients must be finite");
        if (epsilon < 0.0) throw ParameterError(detail::concat("epsilon cutoff must be >= 0, got ", epsilon));
    }
};

/// Graded control grid on which adjoint-generated controls (power alpha-1 at
/// t = b) and every energy-type integral are evaluated. Refuses alpha <= 1/2
/// unless the system carries an epsilon cutoff.
inline TimeRule control_rule(const ControlSystem& sys, int nodes = 256) {
    try {
        return make_time_rule(sys.alpha, sys.window.log_length(), nodes, sys.alpha - 1.0, sys.epsilon);
    } catch (const DivergenceError&) {
        throw DivergenceError(detail::concat(
            "Gramian and energy integrands ~ (log b/t)^{2(alpha-1)} are not integrable at t = b for alpha=", sys.alpha,
            " <= 1/2; set an explicit epsilon cutoff to integrate over log(b/t) >= epsilon"));
    }
}

/// Hu = z(b): the forced state at the horizon.
inline SpectralState apply_H(const ControlSystem& sys, const ControlSignal& u) {
    if (!(u.window() == sys.window)) throw ConfigError("control lives on a different time window");
    return forced_solution(sys.D, sys.basis, u, sys.alpha, sys.window.b());
}

/// (H* v)(t) = (1/t) (log b/t)^{alpha-1} sum_j E_{alpha,alpha}(-lambda_j (log b/t)^alpha) d_j v_j.
inline Eigen::VectorXd apply_H_adjoint(const ControlSystem& sys, const Eigen::VectorXd& v, double t) {
    if (v.size() != sys.modes()) throw ConfigError("adjoint datum does not match the basis");
    const auto phi = adjoint_solution(v, sys.basis, sys.alpha, sys.window, t);
    return sys.D * phi.coefficients / t;
}

/// H* v sampled on a grid; below an epsilon cutoff the control is zero.
inline ControlSignal adjoint_control(const ControlSystem& sys, const Eigen::VectorXd& v, const TimeRule& rule) {
    if (v.size() != sys.modes()) throw ConfigError("adjoint datum does not match the basis");
    const Eigen::MatrixXd K = kernel_matrix(sys.basis.eigenvalues(), sys.alpha, rule.tau);
    Eigen::MatrixXd U = sys.D * (K.array().colwise() * v.array()).matrix();
    for (std::size_t k = 0; k < rule.size(); ++k)
        U.col(static_cast<Eigen::Index>(k)) /= sys.window.time_from_end(rule.tau[k]);
    return ControlSignal(sys.window, rule, std::move(U));
}

/// Energy int_a^b |u(t)|^2 dt. Controls shaped like the adjoint (power alpha-1)
/// use their own grid; others are integrated through the interpolant with a
/// rule matched to |u|^2 ~ tau^{2p}.
inline double energy(const ControlSignal& u) {
    const auto& r = u.rule();
    const auto& w = u.window();
    auto weight = [&](double tau) { return w.time_from_end(tau); };  // dt = t dtau
    double J = 0.0;
    if (r.has_cutoff() || std::abs(r.endpoint_power - (r.alpha - 1.0)) < 1e-15) {
        for (std::size_t k = 0; k < r.size(); ++k)
            J += r.weights[k] * weight(r.tau[k]) * u.values().col(static_cast<Eigen::Index>(k)).squaredNorm();
        return J;
    }
    // |u|^2 ~ tau^{2p} = tau^{alpha-1+p'} with p' = 2p + 1 - alpha.
    const TimeRule er = make_time_rule(r.alpha, r.L, static_cast<int>(r.size()), 2 * r.endpoint_power + 1 - r.alpha);
    for (std::size_t k = 0; k < er.size(); ++k) J += er.weights[k] * weight(er.tau[k]) * u.at_tau(er.tau[k]).squaredNorm();
    return J;
}

/// The gradient Gramian p_omega grad H H* grad* p_omega* in gradient coordinates:
/// g -> W Gamma g, symmetric in the Gamma inner product. Both factors are kept.
struct GradientGramian {
    std::vector<std::array<int, 2>> modes;
    Eigen::MatrixXd gamma;  // Gram of restricted gradients
    Eigen::MatrixXd W;      // H H* in mode coordinates
    Eigen::VectorXd pencil_eigenvalues;  // of Gamma^{1/2} W Gamma^{1/2} on range(Gamma), ascending
    Eigen::MatrixXd gamma_half;          // Gamma^{1/2} restricted to its range: N x r
    double smallest = 0.0;
    double largest = 0.0;
    double condition_number = std::numeric_limits<double>::infinity();
    int dropped_directions = 0;

    struct Metadata {
        double alpha = 0.0, a = 0.0, b = 0.0, epsilon = 0.0;
        int actuators = 0, time_nodes = 0, space_order = 0;
        std::size_t region_boxes = 0;
    } meta;
};

/// Symmetric square root of Gamma on its numerical range (relative 1e-12).
inline Eigen::MatrixXd gamma_range_root(const Eigen::MatrixXd& gamma, int* dropped = nullptr) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gamma);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double top = ev.size() ? std::max(0.0, ev.maxCoeff()) : 0.0;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > 1e-12 * top && ev(i) > 0.0) keep.push_back(i);
    if (dropped) *dropped = static_cast<int>(ev.size() - static_cast<Eigen::Index>(keep.size()));
    Eigen::MatrixXd R(gamma.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c)
        R.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]) * std::sqrt(ev(keep[c]));
    return R;
}

/// HH* in mode coordinates on a grid: sum_k (w_k / t_k) diag(kappa_k) D^T D diag(kappa_k).
inline Eigen::MatrixXd mode_gramian(const ControlSystem& sys, const TimeRule& rule) {
    const int N = sys.modes();
    const Eigen::MatrixXd K = kernel_matrix(sys.basis.eigenvalues(), sys.alpha, rule.tau);
    const Eigen::MatrixXd DtD = sys.D.transpose() * sys.D;
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(N, N);
    parallel_for(static_cast<std::size_t>(N), [&](std::size_t nn) {
        const auto n = static_cast<Eigen::Index>(nn);
        for (Eigen::Index m = 0; m <= n; ++m) {
            if (DtD(n, m) == 0.0) continue;
            double acc = 0.0;
            for (std::size_t k = 0; k < rule.size(); ++k) {
                const auto kk = static_cast<Eigen::Index>(k);
                acc += rule.weights[k] / sys.window.time_from_end(rule.tau[k]) * K(n, kk) * K(m, kk);
            }
            W(n, m) = DtD(n, m) * acc;
        }
    });
    return W.selfadjointView<Eigen::Lower>();
}

inline GradientGramian assemble_gramian(const ControlSystem& sys, int time_nodes = 256) {
    sys.validate();
    const TimeRule rule = control_rule(sys, time_nodes);
    GradientGramian G;
    for (const auto& m : sys.basis.modes()) G.modes.push_back(m.index);
    const int order = sys.basis.quadrature_order(sys.region);
    G.gamma = gradient_gram(sys.basis, sys.region, order).gamma;
    G.W = mode_gramian(sys, rule);
    G.gamma_half = gamma_range_root(G.gamma, &G.dropped_directions);
    if (G.gamma_half.cols() > 0) {
        const Eigen::MatrixXd S = G.gamma_half.transpose() * G.W * G.gamma_half;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
        G.pencil_eigenvalues = es.eigenvalues();
        G.smallest = G.pencil_eigenvalues(0);
        G.largest = G.pencil_eigenvalues(G.pencil_eigenvalues.size() - 1);
        if (G.smallest > 0.0) G.condition_number = G.largest / G.smallest;
    }
    G.meta = {sys.alpha, sys.window.a(), sys.window.b(), sys.epsilon, sys.channels(), time_nodes, order,
              sys.region.boxes.size()};
    return G;
}

struct VerdictOptions {
    /// Relative positive-definiteness threshold on the pencil eigenvalues.
    double threshold = 1e-10;
    /// Pencils whose largest eigenvalue is below this are treated as zero.
    double absolute_floor = 1e-20;
};

struct ControllabilityVerdict {
    bool controllable = false;
    double margin = 0.0;           // smallest pencil eigenvalue
    double relative_margin = 0.0;  // smallest / largest
    double largest = 0.0;
    double condition_number = std::numeric_limits<double>::infinity();
    /// Truncated exact-controllability constant (smallest eigenvalue)^{-1/2};
    /// not a certificate for the infinite-dimensional system.
    double exact_constant = std::numeric_limits<double>::infinity();
    int dimension = 0;
    int dropped_directions = 0;
    double threshold = 0.0;
};

inline ControllabilityVerdict approx_controllability_verdict(const GradientGramian& G, const VerdictOptions& opt = {}) {
    ControllabilityVerdict v;
    v.threshold = opt.threshold;
    v.dimension = static_cast<int>(G.pencil_eigenvalues.size());
    v.dropped_directions = G.dropped_directions;
    if (v.dimension == 0) return v;
    v.margin = G.smallest;
    v.largest = G.largest;
    v.condition_number = G.condition_number;
    if (G.largest > 0.0) v.relative_margin = G.smallest / G.largest;
    v.controllable = G.largest > opt.absolute_floor && G.smallest > opt.threshold * G.largest;
    if (G.smallest > 0.0) v.exact_constant = 1.0 / std::sqrt(G.smallest);
    return v;
}

// ------------------------------------------------------------ strategic test

struct BucketReport {
    double lambda = 0.0;
    int multiplicity = 0;
    std::vector<Eigen::MatrixXd> D;  // one m x r_k matrix per spatial direction
    std::vector<int> ranks;
    bool pass = false;
};

struct StrategicReport {
    int actuators = 0;
    int max_multiplicity = 0;
    std::vector<BucketReport> buckets;
    bool enough_actuators = false;
    bool all_buckets_pass = false;
    /// n >= 2: injectivity of the stacked bucket maps on the gradient span,
    /// tested at finitely many modes only (a generic verdict).
    std::optional<bool> generic_injective;
    bool strategic = false;
};

/// Singular values above rel * max(s_max, scale); scale lets a block be judged
/// against the matrix it was cut from, so pure rounding noise has rank 0.
inline int numerical_rank(const Eigen::MatrixXd& A, double rel = 1e-10, double scale = 0.0) {
    if (A.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) <= 0.0) return 0;
    const double cut = rel * std::max(s(0), scale);
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) r += s(i) > cut;
    return r;
}

inline StrategicReport strategic_test(const ControlSystem& sys) {
    const auto& basis = sys.basis;
    const int n = basis.dim();
    const int m = sys.channels();
    StrategicReport rep;
    rep.actuators = m;
    // ||d_l alpha_j||_{L2(omega)} per mode and direction.
    const auto q = region_quadrature(sys.region, n, basis.quadrature_order(sys.region));
    Eigen::MatrixXd gnorm = Eigen::MatrixXd::Zero(n, basis.size());
    for (std::size_t p = 0; p < q.points.size(); ++p)
        for (int j = 0; j < basis.size(); ++j) {
            const Vec2 g = basis.grad(j, q.points[p]);
            for (int l = 0; l < n; ++l) gnorm(l, j) += q.weights[p] * g[l] * g[l];
        }
    gnorm = gnorm.cwiseSqrt();
    double scale = 0.0;
    for (int l = 0; l < n; ++l) scale = std::max(scale, (sys.D * gnorm.row(l).asDiagonal()).norm());
    rep.all_buckets_pass = true;
    for (const auto& bucket : basis.buckets()) {
        BucketReport b;
        b.lambda = basis.mode(bucket.front()).lambda;
        b.multiplicity = static_cast<int>(bucket.size());
        rep.max_multiplicity = std::max(rep.max_multiplicity, b.multiplicity);
        b.pass = m >= b.multiplicity;
        for (int l = 0; l < n; ++l) {
            Eigen::MatrixXd Dl(m, b.multiplicity);
            for (int c = 0; c < b.multiplicity; ++c) Dl.col(c) = sys.D.col(bucket[c]) * gnorm(l, bucket[c]);
            const int r = numerical_rank(Dl, 1e-10, scale);
            b.ranks.push_back(r);
            b.pass = b.pass && r == b.multiplicity;
            b.D.push_back(std::move(Dl));
        }
        rep.all_buckets_pass = rep.all_buckets_pass && b.pass;
        rep.buckets.push_back(std::move(b));
    }
    rep.enough_actuators = m >= rep.max_multiplicity;
    if (n == 1) {
        rep.strategic = rep.enough_actuators && rep.all_buckets_pass;
        return rep;
    }
    // Rows (i, bucket) of g -> sum_{j in bucket} d^i_j (Gamma g)_j.
    const auto& buckets = basis.buckets();
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m * buckets.size()), basis.size());
    for (std::size_t k = 0; k < buckets.size(); ++k)
        for (int i = 0; i < m; ++i)
            for (int j : buckets[k]) B(static_cast<Eigen::Index>(k * m + i), j) = sys.D(i, j);
    const auto gamma = gradient_gram(basis, sys.region).gamma;
    const Eigen::MatrixXd R = gamma_range_root(gamma);
    rep.generic_injective = R.cols() > 0 && numerical_rank(B * R) == R.cols();
    rep.strategic = rep.enough_actuators && rep.all_buckets_pass && *rep.generic_injective;
    return rep;
}

// --------------------------------------------------- zone-actuator example

/// M_kl = int_P 2 sin(k pi x1) sin(l pi x2) dx over a region P of [-1,1]^2.
inline double example_M(int k, int l, const Region& P, int order = 0) {
    const double pi = std::numbers::pi;
    auto f = [&](const Point& x) { return 2.0 * std::sin(k * pi * x[0]) * std::sin(l * pi * x[1]); };
    auto one = [](const Point&) { return 1.0; };
    const int n = order > 0 ? order : std::max(16, 2 * std::max(k, l) + 16);
    return region_inner_product(f, one, P, 2, n).value;
}

struct JEntry {
    int k = 0, l = 0, p = 0, q = 0;
    double quadrature = 0.0;
    std::optional<double> closed_form;  // absent where the formula divides by zero
    std::optional<double> relative_discrepancy;
    bool in_parity_regime = false;  // k, l odd and p, q even
};

/// J_klpq = M_kl <z_pq, d/dx1 alpha_kl>_omega with z_pq = sin(p pi x1) cos(q pi x2),
/// next to the closed form 8p/(kl pi) (1/((k+p)pi) - 1/((k-p)pi)) (1/((l+q)pi) - 1/((l-q)pi)).
inline JEntry example_J(int k, int l, int p, int q, const Region& P, const Region& omega) {
    const double pi = std::numbers::pi;
    JEntry e;
    e.k = k;
    e.l = l;
    e.p = p;
    e.q = q;
    e.in_parity_regime = (k % 2 != 0) && (l % 2 != 0) && (p % 2 == 0) && (q % 2 == 0);
    auto z = [&](const Point& x) { return std::sin(p * pi * x[0]) * std::cos(q * pi * x[1]); };
    auto dx1 = [&](const Point& x) { return 2.0 * k * pi * std::cos(k * pi * x[0]) * std::sin(l * pi * x[1]); };
    const int order = std::max(24, 2 * std::max({k, l, p, q}) + 24);
    e.quadrature = example_M(k, l, P) * region_inner_product(z, dx1, omega, 2, order).value;
    if (k != p && l != q) {
        const double cf = 8.0 * p / (k * l * pi) * (1.0 / ((k + p) * pi) - 1.0 / ((k - p) * pi)) *
                          (1.0 / ((l + q) * pi) - 1.0 / ((l - q) * pi));
        e.closed_form = cf;
        if (e.quadrature != 0.0) e.relative_discrepancy = std::abs(cf - e.quadrature) / std::abs(e.quadrature);
    }
    return e;
}

}  // namespace hadactl
