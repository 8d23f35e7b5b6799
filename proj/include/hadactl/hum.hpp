#pragma once

/// Minimum-energy (HUM) controls reaching a prescribed restricted gradient at
/// the horizon, the G-norm, and an independent optimality check.
///
/// Coordinates: a gradient-span element g = sum_j g_j psi_j is stored by its
/// coefficients; the G inner product is g^T Gamma h. With Gamma = R R^T on its
/// numerical range, hat(g) = R^T g are orthonormal coordinates and the HUM
/// operator becomes the symmetric S = R^T W R.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "hadactl/controllability.hpp"
#include "hadactl/error.hpp"
#include "hadactl/solver.hpp"
#include "hadactl/spectral.hpp"

namespace hadactl {

/// Which final-time quantity is steered on omega: the gradient (the default)
/// or the state itself, used for cost comparisons.
enum class SteeredQuantity { gradient, state };

/// Mass Gram matrix int_omega alpha_j alpha_k.
inline Eigen::MatrixXd state_gram(const SpectralBasis& basis, const Region& region) {
    region.validate(basis.domain());
    const int N = basis.size();
    if (region.measure() <= 0.0) return Eigen::MatrixXd::Zero(N, N);
    const auto q = region_quadrature(region, basis.dim(), basis.quadrature_order(region));
    Eigen::MatrixXd V(static_cast<Eigen::Index>(q.points.size()), N);
    for (std::size_t p = 0; p < q.points.size(); ++p)
        for (int j = 0; j < N; ++j) V(static_cast<Eigen::Index>(p), j) = std::sqrt(q.weights[p]) * basis.eval(j, q.points[p]);
    Eigen::MatrixXd M = V.transpose() * V;
    return 0.5 * (M + M.transpose());
}

struct HumProblem {
    ControlSystem system;
    Eigen::VectorXd target;  // f: coefficients over psi_j (or alpha_j|omega for the state problem)
    Eigen::VectorXd y0 = {};  // initial mode coefficients; empty means zero
    SteeredQuantity steer = SteeredQuantity::gradient;
    int control_nodes = 256;
    int check_nodes = 128;
    double truncation = 1e-12;
};

struct HumSolution {
    Eigen::VectorXd g;       // element of G
    Eigen::VectorXd c;       // adjoint datum, c = Gamma g
    Eigen::VectorXd rhs;     // f minus the free evolution at b
    ControlSignal control;   // u* = H* c on the control grid
    double energy = 0.0;     // J(u*)
    double g_norm_squared = 0.0;  // on an independent grid
    double residual = 0.0;   // ||p_omega grad z(b) - f||_G / ||f||_G
    SpectralState final_state;
    Eigen::MatrixXd gamma;
    Eigen::MatrixXd W;       // HH* on the control grid
    double condition_number = std::numeric_limits<double>::infinity();
    int truncated = 0;       // pencil directions dropped by the solve
    int dropped_directions = 0;  // Gamma-null directions
    bool ill_posed = false;
    double epsilon = 0.0;
};

inline Eigen::MatrixXd steering_gram(const ControlSystem& sys, SteeredQuantity s) {
    return s == SteeredQuantity::gradient ? gradient_gram(sys.basis, sys.region).gamma : state_gram(sys.basis, sys.region);
}

/// ||g||_G^2 = int_a^b |(1/t) B* K(t) grad* p_omega* g|^2 dt on its own grid.
inline double g_norm(const ControlSystem& sys, const Eigen::VectorXd& g, const Eigen::MatrixXd& gamma, int nodes = 128) {
    if (g.size() != sys.modes() || gamma.rows() != sys.modes()) throw ConfigError("G element does not match the basis");
    if (!g.allFinite()) throw DomainError("G element must be finite");
    const TimeRule rule = control_rule(sys, nodes);
    return energy(adjoint_control(sys, gamma * g, rule));
}

inline double g_norm(const ControlSystem& sys, const Eigen::VectorXd& g, int nodes = 128) {
    return g_norm(sys, g, gradient_gram(sys.basis, sys.region).gamma, nodes);
}

inline HumSolution solve_hum(const HumProblem& pb) {
    const auto& sys = pb.system;
    sys.validate();
    const int N = sys.modes();
    if (pb.target.size() != N)
        throw ConfigError(detail::concat("target has ", pb.target.size(), " coefficients, basis has ", N));
    if (!pb.target.allFinite()) throw DomainError("target must be finite");
    Eigen::VectorXd y0 = pb.y0.size() ? pb.y0 : Eigen::VectorXd::Zero(N);
    if (y0.size() != N) throw ConfigError("initial state does not match the basis");

    const TimeRule rule = control_rule(sys, pb.control_nodes);
    const Eigen::MatrixXd gamma = steering_gram(sys, pb.steer);
    int dropped = 0;
    const Eigen::MatrixXd R = gamma_range_root(gamma, &dropped);
    const Eigen::MatrixXd W = mode_gramian(sys, rule);

    const Eigen::VectorXd free_b = free_solution(y0, sys.basis, sys.alpha, sys.window, sys.window.b()).coefficients;
    const Eigen::VectorXd rhs = pb.target - free_b;

    // S hat(g) = R^T rhs by a truncated symmetric eigen-solve.
    const Eigen::MatrixXd S = R.transpose() * W * R;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()));
    const Eigen::VectorXd ev = es.eigenvalues();
    const Eigen::VectorXd b = R.transpose() * rhs;
    const double top = ev.size() ? std::max(0.0, ev.maxCoeff()) : 0.0;
    Eigen::VectorXd coef = es.eigenvectors().transpose() * b;
    int truncated = 0;
    double smallest_kept = top;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > pb.truncation * top && ev(i) > 0.0) {
            coef(i) /= ev(i);
            smallest_kept = std::min(smallest_kept, ev(i));
        } else {
            coef(i) = 0.0;
            ++truncated;
        }
    }
    const Eigen::VectorXd ghat = es.eigenvectors() * coef;

    HumSolution sol{.g = Eigen::VectorXd::Zero(N), .c = R * ghat, .rhs = rhs,
                    .control = ControlSignal::zero(sys.window, rule, std::max(1, sys.channels())),
                    .final_state = SpectralState::zero(sys.basis, sys.window.b()), .gamma = {}, .W = {}};
    // g with R^T g = hat(g): g = V Lambda^{-1/2} hat(g), i.e. R (R^T R)^{-1} hat(g).
    if (R.cols() > 0) sol.g = R * (R.transpose() * R).ldlt().solve(ghat);
    sol.gamma = gamma;
    sol.W = W;
    sol.truncated = truncated;
    sol.dropped_directions = dropped;
    sol.epsilon = sys.epsilon;
    sol.condition_number = (top > 0.0 && truncated == 0) ? top / smallest_kept : std::numeric_limits<double>::infinity();
    sol.ill_posed = top <= 0.0 || truncated > 0 || dropped > 0;
    if (sys.channels() == 0) return sol;

    sol.control = adjoint_control(sys, sol.c, rule);
    sol.energy = energy(sol.control);
    sol.g_norm_squared = energy(adjoint_control(sys, sol.c, control_rule(sys, pb.check_nodes)));

    const Eigen::VectorXd zb = apply_H(sys, sol.control).coefficients + free_b;
    sol.final_state = SpectralState::make(sys.basis, zb, sys.window.b());
    const double fn = (R.transpose() * pb.target).norm();
    const double rn = (R.transpose() * (zb - pb.target)).norm();
    sol.residual = fn > 0.0 ? rn / fn : rn;
    return sol;
}

struct MinimalityReport {
    int trials = 0;
    int passed = 0;
    bool kernel_available = false;
    double worst_gap = 0.0;             // min over trials of J(u*+w) - J(u*)
    double worst_constraint_drift = 0.0;  // relative change of p_omega grad H(u*+w)
    double pseudo_inverse_energy = 0.0;
    double pseudo_inverse_relative_gap = 0.0;
    bool pseudo_inverse_agrees = false;
    bool pass = false;
};

/// Checks optimality of u* on its grid: admissible perturbations u* + w with w
/// in the kernel of the discretized input-to-gradient map never lower the
/// energy, and J(u*) matches the SVD minimal-norm solution of that map.
inline MinimalityReport verify_minimality(const HumProblem& pb, const HumSolution& sol, int trials,
                                          unsigned seed = 20261019) {
    const auto& sys = pb.system;
    const auto& rule = sol.control.rule();
    const int m = sys.channels();
    const auto n = static_cast<Eigen::Index>(rule.size());
    MinimalityReport rep;
    rep.trials = trials;
    if (m == 0) return rep;

    const Eigen::MatrixXd R = gamma_range_root(sol.gamma);
    const Eigen::MatrixXd K = kernel_matrix(sys.basis.eigenvalues(), sys.alpha, rule.tau);
    // Energy weights rho_k = w_k t_k; variables v = sqrt(rho) u, stacked channel-fastest.
    Eigen::VectorXd rho(n);
    for (Eigen::Index k = 0; k < n; ++k) rho(k) = rule.weights[k] * sys.window.time_from_end(rule.tau[k]);
    // A: v -> R^T z(b),  z_j = sum_k w_k K_jk (D^T u_k)_j.
    Eigen::MatrixXd A(R.cols(), m * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::MatrixXd block =
            R.transpose() * (K.col(k).asDiagonal() * sys.D.transpose()) * (rule.weights[k] / std::sqrt(rho(k)));
        A.middleCols(k * m, m) = block;
    }
    Eigen::VectorXd ustar(m * n);
    for (Eigen::Index k = 0; k < n; ++k) ustar.segment(k * m, m) = sol.control.values().col(k) * std::sqrt(rho(k));
    const Eigen::VectorXd y = A * ustar;
    const double Jstar = ustar.squaredNorm();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) rank += s(0) > 0.0 && s(i) > 1e-12 * s(0);
    Eigen::VectorXd vmin = Eigen::VectorXd::Zero(m * n);
    for (int i = 0; i < rank; ++i) vmin += svd.matrixV().col(i) * (svd.matrixU().col(i).dot(y) / s(i));
    rep.pseudo_inverse_energy = vmin.squaredNorm();
    const double scale = std::max(Jstar, rep.pseudo_inverse_energy);
    rep.pseudo_inverse_relative_gap = scale > 0.0 ? std::abs(Jstar - rep.pseudo_inverse_energy) / scale : 0.0;
    rep.pseudo_inverse_agrees = rep.pseudo_inverse_relative_gap <= 1e-4 || (scale == 0.0);

    rep.kernel_available = rank < m * n;
    if (rep.kernel_available && trials > 0) {
        const Eigen::MatrixXd Vr = svd.matrixV().leftCols(rank);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> n01;
        rep.worst_gap = std::numeric_limits<double>::infinity();
        const double unorm = std::max(std::sqrt(Jstar), 1.0);
        const double ynorm = std::max(y.norm(), 1e-300);
        for (int t = 0; t < trials; ++t) {
            Eigen::VectorXd x(m * n);
            for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = n01(rng);
            x -= Vr * (Vr.transpose() * x);
            x -= Vr * (Vr.transpose() * x);
            x *= unorm * 0.5 * (1 + t % 5) / x.norm();
            const Eigen::VectorXd v = ustar + x;
            const double gap = v.squaredNorm() - Jstar;
            rep.worst_gap = std::min(rep.worst_gap, gap);
            rep.worst_constraint_drift = std::max(rep.worst_constraint_drift, (A * v - y).norm() / ynorm);
            rep.passed += gap >= -1e-9;
        }
    }
    rep.pass = rep.pseudo_inverse_agrees && rep.passed == (rep.kernel_available ? trials : 0);
    return rep;
}

}  // namespace hadactl
