// Acceptance gate: one PASS/FAIL line per criterion with the numbers behind it.
// Exit status is non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hadactl/controllability.hpp"
#include "hadactl/hadamard.hpp"
#include "hadactl/hum.hpp"
#include "oracles.hpp"

using namespace hadactl;

namespace {

const double pi = std::numbers::pi;
const RectDomain square{{Interval{-1, 1}, Interval{-1, 1}}};
const Region omega{{Box{{Interval{0, 1}, Interval{0, 1}}}}};
const LogTimeWindow W(2.0, 4.0);

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double rel(double x, double ref) { return std::abs(x - ref) / std::max(std::abs(ref), 1e-300); }

// ------------------------------------------------------------------ 1

Outcome negative_result() {
    const Region whole = Region::whole(square);
    double maxM = 0.0;
    for (int k = 1; k <= 8; ++k)
        for (int l = 1; l <= 8; ++l) maxM = std::max(maxM, std::abs(example_M(k, l, whole)));
    // The library's own actuator coefficients for chi_Omega in the integer_sine basis.
    const SpectralBasis basis(square, 8, BasisKind::integer_sine);
    const auto sys = ControlSystem::make(basis, W, 0.5, whole, {Actuator{whole, ConstantDistribution{1.0}}}, 1e-3);
    const double maxD = sys.D.cwiseAbs().maxCoeff();
    const auto v = approx_controllability_verdict(assemble_gramian(sys));
    return {maxM <= 1e-10 && maxD <= 1e-10 && v.largest <= 1e-20 && !v.controllable,
            fmt("max|M_kl| %.2e, max|d_kl| %.2e, largest eigenvalue %.2e, verdict %s", maxM, maxD, v.largest,
                v.controllable ? "CONTROLLABLE" : "NOT")};
}

// ------------------------------------------------------------------ 2

Outcome positive_result() {
    const SpectralBasis basis(square, 6, BasisKind::integer_sine);
    const auto sys = ControlSystem::make(basis, W, 0.7, omega, {Actuator{omega, ConstantDistribution{1.0}}});
    const auto v = approx_controllability_verdict(assemble_gramian(sys));
    const auto s = strategic_test(sys);
    int off_rank = 0;
    for (const auto& b : s.buckets)
        for (int r : b.ranks) off_rank += r != 1;
    const bool ok = v.controllable && v.relative_margin > 1e-8 && s.max_multiplicity == 1 && s.all_buckets_pass;
    return {ok, fmt("relative margin %.2e (verdict %s), max r_k %d, %d of %zu buckets pass, %d blocks off rank 1",
                    v.relative_margin, v.controllable ? "CONTROLLABLE" : "NOT", s.max_multiplicity,
                    static_cast<int>(std::count_if(s.buckets.begin(), s.buckets.end(),
                                                   [](const BucketReport& b) { return b.pass; })),
                    s.buckets.size(), off_rank)};
}

// ------------------------------------------------------------------ 3

Outcome j_table() {
    int nonzero = 0, total = 0;
    double worst = 0.0, smallest = INFINITY;
    for (int k : {1, 3, 5})
        for (int l : {1, 3, 5})
            for (int p : {2, 4})
                for (int q : {2, 4}) {
                    const auto e = example_J(k, l, p, q, omega, omega);
                    ++total;
                    if (std::isfinite(e.quadrature) && e.quadrature != 0.0) ++nonzero;
                    smallest = std::min(smallest, std::abs(e.quadrature));
                    if (e.relative_discrepancy) worst = std::max(worst, *e.relative_discrepancy);
                }
    return {nonzero == total, fmt("%d/%d quadrature entries nonzero (min |J| %.3e); closed form differs by up to %.2f "
                                  "relative (reported, not scored)",
                                  nonzero, total, smallest, worst)};
}

// ------------------------------------------------------------------ 4

double right_integral_oracle(const std::function<double(double)>& f, double alpha, double t) {
    const double V = std::log(W.b() / t);
    if (V <= 0.0) return 0.0;
    auto g = [&](double u) { return f(t * std::exp(std::pow(u, 1.0 / alpha))); };
    return oracle::integrate(g, 0.0, std::pow(V, alpha)) / (alpha * std::tgamma(alpha));
}

// -delta I_right^{1-alpha} f by a five-point stencil in log-time on the oracle.
double right_derivative_oracle(const std::function<double(double)>& f, double alpha, double t) {
    const double h = 2e-4;
    auto F = [&](double d) { return right_integral_oracle(f, 1.0 - alpha, t * std::exp(d)); };
    return -(-F(2 * h) + 8 * F(h) - 8 * F(-h) + F(-2 * h)) / (12 * h);
}

Outcome operator_calculus() {
    const double a = W.a(), ab = W.a() * W.b();
    std::vector<std::function<double(double)>> fns = {
        [](double) { return 1.0; },
        [a](double s) { return std::pow(std::log(s / a), 2); },
        [](double s) { return std::sin(s); },
        [](double s) { return std::exp(-s / 3.0); },
        [](double s) { return 1.0 / (1.0 + s * s); },
    };
    std::vector<double> pts;
    for (int j = 0; j < 20; ++j) pts.push_back(W.a() * std::pow(W.b() / W.a(), (j + 0.5) / 20.0));

    double err_id = 0.0;
    for (double alpha : {0.3, 0.5, 0.7})
        for (const auto& f : fns) {
            std::function<double(double)> qf = [&](double s) { return f(ab / s); };
            for (double t : pts) {
                // (i) Q I_left f = I_right Q f, (iii) I_left Q f = Q I_right f
                err_id = std::max(err_id, std::abs(hadamard_integral_left(f, alpha, W, ab / t) -
                                                   right_integral_oracle(qf, alpha, t)));
                err_id = std::max(err_id, std::abs(hadamard_integral_left(qf, alpha, W, t) -
                                                   right_integral_oracle(f, alpha, ab / t)));
                // (ii) Q D_left f = D_right Q f, (iv) D_left Q f = Q D_right f
                err_id = std::max(err_id, std::abs(hadamard_derivative_left(f, alpha, W, ab / t) -
                                                   right_derivative_oracle(qf, alpha, t)));
                err_id = std::max(err_id, std::abs(hadamard_derivative_left(qf, alpha, W, t) -
                                                   right_derivative_oracle(f, alpha, ab / t)));
            }
        }

    double err_caputo = 0.0;
    for (double alpha : {0.3, 0.5, 0.7})
        for (double p : {1.0, 1.5, 2.0, 2.5, 3.0}) {
            auto fprime = [p](double s) { return p * std::pow(std::log(s / 2.0), p - 1.0) / s; };
            HadamardOptions opt;
            if (p != std::floor(p)) opt.grading = 2.0;
            for (double t : pts) {
                const double sigma = std::log(t / 2.0);
                auto g = [&](double u) {
                    const double s = sigma - std::pow(u, 1.0 / (1.0 - alpha));
                    return p * std::pow(std::max(s, 0.0), p - 1.0);
                };
                const double quad =
                    oracle::integrate(g, 0.0, std::pow(sigma, 1.0 - alpha)) / ((1.0 - alpha) * std::tgamma(1.0 - alpha));
                err_caputo = std::max(err_caputo, std::abs(hadamard_caputo_left(fprime, alpha, W, t, opt) - quad));
            }
        }

    double err_semi = 0.0;
    auto f = [](double s) { return std::cos(s); };
    for (auto [al, be] : std::vector<std::pair<double, double>>{{0.3, 0.5}, {0.5, 0.5}, {0.25, 0.25}, {0.7, 0.25}}) {
        auto inner = [&](double s) { return s <= W.a() ? 0.0 : hadamard_integral_left(f, be, W, s); };
        HadamardOptions outer;
        outer.grading = 1.0 / be;
        for (double t : pts)
            err_semi = std::max(err_semi, std::abs(hadamard_integral_left(inner, al, W, t, outer) -
                                                   hadamard_integral_left(f, al + be, W, t)));
    }
    return {err_id <= 1e-6 && err_caputo <= 1e-7 && err_semi <= 1e-7,
            fmt("reflection identities %.2e (tol 1e-6), Caputo of log-powers %.2e (1e-7), semigroup %.2e (1e-7)",
                err_id, err_caputo, err_semi)};
}

// ------------------------------------------------------------------ 5

Outcome solver_residual() {
    double worst = 0.0;
    for (double alpha : {0.3, 0.5, 0.7}) {
        HadamardOptions opt;
        opt.grading = 1.0 / alpha;
        for (double scale : {1.0, 5.0}) {
            const SpectralBasis basis(RectDomain{{Interval{0.0, 1.0 / std::sqrt(scale)}}}, 1);
            const double lambda = basis.mode(0).lambda;
            auto z = [&](double t) {
                return free_solution(Eigen::VectorXd::Ones(1), basis, alpha, W, t).coefficients(0) - 1.0;
            };
            for (int i = 0; i < 10; ++i) {
                const double t = W.time_from_start(W.log_length() * (i + 0.5) / 10.0);
                const double lhs = hadamard_derivative_left(z, alpha, W, t, opt);
                const double rhs = -lambda * (z(t) + 1.0);
                worst = std::max(worst, std::abs(lhs - rhs));
            }
        }
    }
    return {worst <= 1e-5, fmt("max |HC D z + lambda z| = %.2e over 60 points (tol 1e-5)", worst)};
}

// ------------------------------------------------------------------ 6

Outcome hum_end_to_end() {
    const SpectralBasis basis(square, 6);
    ActuatorSet acts;
    for (const auto& m : basis.modes()) {
        SineProductDistribution d;
        d.frequency = {m.index[0] / 2.0, m.index[1] / 2.0};
        d.origin = {-1.0, -1.0};
        acts.push_back({Region::whole(square), d});
    }
    const auto sys = ControlSystem::make(basis, W, 0.7, omega, acts);
    std::mt19937 rng(7);
    std::normal_distribution<double> n01;
    const Eigen::VectorXd f = Eigen::VectorXd::NullaryExpr(basis.size(), [&] { return n01(rng); });
    const HumProblem pb{sys, f, Eigen::VectorXd()};
    const auto sol = solve_hum(pb);
    const auto mini = verify_minimality(pb, sol, 50);
    const double gap = rel(sol.energy, sol.g_norm_squared);
    return {sol.residual <= 1e-6 && gap <= 1e-6 && mini.passed == 50 && mini.pseudo_inverse_relative_gap <= 1e-4,
            fmt("residual %.2e, |J - ||g||^2|/J %.2e, minimality %d/50, pseudo-inverse gap %.2e", sol.residual, gap,
                mini.passed, mini.pseudo_inverse_relative_gap)};
}

// ------------------------------------------------------------------ 7

Outcome alpha_one_regression() {
    const SpectralBasis basis(RectDomain{{Interval{0.0, 1.0}}}, 1);
    const double lam = basis.mode(0).lambda, a = W.a(), b = W.b(), L = W.log_length();
    double worst = 0.0;
    auto track = [&](double x, double ref) { worst = std::max(worst, rel(x, ref)); };

    for (double t : {2.3, 3.0, 3.7, 4.0}) {
        track(free_solution(Eigen::VectorXd::Ones(1), basis, 1.0, W, t).coefficients(0), std::pow(a / t, lam));
        if (t < b) track(adjoint_solution(Eigen::VectorXd::Ones(1), basis, 1.0, W, t).coefficients(0), std::pow(t / b, lam));
    }
    // z(b) = int_a^b (s/b)^lambda s^k ds/s = (b^k - a^k (a/b)^lambda)/(lambda + k) for u = t^k.
    const Eigen::MatrixXd D = Eigen::MatrixXd::Constant(1, 1, 0.8);
    for (int k : {0, 1}) {
        const auto rule = make_time_rule(1.0, L, 64, 0.0);
        const auto u = ControlSignal::sample(W, rule, 1, [k](double t) { return Eigen::VectorXd::Constant(1, std::pow(t, k)); });
        track(forced_solution(D, basis, u, 1.0, b).coefficients(0),
              0.8 * (std::pow(b, k) - std::pow(a, k) * std::pow(a / b, lam)) / (lam + k));
    }
    // Gramian: W = d^2 int_0^L e^{-2 lambda tau} e^tau / b dtau, pencil eigenvalue Gamma W with Gamma = lambda.
    const auto sys = ControlSystem::from_coefficients(basis, W, 1.0, Region::whole(basis.domain()), D);
    const double Wc = 0.64 * -std::expm1((1 - 2 * lam) * L) / ((2 * lam - 1) * b);
    const auto G = assemble_gramian(sys);
    track(G.W(0, 0), Wc);
    track(G.smallest, lam * Wc);
    // HUM: u*(t) = d (t/b)^lambda f / (t W), J = f^2 / W.
    const double f = 1.7;
    const auto sol = solve_hum({sys, Eigen::VectorXd::Constant(1, f), Eigen::VectorXd()});
    for (double t : {2.0, 2.5, 3.3, 3.99}) track(sol.control.at(t)(0), 0.8 * std::pow(t / b, lam) * f / (t * Wc));
    track(sol.energy, f * f / Wc);
    track(sol.g_norm_squared, f * f / Wc);
    track(sol.final_state.coefficients(0), f);
    return {worst <= 1e-9, fmt("max relative deviation from closed forms %.2e (tol 1e-9)", worst)};
}

// ------------------------------------------------------------------ 8

Outcome divergence_guard() {
    const SpectralBasis basis(square, 2);
    ActuatorSet zones;
    for (auto [x0, x1, y0, y1] : std::vector<std::array<double, 4>>{
             {-0.9, -0.2, -0.7, 0.1}, {0.1, 0.8, -0.5, 0.6}, {-0.4, 0.5, 0.2, 0.9}, {0.3, 0.95, -0.95, -0.3}})
        zones.push_back({Region{{Box{{Interval{x0, x1}, Interval{y0, y1}}}}}, ConstantDistribution{1.0}});
    std::string refused;
    int refusals = 0;
    const auto plain = ControlSystem::make(basis, W, 0.4, omega, zones);
    try {
        assemble_gramian(plain);
    } catch (const DivergenceError& e) {
        refused = e.what();
        ++refusals;
    }
    try {
        g_norm(plain, Eigen::VectorXd::Ones(basis.size()));
    } catch (const DivergenceError&) {
        ++refusals;
    }
    try {
        solve_hum({plain, Eigen::VectorXd::Ones(basis.size()), Eigen::VectorXd()});
    } catch (const DivergenceError&) {
        ++refusals;
    }
    const bool documented = refused.find("epsilon cutoff") != std::string::npos;

    const auto sys = ControlSystem::make(basis, W, 0.4, omega, zones, 1e-3);
    std::mt19937 rng(5);
    std::normal_distribution<double> n01;
    const Eigen::VectorXd f = Eigen::VectorXd::NullaryExpr(basis.size(), [&] { return n01(rng); });
    const HumProblem pb{sys, f, Eigen::VectorXd()};
    const auto sol = solve_hum(pb);
    const auto mini = verify_minimality(pb, sol, 20);
    const double gap = rel(sol.energy, sol.g_norm_squared);
    // u* = H* Gamma g pointwise, against the adjoint state directly.
    double adj = 0.0;
    for (double t : {2.2, 3.0, 3.8}) {
        const Eigen::VectorXd ref = apply_H_adjoint(sys, sol.c, t);
        adj = std::max(adj, (sol.control.at(t) - ref).norm() / ref.norm());
    }
    const bool ok = refusals == 3 && documented && sol.residual <= 1e-6 && gap <= 1e-6 && adj <= 1e-6 &&
                    mini.pseudo_inverse_relative_gap <= 1e-6 && mini.passed == 20;
    return {ok, fmt("%d/3 refusals%s; with epsilon=1e-3: residual %.2e, |J - ||g||^2|/J %.2e, u* vs H*c %.2e, "
                    "pseudo-inverse gap %.2e, minimality %d/20",
                    refusals, documented ? " with diagnostic" : " WITHOUT diagnostic", sol.residual, gap, adj,
                    mini.pseudo_inverse_relative_gap, mini.passed)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        Outcome (*run)();
        double budget;  // seconds, 0 = none
    };
    const Criterion criteria[] = {
        {1, "whole-domain negative result", negative_result, 10.0},
        {2, "zone actuator on omega controllable", positive_result, 60.0},
        {3, "J_klpq quadrature nonzero", j_table, 0.0},
        {4, "operator calculus", operator_calculus, 0.0},
        {5, "free solution residual", solver_residual, 0.0},
        {6, "HUM end to end", hum_end_to_end, 120.0},
        {7, "alpha = 1 regression", alpha_one_regression, 0.0},
        {8, "divergence guard", divergence_guard, 0.0},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = seconds_since(t0);
        const bool in_time = c.budget == 0.0 || dt < c.budget;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("[%s] criterion %d, %s: %s (%.2f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), dt,
                    in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    std::printf("%d/8 criteria pass\n", 8 - failed);
    return failed == 0 ? 0 : 1;
}
