#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "hadactl/hadamard.hpp"
#include "hadactl/mittag_leffler.hpp"
#include "oracles.hpp"

using namespace hadactl;

namespace {

const LogTimeWindow W(2.0, 4.0);

struct TestFn {
    std::string name;
    std::function<double(double)> f;
};

std::vector<TestFn> smooth_functions() {
    const double a = W.a();
    return {
        {"const", [](double) { return 1.0; }},
        {"logsq", [a](double s) { return std::pow(std::log(s / a), 2); }},
        {"sin", [](double s) { return std::sin(s); }},
        {"exp", [](double s) { return std::exp(-s / 3.0); }},
        {"rational", [](double s) { return 1.0 / (1.0 + s * s); }},
    };
}

std::vector<double> test_points() {
    std::vector<double> t;
    for (int j = 0; j < 20; ++j) t.push_back(W.a() * std::pow(W.b() / W.a(), (j + 0.5) / 20.0));
    return t;
}

// Oracle for the right integral straight from its definition; the
// substitution u = (log s/t)^alpha removes the endpoint singularity.
double right_integral_oracle(const std::function<double(double)>& f, double alpha, double t) {
    const double V = std::log(W.b() / t);
    auto g = [&](double u) { return f(t * std::exp(std::pow(u, 1.0 / alpha))); };
    return oracle::integrate(g, 0.0, std::pow(V, alpha)) / (alpha * std::tgamma(alpha));
}

double left_integral_oracle(const std::function<double(double)>& f, double alpha, double t) {
    const double V = std::log(t / W.a());
    auto g = [&](double u) { return f(t * std::exp(-std::pow(u, 1.0 / alpha))); };
    return oracle::integrate(g, 0.0, std::pow(V, alpha)) / (alpha * std::tgamma(alpha));
}

}  // namespace

TEST(Window, RejectsBadBounds) {
    EXPECT_THROW(LogTimeWindow(0.0, 1.0), DomainError);
    EXPECT_THROW(LogTimeWindow(2.0, 2.0), DomainError);
    EXPECT_NEAR(W.log_length(), std::log(2.0), 1e-15);
}

TEST(Reflect, MapsEndpointsAndIsInvolution) {
    auto id = [](double t) { return t; };
    auto q = reflect_Q(id, W);
    EXPECT_DOUBLE_EQ(q(W.a()), W.b());
    auto qq = reflect_Q(q, W);
    for (double t : test_points()) EXPECT_NEAR(qq(t), t, 1e-14);
    auto lg = reflect_Q([](double t) { return std::log(t); }, W);
    EXPECT_NEAR(lg(2 * std::sqrt(2.0)), std::log(2 * std::sqrt(2.0)), 1e-15);
}

TEST(LeftIntegral, ConstantAndZero) {
    const double t = 4.0;
    EXPECT_NEAR(hadamard_integral_left([](double) { return 1.0; }, 0.5, W, t),
                std::sqrt(std::log(2.0)) / std::tgamma(1.5), 1e-14);
    EXPECT_EQ(hadamard_integral_left([](double) { return 0.0; }, 0.3, W, t), 0.0);
    // Same value from the definition.
    EXPECT_NEAR(hadamard_integral_left([](double) { return 1.0; }, 0.5, W, t),
                left_integral_oracle([](double) { return 1.0; }, 0.5, t), 1e-12);
}

TEST(LeftIntegral, LogPowerRule) {
    auto f = [](double s) { return std::log(s / 2.0); };
    const double expected = std::tgamma(2.0) / std::tgamma(2.5) * std::pow(std::log(2.0), 1.5);
    EXPECT_NEAR(hadamard_integral_left(f, 0.5, W, 4.0), expected, 1e-14);
    EXPECT_NEAR(left_integral_oracle(f, 0.5, 4.0), expected, 1e-12);
}

TEST(LeftIntegral, FractionalLogPowerNeedsGrading) {
    // f = (log s/a)^{0.3} is not smooth at s = a; grading 1/0.3 makes it so.
    auto f = [](double s) { return std::pow(std::log(s / 2.0), 0.3); };
    const double T = std::log(1.7);
    const double expected = std::tgamma(1.3) / std::tgamma(1.3 + 0.6) * std::pow(T, 0.9);
    HadamardOptions opt;
    opt.grading = 1.0 / 0.3;
    EXPECT_NEAR(hadamard_integral_left(f, 0.6, W, 2.0 * 1.7, opt), expected, 1e-12);
}

TEST(LeftIntegral, DomainAndParameterErrors) {
    auto one = [](double) { return 1.0; };
    EXPECT_THROW(hadamard_integral_left(one, 0.5, W, 2.0), DomainError);
    EXPECT_THROW(hadamard_integral_left(one, 0.5, W, 5.0), DomainError);
    EXPECT_THROW(hadamard_integral_left(one, 1.5, W, 3.0), ParameterError);
    EXPECT_THROW(hadamard_integral_left(one, 0.0, W, 3.0), ParameterError);
    EXPECT_THROW(hadamard_integral_right(one, 0.5, W, 4.0), DomainError);
}

TEST(RightIntegral, ConstantAndZero) {
    EXPECT_NEAR(hadamard_integral_right([](double) { return 1.0; }, 0.5, W, 2.0),
                std::sqrt(std::log(2.0)) / std::tgamma(1.5), 1e-14);
    EXPECT_EQ(hadamard_integral_right([](double) { return 0.0; }, 0.5, W, 3.0), 0.0);
}

TEST(RightIntegral, MatchesDefinitionOracle) {
    for (const auto& [name, f] : smooth_functions()) {
        for (double alpha : {0.3, 0.5, 0.7, 0.95}) {
            for (double t : test_points()) {
                EXPECT_NEAR(hadamard_integral_right(f, alpha, W, t), right_integral_oracle(f, alpha, t), 1e-10)
                    << name << " alpha=" << alpha << " t=" << t;
            }
        }
    }
}

// Lemma-type identities between the sided operators under Q.
class ReflectionIdentities : public ::testing::TestWithParam<double> {};

TEST_P(ReflectionIdentities, IntegralsCommuteWithQ) {
    const double alpha = GetParam();
    const double ab = W.a() * W.b();
    for (const auto& [name, f] : smooth_functions()) {
        auto qf = reflect_Q(f, W);
        for (double t : test_points()) {
            // (i) Q I_left f = I_right Q f
            const double lhs_i = hadamard_integral_left(f, alpha, W, ab / t);
            EXPECT_NEAR(lhs_i, right_integral_oracle(qf, alpha, t), 1e-8) << name << " t=" << t;
            // (iii) I_left Q f = Q I_right f
            const double lhs_iii = hadamard_integral_left(qf, alpha, W, t);
            EXPECT_NEAR(lhs_iii, right_integral_oracle(f, alpha, ab / t), 1e-8) << name << " t=" << t;
        }
    }
}

TEST_P(ReflectionIdentities, DerivativesCommuteWithQ) {
    const double alpha = GetParam();
    const double ab = W.a() * W.b();
    for (const auto& [name, f] : smooth_functions()) {
        auto qf = reflect_Q(f, W);
        for (double t : test_points()) {
            // (ii) Q D_left f = D_right Q f
            EXPECT_NEAR(hadamard_derivative_left(f, alpha, W, ab / t), hadamard_derivative_right(qf, alpha, W, t), 1e-6)
                << name << " t=" << t;
            // (iv) D_left Q f = Q D_right f
            EXPECT_NEAR(hadamard_derivative_left(qf, alpha, W, t), hadamard_derivative_right(f, alpha, W, ab / t), 1e-6)
                << name << " t=" << t;
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Orders, ReflectionIdentities, ::testing::Values(0.3, 0.5, 0.7, 0.95));

TEST(HadamardDerivative, LogPowerClosedForm) {
    // D^alpha (log t/a)^p = Gamma(p+1)/Gamma(p+1-alpha) (log t/a)^{p-alpha}, also for p = 0.
    for (double alpha : {0.3, 0.5, 0.7}) {
        for (double p : {0.0, 1.0, 2.0}) {
            auto f = [p](double s) { return std::pow(std::log(s / 2.0), p); };
            for (double t : test_points()) {
                const double sigma = std::log(t / 2.0);
                const double expected = std::tgamma(p + 1) / std::tgamma(p + 1 - alpha) * std::pow(sigma, p - alpha);
                EXPECT_NEAR(hadamard_derivative_left(f, alpha, W, t), expected, 1e-6 * std::max(1.0, std::abs(expected)))
                    << alpha << " " << p << " " << t;
            }
        }
    }
}

TEST(Caputo, KillsConstants) {
    EXPECT_EQ(hadamard_caputo_left([](double) { return 0.0; }, 0.5, W, 3.0), 0.0);
    EXPECT_EQ(hadamard_caputo_right([](double) { return 0.0; }, 0.5, W, 3.0), 0.0);
}

TEST(Caputo, LogPowersMatchClosedFormAndOracle) {
    for (double alpha : {0.3, 0.5, 0.7}) {
        for (double p : {1.0, 1.5, 2.0, 2.5, 3.0}) {
            auto fprime = [p](double s) { return p * std::pow(std::log(s / 2.0), p - 1.0) / s; };
            HadamardOptions opt;
            if (p != std::floor(p)) opt.grading = 2.0;
            for (double t : test_points()) {
                const double sigma = std::log(t / 2.0);
                const double closed = std::tgamma(p + 1) / std::tgamma(p + 1 - alpha) * std::pow(sigma, p - alpha);
                // Oracle: the defining integral in log-time, singularity removed by u = (T-s)^{1-alpha}.
                auto g = [&](double u) {
                    const double s = sigma - std::pow(u, 1.0 / (1.0 - alpha));
                    return p * std::pow(std::max(s, 0.0), p - 1.0);
                };
                const double quad =
                    oracle::integrate(g, 0.0, std::pow(sigma, 1.0 - alpha)) / ((1.0 - alpha) * std::tgamma(1.0 - alpha));
                const double value = hadamard_caputo_left(fprime, alpha, W, t, opt);
                EXPECT_NEAR(quad, closed, 1e-9 * std::max(1.0, closed));
                EXPECT_NEAR(value, quad, 1e-7) << alpha << " " << p << " " << t;
            }
        }
    }
}

TEST(Caputo, MittagLefflerIsEigenfunction) {
    const double alpha = 0.5;
    const double lambda = std::numbers::pi * std::numbers::pi;
    // f = E_alpha(-lambda sigma^alpha); delta f = -lambda sigma^{alpha-1} E_{alpha,alpha}(-lambda sigma^alpha).
    auto fprime = [&](double s) {
        const double sigma = std::log(s / 2.0);
        return -lambda * std::pow(sigma, alpha - 1.0) * mittag_leffler(alpha, alpha, -lambda * std::pow(sigma, alpha)) / s;
    };
    HadamardOptions opt;
    opt.grading = 1.0 / alpha;
    for (double t : test_points()) {
        const double f = free_propagator(alpha, lambda, W, t);
        EXPECT_NEAR(hadamard_caputo_left(fprime, alpha, W, t, opt), -lambda * f, 1e-6) << t;
    }
}

TEST(Caputo, RightSideMirrorsLeft) {
    // f(t) = log(b/t): right Caputo gives (log b/t)^{1-alpha}/Gamma(2-alpha).
    for (double alpha : {0.3, 0.6}) {
        auto fprime = [](double s) { return -1.0 / s; };
        for (double t : test_points()) {
            const double tau = std::log(4.0 / t);
            EXPECT_NEAR(hadamard_caputo_right(fprime, alpha, W, t), std::pow(tau, 1 - alpha) / std::tgamma(2 - alpha),
                        1e-12);
        }
    }
}

TEST(Semigroup, IntegralsCompose) {
    auto f = [](double s) { return std::cos(s); };
    for (auto [al, be] : std::vector<std::pair<double, double>>{{0.3, 0.5}, {0.5, 0.5}, {0.25, 0.25}, {0.7, 0.25}}) {
        auto inner = [&](double s) { return s <= W.a() ? 0.0 : hadamard_integral_left(f, be, W, s); };
        HadamardOptions outer;
        outer.grading = 1.0 / be;
        for (double t : test_points()) {
            const double composed = hadamard_integral_left(inner, al, W, t, outer);
            const double direct = hadamard_integral_left(f, al + be, W, t);
            EXPECT_NEAR(composed, direct, 1e-7) << al << " " << be << " " << t;
        }
    }
}

TEST(Pairing, CaputoUndoesIntegral) {
    // delta I^alpha f = f(a) sigma^{alpha-1}/Gamma(alpha) + I^alpha(delta f); the
    // Caputo derivative of I^alpha f must give f back.
    auto f = [](double s) { return std::exp(-s / 3.0) + std::sin(s); };
    auto delta_f = [](double s) { return s * (-std::exp(-s / 3.0) / 3.0 + std::cos(s)); };
    for (double alpha : {0.3, 0.5, 0.7}) {
        auto dg = [&](double s) {
            const double sigma = std::log(s / 2.0);
            const double head = f(2.0) * std::pow(sigma, alpha - 1.0) / std::tgamma(alpha);
            return (head + hadamard_integral_left(delta_f, alpha, W, s)) / s;
        };
        // Check the derivative identity itself once by a difference quotient.
        {
            const double t = 3.0, h = 1e-5;
            const double fd = (hadamard_integral_left(f, alpha, W, t + h) - hadamard_integral_left(f, alpha, W, t - h)) / (2 * h);
            EXPECT_NEAR(dg(t), fd, 1e-7);
        }
        HadamardOptions opt;
        opt.grading = 1.0 / alpha;
        for (double t : test_points()) EXPECT_NEAR(hadamard_caputo_left(dg, alpha, W, t, opt), f(t), 1e-6) << alpha << " " << t;
    }
}

TEST(Signal, ValidatesNodes) {
    EXPECT_THROW(SampledSignal(W, {2.0, 3.0}, {1.0}), ConfigError);
    EXPECT_THROW(SampledSignal(W, {2.0, 3.0, 3.9}, {1.0, 1.0, 1.0}), DomainError);
    EXPECT_THROW(SampledSignal(W, {2.0, 3.0, 2.9, 4.0}, {1.0, 1.0, 1.0, 1.0}), DomainError);
    EXPECT_THROW(SampledSignal(W, {2.0, 3.0, 4.0}, {1.0, NAN, 1.0}), DomainError);
}

TEST(Signal, CubicInLogTimeIsExactForCubics) {
    auto f = [](double s) {
        const double x = std::log(s / 2.0);
        return 1.0 - 2.0 * x + 0.5 * x * x * x;
    };
    const auto sig = SampledSignal::sample(W, f, 7, 2.0);
    for (double t : test_points()) {
        EXPECT_NEAR(sig(t), f(t), 1e-13);
        const double x = std::log(t / 2.0);
        EXPECT_NEAR(sig.derivative(t), (-2.0 + 1.5 * x * x) / t, 1e-12);
    }
    EXPECT_THROW(sig(4.5), DomainError);
}

TEST(Signal, SmoothFunctionConverges) {
    auto f = [](double s) { return std::sin(s); };
    const auto sig = SampledSignal::sample(W, f, 200);
    for (double t : test_points()) EXPECT_NEAR(sig(t), f(t), 1e-9);
    // Caputo of the sampled signal is close to the exact one.
    const double exact = hadamard_caputo_left([](double s) { return std::cos(s); }, 0.5, W, 3.5);
    EXPECT_NEAR(hadamard_caputo_left(sig, 0.5, 3.5), exact, 1e-6);
}
