// hadactl: scenario-driven front end.
//
//   hadactl analyze --scenario s.yaml [--out dir] [--cutoff K] [--epsilon e]
//   hadactl synthesize | simulate --scenario s.yaml ...
//   hadactl reproduce-example [--scenario s.yaml] ...
//   hadactl selftest
//
// Exit codes: 0 success, 1 error, 2 negative controllability verdict (analyze).

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include "hadactl/report.hpp"

using namespace hadactl;

namespace {

struct Flags {
    std::string scenario;
    std::string out;
    std::optional<int> cutoff;
    std::optional<double> epsilon;
    int threads = 0;
    std::string format;
};

void add_flags(CLI::App* cmd, Flags& f, bool scenario_required) {
    auto* s = cmd->add_option("--scenario", f.scenario, "scenario file (YAML)");
    if (scenario_required) s->required();
    cmd->add_option("--out", f.out, "output directory (overrides output.dir)");
    cmd->add_option("--cutoff", f.cutoff, "mode cutoff K (overrides cutoff)")->check(CLI::PositiveNumber);
    cmd->add_option("--epsilon", f.epsilon, "cutoff log(b/t) >= epsilon (overrides epsilon)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--threads", f.threads, "worker threads, 0 = hardware")->check(CLI::NonNegativeNumber);
    cmd->add_option("--format", f.format, "json, csv or both")->check(CLI::IsMember({"json", "csv", "both"}));
}

int execute(Task task, const Flags& f) {
    Scenario sc = f.scenario.empty() ? example_scenario() : parse_scenario_file(f.scenario);
    if (sc.task != task)
        log(LogLevel::info, "scenario declares task ", to_string(sc.task), ", running ", to_string(task));
    sc.task = task;
    if (f.cutoff) sc.cutoff = *f.cutoff;
    if (f.epsilon) sc.epsilon = *f.epsilon;
    set_num_threads(f.threads);

    RunOptions opt;
    opt.out_dir = f.out;
    opt.format = f.format;
    const auto rep = run(sc, opt);
    std::cout << rep.summary << (rep.summary.empty() || rep.summary.back() == '\n' ? "" : "\n");
    for (const auto& a : rep.artifacts) log(LogLevel::info, "wrote ", a);
    return rep.exit_code;
}

int selftest() {
    int failed = 0;
    auto check = [&](const char* name, bool ok, double value) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << " (" << value << ")\n";
        failed += !ok;
    };
    const double e1 = mittag_leffler(1.0, 1.0, -1.0);
    check("E_{1,1}(-1) = 1/e", std::abs(e1 - std::exp(-1.0)) < 1e-14, e1);
    const double h = mittag_leffler(0.5, 1.0, -1.0);
    const double href = std::exp(1.0) * std::erfc(1.0);
    check("E_{1/2,1}(-1) = e erfc(1)", std::abs(h - href) < 1e-13, h);

    // alpha = 1, one mode, u = 1: z(b) = (1 - (a/b)^lambda) / lambda.
    const LogTimeWindow W(2.0, 4.0);
    const SpectralBasis basis(RectDomain{{Interval{0.0, 1.0}}}, 1);
    const auto rule = make_time_rule(1.0, W.log_length(), 32, 0.0);
    const auto u = ControlSignal::sample(W, rule, 1, [](double) { return Eigen::VectorXd::Ones(1); });
    const double lam = basis.mode(0).lambda;
    const double z = forced_solution(Eigen::MatrixXd::Ones(1, 1), basis, u, 1.0, W.b()).coefficients(0);
    const double zref = (1.0 - std::pow(W.a() / W.b(), lam)) / lam;
    check("alpha = 1 forced state", std::abs(z - zref) < 1e-12 * std::abs(zref), z);

    const double m = example_M(1, 1, Region::whole(RectDomain{{Interval{-1, 1}, Interval{-1, 1}}}));
    check("M_11 vanishes on [-1,1]^2", std::abs(m) < 1e-12, m);

    const auto sc = example_scenario();
    check("scenario round trip", parse_scenario_string(serialize_scenario(sc)) == sc, 0.0);
    std::cout << (failed == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regional gradient controllability of Hadamard-Caputo diffusion"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);
    Flags f;
    auto* sim = app.add_subcommand("simulate", "state at the requested times under the scenario control");
    auto* ana = app.add_subcommand("analyze", "gradient Gramian verdict and strategic actuator test");
    auto* syn = app.add_subcommand("synthesize", "minimum-energy control that reaches the target gradient");
    auto* rep = app.add_subcommand("reproduce-example", "structural checks of the zone-actuator example");
    auto* st = app.add_subcommand("selftest", "quick internal consistency checks");
    add_flags(sim, f, true);
    add_flags(ana, f, true);
    add_flags(syn, f, true);
    add_flags(rep, f, false);
    (void)st;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*sim) return execute(Task::simulate, f);
        if (*ana) return execute(Task::analyze, f);
        if (*syn) return execute(Task::synthesize, f);
        if (*rep) return execute(Task::reproduce_example, f);
        return selftest();
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
