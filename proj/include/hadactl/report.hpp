#pragma once

/// Runs a Scenario and turns the outcome into a JSON report plus CSV tables.
/// Report bodies are deterministic for a fixed scenario and seed; wall-clock
/// timings are kept apart in their own file.

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "hadactl/controllability.hpp"
#include "hadactl/hum.hpp"
#include "hadactl/scenario.hpp"

namespace hadactl {

inline constexpr const char* tool_version = "0.1.0";

using Json = nlohmann::ordered_json;

// ------------------------------------------------------------------ logging

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

/// Read once from HADACTL_LOG_LEVEL (error, warn, info, debug); default warn.
inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("HADACTL_LOG_LEVEL");
        const std::string s = env ? env : "";
        if (s == "error") return LogLevel::error;
        if (s == "info") return LogLevel::info;
        if (s == "debug") return LogLevel::debug;
        return LogLevel::warn;
    }();
    return level;
}

template <class... Args>
void log(LogLevel lvl, const Args&... args) {
    if (lvl > log_level()) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::cerr << "[hadactl " << names[static_cast<int>(lvl)] << "] " << detail::concat(args...) << '\n';
}

// ------------------------------------------------------------- construction

inline SpectralBasis scenario_basis(const Scenario& sc) { return SpectralBasis(sc.domain, sc.cutoff, sc.basis); }

inline ControlSystem scenario_system(const Scenario& sc) {
    return ControlSystem::make(scenario_basis(sc), LogTimeWindow(sc.a, sc.b), sc.alpha, sc.region, sc.actuators,
                               sc.epsilon);
}

/// Target coefficients over the steered family (gradients or states restricted to omega).
inline Eigen::VectorXd scenario_target(const Scenario& sc, const SpectralBasis& basis) {
    const auto& t = sc.target;
    Eigen::VectorXd f = Eigen::VectorXd::Zero(basis.size());
    switch (t.kind) {
        case TargetSpec::Kind::none: break;
        case TargetSpec::Kind::coefficients:
            if (static_cast<int>(t.values.size()) != basis.size())
                throw ConfigError(detail::concat("target.values has ", t.values.size(), " entries, the basis has ",
                                                 basis.size(), " modes"));
            for (int j = 0; j < basis.size(); ++j) f(j) = t.values[static_cast<std::size_t>(j)];
            break;
        case TargetSpec::Kind::random: {
            std::mt19937 rng(t.seed);
            std::normal_distribution<double> n01;
            for (int j = 0; j < basis.size(); ++j) f(j) = t.scale * n01(rng);
            break;
        }
        case TargetSpec::Kind::mode: {
            const int l = basis.dim() == 2 ? t.l : 0;
            bool found = false;
            for (int j = 0; j < basis.size(); ++j)
                if (basis.mode(j).index == std::array<int, 2>{t.k, l}) {
                    f(j) = t.amplitude;
                    found = true;
                }
            if (!found) throw ConfigError(detail::concat("target mode (", t.k, ", ", l, ") is above the cutoff"));
            break;
        }
    }
    return f;
}

inline Eigen::VectorXd scenario_initial_state(const Scenario& sc, const SpectralBasis& basis) {
    if (sc.initial_state.empty()) return Eigen::VectorXd::Zero(basis.size());
    if (static_cast<int>(sc.initial_state.size()) != basis.size())
        throw ConfigError(detail::concat("initial_state has ", sc.initial_state.size(), " entries, the basis has ",
                                         basis.size(), " modes"));
    return Eigen::Map<const Eigen::VectorXd>(sc.initial_state.data(), basis.size());
}

// ------------------------------------------------------------ json helpers

inline Json to_json(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json modes_json(const SpectralBasis& basis) {
    Json a = Json::array();
    for (const auto& m : basis.modes()) {
        Json e;
        e["index"] = basis.dim() == 2 ? Json::array({m.index[0], m.index[1]}) : Json::array({m.index[0]});
        e["lambda"] = m.lambda;
        a.push_back(e);
    }
    return a;
}

inline Json scenario_json(const Scenario& sc) {
    Json j;
    j["name"] = sc.name;
    j["task"] = to_string(sc.task);
    j["dimension"] = sc.domain.dim();
    j["basis"] = to_string(sc.basis);
    j["cutoff"] = sc.cutoff;
    j["alpha"] = sc.alpha;
    j["window"] = {sc.a, sc.b};
    j["epsilon"] = sc.epsilon;
    j["region_boxes"] = sc.region.boxes.size();
    j["actuators"] = sc.actuators.size();
    j["steer"] = to_string(sc.steer);
    j["seed"] = sc.seed;
    j["yaml"] = serialize_scenario(sc);
    return j;
}

inline Json verdict_json(const ControllabilityVerdict& v) {
    Json j;
    j["controllable"] = v.controllable;
    j["smallest_eigenvalue"] = v.margin;
    j["largest_eigenvalue"] = v.largest;
    j["relative_margin"] = v.relative_margin;
    j["condition_number"] = finite_or_null(v.condition_number);
    j["exact_constant"] = finite_or_null(v.exact_constant);
    j["dimension"] = v.dimension;
    j["dropped_directions"] = v.dropped_directions;
    j["threshold"] = v.threshold;
    return j;
}

inline Json strategic_json(const StrategicReport& r) {
    Json j;
    j["actuators"] = r.actuators;
    j["max_multiplicity"] = r.max_multiplicity;
    j["enough_actuators"] = r.enough_actuators;
    j["all_buckets_pass"] = r.all_buckets_pass;
    j["generic_injective"] = r.generic_injective ? Json(*r.generic_injective) : Json(nullptr);
    j["strategic"] = r.strategic;
    Json b = Json::array();
    for (const auto& x : r.buckets) b.push_back({{"lambda", x.lambda}, {"multiplicity", x.multiplicity},
                                                 {"ranks", x.ranks}, {"pass", x.pass}});
    j["buckets"] = b;
    return j;
}

inline std::string verdict_message(const ControllabilityVerdict& v, double floor) {
    if (v.controllable)
        return detail::concat("CONTROLLABLE: min eigenvalue ", v.margin, ", relative margin ", v.relative_margin);
    if (v.largest <= floor)
        return detail::concat("NOT controllable: min eigenvalue 0 (largest eigenvalue ", v.largest, " is below ", floor,
                              ")");
    return detail::concat("NOT controllable: min eigenvalue ", v.margin, ", relative margin ", v.relative_margin,
                          " below ", v.threshold);
}

// --------------------------------------------------------------- artifacts

struct RunOptions {
    std::string out_dir = {};  // empty: take it from the scenario
    std::string format = {};   // empty: take it from the scenario
    bool write = true;
};

struct RunReport {
    Json body;
    Json timing;
    int exit_code = 0;
    std::string summary;
    std::vector<std::string> artifacts;
    /// name -> CSV text, written only when the format includes csv
    std::vector<std::pair<std::string, std::string>> tables;
};

namespace detail {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline std::string csv_number(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

inline std::string control_csv(const ControlSignal& u) {
    std::ostringstream os;
    os.precision(17);
    os << 't';
    for (int i = 0; i < u.channels(); ++i) os << ",u" << i + 1;
    os << '\n';
    const auto t = u.times();
    // Rule nodes run backwards from b; emit in increasing t.
    std::vector<std::size_t> order(t.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return t[x] < t[y]; });
    for (std::size_t k : order) {
        os << t[k];
        for (int i = 0; i < u.channels(); ++i) os << ',' << u.values()(i, static_cast<Eigen::Index>(k));
        os << '\n';
    }
    return os.str();
}

/// Samples of the target and reached fields on a grid over each omega box.
/// Gradient steering writes both components; state steering writes values.
inline std::string steered_field_csv(const SpectralBasis& basis, const Region& omega, const Eigen::VectorXd& target,
                                     const Eigen::VectorXd& reached, SteeredQuantity steer, int per_axis = 21) {
    std::ostringstream os;
    os.precision(17);
    const bool two = basis.dim() == 2;
    os << (two ? "x1,x2," : "x1,");
    if (steer == SteeredQuantity::gradient)
        os << (two ? "target_1,target_2,reached_1,reached_2\n" : "target_1,reached_1\n");
    else
        os << "target,reached\n";
    for (const auto& box : omega.boxes) {
        const int ny = two ? per_axis : 1;
        for (int i = 0; i < per_axis; ++i)
            for (int j = 0; j < ny; ++j) {
                Point x{box.axes[0].lo + box.axes[0].length() * i / (per_axis - 1), 0.0};
                if (two) x[1] = box.axes[1].lo + box.axes[1].length() * j / (ny - 1);
                std::array<double, 4> acc{};
                for (int m = 0; m < basis.size(); ++m) {
                    if (steer == SteeredQuantity::gradient) {
                        const auto g = basis.grad(m, x);
                        acc[0] += target(m) * g[0];
                        acc[1] += target(m) * g[1];
                        acc[2] += reached(m) * g[0];
                        acc[3] += reached(m) * g[1];
                    } else {
                        const double v = basis.eval(m, x);
                        acc[0] += target(m) * v;
                        acc[2] += reached(m) * v;
                    }
                }
                os << x[0] << ',';
                if (two) os << x[1] << ',';
                if (steer == SteeredQuantity::gradient && two)
                    os << acc[0] << ',' << acc[1] << ',' << acc[2] << ',' << acc[3] << '\n';
                else
                    os << acc[0] << ',' << acc[2] << '\n';
            }
    }
    return os.str();
}

}  // namespace detail

// ------------------------------------------------------------------ tasks

inline RunReport run_analyze(const Scenario& sc) {
    RunReport rep;
    detail::Stopwatch sw;
    const auto sys = scenario_system(sc);
    const auto G = assemble_gramian(sys, sc.quadrature.time_nodes);
    const auto v = approx_controllability_verdict(G, {sc.thresholds.verdict, sc.thresholds.absolute_floor});
    rep.timing["gramian_seconds"] = sw.seconds();
    const auto strat = strategic_test(sys);
    rep.timing["total_seconds"] = sw.seconds();

    rep.body["verdict"] = verdict_json(v);
    rep.body["message"] = verdict_message(v, sc.thresholds.absolute_floor);
    rep.body["strategic"] = strategic_json(strat);
    rep.body["pencil_eigenvalues"] = to_json(G.pencil_eigenvalues);
    rep.body["quadrature"] = {{"time_nodes", G.meta.time_nodes}, {"space_order", G.meta.space_order}};
    rep.summary = rep.body["message"].get<std::string>();
    rep.exit_code = v.controllable ? 0 : 2;

    std::ostringstream csv;
    csv.precision(17);
    csv << "index,eigenvalue\n";
    for (Eigen::Index i = 0; i < G.pencil_eigenvalues.size(); ++i) csv << i << ',' << G.pencil_eigenvalues(i) << '\n';
    rep.tables.emplace_back("pencil_eigenvalues.csv", csv.str());
    return rep;
}

inline ControlSignal scenario_control(const Scenario& sc, const ControlSystem& sys, const TimeRule& rule) {
    const int m = sys.channels();
    auto f = [&](double t) -> Eigen::VectorXd {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
        if (sc.control.kind == ControlSpec::Kind::zero) return u;
        const double s = sc.control.kind == ControlSpec::Kind::cosine ? std::cos(sc.control.frequency * t) : 1.0;
        for (int i = 0; i < m; ++i) u(i) = sc.control.values[static_cast<std::size_t>(i)] * s;
        return u;
    };
    return ControlSignal::sample(sys.window, rule, m, f);
}

inline RunReport run_simulate(const Scenario& sc) {
    RunReport rep;
    detail::Stopwatch sw;
    const auto sys = scenario_system(sc);
    const auto y0 = scenario_initial_state(sc, sys.basis);
    if (sc.control.kind != ControlSpec::Kind::zero && static_cast<int>(sc.control.values.size()) != sys.channels())
        throw ConfigError("control.values needs one entry per actuator");
    const auto rule = make_time_rule(sc.alpha, sys.window.log_length(), sc.quadrature.simulate_nodes, 0.0);
    const auto u = scenario_control(sc, sys, rule);
    const std::vector<double> times = sc.times.empty() ? std::vector<double>{sc.b} : sc.times;

    Json states = Json::array();
    std::ostringstream csv;
    csv.precision(17);
    csv << "t,k,l,lambda,coefficient\n";
    SpectralState last = SpectralState::zero(sys.basis, sc.b);
    for (double t : times) {
        Eigen::VectorXd z = free_solution(y0, sys.basis, sc.alpha, sys.window, t).coefficients;
        if (t > sc.a) z += forced_solution(sys.D, sys.basis, u, sc.alpha, t).coefficients;
        const auto state = SpectralState::make(sys.basis, z, t);
        states.push_back({{"t", t}, {"coefficients", to_json(z)}});
        for (int j = 0; j < sys.basis.size(); ++j)
            csv << t << ',' << sys.basis.mode(j).index[0] << ',' << sys.basis.mode(j).index[1] << ','
                << sys.basis.mode(j).lambda << ',' << z(j) << '\n';
        if (t == sc.b) last = state;
    }
    rep.body["modes"] = modes_json(sys.basis);
    rep.body["states"] = states;
    if (std::find(times.begin(), times.end(), sc.b) != times.end()) {
        const auto fg = final_gradient(last, sys.basis, sys.region, sys.window);
        rep.body["final_gradient_norm_squared"] = fg.norm_squared();
        std::ostringstream field;
        write_field_csv(field, last, sys.basis, 41, 41);
        rep.tables.emplace_back("field_at_b.csv", field.str());
    }
    rep.body["quadrature"] = {{"control_nodes", sc.quadrature.simulate_nodes},
                              {"forced_nodes", SolverOptions{}.time_nodes}};
    rep.tables.emplace_back("states.csv", csv.str());
    rep.tables.emplace_back("control.csv", detail::control_csv(u));
    rep.timing["total_seconds"] = sw.seconds();
    rep.summary = detail::concat("simulated ", times.size(), " time(s) on ", sys.basis.size(), " modes");
    return rep;
}

inline RunReport run_synthesize(const Scenario& sc) {
    RunReport rep;
    detail::Stopwatch sw;
    const auto sys = scenario_system(sc);
    HumProblem pb{sys, scenario_target(sc, sys.basis), Eigen::VectorXd()};
    if (!sc.initial_state.empty()) pb.y0 = scenario_initial_state(sc, sys.basis);
    pb.steer = sc.steer;
    pb.control_nodes = sc.quadrature.time_nodes;
    pb.check_nodes = sc.quadrature.check_nodes;
    pb.truncation = sc.thresholds.truncation;
    const auto sol = solve_hum(pb);
    rep.timing["solve_seconds"] = sw.seconds();
    const auto mini = verify_minimality(pb, sol, sc.minimality_trials, sc.seed);
    rep.timing["total_seconds"] = sw.seconds();

    Json h;
    h["residual"] = sol.residual;
    h["energy"] = sol.energy;
    h["g_norm_squared"] = sol.g_norm_squared;
    h["energy_identity_gap"] =
        sol.energy > 0 ? std::abs(sol.energy - sol.g_norm_squared) / sol.energy : std::abs(sol.g_norm_squared);
    h["condition_number"] = finite_or_null(sol.condition_number);
    h["truncated_directions"] = sol.truncated;
    h["dropped_directions"] = sol.dropped_directions;
    h["ill_posed"] = sol.ill_posed;
    h["epsilon"] = sol.epsilon;
    h["g"] = to_json(sol.g);
    h["adjoint_datum"] = to_json(sol.c);
    h["target"] = to_json(pb.target);
    h["final_state"] = to_json(sol.final_state.coefficients);
    rep.body["hum"] = h;
    Json m;
    m["trials"] = mini.trials;
    m["passed"] = mini.passed;
    m["kernel_available"] = mini.kernel_available;
    m["worst_gap"] = mini.worst_gap;
    m["worst_constraint_drift"] = mini.worst_constraint_drift;
    m["pseudo_inverse_energy"] = mini.pseudo_inverse_energy;
    m["pseudo_inverse_relative_gap"] = mini.pseudo_inverse_relative_gap;
    m["pass"] = mini.pass;
    rep.body["minimality"] = m;
    rep.body["modes"] = modes_json(sys.basis);
    rep.body["quadrature"] = {{"control_nodes", pb.control_nodes}, {"check_nodes", pb.check_nodes},
                              {"space_order", sys.basis.quadrature_order(sys.region)}};

    rep.tables.emplace_back("control.csv", detail::control_csv(sol.control));
    rep.tables.emplace_back("steered_field.csv", detail::steered_field_csv(sys.basis, sys.region, pb.target,
                                                                          sol.final_state.coefficients, pb.steer));
    if (sol.ill_posed) log(LogLevel::warn, "HUM system is ill-conditioned (condition ", sol.condition_number, ")");
    rep.summary = detail::concat("u* computed: residual ", sol.residual, ", J(u*) ", sol.energy, ", minimality ",
                                 mini.passed, "/", mini.trials);
    return rep;
}

// ------------------------------------------------------- example reproduction

struct ExampleCheck {
    std::string name;
    bool pass = false;
    std::string detail;
    bool counted = true;  // informational rows are reported but not scored
};

struct ExampleReport {
    std::vector<ExampleCheck> checks;
    std::vector<JEntry> J;
    bool basis_is_integer_sine = true;
    std::string basis_note;
    double max_abs_M = 0.0;
    ControllabilityVerdict whole_domain;
    ControllabilityVerdict on_omega;
    StrategicReport strategic;

    int passed() const {
        int n = 0;
        for (const auto& c : checks) n += c.counted && c.pass;
        return n;
    }
    int scored() const {
        int n = 0;
        for (const auto& c : checks) n += c.counted;
        return n;
    }
};

/// The four structural checks of the zone-actuator example plus the J table.
/// The scenario supplies alpha, window, basis, cutoff, epsilon, omega and the
/// actuator on omega; P = Omega is built here.
inline ExampleReport reproduce_example(const Scenario& sc) {
    ExampleReport rep;
    const RectDomain omega_dom = sc.domain;
    if (omega_dom.dim() != 2) throw ConfigError("the example lives on a two-dimensional domain");
    const Region whole = Region::whole(sc.domain);
    rep.basis_is_integer_sine = sc.basis == BasisKind::integer_sine;
    rep.basis_note = rep.basis_is_integer_sine ? "integer_sine basis 2 sin(k pi x1) sin(l pi x2)"
                                             : "basis is not integer_sine: canonical Dirichlet sines on the domain";

    // 1. M_kl vanish for P = Omega.
    for (int k = 1; k <= 8; ++k)
        for (int l = 1; l <= 8; ++l) rep.max_abs_M = std::max(rep.max_abs_M, std::abs(example_M(k, l, whole)));
    rep.checks.push_back({"M_kl vanish on P = Omega (k, l <= 8)", rep.max_abs_M <= 1e-10,
                          detail::concat("max |M_kl| = ", rep.max_abs_M)});

    const VerdictOptions vopt{sc.thresholds.verdict, sc.thresholds.absolute_floor};
    const auto basis = scenario_basis(sc);
    const LogTimeWindow W(sc.a, sc.b);

    // 2. Whole domain with P = Omega.
    {
        const auto sys = ControlSystem::make(basis, W, sc.alpha, whole, {Actuator{whole, ConstantDistribution{1.0}}},
                                             sc.epsilon);
        rep.whole_domain = approx_controllability_verdict(assemble_gramian(sys, sc.quadrature.time_nodes), vopt);
        rep.checks.push_back({"whole-domain verdict is NOT controllable", !rep.whole_domain.controllable,
                              verdict_message(rep.whole_domain, vopt.absolute_floor)});
    }

    // 3. omega with the scenario's actuators (a zone actuator on omega by default).
    ActuatorSet acts = sc.actuators;
    if (acts.empty()) acts = {Actuator{sc.region, ConstantDistribution{1.0}}};
    const auto sys = ControlSystem::make(basis, W, sc.alpha, sc.region, acts, sc.epsilon);
    rep.on_omega = approx_controllability_verdict(assemble_gramian(sys, sc.quadrature.time_nodes), vopt);
    rep.checks.push_back({"omega verdict is CONTROLLABLE", rep.on_omega.controllable,
                          verdict_message(rep.on_omega, vopt.absolute_floor)});

    // 4. Every bucket block has rank 1.
    rep.strategic = strategic_test(sys);
    int off = 0;
    std::string first_off;
    for (const auto& b : rep.strategic.buckets)
        for (int r : b.ranks)
            if (r != 1) {
                if (off++ == 0)
                    first_off = detail::concat("lambda=", b.lambda, " (multiplicity ", b.multiplicity, ") has rank ", r);
            }
    rep.checks.push_back({"strategic ranks rank D^1_k = rank D^2_k = 1", off == 0,
                          off == 0 ? detail::concat(rep.strategic.buckets.size(), " buckets, all rank 1")
                                   : detail::concat(off, " block(s) off rank 1, first: ", first_off,
                                                    "; max multiplicity ", rep.strategic.max_multiplicity)});

    // J table: k, l in {1, 3, 5}, p, q in {2, 4}, with P = omega.
    bool all_nonzero = true;
    for (int k : {1, 3, 5})
        for (int l : {1, 3, 5})
            for (int p : {2, 4})
                for (int q : {2, 4}) {
                    rep.J.push_back(example_J(k, l, p, q, sc.region, sc.region));
                    all_nonzero = all_nonzero && std::isfinite(rep.J.back().quadrature) && rep.J.back().quadrature != 0.0;
                }
    rep.checks.push_back({"J_klpq nonzero for odd k, l and even p, q (reachability argument)", all_nonzero,
                          detail::concat(rep.J.size(), " entries"), false});
    return rep;
}

inline Json example_json(const ExampleReport& r) {
    Json j;
    j["basis_is_integer_sine"] = r.basis_is_integer_sine;
    j["basis_note"] = r.basis_note;
    Json checks = Json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"scored", c.counted}, {"detail", c.detail}});
    j["checks"] = checks;
    j["passed"] = r.passed();
    j["scored"] = r.scored();
    j["max_abs_M"] = r.max_abs_M;
    j["whole_domain"] = verdict_json(r.whole_domain);
    j["omega"] = verdict_json(r.on_omega);
    j["strategic"] = strategic_json(r.strategic);
    Json J = Json::array();
    for (const auto& e : r.J) {
        Json x;
        x["k"] = e.k;
        x["l"] = e.l;
        x["p"] = e.p;
        x["q"] = e.q;
        x["quadrature"] = e.quadrature;
        x["closed_form"] = e.closed_form ? Json(*e.closed_form) : Json(nullptr);
        x["relative_discrepancy"] = e.relative_discrepancy ? Json(*e.relative_discrepancy) : Json(nullptr);
        J.push_back(x);
    }
    j["J"] = J;
    return j;
}

inline std::string example_table(const ExampleReport& r) {
    std::ostringstream os;
    os << "basis: " << r.basis_note << '\n';
    for (const auto& c : r.checks)
        os << (c.counted ? (c.pass ? "[PASS] " : "[FAIL] ") : (c.pass ? "[info] " : "[info FAIL] ")) << c.name << ": "
           << c.detail << '\n';
    os << r.passed() << "/" << r.scored() << " structural checks pass\n";
    return os.str();
}

inline std::string j_table_csv(const ExampleReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << "k,l,p,q,quadrature,closed_form,relative_discrepancy\n";
    for (const auto& e : r.J) {
        os << e.k << ',' << e.l << ',' << e.p << ',' << e.q << ',' << e.quadrature << ',';
        if (e.closed_form) os << *e.closed_form;
        os << ',';
        if (e.relative_discrepancy) os << *e.relative_discrepancy;
        os << '\n';
    }
    return os.str();
}

inline RunReport run_reproduce_example(const Scenario& sc) {
    RunReport rep;
    detail::Stopwatch sw;
    const auto ex = reproduce_example(sc);
    rep.timing["total_seconds"] = sw.seconds();
    rep.body["example"] = example_json(ex);
    rep.body["quadrature"] = {{"time_nodes", sc.quadrature.time_nodes},
                              {"space_order", scenario_basis(sc).quadrature_order(sc.region)}};
    rep.tables.emplace_back("example_checks.txt", example_table(ex));
    rep.tables.emplace_back("J_table.csv", j_table_csv(ex));
    rep.summary = example_table(ex);
    // Discrepancies are reported, not raised: a completed run exits 0.
    rep.exit_code = 0;
    return rep;
}

// -------------------------------------------------------------------- run

/// Dispatches on the task, then writes report.json / timing.json and the CSV
/// tables under the output directory according to the format.
inline RunReport run(const Scenario& sc, const RunOptions& opt = {}) {
    log(LogLevel::info, "running ", to_string(sc.task), " (K=", sc.cutoff, ", alpha=", sc.alpha, ")");
    RunReport rep;
    switch (sc.task) {
        case Task::simulate: rep = run_simulate(sc); break;
        case Task::analyze: rep = run_analyze(sc); break;
        case Task::synthesize: rep = run_synthesize(sc); break;
        case Task::reproduce_example: rep = run_reproduce_example(sc); break;
    }
    Json body;
    body["tool"] = "hadactl";
    body["version"] = tool_version;
    body["scenario"] = scenario_json(sc);
    for (auto& [k, v] : rep.body.items()) body[k] = v;
    body["exit_code"] = rep.exit_code;
    rep.body = std::move(body);

    if (!opt.write) return rep;
    const std::filesystem::path dir = opt.out_dir.empty() ? sc.output.dir : opt.out_dir;
    const std::string format = opt.format.empty() ? sc.output.format : opt.format;
    std::filesystem::create_directories(dir);
    auto put = [&](const std::string& name, const std::string& text) {
        const auto p = dir / name;
        std::ofstream out(p);
        if (!out) throw ConfigError("cannot write '" + p.string() + "'");
        out << text;
        rep.artifacts.push_back(p.string());
    };
    if (format == "json" || format == "both") {
        put("report.json", rep.body.dump(2) + "\n");
        put("timing.json", rep.timing.dump(2) + "\n");
    }
    if (format == "csv" || format == "both")
        for (const auto& [name, text] : rep.tables) put(name, text);
    return rep;
}

}  // namespace hadactl
