#pragma once

/// Scenario files: a YAML description of one run (geometry, basis, order,
/// horizon, actuators, target, task) with a validating parser that reports
/// every violation by field path, and a serializer that round-trips.
///
/// Schema (all lengths in domain units, boxes as one [lo, hi] pair per axis):
///
///   name: string                      optional
///   task: simulate | analyze | synthesize | reproduce-example
///   domain: [[lo, hi], ...]           1 or 2 axes
///   basis: canonical | integer_sine   default canonical
///   cutoff: K                         default 6, per-axis mode indices 1..K
///   alpha: (0, 1]
///   window: [a, b]                    0 < a < b
///   epsilon: >= 0                     default 0 (no cutoff)
///   region: [box, ...]                default the whole domain
///   actuators:
///     - support: [box, ...]
///       distribution: {type: constant, value: v}
///                   | {type: polynomial, terms: [{coef: c, powers: [p, q]}, ...]}
///                   | {type: sine_product, amplitude: A, frequency: [f1, f2], origin: [o1, o2]}
///   target: {type: coefficients, values: [...]}
///         | {type: random, seed: s, scale: r}
///         | {type: mode, k: k, l: l, amplitude: A}
///   steer: gradient | state           default gradient
///   initial_state: [...]              optional mode coefficients
///   control: {type: zero | constant | cosine, values: [...], frequency: w}
///   times: [t, ...]                   simulate output times, default [b]
///   thresholds: {verdict: 1e-10, absolute_floor: 1e-20, truncation: 1e-12}
///   quadrature: {time_nodes: 256, check_nodes: 128, simulate_nodes: 64}
///   minimality_trials: 50
///   seed: 20261019
///   output: {dir: out, format: json | csv | both}

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hadactl/error.hpp"
#include "hadactl/hum.hpp"
#include "hadactl/spectral.hpp"

namespace hadactl {

enum class Task { simulate, analyze, synthesize, reproduce_example };

inline const char* to_string(Task t) {
    switch (t) {
        case Task::simulate: return "simulate";
        case Task::analyze: return "analyze";
        case Task::synthesize: return "synthesize";
        case Task::reproduce_example: return "reproduce-example";
    }
    return "?";
}

inline const char* to_string(SteeredQuantity s) { return s == SteeredQuantity::gradient ? "gradient" : "state"; }

struct TargetSpec {
    enum class Kind { none, coefficients, random, mode };
    Kind kind = Kind::none;
    std::vector<double> values;
    unsigned seed = 7;
    double scale = 1.0;
    int k = 1, l = 1;
    double amplitude = 1.0;
    bool operator==(const TargetSpec&) const = default;
};

struct ControlSpec {
    enum class Kind { zero, constant, cosine };
    Kind kind = Kind::zero;
    std::vector<double> values;
    double frequency = 1.0;
    bool operator==(const ControlSpec&) const = default;
};

struct Thresholds {
    double verdict = 1e-10;
    double absolute_floor = 1e-20;
    double truncation = 1e-12;
    bool operator==(const Thresholds&) const = default;
};

struct QuadratureSettings {
    int time_nodes = 256;
    int check_nodes = 128;
    int simulate_nodes = 64;
    bool operator==(const QuadratureSettings&) const = default;
};

struct OutputSpec {
    std::string dir = "out";
    std::string format = "both";
    bool operator==(const OutputSpec&) const = default;
};

struct Scenario {
    std::string name;
    Task task = Task::analyze;
    RectDomain domain;
    BasisKind basis = BasisKind::canonical;
    int cutoff = 6;
    double alpha = 0.5;
    double a = 1.0, b = 2.0;
    double epsilon = 0.0;
    Region region;
    ActuatorSet actuators;
    TargetSpec target;
    SteeredQuantity steer = SteeredQuantity::gradient;
    std::vector<double> initial_state;
    ControlSpec control;
    std::vector<double> times;
    Thresholds thresholds;
    QuadratureSettings quadrature;
    int minimality_trials = 50;
    unsigned seed = 20261019;
    OutputSpec output;
    bool operator==(const Scenario&) const = default;
};

/// All schema violations of one file, each prefixed by its field path.
class ScenarioError : public ConfigError {
public:
    explicit ScenarioError(std::vector<std::string> errors)
        : ConfigError(join(errors)), errors_(std::move(errors)) {}
    const std::vector<std::string>& errors() const noexcept { return errors_; }

private:
    static std::string join(const std::vector<std::string>& e) {
        std::string s = "invalid scenario:";
        for (const auto& x : e) s += "\n  " + x;
        return s;
    }
    std::vector<std::string> errors_;
};

namespace detail {

class ScenarioReader {
public:
    std::vector<std::string> errors;

    void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

    void check_keys(const YAML::Node& n, const std::string& path, std::initializer_list<const char*> allowed) {
        if (!n.IsMap()) return;
        for (const auto& kv : n) {
            const auto key = kv.first.as<std::string>();
            bool ok = false;
            for (const char* a : allowed) ok = ok || key == a;
            if (!ok) fail(join(path, key), "unknown field");
        }
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }
    static std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

    template <class T>
    bool scalar(const YAML::Node& n, const std::string& path, T& out) {
        if (!n.IsScalar()) {
            fail(path, "expected a scalar");
            return false;
        }
        try {
            out = n.as<T>();
            return true;
        } catch (const YAML::Exception&) {
            fail(path, "cannot read '" + n.Scalar() + "'");
            return false;
        }
    }

    template <class T>
    bool optional(const YAML::Node& parent, const char* key, const std::string& path, T& out) {
        const auto n = parent[key];
        if (!n) return false;
        return scalar(n, join(path, key), out);
    }

    bool number_list(const YAML::Node& n, const std::string& path, std::vector<double>& out) {
        if (!n.IsSequence()) {
            fail(path, "expected a list of numbers");
            return false;
        }
        out.clear();
        bool ok = true;
        for (std::size_t i = 0; i < n.size(); ++i) {
            double v = 0.0;
            if (scalar(n[i], at(path, i), v)) {
                out.push_back(v);
            } else {
                ok = false;
            }
        }
        return ok;
    }

    bool interval(const YAML::Node& n, const std::string& path, Interval& out) {
        std::vector<double> v;
        if (!number_list(n, path, v)) return false;
        if (v.size() != 2) {
            fail(path, "expected [lo, hi]");
            return false;
        }
        out = {v[0], v[1]};
        return true;
    }

    bool box(const YAML::Node& n, const std::string& path, Box& out) {
        if (!n.IsSequence()) {
            fail(path, "expected a box [[lo, hi], ...]");
            return false;
        }
        out.axes.clear();
        bool ok = true;
        for (std::size_t d = 0; d < n.size(); ++d) {
            Interval iv;
            ok = interval(n[d], at(path, d), iv) && ok;
            out.axes.push_back(iv);
        }
        return ok;
    }

    bool region(const YAML::Node& n, const std::string& path, Region& out) {
        if (!n.IsSequence() || n.size() == 0) {
            fail(path, "expected a non-empty list of boxes");
            return false;
        }
        out.boxes.clear();
        bool ok = true;
        for (std::size_t i = 0; i < n.size(); ++i) {
            Box b;
            ok = box(n[i], at(path, i), b) && ok;
            out.boxes.push_back(b);
        }
        return ok;
    }

    void distribution(const YAML::Node& n, const std::string& path, Distribution& out) {
        if (!n.IsMap()) {
            fail(path, "expected a mapping with a 'type'");
            return;
        }
        std::string type;
        if (!n["type"]) {
            fail(join(path, "type"), "missing");
            return;
        }
        if (!scalar(n["type"], join(path, "type"), type)) return;
        if (type == "constant") {
            check_keys(n, path, {"type", "value"});
            ConstantDistribution c;
            optional(n, "value", path, c.value);
            out = c;
        } else if (type == "polynomial") {
            check_keys(n, path, {"type", "terms"});
            PolynomialDistribution p;
            const auto terms = n["terms"];
            if (!terms || !terms.IsSequence()) {
                fail(join(path, "terms"), "expected a list of {coef, powers}");
            } else {
                for (std::size_t i = 0; i < terms.size(); ++i) {
                    const auto tp = at(join(path, "terms"), i);
                    check_keys(terms[i], tp, {"coef", "powers"});
                    PolynomialDistribution::Term t;
                    optional(terms[i], "coef", tp, t.coef);
                    std::vector<double> pw;
                    if (terms[i]["powers"] && number_list(terms[i]["powers"], join(tp, "powers"), pw)) {
                        if (pw.empty() || pw.size() > 2) {
                            fail(join(tp, "powers"), "expected [p] or [p, q]");
                        } else {
                            for (std::size_t d = 0; d < pw.size(); ++d) {
                                if (pw[d] < 0 || pw[d] != std::floor(pw[d]))
                                    fail(at(join(tp, "powers"), d), "powers must be non-negative integers");
                                t.powers[d] = static_cast<int>(pw[d]);
                            }
                        }
                    }
                    p.terms.push_back(t);
                }
            }
            out = p;
        } else if (type == "sine_product") {
            check_keys(n, path, {"type", "amplitude", "frequency", "origin"});
            SineProductDistribution s;
            optional(n, "amplitude", path, s.amplitude);
            for (const char* key : {"frequency", "origin"}) {
                std::vector<double> v;
                if (!n[key]) continue;
                if (!number_list(n[key], join(path, key), v)) continue;
                if (v.empty() || v.size() > 2) {
                    fail(join(path, key), "expected one value per axis");
                    continue;
                }
                auto& dst = std::string(key) == "frequency" ? s.frequency : s.origin;
                for (std::size_t d = 0; d < v.size(); ++d) dst[d] = v[d];
            }
            out = s;
        } else {
            fail(join(path, "type"), "unknown distribution '" + type + "' (constant, polynomial, sine_product)");
        }
    }

    void geometry(const Region& r, const RectDomain& dom, const std::string& path) {
        for (std::size_t i = 0; i < r.boxes.size(); ++i) {
            const auto& b = r.boxes[i];
            const auto bp = at(path, i);
            if (b.axes.size() != dom.axes.size()) {
                fail(bp, detail::concat("box has ", b.axes.size(), " axes, domain has ", dom.axes.size()));
                continue;
            }
            for (std::size_t d = 0; d < b.axes.size(); ++d) {
                const auto& ax = b.axes[d];
                if (!(ax.lo <= ax.hi)) fail(at(bp, d), "lo > hi");
                if (ax.lo < dom.axes[d].lo - 1e-12 || ax.hi > dom.axes[d].hi + 1e-12)
                    fail(at(bp, d), detail::concat("[", ax.lo, ", ", ax.hi, "] leaves the domain [", dom.axes[d].lo,
                                                   ", ", dom.axes[d].hi, "]"));
            }
        }
        try {
            if (errors.empty()) r.validate(dom, path);
        } catch (const Error& e) {
            fail(path, e.what());
        }
    }
};

}  // namespace detail

inline Scenario parse_scenario(const YAML::Node& root) {
    detail::ScenarioReader rd;
    Scenario sc;
    if (!root.IsMap()) throw ScenarioError({"<root>: expected a mapping"});
    rd.check_keys(root, "",
                  {"name", "task", "domain", "basis", "cutoff", "alpha", "window", "epsilon", "region", "actuators",
                   "target", "steer", "initial_state", "control", "times", "thresholds", "quadrature",
                   "minimality_trials", "seed", "output"});

    rd.optional(root, "name", "", sc.name);

    std::string task;
    if (!root["task"]) {
        rd.fail("task", "missing");
    } else if (rd.scalar(root["task"], "task", task)) {
        if (task == "simulate") sc.task = Task::simulate;
        else if (task == "analyze") sc.task = Task::analyze;
        else if (task == "synthesize") sc.task = Task::synthesize;
        else if (task == "reproduce-example") sc.task = Task::reproduce_example;
        else rd.fail("task", "unknown task '" + task + "' (simulate, analyze, synthesize, reproduce-example)");
    }

    bool domain_ok = false;
    if (!root["domain"]) {
        rd.fail("domain", "missing");
    } else if (!root["domain"].IsSequence() || root["domain"].size() < 1 || root["domain"].size() > 2) {
        rd.fail("domain", "expected 1 or 2 intervals [lo, hi]");
    } else {
        domain_ok = true;
        for (std::size_t d = 0; d < root["domain"].size(); ++d) {
            Interval iv;
            if (!rd.interval(root["domain"][d], rd.at("domain", d), iv)) {
                domain_ok = false;
            } else if (!(iv.lo < iv.hi)) {
                rd.fail(rd.at("domain", d), "needs lo < hi");
                domain_ok = false;
            }
            sc.domain.axes.push_back(iv);
        }
    }

    std::string basis;
    if (rd.optional(root, "basis", "", basis)) {
        if (basis == "canonical") sc.basis = BasisKind::canonical;
        else if (basis == "integer_sine") sc.basis = BasisKind::integer_sine;
        else rd.fail("basis", "unknown basis '" + basis + "' (canonical, integer_sine)");
    }
    if (domain_ok && sc.basis == BasisKind::integer_sine &&
        std::any_of(sc.domain.axes.begin(), sc.domain.axes.end(),
                    [](const Interval& ax) { return ax.lo != -1.0 || ax.hi != 1.0; }))
        rd.fail("basis", "integer_sine basis needs the domain [-1, 1]^n");

    if (rd.optional(root, "cutoff", "", sc.cutoff) && sc.cutoff < 1) rd.fail("cutoff", "must be >= 1");

    if (!root["alpha"]) {
        rd.fail("alpha", "missing");
    } else if (rd.scalar(root["alpha"], "alpha", sc.alpha) && !(sc.alpha > 0.0 && sc.alpha <= 1.0)) {
        rd.fail("alpha", detail::concat("must lie in (0, 1], got ", sc.alpha));
    }

    if (!root["window"]) {
        rd.fail("window", "missing");
    } else {
        Interval w;
        if (rd.interval(root["window"], "window", w)) {
            sc.a = w.lo;
            sc.b = w.hi;
            if (!(sc.a > 0.0)) rd.fail(rd.at("window", 0), detail::concat("a must be > 0, got ", sc.a));
            if (!(sc.b > sc.a)) rd.fail(rd.at("window", 1), detail::concat("b must exceed a, got ", sc.b));
        }
    }

    if (rd.optional(root, "epsilon", "", sc.epsilon) && !(sc.epsilon >= 0.0))
        rd.fail("epsilon", "must be >= 0");

    if (root["region"]) {
        if (rd.region(root["region"], "region", sc.region) && domain_ok) rd.geometry(sc.region, sc.domain, "region");
    } else if (domain_ok) {
        sc.region = Region::whole(sc.domain);
    }

    if (const auto acts = root["actuators"]) {
        if (!acts.IsSequence()) {
            rd.fail("actuators", "expected a list");
        } else {
            for (std::size_t i = 0; i < acts.size(); ++i) {
                const auto ap = rd.at("actuators", i);
                Actuator act;
                rd.check_keys(acts[i], ap, {"support", "distribution"});
                if (!acts[i]["support"]) {
                    rd.fail(ap + ".support", "missing");
                } else if (rd.region(acts[i]["support"], ap + ".support", act.support) && domain_ok) {
                    rd.geometry(act.support, sc.domain, ap + ".support");
                }
                if (acts[i]["distribution"]) rd.distribution(acts[i]["distribution"], ap + ".distribution", act.distribution);
                sc.actuators.push_back(std::move(act));
            }
        }
    } else if (sc.task != Task::reproduce_example) {
        rd.fail("actuators", "missing");
    }

    if (const auto t = root["target"]) {
        std::string type;
        if (!t.IsMap() || !t["type"]) {
            rd.fail("target", "expected a mapping with a 'type'");
        } else if (rd.scalar(t["type"], "target.type", type)) {
            if (type == "coefficients") {
                rd.check_keys(t, "target", {"type", "values"});
                sc.target.kind = TargetSpec::Kind::coefficients;
                if (!t["values"]) rd.fail("target.values", "missing");
                else rd.number_list(t["values"], "target.values", sc.target.values);
            } else if (type == "random") {
                rd.check_keys(t, "target", {"type", "seed", "scale"});
                sc.target.kind = TargetSpec::Kind::random;
                rd.optional(t, "seed", "target", sc.target.seed);
                rd.optional(t, "scale", "target", sc.target.scale);
            } else if (type == "mode") {
                rd.check_keys(t, "target", {"type", "k", "l", "amplitude"});
                sc.target.kind = TargetSpec::Kind::mode;
                rd.optional(t, "k", "target", sc.target.k);
                rd.optional(t, "l", "target", sc.target.l);
                rd.optional(t, "amplitude", "target", sc.target.amplitude);
                if (sc.target.k < 1 || sc.target.l < 0) rd.fail("target", "mode indices must be positive");
            } else {
                rd.fail("target.type", "unknown target '" + type + "' (coefficients, random, mode)");
            }
        }
    } else if (sc.task == Task::synthesize) {
        rd.fail("target", "missing (required by synthesize)");
    }

    std::string steer;
    if (rd.optional(root, "steer", "", steer)) {
        if (steer == "gradient") sc.steer = SteeredQuantity::gradient;
        else if (steer == "state") sc.steer = SteeredQuantity::state;
        else rd.fail("steer", "unknown quantity '" + steer + "' (gradient, state)");
    }

    if (root["initial_state"]) rd.number_list(root["initial_state"], "initial_state", sc.initial_state);

    if (const auto c = root["control"]) {
        std::string type;
        rd.check_keys(c, "control", {"type", "values", "frequency"});
        if (!c.IsMap() || !c["type"]) {
            rd.fail("control", "expected a mapping with a 'type'");
        } else if (rd.scalar(c["type"], "control.type", type)) {
            if (type == "zero") sc.control.kind = ControlSpec::Kind::zero;
            else if (type == "constant") sc.control.kind = ControlSpec::Kind::constant;
            else if (type == "cosine") sc.control.kind = ControlSpec::Kind::cosine;
            else rd.fail("control.type", "unknown control '" + type + "' (zero, constant, cosine)");
            if (c["values"]) rd.number_list(c["values"], "control.values", sc.control.values);
            rd.optional(c, "frequency", "control", sc.control.frequency);
            if (sc.control.kind != ControlSpec::Kind::zero && sc.control.values.size() != sc.actuators.size())
                rd.fail("control.values", detail::concat("expected one value per actuator (", sc.actuators.size(), ")"));
        }
    }

    if (root["times"] && rd.number_list(root["times"], "times", sc.times))
        for (std::size_t i = 0; i < sc.times.size(); ++i)
            if (!(sc.times[i] >= sc.a && sc.times[i] <= sc.b))
                rd.fail(rd.at("times", i), detail::concat("must lie in the window [", sc.a, ", ", sc.b, "]"));

    if (const auto th = root["thresholds"]) {
        rd.check_keys(th, "thresholds", {"verdict", "absolute_floor", "truncation"});
        rd.optional(th, "verdict", "thresholds", sc.thresholds.verdict);
        rd.optional(th, "absolute_floor", "thresholds", sc.thresholds.absolute_floor);
        rd.optional(th, "truncation", "thresholds", sc.thresholds.truncation);
        if (!(sc.thresholds.verdict > 0) || !(sc.thresholds.absolute_floor >= 0) || !(sc.thresholds.truncation > 0))
            rd.fail("thresholds", "thresholds must be positive");
    }

    if (const auto q = root["quadrature"]) {
        rd.check_keys(q, "quadrature", {"time_nodes", "check_nodes", "simulate_nodes"});
        rd.optional(q, "time_nodes", "quadrature", sc.quadrature.time_nodes);
        rd.optional(q, "check_nodes", "quadrature", sc.quadrature.check_nodes);
        rd.optional(q, "simulate_nodes", "quadrature", sc.quadrature.simulate_nodes);
        if (sc.quadrature.time_nodes < 2 || sc.quadrature.check_nodes < 2 || sc.quadrature.simulate_nodes < 2)
            rd.fail("quadrature", "node counts must be >= 2");
    }

    if (rd.optional(root, "minimality_trials", "", sc.minimality_trials) && sc.minimality_trials < 0)
        rd.fail("minimality_trials", "must be >= 0");
    rd.optional(root, "seed", "", sc.seed);

    if (const auto o = root["output"]) {
        rd.check_keys(o, "output", {"dir", "format"});
        rd.optional(o, "dir", "output", sc.output.dir);
        if (rd.optional(o, "format", "output", sc.output.format) && sc.output.format != "json" &&
            sc.output.format != "csv" && sc.output.format != "both")
            rd.fail("output.format", "expected json, csv or both");
    }

    if (!rd.errors.empty()) throw ScenarioError(std::move(rd.errors));
    return sc;
}

inline Scenario parse_scenario_string(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ScenarioError({std::string("<syntax>: ") + e.what()});
    }
    return parse_scenario(root);
}

inline Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario_string(ss.str());
}

namespace detail {

inline void emit_interval(YAML::Emitter& e, const Interval& iv) {
    e << YAML::Flow << YAML::BeginSeq << iv.lo << iv.hi << YAML::EndSeq;
}

inline void emit_region(YAML::Emitter& e, const Region& r) {
    e << YAML::BeginSeq;
    for (const auto& b : r.boxes) {
        e << YAML::Flow << YAML::BeginSeq;
        for (const auto& ax : b.axes) emit_interval(e, ax);
        e << YAML::EndSeq;
    }
    e << YAML::EndSeq;
}

inline void emit_numbers(YAML::Emitter& e, const std::vector<double>& v) {
    e << YAML::Flow << YAML::BeginSeq;
    for (double x : v) e << x;
    e << YAML::EndSeq;
}

inline void emit_distribution(YAML::Emitter& e, const Distribution& d) {
    e << YAML::BeginMap;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConstantDistribution>) {
                e << YAML::Key << "type" << YAML::Value << "constant" << YAML::Key << "value" << YAML::Value << v.value;
            } else if constexpr (std::is_same_v<T, PolynomialDistribution>) {
                e << YAML::Key << "type" << YAML::Value << "polynomial" << YAML::Key << "terms" << YAML::Value
                  << YAML::BeginSeq;
                for (const auto& t : v.terms) {
                    e << YAML::Flow << YAML::BeginMap << YAML::Key << "coef" << YAML::Value << t.coef << YAML::Key
                      << "powers" << YAML::Value << YAML::Flow << YAML::BeginSeq;
                    for (int k = 0; k < 2; ++k) e << t.powers[k];
                    e << YAML::EndSeq << YAML::EndMap;
                }
                e << YAML::EndSeq;
            } else {
                e << YAML::Key << "type" << YAML::Value << "sine_product" << YAML::Key << "amplitude" << YAML::Value
                  << v.amplitude;
                e << YAML::Key << "frequency" << YAML::Value << YAML::Flow << YAML::BeginSeq;
                for (int k = 0; k < 2; ++k) e << v.frequency[k];
                e << YAML::EndSeq << YAML::Key << "origin" << YAML::Value << YAML::Flow << YAML::BeginSeq;
                for (int k = 0; k < 2; ++k) e << v.origin[k];
                e << YAML::EndSeq;
            }
        },
        d);
    e << YAML::EndMap;
}

}  // namespace detail

/// Every field is written, so the output doubles as "the scenario with defaults".
inline std::string serialize_scenario(const Scenario& sc) {
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    e << YAML::BeginMap;
    if (!sc.name.empty()) e << YAML::Key << "name" << YAML::Value << sc.name;
    e << YAML::Key << "task" << YAML::Value << to_string(sc.task);
    e << YAML::Key << "domain" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& ax : sc.domain.axes) detail::emit_interval(e, ax);
    e << YAML::EndSeq;
    e << YAML::Key << "basis" << YAML::Value << to_string(sc.basis);
    e << YAML::Key << "cutoff" << YAML::Value << sc.cutoff;
    e << YAML::Key << "alpha" << YAML::Value << sc.alpha;
    e << YAML::Key << "window" << YAML::Value;
    detail::emit_interval(e, {sc.a, sc.b});
    e << YAML::Key << "epsilon" << YAML::Value << sc.epsilon;
    e << YAML::Key << "region" << YAML::Value;
    detail::emit_region(e, sc.region);
    if (!sc.actuators.empty() || sc.task != Task::reproduce_example) {
        e << YAML::Key << "actuators" << YAML::Value << YAML::BeginSeq;
        for (const auto& a : sc.actuators) {
            e << YAML::BeginMap << YAML::Key << "support" << YAML::Value;
            detail::emit_region(e, a.support);
            e << YAML::Key << "distribution" << YAML::Value;
            detail::emit_distribution(e, a.distribution);
            e << YAML::EndMap;
        }
        e << YAML::EndSeq;
    }
    switch (sc.target.kind) {
        case TargetSpec::Kind::none: break;
        case TargetSpec::Kind::coefficients:
            e << YAML::Key << "target" << YAML::Value << YAML::BeginMap << YAML::Key << "type" << YAML::Value
              << "coefficients" << YAML::Key << "values" << YAML::Value;
            detail::emit_numbers(e, sc.target.values);
            e << YAML::EndMap;
            break;
        case TargetSpec::Kind::random:
            e << YAML::Key << "target" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "type"
              << YAML::Value << "random" << YAML::Key << "seed" << YAML::Value << sc.target.seed << YAML::Key
              << "scale" << YAML::Value << sc.target.scale << YAML::EndMap;
            break;
        case TargetSpec::Kind::mode:
            e << YAML::Key << "target" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "type"
              << YAML::Value << "mode" << YAML::Key << "k" << YAML::Value << sc.target.k << YAML::Key << "l"
              << YAML::Value << sc.target.l << YAML::Key << "amplitude" << YAML::Value << sc.target.amplitude
              << YAML::EndMap;
            break;
    }
    e << YAML::Key << "steer" << YAML::Value << to_string(sc.steer);
    if (!sc.initial_state.empty()) {
        e << YAML::Key << "initial_state" << YAML::Value;
        detail::emit_numbers(e, sc.initial_state);
    }
    e << YAML::Key << "control" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "type" << YAML::Value
      << (sc.control.kind == ControlSpec::Kind::zero       ? "zero"
          : sc.control.kind == ControlSpec::Kind::constant ? "constant"
                                                           : "cosine")
      << YAML::Key << "values" << YAML::Value;
    detail::emit_numbers(e, sc.control.values);
    e << YAML::Key << "frequency" << YAML::Value << sc.control.frequency << YAML::EndMap;
    if (!sc.times.empty()) {
        e << YAML::Key << "times" << YAML::Value;
        detail::emit_numbers(e, sc.times);
    }
    e << YAML::Key << "thresholds" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "verdict"
      << YAML::Value << sc.thresholds.verdict << YAML::Key << "absolute_floor" << YAML::Value
      << sc.thresholds.absolute_floor << YAML::Key << "truncation" << YAML::Value << sc.thresholds.truncation
      << YAML::EndMap;
    e << YAML::Key << "quadrature" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "time_nodes"
      << YAML::Value << sc.quadrature.time_nodes << YAML::Key << "check_nodes" << YAML::Value
      << sc.quadrature.check_nodes << YAML::Key << "simulate_nodes" << YAML::Value << sc.quadrature.simulate_nodes
      << YAML::EndMap;
    e << YAML::Key << "minimality_trials" << YAML::Value << sc.minimality_trials;
    e << YAML::Key << "seed" << YAML::Value << sc.seed;
    e << YAML::Key << "output" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "dir" << YAML::Value
      << sc.output.dir << YAML::Key << "format" << YAML::Value << sc.output.format << YAML::EndMap;
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

/// The two-dimensional zone-actuator example: alpha = 0.5 on [2, 4] over
/// [-1, 1]^2 with the sine basis, one zone actuator on omega = [0, 1]^2.
/// The Gramian integrals diverge at alpha = 1/2, hence the cutoff.
inline Scenario example_scenario() {
    Scenario sc;
    sc.name = "zone actuator on [-1,1]^2";
    sc.task = Task::reproduce_example;
    sc.domain = RectDomain{{Interval{-1, 1}, Interval{-1, 1}}};
    sc.basis = BasisKind::integer_sine;
    sc.cutoff = 8;
    sc.alpha = 0.5;
    sc.a = 2.0;
    sc.b = 4.0;
    sc.epsilon = 1e-3;
    sc.region = Region{{Box{{Interval{0, 1}, Interval{0, 1}}}}};
    sc.actuators = {Actuator{sc.region, ConstantDistribution{1.0}}};
    return sc;
}

}  // namespace hadactl
