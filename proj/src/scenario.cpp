#include "extham/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

#include "extham/brackets.hpp"
#include "extham/errors.hpp"
#include "extham/trajectory_io.hpp"

namespace extham {

namespace {

double parse_number(const std::string& s, const std::string& what) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(v))
        throw ConfigError(what + ": expected a number, got '" + s + "'");
    return v;
}

// `const:<v>` or `sin:<a>,<w>` (the latter meaning 1 + a sin(w t)).
MuFunction parse_mu(const std::string& spec) {
    if (spec.rfind("const:", 0) == 0)
        return MuFunction::constant(parse_number(spec.substr(6), "mu const value"));
    if (spec.rfind("sin:", 0) == 0) {
        const std::string args = spec.substr(4);
        const auto comma = args.find(',');
        if (comma == std::string::npos)
            throw ConfigError("mu spec 'sin:' needs two comma-separated numbers, got '" + spec + "'");
        const double a = parse_number(args.substr(0, comma), "mu sin amplitude");
        const double w = parse_number(args.substr(comma + 1), "mu sin frequency");
        return MuFunction::sinusoidal(a, w);
    }
    throw ConfigError("unrecognized mu spec '" + spec + "' (use const:<v> or sin:<a>,<w>)");
}

std::shared_ptr<const Potential> parse_potential(const std::string& spec, std::size_t n) {
    if (spec == "zero") return zero_potential(n);
    if (spec.rfind("const:", 0) == 0)
        return constant_potential(n, parse_number(spec.substr(6), "potential const value"));
    if (spec.rfind("harmonic:", 0) == 0)
        return harmonic_potential(n, parse_number(spec.substr(9), "potential harmonic stiffness"));
    if (spec.rfind("coulomb:", 0) == 0)
        return coulomb_potential(n, parse_number(spec.substr(8), "potential coulomb strength"));
    throw ConfigError("unrecognized potential spec '" + spec +
                      "' (use zero, const:<v>, harmonic:<k> or coulomb:<mu>)");
}

void validate_initial_state(const ScenarioConfig& cfg) {
    if (cfg.q.empty() || cfg.q.size() != cfg.p.size())
        throw ConfigError("initial state: q and p must be non-empty and the same length");
    for (double v : cfg.q)
        if (!std::isfinite(v)) throw ConfigError("initial state: non-finite q component");
    for (double v : cfg.p)
        if (!std::isfinite(v)) throw ConfigError("initial state: non-finite p component");
    if (!std::isfinite(cfg.t0)) throw ConfigError("initial state: non-finite t0");
    if (cfg.e0 && !std::isfinite(*cfg.e0)) throw ConfigError("initial state: non-finite e");
}

void validate_common(const ScenarioConfig& cfg) {
    validate_initial_state(cfg);
    if (cfg.scheme != "fd" && cfg.scheme != "analytic")
        throw ConfigError("scheme must be 'fd' or 'analytic', got '" + cfg.scheme + "'");
    if (cfg.parametrization != "s" && cfg.parametrization != "t")
        throw ConfigError("parametrization must be 's' or 't', got '" + cfg.parametrization + "'");
    if (!(cfg.stepper.step > 0.0) || !std::isfinite(cfg.stepper.step))
        throw ConfigError("stepper step must be positive");
    if (!(cfg.stepper.abs_tol > 0.0) || !(cfg.stepper.rel_tol > 0.0))
        throw ConfigError("stepper tolerances must be positive");
    if (cfg.stepper.max_steps <= 0) throw ConfigError("stepper max_steps must be positive");
    if (cfg.samples <= 0) throw ConfigError("samples must be positive");
    if (!(cfg.eps == cfg.eps) || !std::isfinite(cfg.eps)) throw ConfigError("eps must be finite");
}

GradientScheme scheme_of(const ScenarioConfig& cfg) {
    GradientScheme s;
    s.mode = cfg.scheme == "analytic" ? GradientScheme::Mode::analytic
                                      : GradientScheme::Mode::central_difference;
    return s;
}

nlohmann::json state_json(const ExtendedState& x) {
    return {{"q", x.q}, {"p", x.p}, {"t", x.t}, {"e", x.e}};
}

nlohmann::json stats_json(const ScanStatistics& s, double tol, bool pass) {
    return {{"max", s.max_abs}, {"mean", s.mean_abs},     {"count", s.count},
            {"failures", s.failures}, {"tolerance", tol}, {"pass", pass}};
}

nlohmann::json drift_json(const DriftReport& r, double tol, bool pass) {
    return {{"name", r.name},
            {"initial", r.initial},
            {"max_abs_deviation", r.max_abs_deviation},
            {"max_rel_deviation", r.max_rel_deviation},
            {"param_at_max", r.param_at_max},
            {"tolerance", tol},
            {"pass", pass}};
}

ExtendedState initial_extended(const ScenarioConfig& cfg, const ResolvedSystem& sys) {
    const ConventionalState c0{cfg.q, cfg.p, cfg.t0};
    if (cfg.e0) return ExtendedState{cfg.q, cfg.p, cfg.t0, *cfg.e0};
    return lift(c0, *sys.conventional);
}

StepMethod parse_method(const std::string& m) {
    if (m == "rk4") return StepMethod::rk4;
    if (m == "rk45") return StepMethod::rk45;
    throw ConfigError("stepper method must be 'rk4' or 'rk45', got '" + m + "'");
}

std::string method_name(StepMethod m) { return m == StepMethod::rk4 ? "rk4" : "rk45"; }

template <typename T>
T get_as(const nlohmann::json& j, const std::string& key) {
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
}

}  // namespace

ResolvedSystem resolve_system(const ScenarioConfig& cfg) {
    ResolvedSystem out;
    if (cfg.system == "kepler") {
        if (cfg.q.size() != 2)
            throw ConfigError("kepler is a planar system: q and p must have 2 components");
        auto H = std::make_shared<KeplerHamiltonian>(parse_mu(cfg.mu));
        out.conventional = H;
        out.extended = standard_lift(H);
    } else if (cfg.system == "relativistic") {
        auto V = parse_potential(cfg.potential, cfg.q.size());
        if (!(cfg.mass > 0.0) || !(cfg.light_speed > 0.0))
            throw ConfigError("relativistic system needs positive mass and light_speed");
        out.conventional = std::make_shared<RelativisticConventional>(cfg.mass, cfg.light_speed, V);
        out.extended = std::make_shared<RelativisticExtended>(cfg.mass, cfg.light_speed, V);
    } else if (cfg.system == "free-particle") {
        auto H = std::make_shared<FreeParticleHamiltonian>(cfg.q.size());
        out.conventional = H;
        out.extended = standard_lift(H);
    } else {
        throw ConfigError("unknown system '" + cfg.system +
                          "' (known: kepler, relativistic, free-particle)");
    }
    return out;
}

std::vector<std::string> known_invariants() {
    return {"angular-momentum", "runge-lenz", "runge-lenz-extended", "energy", "q1", "generator"};
}

Invariant resolve_invariant(const std::string& name, const ScenarioConfig& cfg,
                            const ResolvedSystem& sys) {
    const std::size_t n = sys.conventional->dimension();
    auto planar_only = [&](const char* who) {
        if (n != 2) throw ConfigError(std::string(who) + " is defined for planar systems only");
    };
    if (name == "angular-momentum") {
        planar_only("angular-momentum");
        return angular_momentum();
    }
    if (name == "runge-lenz") {
        planar_only("runge-lenz");
        return runge_lenz(parse_mu(cfg.mu).value(cfg.t0));
    }
    if (name == "runge-lenz-extended") {
        planar_only("runge-lenz-extended");
        return runge_lenz_extended();
    }
    if (name == "energy") return energy_coordinate();
    if (name == "q1") return coordinate_q1();
    if (name == "generator") return generator_invariant(sys.extended);
    std::string known;
    for (const auto& k : known_invariants()) known += (known.empty() ? "" : ", ") + k;
    throw ConfigError("unknown invariant '" + name + "' (known: " + known + ")");
}

nlohmann::json to_json(const ScenarioConfig& cfg) {
    nlohmann::json j;
    j["system"] = cfg.system;
    j["mu"] = cfg.mu;
    j["mass"] = cfg.mass;
    j["light_speed"] = cfg.light_speed;
    j["potential"] = cfg.potential;
    j["q"] = cfg.q;
    j["p"] = cfg.p;
    j["t0"] = cfg.t0;
    if (cfg.e0)
        j["e0"] = *cfg.e0;
    else
        j["e0"] = nullptr;
    j["parametrization"] = cfg.parametrization;
    j["span"] = cfg.span;
    j["stepper"] = {{"method", method_name(cfg.stepper.method)}, {"step", cfg.stepper.step},
                    {"abs_tol", cfg.stepper.abs_tol},            {"rel_tol", cfg.stepper.rel_tol},
                    {"max_steps", cfg.stepper.max_steps},        {"energy_scale", cfg.stepper.energy_scale}};
    j["invariants"] = cfg.invariants;
    j["tolerances"] = {{"drift", cfg.tolerances.drift},
                       {"constraint", cfg.tolerances.constraint},
                       {"scan", cfg.tolerances.scan},
                       {"symmetry", cfg.tolerances.symmetry}};
    j["samples"] = cfg.samples;
    j["seed"] = cfg.seed;
    j["scheme"] = cfg.scheme;
    j["mode"] = cfg.mode;
    j["eps"] = cfg.eps;
    j["flow_span"] = cfg.flow_span;
    j["gate"] = cfg.gate;
    j["trajectory_out"] = cfg.trajectory_out;
    j["report_out"] = cfg.report_out;
    return j;
}

void apply_json(ScenarioConfig& cfg, const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config document must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "system") cfg.system = get_as<std::string>(value, key);
        else if (key == "mu") cfg.mu = get_as<std::string>(value, key);
        else if (key == "mass") cfg.mass = get_as<double>(value, key);
        else if (key == "light_speed") cfg.light_speed = get_as<double>(value, key);
        else if (key == "potential") cfg.potential = get_as<std::string>(value, key);
        else if (key == "q") cfg.q = get_as<Vec>(value, key);
        else if (key == "p") cfg.p = get_as<Vec>(value, key);
        else if (key == "t0") cfg.t0 = get_as<double>(value, key);
        else if (key == "e0") {
            if (value.is_null())
                cfg.e0.reset();
            else
                cfg.e0 = get_as<double>(value, key);
        } else if (key == "parametrization") cfg.parametrization = get_as<std::string>(value, key);
        else if (key == "span") cfg.span = get_as<double>(value, key);
        else if (key == "stepper") {
            if (!value.is_object()) throw ConfigError("config key 'stepper' must be an object");
            for (const auto& [sk, sv] : value.items()) {
                if (sk == "method") cfg.stepper.method = parse_method(get_as<std::string>(sv, sk));
                else if (sk == "step") cfg.stepper.step = get_as<double>(sv, sk);
                else if (sk == "abs_tol") cfg.stepper.abs_tol = get_as<double>(sv, sk);
                else if (sk == "rel_tol") cfg.stepper.rel_tol = get_as<double>(sv, sk);
                else if (sk == "max_steps") cfg.stepper.max_steps = get_as<long>(sv, sk);
                else if (sk == "energy_scale") cfg.stepper.energy_scale = get_as<double>(sv, sk);
                else throw ConfigError("unknown stepper key '" + sk + "'");
            }
        } else if (key == "invariants") cfg.invariants = get_as<std::vector<std::string>>(value, key);
        else if (key == "tolerances") {
            if (!value.is_object()) throw ConfigError("config key 'tolerances' must be an object");
            for (const auto& [tk, tv] : value.items()) {
                if (tk == "drift") cfg.tolerances.drift = get_as<double>(tv, tk);
                else if (tk == "constraint") cfg.tolerances.constraint = get_as<double>(tv, tk);
                else if (tk == "scan") cfg.tolerances.scan = get_as<double>(tv, tk);
                else if (tk == "symmetry") cfg.tolerances.symmetry = get_as<double>(tv, tk);
                else throw ConfigError("unknown tolerances key '" + tk + "'");
            }
        } else if (key == "samples") cfg.samples = get_as<long>(value, key);
        else if (key == "seed") cfg.seed = get_as<std::uint64_t>(value, key);
        else if (key == "scheme") cfg.scheme = get_as<std::string>(value, key);
        else if (key == "mode") cfg.mode = get_as<std::string>(value, key);
        else if (key == "eps") cfg.eps = get_as<double>(value, key);
        else if (key == "flow_span") cfg.flow_span = get_as<double>(value, key);
        else if (key == "gate") cfg.gate = get_as<bool>(value, key);
        else if (key == "trajectory_out") cfg.trajectory_out = get_as<std::string>(value, key);
        else if (key == "report_out") cfg.report_out = get_as<std::string>(value, key);
        else throw ConfigError("unknown config key '" + key + "'");
    }
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    ScenarioConfig cfg;
    apply_json(cfg, j);
    return cfg;
}

void write_report(const CheckReport& report, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open report output file: " + path);
    f << report.document.dump(2) << '\n';
    if (!f) throw ConfigError("failed writing report file: " + path);
}

CheckReport run_simulate(const ScenarioConfig& cfg) {
    validate_common(cfg);
    if (!(cfg.span > 0.0) || !std::isfinite(cfg.span))
        throw ConfigError("simulate: span must be positive (got " + std::to_string(cfg.span) + ")");
    if (cfg.e0 && cfg.parametrization == "t")
        throw ConfigError("simulate: a custom initial e needs parametrization 's'");

    const ResolvedSystem sys = resolve_system(cfg);
    std::vector<Invariant> invs;
    for (const auto& name : cfg.invariants) invs.push_back(resolve_invariant(name, cfg, sys));

    const ExtendedState x0 = initial_extended(cfg, sys);
    std::ostringstream warn;
    const Trajectory traj =
        cfg.parametrization == "s"
            ? integrate_extended(*sys.extended, x0, cfg.span, cfg.stepper, &warn)
            : integrate_conventional(*sys.conventional, ConventionalState{cfg.q, cfg.p, cfg.t0},
                                     cfg.span, cfg.stepper);

    if (!cfg.trajectory_out.empty()) write_trajectory_csv(cfg.trajectory_out, traj, *sys.extended);

    nlohmann::json results;
    std::vector<std::string> failures;

    results["system"] = sys.conventional->name();
    results["extended"] = sys.extended->name();
    results["samples"] = traj.size();
    results["final_param"] = traj.back().param;
    results["final_state"] = state_json(traj.back().state);

    double max_he = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i)
        max_he = std::max(max_he, std::abs(sys.extended->eval(traj[i].state)));
    // An intentionally off-shell start keeps |He| at its initial value; judge
    // the constraint by its drift from that value in that case.
    double he0 = std::abs(sys.extended->eval(traj.front().state));
    double constraint_measure = cfg.e0 ? std::abs(max_he - he0) : max_he;
    const bool constraint_pass = constraint_measure <= cfg.tolerances.constraint;
    results["constraint"] = {{"max_abs", max_he},
                             {"initial_abs", he0},
                             {"measured", constraint_measure},
                             {"tolerance", cfg.tolerances.constraint},
                             {"pass", constraint_pass}};
    if (!constraint_pass) failures.push_back("constraint");

    results["invariants"] = nlohmann::json::array();
    for (const auto& inv : invs) {
        const DriftReport r =
            monitor(traj, [&](const ExtendedState& s) { return inv.eval(s); }, inv.name);
        const bool pass = r.max_abs_deviation <= cfg.tolerances.drift;
        results["invariants"].push_back(drift_json(r, cfg.tolerances.drift, pass));
        if (!pass) failures.push_back("drift:" + inv.name);
    }

    CheckReport report;
    report.document["command"] = "simulate";
    report.document["config"] = to_json(cfg);
    const std::string w = warn.str();
    report.document["warnings"] = nlohmann::json::array();
    if (!w.empty()) report.document["warnings"].push_back(w);
    report.document["results"] = std::move(results);
    report.document["failures"] = failures;
    report.pass = failures.empty();
    report.document["pass"] = report.pass;
    if (!cfg.report_out.empty()) write_report(report, cfg.report_out);
    return report;
}

CheckReport run_bracket(const ScenarioConfig& cfg) {
    validate_common(cfg);
    const ResolvedSystem sys = resolve_system(cfg);
    std::vector<Invariant> invs;
    for (const auto& name : cfg.invariants) invs.push_back(resolve_invariant(name, cfg, sys));
    if (invs.empty()) throw ConfigError("bracket: no invariants configured");

    const GradientScheme scheme = scheme_of(cfg);
    nlohmann::json results;
    std::vector<std::string> failures;
    results["system"] = sys.conventional->name();
    results["extended"] = sys.extended->name();
    results["scheme"] = cfg.scheme;
    results["samples"] = cfg.samples;
    results["seed"] = cfg.seed;
    results["invariants"] = nlohmann::json::array();

    for (const auto& inv : invs) {
        // A fresh sampler per invariant: every quantity is probed at the same
        // seeded state sequence, so results are comparable and order-free.
        OnShellSampler sampler(sys.conventional, cfg.seed);
        const ScanStatistics stats =
            conservation_scan(*inv.fn, *sys.extended, sampler, cfg.samples, scheme);
        const bool pass = stats.max_abs <= cfg.tolerances.scan && stats.count > 0;
        nlohmann::json row = stats_json(stats, cfg.tolerances.scan, pass);
        row["name"] = inv.name;
        results["invariants"].push_back(std::move(row));
        if (!pass) failures.push_back("scan:" + inv.name);
    }

    CheckReport report;
    report.document["command"] = "bracket";
    report.document["config"] = to_json(cfg);
    report.document["results"] = std::move(results);
    report.document["failures"] = failures;
    report.pass = failures.empty();
    report.document["pass"] = report.pass;
    if (!cfg.report_out.empty()) write_report(report, cfg.report_out);
    return report;
}

CheckReport run_symmetry(const ScenarioConfig& cfg) {
    validate_common(cfg);
    if (cfg.mode != "infinitesimal" && cfg.mode != "finite" && cfg.mode != "commutation")
        throw ConfigError("symmetry mode must be infinitesimal, finite or commutation, got '" +
                          cfg.mode + "'");
    if (cfg.invariants.empty()) throw ConfigError("symmetry: no invariant configured");
    if (cfg.mode == "commutation" && (!(cfg.flow_span > 0.0) || !std::isfinite(cfg.flow_span)))
        throw ConfigError("symmetry: commutation mode needs a positive flow_span");

    const ResolvedSystem sys = resolve_system(cfg);
    const Invariant inv = resolve_invariant(cfg.invariants.front(), cfg, sys);
    const ExtendedState x0 = initial_extended(cfg, sys);

    nlohmann::json results;
    std::vector<std::string> failures;
    results["system"] = sys.conventional->name();
    results["invariant"] = inv.name;
    results["mode"] = cfg.mode;
    results["initial_state"] = state_json(x0);

    bool gate_ok = true;
    if (cfg.gate) {
        const CanonicityReport gate = registration_gate(inv, *sys.extended, sys.conventional, cfg.seed);
        nlohmann::json g = stats_json(gate.stats, gate.tolerance, gate.pass);
        g["enabled"] = true;
        results["gate"] = std::move(g);
        gate_ok = gate.pass;
        if (!gate.pass) failures.push_back("gate");
    } else {
        results["gate"] = {{"enabled", false}};
    }

    if (gate_ok) {
        if (cfg.mode == "infinitesimal") {
            const InfinitesimalResult r = infinitesimal_transform(inv, x0, cfg.eps);
            results["eps"] = cfg.eps;
            results["delta"] = {{"dq", r.delta.dq}, {"dp", r.delta.dp}, {"dt", r.delta.dt},
                                {"de", r.delta.de}};
            results["transformed"] = state_json(r.state);
            if (inv.name == "runge-lenz-extended" && x0.dimension() == 2) {
                const ScaledRotation sr = scaled_rotation_decomposition(x0, cfg.eps);
                results["scaled_rotation"] = {
                    {"dt", sr.dt},
                    {"dphi", sr.dphi},
                    {"dpsi", sr.dpsi},
                    {"matrix", {{sr.matrix[0][0], sr.matrix[0][1]}, {sr.matrix[1][0], sr.matrix[1][1]}}}};
            }
        } else if (cfg.mode == "finite") {
            const ExtendedState y = finite_transform(inv, x0, cfg.eps);
            results["eps"] = cfg.eps;
            results["transformed"] = state_json(y);
            const double before = sys.extended->eval(x0);
            const double after = sys.extended->eval(y);
            const bool shell_pass = std::abs(after - before) <= cfg.tolerances.symmetry;
            results["shell_residual"] = {{"before", before},
                                         {"after", after},
                                         {"change", std::abs(after - before)},
                                         {"tolerance", cfg.tolerances.symmetry},
                                         {"pass", shell_pass}};
            if (!shell_pass) failures.push_back("shell");
            if (inv.name == "angular-momentum" && x0.dimension() == 2) {
                const Mat2 R = planar_rotation(cfg.eps);
                const Vec qr = apply2(R, x0.q), pr = apply2(R, x0.p);
                double resid = 0.0;
                for (std::size_t i = 0; i < 2; ++i) {
                    resid = std::max(resid, std::abs(y.q[i] - qr[i]));
                    resid = std::max(resid, std::abs(y.p[i] - pr[i]));
                }
                const bool rot_pass = resid <= cfg.tolerances.symmetry;
                results["rotation_residual"] = {
                    {"value", resid}, {"tolerance", cfg.tolerances.symmetry}, {"pass", rot_pass}};
                if (!rot_pass) failures.push_back("rotation");
            }
        } else {  // commutation
            const double resid =
                flow_commutation_check(inv, *sys.extended, x0, cfg.eps, cfg.flow_span, cfg.stepper);
            const bool pass = resid <= cfg.tolerances.symmetry;
            results["eps"] = cfg.eps;
            results["flow_span"] = cfg.flow_span;
            results["residual"] = {{"value", resid}, {"tolerance", cfg.tolerances.symmetry},
                                   {"pass", pass}};
            if (!pass) failures.push_back("commutation");
        }
    }

    CheckReport report;
    report.document["command"] = "symmetry";
    report.document["config"] = to_json(cfg);
    report.document["results"] = std::move(results);
    report.document["failures"] = failures;
    report.pass = failures.empty();
    report.document["pass"] = report.pass;
    if (!cfg.report_out.empty()) write_report(report, cfg.report_out);
    return report;
}

}  // namespace extham
