#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "extham/acceptance.hpp"
#include "extham/errors.hpp"
#include "extham/scenario.hpp"

namespace {

using extham::ScenarioConfig;

extham::Vec parse_list(const std::string& text, const std::string& what) {
    extham::Vec out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string item =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        const char* begin = item.c_str();
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin || *end != '\0')
            throw extham::ConfigError(what + ": expected comma-separated numbers, got '" + text +
                                      "'");
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw extham::ConfigError(what + ": empty list");
    return out;
}

// Every recognised flag, kept optional so that values from a --config file
// survive unless the flag was actually given (flags win).
struct Flags {
    std::string config;
    std::optional<std::string> system, mu, potential, parametrization, scheme, mode;
    std::optional<std::string> q, p, state, traj_out, report_out;
    std::vector<std::string> invariants;
    std::optional<double> mass, c, t0, e0, span, step, abs_tol, rel_tol, energy_scale;
    std::optional<double> eps, flow_span, drift_tol, constraint_tol, scan_tol, symmetry_tol;
    std::optional<long> samples, max_steps;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> method;
    bool no_gate = false;
};

void apply_flags(ScenarioConfig& cfg, const Flags& f) {
    if (f.system) cfg.system = *f.system;
    if (f.mu) cfg.mu = *f.mu;
    if (f.mass) cfg.mass = *f.mass;
    if (f.c) cfg.light_speed = *f.c;
    if (f.potential) cfg.potential = *f.potential;
    if (f.q) cfg.q = parse_list(*f.q, "--q");
    if (f.p) cfg.p = parse_list(*f.p, "--p");
    if (f.t0) cfg.t0 = *f.t0;
    if (f.e0) cfg.e0 = *f.e0;
    if (f.state) {
        const extham::Vec full = parse_list(*f.state, "--state");
        if (full.size() < 4 || full.size() % 2 != 0)
            throw extham::ConfigError(
                "--state needs q1..qn,p1..pn,t,e (an even count of at least 4 numbers)");
        const std::size_t n = (full.size() - 2) / 2;
        cfg.q.assign(full.begin(), full.begin() + n);
        cfg.p.assign(full.begin() + n, full.begin() + 2 * n);
        cfg.t0 = full[2 * n];
        cfg.e0 = full[2 * n + 1];
    }
    if (f.parametrization) cfg.parametrization = *f.parametrization;
    if (f.span) cfg.span = *f.span;
    if (f.method) {
        if (*f.method == "rk4")
            cfg.stepper.method = extham::StepMethod::rk4;
        else if (*f.method == "rk45")
            cfg.stepper.method = extham::StepMethod::rk45;
        else
            throw extham::ConfigError("--method must be rk4 or rk45, got '" + *f.method + "'");
    }
    if (f.step) cfg.stepper.step = *f.step;
    if (f.abs_tol) cfg.stepper.abs_tol = *f.abs_tol;
    if (f.rel_tol) cfg.stepper.rel_tol = *f.rel_tol;
    if (f.max_steps) cfg.stepper.max_steps = *f.max_steps;
    if (f.energy_scale) cfg.stepper.energy_scale = *f.energy_scale;
    if (!f.invariants.empty()) {
        cfg.invariants.clear();
        for (const auto& item : f.invariants) {
            std::size_t pos = 0;
            while (pos <= item.size()) {
                const std::size_t comma = item.find(',', pos);
                const std::string name =
                    item.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
                if (!name.empty()) cfg.invariants.push_back(name);
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
        }
    }
    if (f.drift_tol) cfg.tolerances.drift = *f.drift_tol;
    if (f.constraint_tol) cfg.tolerances.constraint = *f.constraint_tol;
    if (f.scan_tol) cfg.tolerances.scan = *f.scan_tol;
    if (f.symmetry_tol) cfg.tolerances.symmetry = *f.symmetry_tol;
    if (f.samples) cfg.samples = *f.samples;
    if (f.seed) cfg.seed = *f.seed;
    if (f.scheme) cfg.scheme = *f.scheme;
    if (f.mode) cfg.mode = *f.mode;
    if (f.eps) cfg.eps = *f.eps;
    if (f.flow_span) cfg.flow_span = *f.flow_span;
    if (f.no_gate) cfg.gate = false;
    if (f.traj_out) cfg.trajectory_out = *f.traj_out;
    if (f.report_out) cfg.report_out = *f.report_out;
}

ScenarioConfig build_config(const Flags& f) {
    ScenarioConfig cfg;
    if (!f.config.empty()) cfg = extham::load_config_file(f.config);
    apply_flags(cfg, f);
    return cfg;
}

void add_system_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "JSON config file; explicit flags override its values");
    cmd->add_option("--system", f.system, "system name: kepler, relativistic or free-particle");
    cmd->add_option("--mu", f.mu, "Kepler strength: const:<v> or sin:<a>,<w> for 1 + a sin(w t)");
    cmd->add_option("--mass", f.mass, "relativistic rest mass");
    cmd->add_option("--c", f.c, "relativistic light speed");
    cmd->add_option("--potential", f.potential,
                    "relativistic potential: zero, const:<v>, harmonic:<k>, coulomb:<mu>");
    cmd->add_option("--q", f.q, "initial coordinates, comma list (e.g. 1,0)");
    cmd->add_option("--p", f.p, "initial momenta, comma list (e.g. 0,1.2)");
    cmd->add_option("--t0", f.t0, "initial time");
    cmd->add_option("--e", f.e0, "initial energy coordinate (default: on-shell value H(q,p,t0))");
    cmd->add_option("--seed", f.seed, "sampler seed for scans and gates");
    cmd->add_option("--report-out", f.report_out, "write the JSON report to this path");
}

void add_stepper_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--method", f.method, "integrator: rk4 (fixed step) or rk45 (adaptive)");
    cmd->add_option("--step", f.step, "rk4 step size / rk45 initial step");
    cmd->add_option("--abs-tol", f.abs_tol, "rk45 absolute tolerance");
    cmd->add_option("--rel-tol", f.rel_tol, "rk45 relative tolerance");
    cmd->add_option("--max-steps", f.max_steps, "step budget");
    cmd->add_option("--energy-scale", f.energy_scale,
                    "weight of the energy coordinate in the rk45 error norm");
}

std::string pass_str(bool b) { return b ? "PASS" : "FAIL"; }

void print_simulate(const nlohmann::json& doc) {
    const auto& res = doc.at("results");
    std::printf("system: %s (%s)\n", res.at("system").get<std::string>().c_str(),
                res.at("extended").get<std::string>().c_str());
    std::printf("samples: %zu, final param: %.17g\n", res.at("samples").get<std::size_t>(),
                res.at("final_param").get<double>());
    const auto& c = res.at("constraint");
    std::printf("constraint max |He| = %.3e (tol %.1e) %s\n", c.at("max_abs").get<double>(),
                c.at("tolerance").get<double>(), pass_str(c.at("pass").get<bool>()).c_str());
    for (const auto& inv : res.at("invariants"))
        std::printf("%s drift = %.3e (tol %.1e) %s\n", inv.at("name").get<std::string>().c_str(),
                    inv.at("max_abs_deviation").get<double>(), inv.at("tolerance").get<double>(),
                    pass_str(inv.at("pass").get<bool>()).c_str());
    for (const auto& w : doc.at("warnings"))
        std::printf("warning: %s", w.get<std::string>().c_str());
}

void print_bracket(const nlohmann::json& doc) {
    const auto& res = doc.at("results");
    std::printf("system: %s, scheme: %s, samples: %ld, seed: %llu\n",
                res.at("system").get<std::string>().c_str(),
                res.at("scheme").get<std::string>().c_str(), res.at("samples").get<long>(),
                static_cast<unsigned long long>(res.at("seed").get<std::uint64_t>()));
    for (const auto& inv : res.at("invariants"))
        std::printf("%s: max %.3e mean %.3e count %ld failures %ld (tol %.1e) %s\n",
                    inv.at("name").get<std::string>().c_str(), inv.at("max").get<double>(),
                    inv.at("mean").get<double>(), inv.at("count").get<long>(),
                    inv.at("failures").get<long>(), inv.at("tolerance").get<double>(),
                    pass_str(inv.at("pass").get<bool>()).c_str());
}

std::string vec_str(const nlohmann::json& arr) {
    std::string s = "(";
    for (std::size_t i = 0; i < arr.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", arr[i].get<double>());
        s += std::string(i ? ", " : "") + buf;
    }
    return s + ")";
}

void print_state_line(const char* label, const nlohmann::json& st) {
    std::printf("%s: q=%s p=%s t=%.17g e=%.17g\n", label, vec_str(st.at("q")).c_str(),
                vec_str(st.at("p")).c_str(), st.at("t").get<double>(), st.at("e").get<double>());
}

void print_symmetry(const nlohmann::json& doc) {
    const auto& res = doc.at("results");
    std::printf("system: %s, invariant: %s, mode: %s\n",
                res.at("system").get<std::string>().c_str(),
                res.at("invariant").get<std::string>().c_str(),
                res.at("mode").get<std::string>().c_str());
    const auto& gate = res.at("gate");
    if (gate.at("enabled").get<bool>())
        std::printf("gate: max %.3e over %ld states (tol %.1e) %s\n", gate.at("max").get<double>(),
                    gate.at("count").get<long>(), gate.at("tolerance").get<double>(),
                    pass_str(gate.at("pass").get<bool>()).c_str());
    else
        std::printf("gate: skipped\n");
    print_state_line("initial", res.at("initial_state"));
    if (res.contains("delta")) {
        const auto& d = res.at("delta");
        std::printf("delta: dq=%s dp=%s dt=%.17g de=%.17g\n", vec_str(d.at("dq")).c_str(),
                    vec_str(d.at("dp")).c_str(), d.at("dt").get<double>(),
                    d.at("de").get<double>());
    }
    if (res.contains("transformed")) print_state_line("transformed", res.at("transformed"));
    if (res.contains("scaled_rotation")) {
        const auto& sr = res.at("scaled_rotation");
        std::printf("scaled rotation: dt=%.17g dphi=%.17g dpsi=%.17g\n", sr.at("dt").get<double>(),
                    sr.at("dphi").get<double>(), sr.at("dpsi").get<double>());
        const auto& m = sr.at("matrix");
        std::printf("  matrix [[%.17g, %.17g], [%.17g, %.17g]]\n", m[0][0].get<double>(),
                    m[0][1].get<double>(), m[1][0].get<double>(), m[1][1].get<double>());
    }
    if (res.contains("shell_residual")) {
        const auto& s = res.at("shell_residual");
        std::printf("shell |He| change = %.3e (tol %.1e) %s\n", s.at("change").get<double>(),
                    s.at("tolerance").get<double>(), pass_str(s.at("pass").get<bool>()).c_str());
    }
    if (res.contains("rotation_residual")) {
        const auto& s = res.at("rotation_residual");
        std::printf("closed-form rotation residual = %.3e (tol %.1e) %s\n",
                    s.at("value").get<double>(), s.at("tolerance").get<double>(),
                    pass_str(s.at("pass").get<bool>()).c_str());
    }
    if (res.contains("residual")) {
        const auto& s = res.at("residual");
        std::printf("flow commutation residual = %.3e (tol %.1e) %s\n", s.at("value").get<double>(),
                    s.at("tolerance").get<double>(), pass_str(s.at("pass").get<bool>()).c_str());
    }
}

int finish(const extham::CheckReport& report, const ScenarioConfig& cfg,
           void (*printer)(const nlohmann::json&)) {
    printer(report.document);
    if (!cfg.trajectory_out.empty())
        std::printf("trajectory written: %s\n", cfg.trajectory_out.c_str());
    if (!cfg.report_out.empty()) std::printf("report written: %s\n", cfg.report_out.c_str());
    std::printf("verdict: %s\n", pass_str(report.pass).c_str());
    return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"extended-phase-space Hamiltonian toolkit: canonical integration, bracket\n"
                 "scans, and symmetry transformations built from constants of motion"};
    app.require_subcommand(1);

    Flags f;

    CLI::App* sim = app.add_subcommand(
        "simulate", "integrate a system and check the He constraint and monitored invariants");
    add_system_flags(sim, f);
    add_stepper_flags(sim, f);
    sim->add_option("--parametrization", f.parametrization,
                    "s: extended equations in the evolution parameter; t: conventional equations");
    sim->add_option("--span", f.span, "integration span (required, must be positive)");
    sim->add_option("--invariant", f.invariants,
                    "invariant to monitor (repeatable; comma lists accepted)");
    sim->add_option("--drift-tol", f.drift_tol, "verdict tolerance on invariant drift");
    sim->add_option("--constraint-tol", f.constraint_tol, "verdict tolerance on max |He|");
    sim->add_option("--traj-out", f.traj_out, "write the trajectory CSV to this path");

    CLI::App* bra = app.add_subcommand(
        "bracket", "bracket conservation scan of invariants at seeded on-shell states");
    add_system_flags(bra, f);
    bra->add_option("--invariant", f.invariants,
                    "invariant to scan (repeatable; comma lists accepted)");
    bra->add_option("--samples", f.samples, "number of sampled states");
    bra->add_option("--scheme", f.scheme, "gradient scheme: analytic or fd");
    bra->add_option("--scan-tol", f.scan_tol, "verdict tolerance on max |[He, I]|");

    CLI::App* sym = app.add_subcommand(
        "symmetry", "build and check the symmetry transformation generated by an invariant");
    add_system_flags(sym, f);
    add_stepper_flags(sym, f);
    sym->add_option("--invariant", f.invariants, "generating invariant");
    sym->add_option("--state", f.state,
                    "full extended state as q1..qn,p1..pn,t,e (overrides --q/--p/--t0/--e)");
    sym->add_option("--eps", f.eps, "group parameter");
    sym->add_option("--mode", f.mode, "infinitesimal, finite or commutation");
    sym->add_option("--flow-span", f.flow_span, "evolution span for commutation mode");
    sym->add_option("--symmetry-tol", f.symmetry_tol, "verdict tolerance on residuals");
    sym->add_flag("--no-gate", f.no_gate,
                  "skip the bracket-scan admission gate (for intentionally failing demos)");

    CLI::App* chk =
        app.add_subcommand("check", "run the full acceptance suite and report each criterion");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (chk->parsed()) {
            const auto results = extham::run_acceptance(std::cout);
            return extham::all_pass(results) ? 0 : 1;
        }
        const ScenarioConfig cfg = build_config(f);
        if (sim->parsed()) return finish(extham::run_simulate(cfg), cfg, print_simulate);
        if (bra->parsed()) return finish(extham::run_bracket(cfg), cfg, print_bracket);
        if (sym->parsed()) return finish(extham::run_symmetry(cfg), cfg, print_symmetry);
        std::fprintf(stderr, "no subcommand selected\n");
        return 2;
    } catch (const extham::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const extham::DomainError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const extham::NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
