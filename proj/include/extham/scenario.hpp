#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "extham/dynamics.hpp"
#include "extham/noether.hpp"
#include "extham/phase_space.hpp"
#include "extham/systems.hpp"

namespace extham {

// Pass/fail thresholds a scenario's verdicts are judged against.
struct ToleranceSet {
    double drift = 1e-8;       // per-invariant deviation along a trajectory
    double constraint = 1e-8;  // max |He| along extended runs
    double scan = 1e-5;        // bracket conservation scans
    double symmetry = 1e-9;    // transform / commutation residuals
};

// One reproducible experiment: which system, where it starts, how it is
// integrated, what gets checked, and where results land. Every field has a
// default so a config file or flag set only needs to name what it changes.
struct ScenarioConfig {
    // system selection
    std::string system = "kepler";   // kepler | relativistic | free-particle
    std::string mu = "const:1";      // Kepler strength: const:<v>, or sin:<a>,<w> for 1 + a sin(w t)
    double mass = 1.0;               // relativistic rest mass
    double light_speed = 1.0;        // relativistic c
    std::string potential = "zero";  // zero | const:<v> | harmonic:<k> | coulomb:<mu>

    // initial state
    Vec q{1.0, 0.0};
    Vec p{0.0, 1.0};
    double t0 = 0.0;
    std::optional<double> e0;  // unset: lifted on shell, e = H(q, p, t0)

    // integration
    std::string parametrization = "s";  // s: extended equations; t: conventional equations
    double span = 0.0;                  // must be set > 0 for simulate
    StepperConfig stepper;

    // checks
    std::vector<std::string> invariants{"angular-momentum"};
    ToleranceSet tolerances;
    long samples = 100;        // bracket scan sample count
    std::uint64_t seed = 42;   // sampler seed (scans and gates)
    std::string scheme = "fd";  // fd | analytic gradients for scans
    std::string mode = "infinitesimal";  // infinitesimal | finite | commutation
    double eps = 1e-3;                   // group parameter for symmetry modes
    double flow_span = 1.0;              // evolution span for commutation mode
    bool gate = true;  // admit symmetry generators only after a bracket scan

    // outputs; empty string = do not write that file
    std::string trajectory_out;
    std::string report_out;
};

// The system a config names, in both formulations. For kepler and
// free-particle the extended form is the standard lift; the relativistic pair
// is the quadratic extended form plus its square-root conventional partner.
struct ResolvedSystem {
    std::shared_ptr<const ConventionalHamiltonian> conventional;
    std::shared_ptr<const ExtendedHamiltonian> extended;
};

ResolvedSystem resolve_system(const ScenarioConfig& cfg);

// Named invariants: angular-momentum, runge-lenz (strength frozen at mu(t0)),
// runge-lenz-extended, energy, q1, generator (the system's He). Unknown names
// throw ConfigError.
Invariant resolve_invariant(const std::string& name, const ScenarioConfig& cfg,
                            const ResolvedSystem& sys);
std::vector<std::string> known_invariants();

// Full round-trip between configs and JSON. to_json writes every field
// (resolved defaults included); apply_json accepts a partial document and
// rejects unknown keys or wrongly typed values with ConfigError.
nlohmann::json to_json(const ScenarioConfig& cfg);
void apply_json(ScenarioConfig& cfg, const nlohmann::json& j);
ScenarioConfig load_config_file(const std::string& path);

// Outcome of a scenario run: a self-contained JSON document (echoing the full
// resolved config) plus the overall verdict that drives the exit code.
struct CheckReport {
    nlohmann::json document;
    bool pass = false;
};

void write_report(const CheckReport& report, const std::string& path);

// Integrate, write the trajectory CSV, monitor the configured invariants and
// the He constraint, and judge each against the tolerances.
CheckReport run_simulate(const ScenarioConfig& cfg);

// Bracket conservation scan of each configured invariant against the system's
// extended Hamiltonian at `samples` seeded on-shell states.
CheckReport run_bracket(const ScenarioConfig& cfg);

// Build the symmetry transformation of the first configured invariant and
// check it: mode infinitesimal reports the first-order deltas (plus the
// scaled-rotation decomposition for runge-lenz-extended in the plane), finite
// reports the transformed state and shell preservation, commutation measures
// the evolve-then-map vs map-then-evolve residual.
CheckReport run_symmetry(const ScenarioConfig& cfg);

}  // namespace extham
