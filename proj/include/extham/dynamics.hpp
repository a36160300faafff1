#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "extham/phase_space.hpp"
#include "extham/systems.hpp"

namespace extham {

// Right-hand sides of the canonical equations in laboratory time:
// dq/dt = dH/dp, dp/dt = -dH/dq, de/dt = dH/dt.
struct ConventionalRates {
    Vec dq;
    Vec dp;
    double de = 0.0;
};

// Right-hand sides of the extended canonical equations in the evolution
// parameter s: dq/ds = dHe/dp, dp/ds = -dHe/dq, dt/ds = -dHe/de, de/ds = dHe/dt.
struct ExtendedRates {
    Vec dq;
    Vec dp;
    double dt = 0.0;
    double de = 0.0;
};

ConventionalRates conventional_rhs(const ConventionalHamiltonian& H, const ConventionalState& s);
ExtendedRates extended_rhs(const ExtendedHamiltonian& He, const ExtendedState& x);

enum class StepMethod { rk4, rk45 };

struct StepperConfig {
    StepMethod method = StepMethod::rk4;
    double step = 1e-3;        // fixed step for rk4, initial step for rk45
    double abs_tol = 1e-10;    // rk45 only
    double rel_tol = 1e-10;    // rk45 only
    long max_steps = 20000000;
    double energy_scale = 1.0; // multiplies abs_tol on the e component (unit robustness)
};

// Integrates dq/dt, dp/dt over [initial.t, initial.t + span]. Samples carry
// e = H(q, p, t); the trajectory parameter is laboratory time.
// span must be positive and finite.
Trajectory integrate_conventional(const ConventionalHamiltonian& H, const ConventionalState& initial,
                                  double span, const StepperConfig& cfg);

// Integrates the extended equations over s in [0, span]. An initial state off
// the He = 0 shell is accepted with a warning on `warnings` (default stderr);
// He then stays at its initial value instead of zero.
Trajectory integrate_extended(const ExtendedHamiltonian& He, const ExtendedState& initial,
                              double span, const StepperConfig& cfg,
                              std::ostream* warnings = nullptr);

// Drift of a scalar quantity along a trajectory, relative to its first sample.
struct DriftReport {
    std::string name;
    double initial = 0.0;
    double max_abs_deviation = 0.0;
    double max_rel_deviation = 0.0;  // abs deviation / |initial| (or abs, if initial ~ 0)
    double param_at_max = 0.0;
};

DriftReport monitor(const Trajectory& traj,
                    const std::function<double(const ExtendedState&)>& quantity,
                    const std::string& name);

// Local cubic (4-point Lagrange) interpolation of every state component at the
// given parameter value; exact at sample points. Parameters outside the
// sampled range raise std::invalid_argument.
ExtendedState interpolate_state(const Trajectory& traj, double param);

// Interpolates the trajectory at each of the (strictly increasing) parameters.
Trajectory resample(const Trajectory& traj, const std::vector<double>& params);

}  // namespace extham
