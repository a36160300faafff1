#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "extham/extended_function.hpp"
#include "extham/phase_space.hpp"
#include "extham/systems.hpp"

namespace extham {

// How phase-space gradients are obtained. In analytic mode a function without
// analytic partials falls back to central differences; the difference step is
// fd_step * max(1, |coordinate|) per coordinate.
struct GradientScheme {
    enum class Mode { analytic, central_difference };
    Mode mode = Mode::analytic;
    double fd_step = 1e-6;
};

ExtendedGradient gradient(const ExtendedFunction& f, const ExtendedState& x,
                          const GradientScheme& scheme = {});

// Extended Poisson bracket
//   [f, g] = sum_i (df/dq_i dg/dp_i - df/dp_i dg/dq_i) - df/dt dg/de + df/de dg/dt.
// The (t, e) pair enters with the opposite sign pattern to (q, p): [t, e] = -1.
double extended_poisson(const ExtendedFunction& f, const ExtendedFunction& g,
                        const ExtendedState& x, const GradientScheme& scheme = {});

// Total laboratory-time derivative of I along the conventional flow of H:
//   dI/dt = dI/dt|_expl + dI/de dH/dt + sum_i (dI/dq_i dH/dp_i - dI/dp_i dH/dq_i).
// For the standard lift, extended_poisson(He, I) = -total_time_derivative(I, H).
double total_time_derivative(const ExtendedFunction& I, const ConventionalHamiltonian& H,
                             const ExtendedState& x, const GradientScheme& scheme = {});

// Draws on-shell states: q and p components uniform in a box, configurations
// with |q| < r_min rejected, t uniform, e lifted through H. Deterministic for
// a fixed seed.
class OnShellSampler {
public:
    struct Bounds {
        double q_lo = -2.0, q_hi = 2.0;
        double p_lo = -2.0, p_hi = 2.0;
        double t_lo = 0.0, t_hi = 6.283185307179586;
        double r_min = 0.1;
    };

    OnShellSampler(std::shared_ptr<const ConventionalHamiltonian> H, std::uint64_t seed);
    OnShellSampler(std::shared_ptr<const ConventionalHamiltonian> H, std::uint64_t seed,
                   Bounds bounds);

    ExtendedState next();
    const Bounds& bounds() const { return bounds_; }

private:
    double uniform(double lo, double hi);

    std::shared_ptr<const ConventionalHamiltonian> H_;
    Bounds bounds_;
    std::uint64_t state_;
};

struct ScanStatistics {
    double max_abs = 0.0;
    double mean_abs = 0.0;
    long count = 0;     // states actually evaluated
    long failures = 0;  // states skipped because evaluation left the domain
};

// Largest |extended_poisson(He, I)| over `count` sampled on-shell states.
ScanStatistics conservation_scan(const ExtendedFunction& I, const ExtendedHamiltonian& He,
                                 OnShellSampler& sampler, long count,
                                 const GradientScheme& scheme = {});

}  // namespace extham
