#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "extham/brackets.hpp"
#include "extham/dynamics.hpp"
#include "extham/extended_function.hpp"
#include "extham/phase_space.hpp"
#include "extham/systems.hpp"

namespace extham {

// A named candidate symmetry generator I(q, p, t, e). Whether it actually
// commutes with a given He is established by canonicity_check.
struct Invariant {
    std::shared_ptr<const ExtendedFunction> fn;
    std::string name;
    bool depends_on_e = false;

    double eval(const ExtendedState& x) const { return fn->eval(x); }
};

// Planar angular momentum I = p1 q2 - p2 q1.
Invariant angular_momentum();

// Position-space Runge-Lenz component for the Kepler strength mu (constant):
// I = -q1 p2^2 + q2 p1 p2 + mu q1 / r.
Invariant runge_lenz(double mu);

// Energy-coordinate Runge-Lenz form, equal to runge_lenz on the He = 0 shell:
// I = q1 p1^2 / 2 + q2 p1 p2 - q1 p2^2 / 2 - q1 e. Commutes with the Kepler
// lift only weakly (the bracket is -p1 * He, zero on shell).
Invariant runge_lenz_extended();

// The control non-invariant I = q1.
Invariant coordinate_q1();

// The energy coordinate I = e itself; conserved exactly when the underlying
// system has no explicit time dependence ([He, e] = -dH/dt).
Invariant energy_coordinate();

// Wraps an extended Hamiltonian as the generator of evolution-parameter shifts.
Invariant generator_invariant(std::shared_ptr<const ExtendedHamiltonian> He);

// Change of every coordinate to first order in the group parameter:
// dq = de_ps * dI/dp, dp = -de_ps * dI/dq, de = de_ps * dI/dt, dt = -de_ps * dI/de.
struct SymmetryDelta {
    Vec dq;
    Vec dp;
    double dt = 0.0;
    double de = 0.0;
};

struct InfinitesimalResult {
    ExtendedState state;
    SymmetryDelta delta;
};

InfinitesimalResult infinitesimal_transform(const Invariant& I, const ExtendedState& x,
                                            double d_eps, const GradientScheme& scheme = {});

// Finite group transformation: the generator flow
//   dq/d_eps = dI/dp, dp/d_eps = -dI/dq, dt/d_eps = -dI/de, de/d_eps = dI/dt
// integrated from 0 to eps (RK4 with step |eps|/1000 unless flow_cfg is given).
// eps = 0 returns the state unchanged; negative eps runs the inverse flow.
ExtendedState finite_transform(const Invariant& I, const ExtendedState& x, double eps,
                               const std::optional<StepperConfig>& flow_cfg = std::nullopt,
                               const GradientScheme& scheme = {});

struct CanonicityReport {
    ScanStatistics stats;
    double tolerance = 0.0;
    bool pass = false;
};

// Samples |[He, I]| on shell; pass means the maximum stays within tolerance.
CanonicityReport canonicity_check(const Invariant& I, const ExtendedHamiltonian& He,
                                  OnShellSampler& sampler, long count, double tolerance,
                                  const GradientScheme& scheme = {});

// Sampler/count/tolerance defaults used when an invariant is attached to a
// system (32 states, tolerance 1e-5, central differences).
CanonicityReport registration_gate(const Invariant& I, const ExtendedHamiltonian& He,
                                   std::shared_ptr<const ConventionalHamiltonian> H,
                                   std::uint64_t seed);

// Max-norm distance between "evolve then transform" and "transform then
// evolve" over (q, p, t, e). Exactly zero in exact arithmetic when [He, I] = 0
// strongly; weak (on-shell only) invariants commute with the flow orbit-wise,
// not pointwise, so a generic state yields an O(eps) residual.
double flow_commutation_check(const Invariant& I, const ExtendedHamiltonian& He,
                              const ExtendedState& x0, double eps, double ds,
                              const StepperConfig& cfg,
                              const std::optional<StepperConfig>& flow_cfg = std::nullopt);

using Mat2 = std::array<std::array<double, 2>, 2>;

// Closed-form planar rotation by eps acting identically on q and p:
// [[cos eps, sin eps], [-sin eps, cos eps]].
Mat2 planar_rotation(double eps);
Vec apply2(const Mat2& M, const Vec& v);

// Decomposition of the infinitesimal transformation generated by the extended
// Runge-Lenz invariant: a time shift dt = q1 de_ps plus the local scaled
// rotation (1 + A) with A = de_ps [[p1, p2], [-p2, p1]], i.e. scaling rate
// dphi = p1 de_ps and rotation angle dpsi = p2 de_ps.
struct ScaledRotation {
    double dt = 0.0;
    double dphi = 0.0;
    double dpsi = 0.0;
    Mat2 matrix{};
};

ScaledRotation scaled_rotation_decomposition(const ExtendedState& x, double d_eps);

// Explicit point-transformation generator F2 = sum_i g_i(q, t) P_i + h(q, t),
// with the fixed time map T = t. dg_dq is row-major with (i, j) = dg_i/dq_j.
class PointTransformGenerator {
public:
    virtual ~PointTransformGenerator() = default;
    virtual std::size_t dimension() const = 0;
    virtual Vec g(const Vec& q, double t) const = 0;
    virtual std::vector<double> dg_dq(const Vec& q, double t) const = 0;
    virtual Vec dg_dt(const Vec& q, double t) const = 0;
    virtual double h(const Vec& q, double t) const = 0;
    virtual Vec dh_dq(const Vec& q, double t) const = 0;
    virtual double dh_dt(const Vec& q, double t) const = 0;
    virtual std::string name() const = 0;
};

std::shared_ptr<const PointTransformGenerator> identity_generator(std::size_t n);
// g = R(angle) q, h = 0 (planar point rotation)
std::shared_ptr<const PointTransformGenerator> rotation_generator(double angle);
// g = q, h = a t (energy gauge shift e -> e + a)
std::shared_ptr<const PointTransformGenerator> gauge_generator(std::size_t n, double a);

struct SubgroupTransform {
    ExtendedState state;       // (Q, P, T = t, E = e + shift)
    double hamiltonian_shift;  // dF2/dt, so H' = H + shift
};

// Applies Q = dF2/dP, p = dF2/dq (solved for P), E = e + dF2/dt. Throws
// std::invalid_argument if the generator Jacobian dg/dq is singular.
SubgroupTransform conventional_subgroup_transform(const PointTransformGenerator& f2,
                                                  const ExtendedState& x);

}  // namespace extham
