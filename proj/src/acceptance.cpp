#include "extham/acceptance.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <memory>
#include <ostream>

#include "extham/brackets.hpp"
#include "extham/dynamics.hpp"
#include "extham/noether.hpp"
#include "extham/phase_space.hpp"
#include "extham/systems.hpp"

namespace extham {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

double max_abs_he(const Trajectory& traj, const ExtendedHamiltonian& He) {
    double m = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i)
        m = std::max(m, std::abs(He.eval(traj[i].state)));
    return m;
}

struct Fixture {
    std::shared_ptr<KeplerHamiltonian> kepler;
    std::shared_ptr<const StandardLift> lift;
    ConventionalState c0;   // eccentric start q=(1,0), p=(0,1.2)
    ExtendedState x0;       // its on-shell embedding
    StepperConfig rk4_1e3;  // fixed-step reference integrator
    Trajectory run;         // extended run over 20 pi at step 1e-3

    Fixture()
        : kepler(std::make_shared<KeplerHamiltonian>(MuFunction::constant(1.0))),
          lift(standard_lift(kepler)),
          c0{{1.0, 0.0}, {0.0, 1.2}, 0.0},
          x0(extham::lift(c0, *kepler)),
          run(ParameterKind::evolution_s) {
        rk4_1e3.method = StepMethod::rk4;
        rk4_1e3.step = 1e-3;
        run = integrate_extended(*lift, x0, 20.0 * kPi, rk4_1e3);
    }
};

// 1. The He = 0 constraint is preserved along the reference run, and the
// fixed-step integrator converges at fourth order. The drift at step 1e-3 sits
// at the roundoff floor (~1e-14), far below the 1e-8 bound, so the order check
// compares two coarser steps whose drifts are truncation-dominated.
CriterionResult criterion_constraint(const Fixture& fx) {
    CriterionResult r{1, "constraint-conservation", false, ""};
    const double drift_ref = max_abs_he(fx.run, *fx.lift);

    auto drift_at = [&](double h) {
        StepperConfig cfg = fx.rk4_1e3;
        cfg.step = h;
        return max_abs_he(integrate_extended(*fx.lift, fx.x0, 20.0 * kPi, cfg), *fx.lift);
    };
    const double coarse = drift_at(8e-3);
    const double fine = drift_at(4e-3);
    const double ratio = coarse / fine;
    const bool truncation_dominated = fine > 1e-13;

    r.pass = drift_ref <= 1e-8 && ratio >= 12.0 && truncation_dominated;
    r.detail = fmt("max |He| = %.2e (tol 1e-8); halving 8e-3 -> 4e-3 drops drift %.2e -> %.2e, ratio %.1f (need >= 12)",
                   drift_ref, coarse, fine, ratio);
    return r;
}

// 2. The conventional equations and the lifted extended equations produce the
// same (q, p, t) path, with the evolution parameter equal to laboratory time.
CriterionResult criterion_gauge(const Fixture& fx) {
    CriterionResult r{2, "gauge-equivalence", false, ""};
    const Trajectory conv = integrate_conventional(*fx.kepler, fx.c0, 20.0 * kPi, fx.rk4_1e3);
    double dev = 0.0, t_vs_s = 0.0;
    const std::size_t count = std::min(conv.size(), fx.run.size());
    for (std::size_t i = 0; i < count; ++i) {
        const ExtendedState& a = fx.run[i].state;
        const ExtendedState& b = conv[i].state;
        for (std::size_t k = 0; k < 2; ++k) {
            dev = std::max(dev, std::abs(a.q[k] - b.q[k]));
            dev = std::max(dev, std::abs(a.p[k] - b.p[k]));
        }
        dev = std::max(dev, std::abs(a.t - b.t));
        t_vs_s = std::max(t_vs_s, std::abs(a.t - fx.run[i].param));
    }
    r.pass = conv.size() == fx.run.size() && dev <= 1e-8 && t_vs_s <= 1e-8;
    r.detail = fmt("max |(q,p,t) difference| = %.2e, max |t - s| = %.2e (tol 1e-8)", dev, t_vs_s);
    return r;
}

// 3. Angular momentum is conserved whether or not the central strength varies
// in time, while the energy coordinate visibly drifts once it does.
CriterionResult criterion_rotation_drift(const Fixture& fx) {
    CriterionResult r{3, "rotation-symmetry-drift", false, ""};
    const Invariant L = angular_momentum();
    auto L_of = [&](const ExtendedState& s) { return L.eval(s); };

    const DriftReport autonomous = monitor(fx.run, L_of, "angular-momentum");

    auto timedep = std::make_shared<KeplerHamiltonian>(MuFunction::sinusoidal(0.1, 1.0));
    auto lift_t = standard_lift(timedep);
    const ExtendedState y0 = lift(fx.c0, *timedep);
    const Trajectory run_t = integrate_extended(*lift_t, y0, 20.0 * kPi, fx.rk4_1e3);
    const DriftReport varying = monitor(run_t, L_of, "angular-momentum");
    const DriftReport energy = monitor(run_t, [](const ExtendedState& s) { return s.e; }, "energy");

    r.pass = autonomous.max_abs_deviation <= 1e-8 && varying.max_abs_deviation <= 1e-8 &&
             energy.max_abs_deviation > 1e-3;
    r.detail = fmt("L drift: constant %.2e, varying %.2e (tol 1e-8); energy drift %.2e (need > 1e-3)",
                   autonomous.max_abs_deviation, varying.max_abs_deviation,
                   energy.max_abs_deviation);
    return r;
}

// 4. The Runge-Lenz component starts at its hand-computed value -0.44, stays
// within 1e-7 of it along the run, and its energy-coordinate form agrees with
// the position form to 1e-12 at every on-shell sample (samples are re-lifted
// so the comparison happens exactly on the shell, where the two forms are the
// same function; off the shell they differ by q1 * He by construction).
CriterionResult criterion_runge_lenz(const Fixture& fx) {
    CriterionResult r{4, "runge-lenz-drift", false, ""};
    const Invariant RL = runge_lenz(1.0);
    const Invariant RLe = runge_lenz_extended();

    const double at_start = RL.eval(fx.x0);
    const DriftReport drift =
        monitor(fx.run, [&](const ExtendedState& s) { return RL.eval(s); }, "runge-lenz");

    double form_gap = 0.0;
    for (std::size_t i = 0; i < fx.run.size(); ++i) {
        ExtendedState s = fx.run[i].state;
        s.e = fx.kepler->eval(s.q, s.p, s.t);  // exact re-lift
        form_gap = std::max(form_gap, std::abs(RLe.eval(s) - RL.eval(s)));
    }

    r.pass = std::abs(at_start - (-0.44)) <= 1e-12 && drift.max_abs_deviation <= 1e-7 &&
             form_gap <= 1e-12;
    r.detail = fmt("value %.15g (expect -0.44), drift %.2e (tol 1e-7), on-shell form gap %.2e (tol 1e-12)",
                   at_start, drift.max_abs_deviation, form_gap);
    return r;
}

// 5. Bracket conservation scans at 100 seeded on-shell states: the three real
// invariants pass with finite-difference and analytic gradients, the control
// coordinate q1 fails loudly.
CriterionResult criterion_scan(const Fixture& fx) {
    CriterionResult r{5, "bracket-scan-gate", false, ""};
    GradientScheme fd;
    fd.mode = GradientScheme::Mode::central_difference;
    const GradientScheme analytic;

    auto scan = [&](const Invariant& I, const GradientScheme& scheme) {
        OnShellSampler sampler(fx.kepler, 42);
        return conservation_scan(*I.fn, *fx.lift, sampler, 100, scheme);
    };
    const double L_fd = scan(angular_momentum(), fd).max_abs;
    const double RL_fd = scan(runge_lenz(1.0), fd).max_abs;
    const double RLe_fd = scan(runge_lenz_extended(), fd).max_abs;
    const double L_an = scan(angular_momentum(), analytic).max_abs;
    const double RL_an = scan(runge_lenz(1.0), analytic).max_abs;
    const double RLe_an = scan(runge_lenz_extended(), analytic).max_abs;
    const double q1_fd = scan(coordinate_q1(), fd).max_abs;

    const double worst_fd = std::max({L_fd, RL_fd, RLe_fd});
    const double worst_an = std::max({L_an, RL_an, RLe_an});
    r.pass = worst_fd <= 1e-5 && worst_an <= 1e-10 && q1_fd >= 1e-1;
    r.detail = fmt("invariants: fd max %.2e (tol 1e-5), analytic max %.2e (tol 1e-10); q1 control %.2e (need >= 1e-1)",
                   worst_fd, worst_an, q1_fd);
    return r;
}

// 6. At the circular state the extended Runge-Lenz generator acts as a time
// shift dt = q1 * d_eps plus the local scaled rotation (1 + A): the matrix
// reproduces the first-order deltas exactly, and the residual against the
// exponential form exp(dphi) R(dpsi) shrinks quadratically in d_eps.
CriterionResult criterion_scaled_rotation(const Fixture&) {
    CriterionResult r{6, "scaled-rotation-structure", false, ""};
    const Invariant RLe = runge_lenz_extended();
    const ExtendedState xc{{1.0, 0.0}, {0.0, 1.0}, 0.0, -0.5};

    bool ok = true;
    double ratio_lo = 0.0, ratio_hi = 0.0;
    std::string shifts;
    bool first = true;
    for (double de : {1e-2, 1e-3, 1e-4}) {
        const InfinitesimalResult inf = infinitesimal_transform(RLe, xc, de);
        const ScaledRotation sr = scaled_rotation_decomposition(xc, de);

        ok = ok && inf.delta.dt == de * xc.q[0];  // time shift, exact
        const Vec qm = apply2(sr.matrix, xc.q);   // matrix form vs delta form
        for (std::size_t i = 0; i < 2; ++i)
            ok = ok && std::abs(qm[i] - inf.state.q[i]) <= 1e-15;

        const Mat2 R = planar_rotation(sr.dpsi);  // exponential form, O(de^2) away
        const Vec qe = apply2(R, xc.q);
        const double scale = std::exp(sr.dphi);
        double resid = 0.0;
        for (std::size_t i = 0; i < 2; ++i)
            resid = std::max(resid, std::abs(scale * qe[i] - inf.state.q[i]));
        const double ratio = resid / (de * de);
        ratio_lo = first ? ratio : std::min(ratio_lo, ratio);
        ratio_hi = first ? ratio : std::max(ratio_hi, ratio);
        first = false;
        shifts += fmt("%s%.0e:%.3f", shifts.empty() ? "" : ", ", de, ratio);
    }
    ok = ok && ratio_hi <= 2.0 * ratio_lo;
    r.pass = ok;
    r.detail = fmt("dt = q1*d_eps exact; matrix = first-order map; quadratic residual ratios {%s} within factor 2",
                   shifts.c_str());
    return r;
}

// 7. Symmetry flows commute with time evolution. The extended Runge-Lenz
// invariant commutes on the shell only, so its flow maps one orbit onto
// another of the same energy; the paths rejoin after a full period. The start
// is therefore a circular orbit whose period equals the evolution span
// exactly (radius (2 pi)^(-2/3) gives period 1), where both the strong
// (angular momentum) and the on-shell (Runge-Lenz) symmetries must commute to
// integrator accuracy, while the non-invariant q1 visibly fails.
CriterionResult criterion_flow_commutation(const Fixture& fx) {
    CriterionResult r{7, "flow-commutation", false, ""};
    const double radius = std::pow(1.0 / (2.0 * kPi), 2.0 / 3.0);
    const ExtendedState xr{{radius, 0.0},
                           {0.0, 1.0 / std::sqrt(radius)},
                           0.0,
                           -1.0 / (2.0 * radius)};

    const double rL = flow_commutation_check(angular_momentum(), *fx.lift, xr, 0.3, 1.0, fx.rk4_1e3);
    const double rRLe =
        flow_commutation_check(runge_lenz_extended(), *fx.lift, xr, 1e-2, 1.0, fx.rk4_1e3);
    const double rq1 = flow_commutation_check(coordinate_q1(), *fx.lift, xr, 0.3, 1.0, fx.rk4_1e3);

    r.pass = rL <= 1e-8 && rRLe <= 1e-8 && rq1 >= 1e-3;
    r.detail = fmt("residuals: angular momentum %.2e, extended Runge-Lenz %.2e (tol 1e-8); q1 control %.2e (need >= 1e-3)",
                   rL, rRLe, rq1);
    return r;
}

// 8. Exponentiating the angular-momentum generator through a quarter turn
// reproduces the closed-form rotation of both q and p.
CriterionResult criterion_finite_rotation(const Fixture& fx) {
    CriterionResult r{8, "finite-rotation", false, ""};
    ExtendedState x = fx.x0;
    x.t = 0.7;  // rotation must not touch t or e
    const ExtendedState y = finite_transform(angular_momentum(), x, kPi / 2.0);
    const Mat2 R = planar_rotation(kPi / 2.0);
    const Vec qr = apply2(R, x.q), pr = apply2(R, x.p);
    double resid = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        resid = std::max(resid, std::abs(y.q[i] - qr[i]));
        resid = std::max(resid, std::abs(y.p[i] - pr[i]));
    }
    resid = std::max(resid, std::abs(y.t - x.t));
    resid = std::max(resid, std::abs(y.e - x.e));
    r.pass = resid <= 1e-9;
    r.detail = fmt("quarter-turn residual vs closed form = %.2e (tol 1e-9)", resid);
    return r;
}

// 9. The relativistic pair is consistent: the time dilation rate dt/ds equals
// gamma = sqrt(2) for |p| = 1 in natural units; the positive energy branch of
// the quadratic form equals the square-root Hamiltonian at 100 seeded states;
// and the s-parametrized trajectory, resampled at laboratory times, matches
// the conventional t-parametrized one.
CriterionResult criterion_relativistic(const Fixture&) {
    CriterionResult r{9, "relativistic-consistency", false, ""};

    auto free_ext = std::make_shared<RelativisticExtended>(1.0, 1.0, zero_potential(2));
    auto free_conv = std::make_shared<RelativisticConventional>(1.0, 1.0, zero_potential(2));
    const ConventionalState f0{{0.0, 0.0}, {0.6, 0.8}, 0.0};
    const ExtendedState fx0 = lift(f0, *free_conv);
    const double gamma = -free_ext->partials(fx0).de;  // dt/ds
    const double gamma_err = std::abs(gamma - std::sqrt(2.0));

    auto pot = harmonic_potential(2, 1.0);
    auto ext = std::make_shared<RelativisticExtended>(1.0, 1.0, pot);
    auto conv = std::make_shared<RelativisticConventional>(1.0, 1.0, pot);
    OnShellSampler sampler(conv, 7);
    double branch_err = 0.0;
    for (int i = 0; i < 100; ++i) {
        const ExtendedState s = sampler.next();
        branch_err = std::max(
            branch_err, std::abs(energy_branch(*ext, s.q, s.p, s.t) - conv->eval(s.q, s.p, s.t)));
    }

    StepperConfig cfg;
    cfg.method = StepMethod::rk4;
    cfg.step = 1e-3;
    const ConventionalState h0{{0.1, 0.2}, {0.6, 0.8}, 0.0};
    const ExtendedState hx0 = lift(h0, *conv);
    const Trajectory srun = integrate_extended(*ext, hx0, 2.0, cfg);
    Trajectory by_time(ParameterKind::time_t);
    for (std::size_t i = 0; i < srun.size(); ++i) by_time.push(srun[i].state.t, srun[i].state);
    const double t_end = by_time.back().param;
    const Trajectory trun = integrate_conventional(*conv, h0, t_end, cfg);
    double resample_err = 0.0;
    for (int k = 1; k <= 25; ++k) {
        const double tv = 0.05 + (t_end - 0.1) * k / 25.0;
        const ExtendedState a = interpolate_state(by_time, tv);
        const ExtendedState b = interpolate_state(trun, tv);
        for (std::size_t i = 0; i < 2; ++i) {
            resample_err = std::max(resample_err, std::abs(a.q[i] - b.q[i]));
            resample_err = std::max(resample_err, std::abs(a.p[i] - b.p[i]));
        }
    }

    r.pass = gamma_err <= 1e-12 && branch_err <= 1e-12 && resample_err <= 1e-6;
    r.detail = fmt("dt/ds error %.2e (tol 1e-12); energy branch vs square-root form %.2e (tol 1e-12); resampled match %.2e (tol 1e-6)",
                   gamma_err, branch_err, resample_err);
    return r;
}

// 10. The extended Hamiltonian itself generates evolution-parameter shifts:
// its infinitesimal transformation is bitwise identical to one explicit Euler
// step of the equations of motion (same partials, same arithmetic).
CriterionResult criterion_shift_identity(const Fixture& fx) {
    CriterionResult r{10, "shift-generator-identity", false, ""};
    const double ds = 1e-3;
    const Invariant gen = generator_invariant(fx.lift);
    const InfinitesimalResult inf = infinitesimal_transform(gen, fx.x0, ds);

    const ExtendedRates rates = extended_rhs(*fx.lift, fx.x0);
    bool same = true;
    for (std::size_t i = 0; i < 2; ++i) {
        same = same && inf.state.q[i] == fx.x0.q[i] + ds * rates.dq[i];
        same = same && inf.state.p[i] == fx.x0.p[i] + ds * rates.dp[i];
        same = same && inf.delta.dq[i] == ds * rates.dq[i];
        same = same && inf.delta.dp[i] == ds * rates.dp[i];
    }
    same = same && inf.state.t == fx.x0.t + ds * rates.dt && inf.delta.dt == ds * rates.dt;
    same = same && inf.state.e == fx.x0.e + ds * rates.de && inf.delta.de == ds * rates.de;

    r.pass = same;
    r.detail = same ? "transform equals one explicit Euler step bitwise"
                    : "transform differs from the explicit Euler step";
    return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(std::ostream& log) {
    const Fixture fx;
    std::vector<CriterionResult> results;
    results.push_back(criterion_constraint(fx));
    results.push_back(criterion_gauge(fx));
    results.push_back(criterion_rotation_drift(fx));
    results.push_back(criterion_runge_lenz(fx));
    results.push_back(criterion_scan(fx));
    results.push_back(criterion_scaled_rotation(fx));
    results.push_back(criterion_flow_commutation(fx));
    results.push_back(criterion_finite_rotation(fx));
    results.push_back(criterion_relativistic(fx));
    results.push_back(criterion_shift_identity(fx));

    for (const auto& r : results)
        log << (r.pass ? "[PASS] " : "[FAIL] ") << r.index << ". " << r.name << " — " << r.detail
            << "\n";
    const bool ok = all_pass(results);
    log << (ok ? "acceptance: all criteria pass\n" : "acceptance: FAILURES present\n");
    return results;
}

bool all_pass(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return !results.empty();
}

}  // namespace extham
