#include <cmath>
#include <memory>
#include <sstream>

#include "doctest.h"

#include "extham/dynamics.hpp"
#include "extham/errors.hpp"
#include "extham/phase_space.hpp"
#include "extham/systems.hpp"

using namespace extham;

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

StepperConfig rk4_cfg(double step) {
    StepperConfig cfg;
    cfg.method = StepMethod::rk4;
    cfg.step = step;
    return cfg;
}

double max_abs_he(const Trajectory& traj, const ExtendedHamiltonian& He) {
    double m = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i)
        m = std::max(m, std::abs(He.eval(traj[i].state)));
    return m;
}

// Evaluation throws outside t <= 0.5; He = -e gives dt/ds = 1 so the run
// reaches the boundary deterministically.
struct BoundedClock final : ExtendedHamiltonian {
    double eval(const ExtendedState& x) const override {
        if (x.t > 0.5) throw DomainError("bounded-clock: t > 0.5");
        return -x.e;
    }
    ExtendedGradient partials(const ExtendedState& x) const override {
        if (x.t > 0.5) throw DomainError("bounded-clock: t > 0.5");
        ExtendedGradient g;
        g.dq.assign(x.dimension(), 0.0);
        g.dp.assign(x.dimension(), 0.0);
        g.de = -1.0;
        return g;
    }
    std::size_t dimension() const override { return 1; }
    std::string name() const override { return "bounded-clock"; }
};

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("canonical right-hand sides") {
    const auto kepler = std::make_shared<const KeplerHamiltonian>();

    SUBCASE("conventional equations") {
        const ConventionalState s{{1.0, 0.0}, {0.0, 1.2}, 0.0};
        const ConventionalRates r = conventional_rhs(*kepler, s);
        CHECK(r.dq == Vec{0.0, 1.2});                             // dH/dp = p
        CHECK(r.dp[0] == doctest::Approx(-1.0).epsilon(1e-14));   // -dH/dq
        CHECK(r.dp[1] == 0.0);
        CHECK(r.de == 0.0);                                       // dH/dt
    }
    SUBCASE("extended equations and the unit time gauge of the standard lift") {
        const auto He = standard_lift(kepler);
        const ExtendedState x = lift(ConventionalState{{1.0, 0.0}, {0.0, 1.2}, 0.0}, *kepler);
        const ExtendedRates r = extended_rhs(*He, x);
        CHECK(r.dq == Vec{0.0, 1.2});
        CHECK(r.dp[0] == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(r.dt == 1.0);  // -dHe/de is identically 1 for a standard lift
        CHECK(r.de == 0.0);
    }
}

TEST_CASE("conventional integration") {
    SUBCASE("free particle moves in a straight line") {
        const FreeParticleHamiltonian free2(2);
        const Trajectory traj = integrate_conventional(
            free2, ConventionalState{{1.0, -2.0}, {0.5, 0.25}, 3.0}, 1.0, rk4_cfg(0.01));
        CHECK(traj.parameter_kind() == ParameterKind::time_t);
        CHECK(traj.front().param == 3.0);  // the parameter is laboratory time
        CHECK(traj.back().param == doctest::Approx(4.0).epsilon(1e-14));
        CHECK(traj.back().state.q[0] == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(traj.back().state.q[1] == doctest::Approx(-1.75).epsilon(1e-12));
        CHECK(traj.back().state.p == Vec{0.5, 0.25});
        // samples carry e = H(q, p, t)
        CHECK(traj.back().state.e == doctest::Approx(0.15625).epsilon(1e-12));
    }
    SUBCASE("circular Kepler orbit closes after one period") {
        const KeplerHamiltonian kepler;
        const Trajectory traj = integrate_conventional(
            kepler, ConventionalState{{1.0, 0.0}, {0.0, 1.0}, 0.0}, kTwoPi, rk4_cfg(1e-3));
        CHECK(traj.back().state.q[0] == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::abs(traj.back().state.q[1]) < 1e-10);
        CHECK(traj.back().state.e == doctest::Approx(-0.5).epsilon(1e-12));
    }
    SUBCASE("span must be positive and finite") {
        const FreeParticleHamiltonian free1(1);
        const ConventionalState s{{0.0}, {1.0}, 0.0};
        CHECK_THROWS_AS(integrate_conventional(free1, s, 0.0, rk4_cfg(1e-3)),
                        std::invalid_argument);
        CHECK_THROWS_AS(integrate_conventional(free1, s, -1.0, rk4_cfg(1e-3)),
                        std::invalid_argument);
        CHECK_THROWS_AS(
            integrate_conventional(free1, s, std::numeric_limits<double>::infinity(),
                                   rk4_cfg(1e-3)),
            std::invalid_argument);
    }
}

TEST_CASE("extended integration") {
    const auto kepler = std::make_shared<const KeplerHamiltonian>();
    const auto He = standard_lift(kepler);
    const ExtendedState x0 = lift(ConventionalState{{1.0, 0.0}, {0.0, 1.2}, 0.0}, *kepler);

    SUBCASE("the constraint He = 0 holds along the run") {
        const Trajectory traj = integrate_extended(*He, x0, 10.0, rk4_cfg(1e-3));
        CHECK(traj.parameter_kind() == ParameterKind::evolution_s);
        CHECK(traj.front().param == 0.0);
        CHECK(traj.back().param == 10.0);  // the last step is clamped to the span
        // one sample per step plus the start (a clamped sliver step may add one)
        CHECK(traj.size() >= 10001);
        CHECK(traj.size() <= 10002);
        CHECK(max_abs_he(traj, *He) < 1e-12);
    }
    SUBCASE("an off-shell start warns and preserves the initial He value") {
        ExtendedState off = x0;
        off.e = -0.18;  // He = -0.1
        std::ostringstream warn;
        const Trajectory traj = integrate_extended(*He, off, 1.0, rk4_cfg(1e-3), &warn);
        CHECK(warn.str().find("off the He = 0 shell") != std::string::npos);
        double lo = 1e300, hi = -1e300;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const double v = He->eval(traj[i].state);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(lo == doctest::Approx(-0.1).epsilon(1e-10));
        CHECK(hi == doctest::Approx(-0.1).epsilon(1e-10));
    }
    SUBCASE("an on-shell start does not warn") {
        std::ostringstream warn;
        integrate_extended(*He, x0, 0.1, rk4_cfg(1e-3), &warn);
        CHECK(warn.str().empty());
    }
    SUBCASE("adaptive integration hits the end of the span exactly") {
        StepperConfig cfg;
        cfg.method = StepMethod::rk45;
        cfg.step = 1e-3;
        cfg.abs_tol = 1e-10;
        cfg.rel_tol = 1e-10;
        const double span = 10.0 * kTwoPi;
        const Trajectory traj = integrate_extended(*He, x0, span, cfg);
        CHECK(traj.back().param == span);
        CHECK(max_abs_he(traj, *He) < 1e-8);
        CHECK(traj.size() < 10000);  // far fewer samples than the fixed-step run
        CHECK(traj.size() > 10);
    }
    SUBCASE("step budget exhaustion raises a numerical error") {
        StepperConfig cfg = rk4_cfg(1e-3);
        cfg.max_steps = 10;
        CHECK_THROWS_AS(integrate_extended(*He, x0, 1.0, cfg), NumericalError);
    }
    SUBCASE("domain failures during the run propagate") {
        const BoundedClock clock;
        const ExtendedState s{{0.0}, {0.0}, 0.0, 0.0};
        CHECK_THROWS_AS(integrate_extended(clock, s, 1.0, rk4_cfg(1e-2)), DomainError);
        CHECK_NOTHROW(integrate_extended(clock, s, 0.4, rk4_cfg(1e-2)));
    }
    SUBCASE("dimension mismatch is rejected") {
        const ExtendedState bad{{1.0}, {0.0}, 0.0, 0.0};
        CHECK_THROWS_AS(integrate_extended(*He, bad, 1.0, rk4_cfg(1e-3)),
                        std::invalid_argument);
    }
    SUBCASE("step configuration is validated") {
        StepperConfig cfg = rk4_cfg(0.0);
        CHECK_THROWS_AS(integrate_extended(*He, x0, 1.0, cfg), std::invalid_argument);
        cfg = rk4_cfg(1e-3);
        cfg.max_steps = 0;
        CHECK_THROWS_AS(integrate_extended(*He, x0, 1.0, cfg), std::invalid_argument);
    }
}

TEST_CASE("drift monitor") {
    const auto free2 = std::make_shared<const FreeParticleHamiltonian>(2);
    const auto He = standard_lift(free2);
    const ExtendedState x0 = lift(ConventionalState{{0.0, 0.0}, {1.0, 2.0}, 0.0}, *free2);
    const Trajectory traj = integrate_extended(*He, x0, 1.0, rk4_cfg(0.01));

    SUBCASE("a drifting quantity reports its maximum and where it occurs") {
        const DriftReport r =
            monitor(traj, [](const ExtendedState& x) { return x.q[0]; }, "q1");
        CHECK(r.name == "q1");
        CHECK(r.initial == 0.0);
        CHECK(r.max_abs_deviation == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.param_at_max == doctest::Approx(1.0).epsilon(1e-12));
        // near-zero initial value: the relative column falls back to absolute
        CHECK(r.max_rel_deviation == doctest::Approx(r.max_abs_deviation).epsilon(1e-12));
    }
    SUBCASE("a conserved quantity reports (almost) no drift") {
        const DriftReport r =
            monitor(traj, [](const ExtendedState& x) { return x.p[1]; }, "p2");
        CHECK(r.initial == 2.0);
        CHECK(r.max_abs_deviation < 1e-14);
    }
    SUBCASE("an empty trajectory is rejected") {
        const Trajectory empty(ParameterKind::evolution_s);
        CHECK_THROWS_AS(monitor(empty, [](const ExtendedState&) { return 0.0; }, "x"),
                        std::invalid_argument);
    }
}

TEST_CASE("interpolation and resampling") {
    const auto kepler = std::make_shared<const KeplerHamiltonian>();
    const auto He = standard_lift(kepler);
    const ExtendedState x0 = lift(ConventionalState{{1.0, 0.0}, {0.0, 1.0}, 0.0}, *kepler);
    const Trajectory traj = integrate_extended(*He, x0, kTwoPi, rk4_cfg(1e-3));

    SUBCASE("exact at sample points") {
        const auto& sample = traj[1234];
        const ExtendedState y = interpolate_state(traj, sample.param);
        CHECK(y.q == sample.state.q);
        CHECK(y.p == sample.state.p);
        CHECK(y.t == sample.state.t);
        CHECK(y.e == sample.state.e);
    }
    SUBCASE("matches the circular orbit between samples") {
        for (const double s : {0.12345, 1.5707963, 3.33333, 5.9}) {
            const ExtendedState y = interpolate_state(traj, s);
            CHECK(y.q[0] == doctest::Approx(std::cos(s)).epsilon(1e-10));
            CHECK(y.q[1] == doctest::Approx(std::sin(s)).epsilon(1e-10));
            CHECK(y.t == doctest::Approx(s).epsilon(1e-12));
        }
    }
    SUBCASE("out-of-range parameters are rejected") {
        CHECK_THROWS_AS(interpolate_state(traj, -0.5), std::invalid_argument);
        CHECK_THROWS_AS(interpolate_state(traj, kTwoPi + 0.5), std::invalid_argument);
    }
    SUBCASE("resampling keeps the requested parameters") {
        const std::vector<double> params{0.0, 1.0, 2.5, 6.0};
        const Trajectory r = resample(traj, params);
        CHECK(r.size() == 4);
        for (std::size_t i = 0; i < params.size(); ++i) CHECK(r[i].param == params[i]);
        CHECK(r[1].state.q[0] == doctest::Approx(std::cos(1.0)).epsilon(1e-10));
        CHECK(r.parameter_kind() == traj.parameter_kind());
    }
    SUBCASE("resampling requires increasing parameters") {
        CHECK_THROWS_AS(resample(traj, {1.0, 1.0}), std::invalid_argument);
        CHECK_THROWS_AS(resample(traj, {2.0, 1.0}), std::invalid_argument);
    }
}

}  // TEST_SUITE
