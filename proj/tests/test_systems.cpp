#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"

#include "extham/brackets.hpp"
#include "extham/errors.hpp"
#include "extham/systems.hpp"

using namespace extham;

namespace {

// |analytic - finite difference| within a mixed absolute/relative band.
void check_close(double got, double want, double rel = 1e-5, double abs_floor = 1e-7) {
    CHECK(std::abs(got - want) <= std::max(abs_floor, rel * std::abs(want)));
}

void check_partials_consistent(const ExtendedHamiltonian& He, const ExtendedState& x) {
    GradientScheme fd;
    fd.mode = GradientScheme::Mode::central_difference;
    const ExtendedGradient a = He.partials(x);
    const ExtendedGradient n = gradient(He, x, fd);
    REQUIRE(a.dq.size() == n.dq.size());
    for (std::size_t i = 0; i < a.dq.size(); ++i) {
        check_close(a.dq[i], n.dq[i]);
        check_close(a.dp[i], n.dp[i]);
    }
    check_close(a.dt, n.dt);
    check_close(a.de, n.de);
}

}  // namespace

TEST_SUITE("systems") {

TEST_CASE("mu parameter models") {
    SUBCASE("constant") {
        const MuFunction mu = MuFunction::constant(2.5);
        CHECK(mu.value(0.0) == 2.5);
        CHECK(mu.value(17.0) == 2.5);
        CHECK(mu.derivative(3.0) == 0.0);
        CHECK_FALSE(mu.time_dependent());
    }
    SUBCASE("sinusoidal modulation 1 + a sin(w t)") {
        const MuFunction mu = MuFunction::sinusoidal(0.1, 2.0);
        CHECK(mu.value(0.0) == 1.0);
        CHECK(mu.value(0.25 * M_PI) == doctest::Approx(1.1).epsilon(1e-14));
        CHECK(mu.derivative(0.0) == doctest::Approx(0.2).epsilon(1e-14));
        CHECK(mu.time_dependent());
    }
    SUBCASE("callable without derivative falls back to differences") {
        const MuFunction mu = MuFunction::from_callable([](double t) { return t * t; });
        CHECK(mu.value(3.0) == 9.0);
        CHECK(mu.derivative(3.0) == doctest::Approx(6.0).epsilon(1e-8));
        CHECK(mu.time_dependent());
    }
}

TEST_CASE("kepler Hamiltonian values and partials") {
    const KeplerHamiltonian kepler;  // mu = 1

    SUBCASE("value at the reference states") {
        CHECK(kepler.eval({1.0, 0.0}, {0.0, 1.2}, 0.0) == doctest::Approx(-0.28).epsilon(1e-14));
        CHECK(kepler.eval({3.0, 4.0}, {1.0, 2.0}, 0.0) == doctest::Approx(2.3).epsilon(1e-14));
    }
    SUBCASE("coordinate gradient is (mu / r^3) q") {
        const Vec g1 = kepler.dq({1.0, 0.0}, {0.0, 1.2}, 0.0);
        CHECK(g1[0] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(g1[1] == 0.0);
        const Vec g2 = kepler.dq({3.0, 4.0}, {1.0, 2.0}, 0.0);
        CHECK(g2[0] == doctest::Approx(3.0 / 125.0).epsilon(1e-14));
        CHECK(g2[1] == doctest::Approx(4.0 / 125.0).epsilon(1e-14));
    }
    SUBCASE("momentum gradient is p; no explicit time dependence") {
        const Vec g = kepler.dp({3.0, 4.0}, {1.0, 2.0}, 0.0);
        CHECK(g == Vec{1.0, 2.0});
        CHECK(kepler.dt({3.0, 4.0}, {1.0, 2.0}, 0.7) == 0.0);
    }
    SUBCASE("time-dependent strength enters through -mu'(t)/r") {
        const KeplerHamiltonian varying(MuFunction::sinusoidal(0.1, 1.0));
        CHECK(varying.dt({1.0, 0.0}, {0.0, 1.0}, 0.0) == doctest::Approx(-0.1).epsilon(1e-12));
        CHECK(varying.eval({1.0, 0.0}, {0.0, 1.0}, 0.0) ==
              doctest::Approx(-0.5).epsilon(1e-14));  // mu(0) = 1
    }
    SUBCASE("singularity guard") {
        CHECK(KeplerHamiltonian::singularity_radius == 1e-8);
        CHECK_THROWS_AS(kepler.eval({1e-9, 0.0}, {0.0, 1.0}, 0.0), DomainError);
        CHECK_THROWS_AS(kepler.dq({0.0, 0.0}, {0.0, 1.0}, 0.0), DomainError);
        CHECK_NOTHROW(kepler.eval({0.5, 0.0}, {0.0, 1.0}, 0.0));
    }
}

TEST_CASE("free particle Hamiltonian") {
    const FreeParticleHamiltonian free2(2);
    CHECK(free2.dimension() == 2);
    CHECK(free2.eval({5.0, -1.0}, {3.0, 4.0}, 0.0) == doctest::Approx(12.5).epsilon(1e-14));
    CHECK(free2.dq({5.0, -1.0}, {3.0, 4.0}, 0.0) == Vec{0.0, 0.0});
    CHECK(free2.dp({5.0, -1.0}, {3.0, 4.0}, 0.0) == Vec{3.0, 4.0});
    CHECK(free2.dt({5.0, -1.0}, {3.0, 4.0}, 0.0) == 0.0);
}

TEST_CASE("potential library") {
    SUBCASE("zero and constant") {
        const auto z = zero_potential(2);
        CHECK(z->eval({3.0, 4.0}, 1.0) == 0.0);
        CHECK(z->dq({3.0, 4.0}, 1.0) == Vec{0.0, 0.0});
        CHECK(z->dt({3.0, 4.0}, 1.0) == 0.0);
        const auto c = constant_potential(3, -2.5);
        CHECK(c->eval({1.0, 2.0, 3.0}, 0.0) == -2.5);
        CHECK(c->dq({1.0, 2.0, 3.0}, 0.0) == Vec{0.0, 0.0, 0.0});
    }
    SUBCASE("harmonic V = k/2 |q|^2") {
        const auto h = harmonic_potential(2, 2.0);
        CHECK(h->eval({3.0, 4.0}, 0.0) == doctest::Approx(25.0).epsilon(1e-14));
        const Vec g = h->dq({3.0, 4.0}, 0.0);
        CHECK(g[0] == doctest::Approx(6.0).epsilon(1e-14));
        CHECK(g[1] == doctest::Approx(8.0).epsilon(1e-14));
    }
    SUBCASE("coulomb V = -mu/|q| with guarded origin") {
        const auto c = coulomb_potential(2, 2.0);
        CHECK(c->eval({3.0, 4.0}, 0.0) == doctest::Approx(-0.4).epsilon(1e-14));
        const Vec g = c->dq({3.0, 4.0}, 0.0);
        CHECK(g[0] == doctest::Approx(0.048).epsilon(1e-14));
        CHECK(g[1] == doctest::Approx(0.064).epsilon(1e-14));
        CHECK_THROWS_AS(c->eval({0.0, 0.0}, 0.0), DomainError);
    }
}

TEST_CASE("standard lift He = H - e") {
    const auto kepler = std::make_shared<const KeplerHamiltonian>();
    const auto He = standard_lift(kepler);
    CHECK(He->name() == "kepler-lift");
    CHECK(He->dimension() == 2);

    const ExtendedState x = lift(ConventionalState{{1.0, 0.0}, {0.0, 1.2}, 0.3}, *kepler);
    CHECK(He->eval(x) == 0.0);

    ExtendedState off = x;
    off.e += 0.25;
    CHECK(He->eval(off) == doctest::Approx(-0.25).epsilon(1e-14));

    const ExtendedGradient g = He->partials(x);
    CHECK(g.dq == kepler->dq(x.q, x.p, x.t));
    CHECK(g.dp == kepler->dp(x.q, x.p, x.t));
    CHECK(g.dt == kepler->dt(x.q, x.p, x.t));
    CHECK(g.de == -1.0);
    CHECK(He->has_analytic_partials());
}

TEST_CASE("relativistic pair: quadratic extended form and square-root form") {
    const auto He = std::make_shared<const RelativisticExtended>(1.0, 1.0, zero_potential(2));
    const RelativisticConventional H(1.0, 1.0, zero_potential(2));

    SUBCASE("He vanishes at the physical energy and dt/ds is the Lorentz factor") {
        const double gamma = std::sqrt(2.0);  // p^2 = 1, m = c = 1
        const ExtendedState x{{0.0, 0.0}, {0.6, 0.8}, 0.0, gamma};
        CHECK(He->eval(x) == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(std::abs(He->eval(x)) < 1e-14);
        const ExtendedGradient g = He->partials(x);
        CHECK(-g.de == doctest::Approx(gamma).epsilon(1e-14));
    }
    SUBCASE("square-root form at the same state") {
        CHECK(H.eval({0.0, 0.0}, {0.6, 0.8}, 0.0) ==
              doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
        CHECK(H.dt({0.0, 0.0}, {0.6, 0.8}, 0.0) == 0.0);
        // dH/dp = p c^2 / sqrt(p^2 c^2 + m^2 c^4): the relativistic velocity
        const Vec v = H.dp({0.0, 0.0}, {0.6, 0.8}, 0.0);
        CHECK(v[0] == doctest::Approx(0.6 / std::sqrt(2.0)).epsilon(1e-14));
        CHECK(v[1] == doctest::Approx(0.8 / std::sqrt(2.0)).epsilon(1e-14));
    }
    SUBCASE("positive-energy branch agrees with the square-root form") {
        const auto pot = harmonic_potential(2, 1.0);
        const auto He2 = std::make_shared<const RelativisticExtended>(1.3, 2.0, pot);
        const RelativisticConventional H2(1.3, 2.0, pot);
        const auto sampler_base = std::make_shared<const RelativisticConventional>(1.3, 2.0, pot);
        OnShellSampler sampler(sampler_base, 11);
        for (int k = 0; k < 25; ++k) {
            const ExtendedState x = sampler.next();
            const double b = energy_branch(*He2, x.q, x.p, x.t);
            const double c = H2.eval(x.q, x.p, x.t);
            CHECK(std::abs(b - c) <= 1e-12 * std::max(1.0, std::abs(c)));
        }
    }
    SUBCASE("invalid physical constants are rejected") {
        CHECK_THROWS_AS(RelativisticExtended(0.0, 1.0, zero_potential(2)), std::invalid_argument);
        CHECK_THROWS_AS(RelativisticExtended(1.0, -1.0, zero_potential(2)), std::invalid_argument);
        CHECK_THROWS_AS(RelativisticConventional(-1.0, 1.0, zero_potential(2)),
                        std::invalid_argument);
    }
}

TEST_CASE("analytic partials agree with central differences at sampled states") {
    struct Case {
        std::shared_ptr<const ExtendedHamiltonian> He;
        std::shared_ptr<const ConventionalHamiltonian> H;  // drives the sampler
    };
    std::vector<Case> cases;

    const auto kc = std::make_shared<const KeplerHamiltonian>();
    cases.push_back({standard_lift(kc), kc});
    const auto ks =
        std::make_shared<const KeplerHamiltonian>(MuFunction::sinusoidal(0.3, 1.7));
    cases.push_back({standard_lift(ks), ks});
    const auto fr = std::make_shared<const FreeParticleHamiltonian>(3);
    cases.push_back({standard_lift(fr), fr});
    for (const auto& pot : {zero_potential(2), harmonic_potential(2, 0.8),
                            coulomb_potential(2, 1.5), constant_potential(2, 0.4)}) {
        cases.push_back({std::make_shared<const RelativisticExtended>(1.2, 1.5, pot),
                         std::make_shared<const RelativisticConventional>(1.2, 1.5, pot)});
    }

    for (const auto& c : cases) {
        CAPTURE(c.He->name());
        OnShellSampler sampler(c.H, 99);
        for (int k = 0; k < 100; ++k) {
            ExtendedState x = sampler.next();
            x.e += 0.1;  // leave the shell; partials must hold off shell too
            check_partials_consistent(*c.He, x);
        }
    }
}

}  // TEST_SUITE
