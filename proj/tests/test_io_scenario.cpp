#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "doctest.h"

#include "extham/dynamics.hpp"
#include "extham/errors.hpp"
#include "extham/scenario.hpp"
#include "extham/systems.hpp"
#include "extham/trajectory_io.hpp"

using namespace extham;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/extham_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

Trajectory short_run(const ExtendedHamiltonian& He, const ExtendedState& x0, double span) {
    StepperConfig cfg;
    cfg.method = StepMethod::rk4;
    cfg.step = 1e-2;
    return integrate_extended(He, x0, span, cfg);
}

}  // namespace

TEST_SUITE("io_scenario") {

TEST_CASE("trajectory CSV round-trips bit-exactly") {
    const auto kepler = std::make_shared<const KeplerHamiltonian>();
    const auto He = standard_lift(kepler);
    const ExtendedState x0 = lift(ConventionalState{{1.0, 0.0}, {0.0, 1.2}, 0.0}, *kepler);
    const Trajectory traj = short_run(*He, x0, 0.5);

    std::ostringstream os;
    write_trajectory_csv(os, traj, *He);
    const std::string text = os.str();
    CHECK(text.rfind("param,t,e,q1,q2,p1,p2,He_residual\n", 0) == 0);

    std::istringstream is(text);
    const ReadTrajectory r = read_trajectory_csv(is, ParameterKind::evolution_s);
    CHECK(r.traj.parameter_kind() == ParameterKind::evolution_s);
    REQUIRE(r.traj.size() == traj.size());
    REQUIRE(r.he_residual.size() == traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        CHECK(r.traj[i].param == traj[i].param);
        CHECK(r.traj[i].state.q == traj[i].state.q);
        CHECK(r.traj[i].state.p == traj[i].state.p);
        CHECK(r.traj[i].state.t == traj[i].state.t);
        CHECK(r.traj[i].state.e == traj[i].state.e);
        CHECK(r.he_residual[i] == He->eval(traj[i].state));
    }
}

TEST_CASE("trajectory CSV file round-trip and error handling") {
    const auto free1 = std::make_shared<const FreeParticleHamiltonian>(1);
    const auto He = standard_lift(free1);
    const ExtendedState x0 = lift(ConventionalState{{0.0}, {1.0}, 0.0}, *free1);
    const Trajectory traj = short_run(*He, x0, 0.1);

    SUBCASE("write and read through a file path") {
        TempFile f("roundtrip.csv");
        write_trajectory_csv(f.path, traj, *He);
        const ReadTrajectory r = read_trajectory_csv(f.path, ParameterKind::evolution_s);
        CHECK(r.traj.size() == traj.size());
        CHECK(r.traj.back().state.q[0] == traj.back().state.q[0]);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_trajectory_csv("/tmp/extham_test_does_not_exist.csv",
                                            ParameterKind::evolution_s),
                        ConfigError);
    }
    SUBCASE("bad header") {
        std::istringstream is("time,q,p\n0,0,0\n");
        CHECK_THROWS_AS(read_trajectory_csv(is, ParameterKind::evolution_s), ConfigError);
    }
    SUBCASE("wrong field count") {
        std::istringstream is("param,t,e,q1,p1,He_residual\n0,0,0,0\n");
        CHECK_THROWS_AS(read_trajectory_csv(is, ParameterKind::evolution_s), ConfigError);
    }
    SUBCASE("unparsable number") {
        std::istringstream is("param,t,e,q1,p1,He_residual\n0,0,zero,0,1,0\n");
        CHECK_THROWS_AS(read_trajectory_csv(is, ParameterKind::evolution_s), ConfigError);
    }
    SUBCASE("out-of-order rows are rejected through trajectory validation") {
        std::istringstream is(
            "param,t,e,q1,p1,He_residual\n"
            "0,0,0.5,0,1,0\n"
            "0,0,0.5,0,1,0\n");
        CHECK_THROWS_AS(read_trajectory_csv(is, ParameterKind::evolution_s),
                        std::invalid_argument);
    }
}

TEST_CASE("scenario configuration serialization") {
    SUBCASE("defaults round-trip through JSON") {
        const ScenarioConfig base;
        const nlohmann::json j = to_json(base);
        ScenarioConfig rebuilt;
        apply_json(rebuilt, j);
        CHECK(to_json(rebuilt) == j);
        CHECK(j.at("e0").is_null());
        CHECK(j.at("stepper").at("method") == "rk4");
        CHECK(j.at("tolerances").at("drift") == 1e-8);
    }
    SUBCASE("partial documents update only what they name") {
        ScenarioConfig cfg;
        apply_json(cfg, nlohmann::json{{"span", 2.5}, {"seed", 7}});
        CHECK(cfg.span == 2.5);
        CHECK(cfg.seed == 7);
        CHECK(cfg.system == "kepler");  // untouched default
        apply_json(cfg, nlohmann::json{{"e0", -0.5}});
        REQUIRE(cfg.e0.has_value());
        CHECK(*cfg.e0 == -0.5);
        apply_json(cfg, nlohmann::json{{"e0", nullptr}});
        CHECK_FALSE(cfg.e0.has_value());
        apply_json(cfg, nlohmann::json{{"stepper", {{"method", "rk45"}, {"abs_tol", 1e-9}}}});
        CHECK(cfg.stepper.method == StepMethod::rk45);
        CHECK(cfg.stepper.abs_tol == 1e-9);
        CHECK(cfg.stepper.step == 1e-3);  // untouched
    }
    SUBCASE("unknown keys and wrong types are rejected") {
        ScenarioConfig cfg;
        CHECK_THROWS_AS(apply_json(cfg, nlohmann::json{{"bogus", 1}}), ConfigError);
        CHECK_THROWS_AS(apply_json(cfg, nlohmann::json{{"span", "three"}}), ConfigError);
        CHECK_THROWS_AS(apply_json(cfg, nlohmann::json{{"q", {1.0, "a"}}}), ConfigError);
        CHECK_THROWS_AS(apply_json(cfg, nlohmann::json{{"stepper", {{"bogus", 1}}}}),
                        ConfigError);
        CHECK_THROWS_AS(apply_json(cfg, nlohmann::json{{"tolerances", {{"bogus", 1}}}}),
                        ConfigError);
        CHECK_THROWS_AS(apply_json(cfg, nlohmann::json{{"stepper", {{"method", "euler"}}}}),
                        ConfigError);
    }
    SUBCASE("config files") {
        TempFile good("cfg_good.json");
        {
            std::ofstream out(good.path);
            out << R"({"system": "free-particle", "q": [0, 0, 0], "p": [1, 2, 3]})";
        }
        const ScenarioConfig cfg = load_config_file(good.path);
        CHECK(cfg.system == "free-particle");
        CHECK(cfg.q.size() == 3);

        CHECK_THROWS_AS(load_config_file("/tmp/extham_test_missing.json"), ConfigError);

        TempFile bad("cfg_bad.json");
        {
            std::ofstream out(bad.path);
            out << "{not json";
        }
        CHECK_THROWS_AS(load_config_file(bad.path), ConfigError);
    }
}

TEST_CASE("system and invariant resolution") {
    SUBCASE("the default is the Kepler pair") {
        const ScenarioConfig cfg;
        const ResolvedSystem sys = resolve_system(cfg);
        CHECK(sys.conventional->name() == "kepler");
        CHECK(sys.extended->name() == "kepler-lift");
    }
    SUBCASE("relativistic and free systems resolve by name") {
        ScenarioConfig cfg;
        cfg.system = "relativistic";
        cfg.potential = "harmonic:1.0";
        const ResolvedSystem rel = resolve_system(cfg);
        CHECK(rel.conventional->name() == "relativistic");
        CHECK(rel.extended->name() == "relativistic-extended");
        CHECK(rel.extended->dimension() == 2);

        cfg = ScenarioConfig{};
        cfg.system = "free-particle";
        cfg.q = {0.0, 0.0, 0.0};
        cfg.p = {1.0, 0.0, 0.0};
        CHECK(resolve_system(cfg).extended->dimension() == 3);
    }
    SUBCASE("bad selections are configuration errors") {
        ScenarioConfig cfg;
        cfg.system = "pendulum";
        CHECK_THROWS_AS(resolve_system(cfg), ConfigError);

        cfg = ScenarioConfig{};
        cfg.q = {1.0, 0.0, 0.0};
        cfg.p = {0.0, 1.0, 0.0};
        CHECK_THROWS_AS(resolve_system(cfg), ConfigError);  // kepler is planar

        cfg = ScenarioConfig{};
        cfg.system = "relativistic";
        cfg.mass = -1.0;
        CHECK_THROWS_AS(resolve_system(cfg), ConfigError);

        cfg = ScenarioConfig{};
        cfg.mu = "sin:1";  // needs amplitude and frequency
        CHECK_THROWS_AS(resolve_system(cfg), ConfigError);

        cfg = ScenarioConfig{};
        cfg.mu = "step:1";
        CHECK_THROWS_AS(resolve_system(cfg), ConfigError);

        cfg = ScenarioConfig{};
        cfg.system = "relativistic";
        cfg.potential = "harmonic:abc";
        CHECK_THROWS_AS(resolve_system(cfg), ConfigError);
    }
    SUBCASE("invariants resolve by name; the Runge-Lenz strength freezes at mu(t0)") {
        ScenarioConfig cfg;
        const ResolvedSystem sys = resolve_system(cfg);
        for (const auto& name : known_invariants())
            CHECK(resolve_invariant(name, cfg, sys).fn != nullptr);
        CHECK_THROWS_AS(resolve_invariant("bogus", cfg, sys), ConfigError);

        ScenarioConfig varying;
        varying.mu = "sin:0.5,1.0";
        varying.t0 = 0.5 * M_PI;  // mu(t0) = 1.5
        const ResolvedSystem vsys = resolve_system(varying);
        const Invariant rl = resolve_invariant("runge-lenz", varying, vsys);
        const ExtendedState probe{{1.0, 0.0}, {0.0, 1.0}, 0.0, 0.0};
        CHECK(rl.eval(probe) == doctest::Approx(0.5).epsilon(1e-12));  // -1 + mu
    }
    SUBCASE("planar invariants reject non-planar systems") {
        ScenarioConfig cfg;
        cfg.system = "free-particle";
        cfg.q = {0.0, 0.0, 0.0};
        cfg.p = {1.0, 0.0, 0.0};
        const ResolvedSystem sys = resolve_system(cfg);
        CHECK_THROWS_AS(resolve_invariant("angular-momentum", cfg, sys), ConfigError);
        CHECK_THROWS_AS(resolve_invariant("runge-lenz-extended", cfg, sys), ConfigError);
        CHECK_NOTHROW(resolve_invariant("energy", cfg, sys));
        CHECK_NOTHROW(resolve_invariant("q1", cfg, sys));
        CHECK_NOTHROW(resolve_invariant("generator", cfg, sys));
    }
}

TEST_CASE("simulate scenarios") {
    ScenarioConfig base;
    base.p = {0.0, 1.2};
    base.span = 1.0;
    base.invariants = {"angular-momentum", "runge-lenz", "energy"};

    SUBCASE("a conserving run passes with a full report") {
        const CheckReport rep = run_simulate(base);
        CHECK(rep.pass);
        const auto& doc = rep.document;
        CHECK(doc.at("command") == "simulate");
        CHECK(doc.at("failures").empty());
        CHECK(doc.at("results").at("samples").get<std::size_t>() == 1001);
        CHECK(doc.at("results").at("final_param").get<double>() == 1.0);
        CHECK(doc.at("results").at("constraint").at("pass").get<bool>());
        CHECK(doc.at("results").at("constraint").at("max_abs").get<double>() < 1e-12);
        REQUIRE(doc.at("results").at("invariants").size() == 3);
        for (const auto& row : doc.at("results").at("invariants"))
            CHECK(row.at("pass").get<bool>());
        CHECK(doc.at("config").at("span").get<double>() == 1.0);
        CHECK(doc.at("warnings").empty());
    }
    SUBCASE("reports are deterministic") {
        CHECK(run_simulate(base).document == run_simulate(base).document);
    }
    SUBCASE("a broken conservation law fails loudly") {
        ScenarioConfig cfg = base;
        cfg.mu = "sin:0.5,1.0";
        cfg.span = 3.0;
        cfg.invariants = {"angular-momentum", "runge-lenz"};
        const CheckReport rep = run_simulate(cfg);
        CHECK_FALSE(rep.pass);
        const auto& failures = rep.document.at("failures");
        CHECK(std::find(failures.begin(), failures.end(), "drift:runge-lenz") != failures.end());
        CHECK(std::find(failures.begin(), failures.end(), "drift:angular-momentum") ==
              failures.end());
    }
    SUBCASE("time parametrization uses the conventional equations") {
        ScenarioConfig cfg = base;
        cfg.parametrization = "t";
        cfg.t0 = 2.0;
        const CheckReport rep = run_simulate(cfg);
        CHECK(rep.pass);
        CHECK(rep.document.at("results").at("final_param").get<double>() == 3.0);
        // e is lifted at every sample, so the constraint is exactly zero
        CHECK(rep.document.at("results").at("constraint").at("max_abs").get<double>() == 0.0);
    }
    SUBCASE("an off-shell start is judged by He drift and noted in the warnings") {
        ScenarioConfig cfg = base;
        cfg.e0 = -0.18;  // He = -0.1 throughout
        cfg.invariants = {"angular-momentum"};
        const CheckReport rep = run_simulate(cfg);
        CHECK(rep.pass);
        CHECK_FALSE(rep.document.at("warnings").empty());
        CHECK(rep.document.at("results").at("constraint").at("max_abs").get<double>() ==
              doctest::Approx(0.1).epsilon(1e-9));
        CHECK(rep.document.at("results").at("constraint").at("measured").get<double>() < 1e-10);
    }
    SUBCASE("output files are written on request") {
        TempFile traj("sim_traj.csv"), report("sim_report.json");
        ScenarioConfig cfg = base;
        cfg.trajectory_out = traj.path;
        cfg.report_out = report.path;
        run_simulate(cfg);
        const ReadTrajectory r = read_trajectory_csv(traj.path, ParameterKind::evolution_s);
        CHECK(r.traj.size() == 1001);
        std::ifstream in(report.path);
        REQUIRE(in.good());
        nlohmann::json doc;
        in >> doc;
        CHECK(doc.at("pass").get<bool>());
    }
    SUBCASE("relativistic time dilation: t advances by gamma per unit s") {
        ScenarioConfig cfg;
        cfg.system = "relativistic";
        cfg.q = {0.0, 0.0};
        cfg.p = {0.6, 0.8};
        cfg.span = 1.0;
        cfg.invariants = {"energy"};
        const CheckReport rep = run_simulate(cfg);
        CHECK(rep.pass);
        const double t_final =
            rep.document.at("results").at("final_state").at("t").get<double>();
        CHECK(t_final == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    }
    SUBCASE("configuration errors") {
        ScenarioConfig cfg = base;
        cfg.span = 0.0;
        CHECK_THROWS_AS(run_simulate(cfg), ConfigError);

        cfg = base;
        cfg.parametrization = "t";
        cfg.e0 = -0.5;
        CHECK_THROWS_AS(run_simulate(cfg), ConfigError);

        cfg = base;
        cfg.parametrization = "tau";
        CHECK_THROWS_AS(run_simulate(cfg), ConfigError);

        cfg = base;
        cfg.invariants = {"bogus"};
        CHECK_THROWS_AS(run_simulate(cfg), ConfigError);

        cfg = base;
        cfg.q = {1.0, std::numeric_limits<double>::quiet_NaN()};
        CHECK_THROWS_AS(run_simulate(cfg), ConfigError);
    }
    SUBCASE("domain failures surface as numerical errors") {
        ScenarioConfig cfg = base;
        cfg.q = {1e-9, 0.0};
        CHECK_THROWS_AS(run_simulate(cfg), DomainError);
    }
}

TEST_CASE("bracket scenarios") {
    ScenarioConfig base;
    base.invariants = {"angular-momentum", "runge-lenz", "runge-lenz-extended"};

    SUBCASE("the standard invariants pass a numerical-gradient scan") {
        const CheckReport rep = run_bracket(base);
        CHECK(rep.pass);
        const auto& rows = rep.document.at("results").at("invariants");
        REQUIRE(rows.size() == 3);
        for (const auto& row : rows) {
            CHECK(row.at("pass").get<bool>());
            CHECK(row.at("count").get<long>() == 100);
            CHECK(row.at("failures").get<long>() == 0);
            CHECK(row.at("max").get<double>() <= 1e-5);
            CHECK(row.at("mean").get<double>() <= row.at("max").get<double>());
        }
    }
    SUBCASE("analytic gradients sharpen the scan") {
        ScenarioConfig cfg = base;
        cfg.scheme = "analytic";
        cfg.invariants = {"angular-momentum"};
        const CheckReport rep = run_bracket(cfg);
        CHECK(rep.document.at("results").at("invariants")[0].at("max").get<double>() <= 1e-12);
    }
    SUBCASE("the control coordinate fails") {
        ScenarioConfig cfg = base;
        cfg.invariants = {"angular-momentum", "q1"};
        const CheckReport rep = run_bracket(cfg);
        CHECK_FALSE(rep.pass);
        const auto& failures = rep.document.at("failures");
        REQUIRE(failures.size() == 1);
        CHECK(failures[0] == "scan:q1");
    }
    SUBCASE("a time-dependent strength fails the scan with the residual on record") {
        ScenarioConfig cfg = base;
        cfg.mu = "sin:0.5,1.0";
        cfg.invariants = {"runge-lenz"};
        const CheckReport rep = run_bracket(cfg);
        CHECK_FALSE(rep.pass);
        CHECK(rep.document.at("results").at("invariants")[0].at("max").get<double>() >= 1e-3);
    }
    SUBCASE("scans are deterministic") {
        CHECK(run_bracket(base).document == run_bracket(base).document);
    }
    SUBCASE("an empty invariant list is a configuration error") {
        ScenarioConfig cfg = base;
        cfg.invariants = {};
        CHECK_THROWS_AS(run_bracket(cfg), ConfigError);
    }
}

TEST_CASE("symmetry scenarios") {
    ScenarioConfig base;  // circular Kepler orbit, on shell

    SUBCASE("infinitesimal mode reports deltas and the scaled rotation") {
        ScenarioConfig cfg = base;
        cfg.invariants = {"runge-lenz-extended"};
        cfg.eps = 0.01;
        const CheckReport rep = run_symmetry(cfg);
        CHECK(rep.pass);
        const auto& res = rep.document.at("results");
        CHECK(res.at("gate").at("enabled").get<bool>());
        CHECK(res.at("gate").at("pass").get<bool>());
        CHECK(res.at("delta").at("dt").get<double>() == 0.01);
        CHECK(res.at("transformed").at("q")[1].get<double>() == -0.01);
        CHECK(res.at("scaled_rotation").at("dpsi").get<double>() == 0.01);  // p2 eps
    }
    SUBCASE("the gate blocks non-invariants before any transform is built") {
        ScenarioConfig cfg = base;
        cfg.invariants = {"q1"};
        const CheckReport rep = run_symmetry(cfg);
        CHECK_FALSE(rep.pass);
        const auto& doc = rep.document;
        CHECK(std::find(doc.at("failures").begin(), doc.at("failures").end(), "gate") !=
              doc.at("failures").end());
        CHECK_FALSE(doc.at("results").contains("transformed"));
    }
    SUBCASE("the gate can be disabled for demonstrations") {
        ScenarioConfig cfg = base;
        cfg.invariants = {"q1"};
        cfg.gate = false;
        const CheckReport rep = run_symmetry(cfg);
        CHECK(rep.pass);
        CHECK_FALSE(rep.document.at("results").at("gate").at("enabled").get<bool>());
        CHECK(rep.document.at("results").contains("transformed"));
    }
    SUBCASE("finite mode checks shell preservation and the closed-form rotation") {
        ScenarioConfig cfg = base;
        cfg.invariants = {"angular-momentum"};
        cfg.mode = "finite";
        cfg.eps = 0.5 * M_PI;
        const CheckReport rep = run_symmetry(cfg);
        CHECK(rep.pass);
        const auto& res = rep.document.at("results");
        CHECK(res.at("shell_residual").at("pass").get<bool>());
        CHECK(res.at("rotation_residual").at("pass").get<bool>());
        CHECK(res.at("transformed").at("q")[1].get<double>() ==
              doctest::Approx(-1.0).epsilon(1e-9));
        CHECK(res.at("transformed").at("p")[0].get<double>() ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("commutation mode separates strong from weak invariants") {
        ScenarioConfig strong = base;
        strong.invariants = {"angular-momentum"};
        strong.mode = "commutation";
        strong.eps = 0.3;
        strong.flow_span = 1.0;
        const CheckReport rep = run_symmetry(strong);
        CHECK(rep.pass);
        CHECK(rep.document.at("results").at("residual").at("value").get<double>() < 1e-9);

        ScenarioConfig weak = base;
        weak.p = {0.0, 1.2};  // generic eccentric start
        weak.invariants = {"runge-lenz-extended"};
        weak.mode = "commutation";
        weak.eps = 1e-2;
        weak.flow_span = 1.0;
        const CheckReport wrep = run_symmetry(weak);
        CHECK_FALSE(wrep.pass);
        const auto& failures = wrep.document.at("failures");
        CHECK(std::find(failures.begin(), failures.end(), "commutation") != failures.end());
        const double resid =
            wrep.document.at("results").at("residual").at("value").get<double>();
        CHECK(resid > 1e-4);
        CHECK(resid < 1e-1);
    }
    SUBCASE("the He generator commutes with its own flow") {
        ScenarioConfig cfg = base;
        cfg.invariants = {"generator"};
        cfg.mode = "commutation";
        cfg.eps = 0.25;
        cfg.flow_span = 0.7;
        const CheckReport rep = run_symmetry(cfg);
        CHECK(rep.pass);
        CHECK(rep.document.at("results").at("residual").at("value").get<double>() < 1e-9);
    }
    SUBCASE("configuration errors") {
        ScenarioConfig cfg = base;
        cfg.mode = "bogus";
        CHECK_THROWS_AS(run_symmetry(cfg), ConfigError);

        cfg = base;
        cfg.mode = "commutation";
        cfg.flow_span = 0.0;
        CHECK_THROWS_AS(run_symmetry(cfg), ConfigError);

        cfg = base;
        cfg.invariants = {};
        CHECK_THROWS_AS(run_symmetry(cfg), ConfigError);
    }
}

}  // TEST_SUITE
