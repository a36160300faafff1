#include "extham/noether.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "extham/detail/ode.hpp"
#include "extham/errors.hpp"

namespace extham {

namespace {

void require_planar(const ExtendedState& x, const char* who) {
    if (x.dimension() != 2)
        throw std::invalid_argument(std::string(who) + ": defined for two degrees of freedom");
}

class AngularMomentumFn final : public ExtendedFunction {
public:
    double eval(const ExtendedState& x) const override {
        require_planar(x, "angular momentum");
        return x.p[0] * x.q[1] - x.p[1] * x.q[0];
    }
    bool has_analytic_partials() const override { return true; }
    ExtendedGradient partials(const ExtendedState& x) const override {
        require_planar(x, "angular momentum");
        ExtendedGradient g;
        g.dq = {-x.p[1], x.p[0]};
        g.dp = {x.q[1], -x.q[0]};
        return g;
    }
};

class RungeLenzFn final : public ExtendedFunction {
public:
    explicit RungeLenzFn(double mu) : mu_(mu) {}

    double eval(const ExtendedState& x) const override {
        require_planar(x, "runge-lenz");
        const double r = radius(x.q);
        return -x.q[0] * x.p[1] * x.p[1] + x.q[1] * x.p[0] * x.p[1] + mu_ * x.q[0] / r;
    }
    bool has_analytic_partials() const override { return true; }
    ExtendedGradient partials(const ExtendedState& x) const override {
        require_planar(x, "runge-lenz");
        const double q1 = x.q[0], q2 = x.q[1], p1 = x.p[0], p2 = x.p[1];
        const double r = radius(x.q);
        const double r3 = r * r * r;
        ExtendedGradient g;
        g.dq = {-p2 * p2 + mu_ * q2 * q2 / r3, p1 * p2 - mu_ * q1 * q2 / r3};
        g.dp = {q2 * p2, -2.0 * q1 * p2 + q2 * p1};
        return g;
    }

private:
    static double radius(const Vec& q) {
        double r = std::sqrt(q[0] * q[0] + q[1] * q[1]);
        if (r < 1e-8) throw DomainError("runge-lenz: r < 1e-8 (singularity)");
        return r;
    }
    double mu_;
};

class RungeLenzExtendedFn final : public ExtendedFunction {
public:
    double eval(const ExtendedState& x) const override {
        require_planar(x, "runge-lenz-extended");
        const double q1 = x.q[0], q2 = x.q[1], p1 = x.p[0], p2 = x.p[1];
        return 0.5 * q1 * p1 * p1 + q2 * p1 * p2 - 0.5 * q1 * p2 * p2 - q1 * x.e;
    }
    bool has_analytic_partials() const override { return true; }
    ExtendedGradient partials(const ExtendedState& x) const override {
        require_planar(x, "runge-lenz-extended");
        const double q1 = x.q[0], q2 = x.q[1], p1 = x.p[0], p2 = x.p[1];
        ExtendedGradient g;
        g.dq = {0.5 * p1 * p1 - 0.5 * p2 * p2 - x.e, p1 * p2};
        g.dp = {q1 * p1 + q2 * p2, q2 * p1 - q1 * p2};
        g.de = -q1;
        return g;
    }
};

class CoordinateQ1Fn final : public ExtendedFunction {
public:
    double eval(const ExtendedState& x) const override { return x.q[0]; }
    bool has_analytic_partials() const override { return true; }
    ExtendedGradient partials(const ExtendedState& x) const override {
        ExtendedGradient g;
        g.dq.assign(x.dimension(), 0.0);
        g.dp.assign(x.dimension(), 0.0);
        g.dq[0] = 1.0;
        return g;
    }
};

class EnergyCoordinateFn final : public ExtendedFunction {
public:
    double eval(const ExtendedState& x) const override { return x.e; }
    bool has_analytic_partials() const override { return true; }
    ExtendedGradient partials(const ExtendedState& x) const override {
        ExtendedGradient g;
        g.dq.assign(x.dimension(), 0.0);
        g.dp.assign(x.dimension(), 0.0);
        g.de = 1.0;
        return g;
    }
};

}  // namespace

Invariant angular_momentum() {
    return Invariant{std::make_shared<AngularMomentumFn>(), "angular-momentum", false};
}

Invariant runge_lenz(double mu) {
    return Invariant{std::make_shared<RungeLenzFn>(mu), "runge-lenz", false};
}

Invariant runge_lenz_extended() {
    return Invariant{std::make_shared<RungeLenzExtendedFn>(), "runge-lenz-extended", true};
}

Invariant coordinate_q1() {
    return Invariant{std::make_shared<CoordinateQ1Fn>(), "q1", false};
}

Invariant energy_coordinate() {
    return Invariant{std::make_shared<EnergyCoordinateFn>(), "energy", true};
}

Invariant generator_invariant(std::shared_ptr<const ExtendedHamiltonian> He) {
    if (!He) throw std::invalid_argument("generator_invariant: null Hamiltonian");
    std::string n = He->name();
    return Invariant{std::move(He), n, true};
}

InfinitesimalResult infinitesimal_transform(const Invariant& I, const ExtendedState& x,
                                            double d_eps, const GradientScheme& scheme) {
    validate_state(x);
    if (!std::isfinite(d_eps)) throw std::invalid_argument("infinitesimal_transform: non-finite step");
    const ExtendedGradient g = gradient(*I.fn, x, scheme);
    const std::size_t n = x.dimension();

    InfinitesimalResult out;
    out.delta.dq.resize(n);
    out.delta.dp.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.delta.dq[i] = d_eps * g.dp[i];
        out.delta.dp[i] = d_eps * -g.dq[i];
    }
    out.delta.dt = d_eps * -g.de;
    out.delta.de = d_eps * g.dt;

    out.state = x;
    for (std::size_t i = 0; i < n; ++i) {
        out.state.q[i] = x.q[i] + out.delta.dq[i];
        out.state.p[i] = x.p[i] + out.delta.dp[i];
    }
    out.state.t = x.t + out.delta.dt;
    out.state.e = x.e + out.delta.de;
    return out;
}

ExtendedState finite_transform(const Invariant& I, const ExtendedState& x, double eps,
                               const std::optional<StepperConfig>& flow_cfg,
                               const GradientScheme& scheme) {
    validate_state(x);
    if (!std::isfinite(eps)) throw std::invalid_argument("finite_transform: non-finite parameter");
    if (eps == 0.0) return x;

    StepperConfig cfg;
    if (flow_cfg) {
        cfg = *flow_cfg;
    } else {
        cfg.method = StepMethod::rk4;
        cfg.step = std::abs(eps) / 1000.0;
    }

    const std::size_t n = x.dimension();
    const double sign = eps > 0.0 ? 1.0 : -1.0;
    Vec y(2 * n + 2);
    std::copy(x.q.begin(), x.q.end(), y.begin());
    std::copy(x.p.begin(), x.p.end(), y.begin() + n);
    y[2 * n] = x.t;
    y[2 * n + 1] = x.e;

    ExtendedState xs;
    xs.q.resize(n);
    xs.p.resize(n);
    detail::Rhs f = [&](double, const Vec& yy, Vec& dy) {
        std::copy(yy.begin(), yy.begin() + n, xs.q.begin());
        std::copy(yy.begin() + n, yy.begin() + 2 * n, xs.p.begin());
        xs.t = yy[2 * n];
        xs.e = yy[2 * n + 1];
        ExtendedGradient g = gradient(*I.fn, xs, scheme);
        for (std::size_t i = 0; i < n; ++i) {
            dy[i] = sign * g.dp[i];
            dy[n + i] = sign * -g.dq[i];
        }
        dy[2 * n] = sign * -g.de;
        dy[2 * n + 1] = sign * g.dt;
    };

    Vec weight(2 * n + 2, 1.0);
    detail::drive(f, y, std::abs(eps), cfg, weight, [](double, const Vec&) {});

    ExtendedState out;
    out.q.assign(y.begin(), y.begin() + n);
    out.p.assign(y.begin() + n, y.begin() + 2 * n);
    out.t = y[2 * n];
    out.e = y[2 * n + 1];
    return out;
}

CanonicityReport canonicity_check(const Invariant& I, const ExtendedHamiltonian& He,
                                  OnShellSampler& sampler, long count, double tolerance,
                                  const GradientScheme& scheme) {
    if (!(tolerance > 0.0)) throw std::invalid_argument("canonicity_check: tolerance must be positive");
    CanonicityReport rep;
    rep.stats = conservation_scan(*I.fn, He, sampler, count, scheme);
    rep.tolerance = tolerance;
    rep.pass = rep.stats.count > 0 && rep.stats.max_abs <= tolerance;
    return rep;
}

CanonicityReport registration_gate(const Invariant& I, const ExtendedHamiltonian& He,
                                   std::shared_ptr<const ConventionalHamiltonian> H,
                                   std::uint64_t seed) {
    OnShellSampler sampler(std::move(H), seed);
    GradientScheme fd;
    fd.mode = GradientScheme::Mode::central_difference;
    return canonicity_check(I, He, sampler, 32, 1e-5, fd);
}

double flow_commutation_check(const Invariant& I, const ExtendedHamiltonian& He,
                              const ExtendedState& x0, double eps, double ds,
                              const StepperConfig& cfg,
                              const std::optional<StepperConfig>& flow_cfg) {
    // Off-shell intermediate states are expected when I is not an invariant
    // (the map leaves the shell); keep those warnings out of the caller's
    // stderr, the residual is the signal here.
    std::ostringstream sink;
    const Trajectory fwd = integrate_extended(He, x0, ds, cfg, &sink);
    const ExtendedState evolve_then_map = finite_transform(I, fwd.back().state, eps, flow_cfg);

    const ExtendedState mapped = finite_transform(I, x0, eps, flow_cfg);
    const Trajectory fwd2 = integrate_extended(He, mapped, ds, cfg, &sink);
    const ExtendedState map_then_evolve = fwd2.back().state;

    double r = 0.0;
    for (std::size_t i = 0; i < x0.dimension(); ++i) {
        r = std::max(r, std::abs(evolve_then_map.q[i] - map_then_evolve.q[i]));
        r = std::max(r, std::abs(evolve_then_map.p[i] - map_then_evolve.p[i]));
    }
    r = std::max(r, std::abs(evolve_then_map.t - map_then_evolve.t));
    r = std::max(r, std::abs(evolve_then_map.e - map_then_evolve.e));
    return r;
}

Mat2 planar_rotation(double eps) {
    const double c = std::cos(eps), s = std::sin(eps);
    return Mat2{{{c, s}, {-s, c}}};
}

Vec apply2(const Mat2& M, const Vec& v) {
    if (v.size() != 2) throw std::invalid_argument("apply2: two components expected");
    return Vec{M[0][0] * v[0] + M[0][1] * v[1], M[1][0] * v[0] + M[1][1] * v[1]};
}

ScaledRotation scaled_rotation_decomposition(const ExtendedState& x, double d_eps) {
    validate_state(x);
    require_planar(x, "scaled_rotation_decomposition");
    const double p1 = x.p[0], p2 = x.p[1];
    ScaledRotation out;
    out.dt = x.q[0] * d_eps;
    out.dphi = p1 * d_eps;
    out.dpsi = p2 * d_eps;
    out.matrix = Mat2{{{1.0 + d_eps * p1, d_eps * p2}, {-d_eps * p2, 1.0 + d_eps * p1}}};
    return out;
}

// ---------------------------------------------------------------------------
// Conventional point-transformation subgroup

namespace {

class IdentityGenerator final : public PointTransformGenerator {
public:
    explicit IdentityGenerator(std::size_t n) : n_(n) {}
    std::size_t dimension() const override { return n_; }
    Vec g(const Vec& q, double) const override { return q; }
    std::vector<double> dg_dq(const Vec&, double) const override { return eye(n_); }
    Vec dg_dt(const Vec&, double) const override { return Vec(n_, 0.0); }
    double h(const Vec&, double) const override { return 0.0; }
    Vec dh_dq(const Vec&, double) const override { return Vec(n_, 0.0); }
    double dh_dt(const Vec&, double) const override { return 0.0; }
    std::string name() const override { return "identity"; }

    static std::vector<double> eye(std::size_t n) {
        std::vector<double> m(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 1.0;
        return m;
    }

private:
    std::size_t n_;
};

class RotationGenerator final : public PointTransformGenerator {
public:
    explicit RotationGenerator(double angle) : R_(planar_rotation(angle)) {}
    std::size_t dimension() const override { return 2; }
    Vec g(const Vec& q, double) const override { return apply2(R_, q); }
    std::vector<double> dg_dq(const Vec&, double) const override {
        return {R_[0][0], R_[0][1], R_[1][0], R_[1][1]};
    }
    Vec dg_dt(const Vec&, double) const override { return Vec(2, 0.0); }
    double h(const Vec&, double) const override { return 0.0; }
    Vec dh_dq(const Vec&, double) const override { return Vec(2, 0.0); }
    double dh_dt(const Vec&, double) const override { return 0.0; }
    std::string name() const override { return "rotation"; }

private:
    Mat2 R_;
};

class GaugeGenerator final : public PointTransformGenerator {
public:
    GaugeGenerator(std::size_t n, double a) : n_(n), a_(a) {}
    std::size_t dimension() const override { return n_; }
    Vec g(const Vec& q, double) const override { return q; }
    std::vector<double> dg_dq(const Vec&, double) const override {
        return IdentityGenerator::eye(n_);
    }
    Vec dg_dt(const Vec&, double) const override { return Vec(n_, 0.0); }
    double h(const Vec&, double t) const override { return a_ * t; }
    Vec dh_dq(const Vec&, double) const override { return Vec(n_, 0.0); }
    double dh_dt(const Vec&, double) const override { return a_; }
    std::string name() const override { return "gauge"; }

private:
    std::size_t n_;
    double a_;
};

// Solves A x = b by Gaussian elimination with partial pivoting (A row-major).
Vec solve_linear(std::vector<double> A, Vec b) {
    const std::size_t n = b.size();
    double scale = 0.0;
    for (double v : A) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) throw std::invalid_argument("subgroup transform: generator Jacobian is singular");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r * n + col]) > std::abs(A[piv * n + col])) piv = r;
        if (std::abs(A[piv * n + col]) < 1e-12 * scale)
            throw std::invalid_argument("subgroup transform: generator Jacobian is singular");
        if (piv != col) {
            for (std::size_t c = col; c < n; ++c) std::swap(A[piv * n + c], A[col * n + c]);
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = A[r * n + col] / A[col * n + col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) A[r * n + c] -= f * A[col * n + c];
            b[r] -= f * b[col];
        }
    }
    Vec x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= A[i * n + c] * x[c];
        x[i] = s / A[i * n + i];
    }
    return x;
}

}  // namespace

std::shared_ptr<const PointTransformGenerator> identity_generator(std::size_t n) {
    return std::make_shared<IdentityGenerator>(n);
}

std::shared_ptr<const PointTransformGenerator> rotation_generator(double angle) {
    return std::make_shared<RotationGenerator>(angle);
}

std::shared_ptr<const PointTransformGenerator> gauge_generator(std::size_t n, double a) {
    return std::make_shared<GaugeGenerator>(n, a);
}

SubgroupTransform conventional_subgroup_transform(const PointTransformGenerator& f2,
                                                  const ExtendedState& x) {
    validate_state(x);
    const std::size_t n = f2.dimension();
    if (x.dimension() != n)
        throw std::invalid_argument("subgroup transform: state dimension mismatch");

    const Vec Q = f2.g(x.q, x.t);
    const std::vector<double> J = f2.dg_dq(x.q, x.t);
    const Vec hq = f2.dh_dq(x.q, x.t);

    // p_j = sum_i dg_i/dq_j P_i + dh/dq_j, so (J^T) P = p - dh/dq.
    std::vector<double> Jt(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) Jt[j * n + i] = J[i * n + j];
    Vec rhs(n);
    for (std::size_t j = 0; j < n; ++j) rhs[j] = x.p[j] - hq[j];
    const Vec P = solve_linear(std::move(Jt), std::move(rhs));

    const Vec gt = f2.dg_dt(x.q, x.t);
    double shift = f2.dh_dt(x.q, x.t);
    for (std::size_t i = 0; i < n; ++i) shift += gt[i] * P[i];

    SubgroupTransform out;
    out.state = ExtendedState{Q, P, x.t, x.e + shift};
    out.hamiltonian_shift = shift;
    return out;
}

}  // namespace extham
