#include "extham/systems.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "extham/errors.hpp"

namespace extham {

namespace {

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void require_dim(const Vec& q, const Vec& p, std::size_t n, const char* who) {
    if (q.size() != n || p.size() != n)
        throw std::invalid_argument(std::string(who) + ": state dimension mismatch");
}

}  // namespace

// ---------------------------------------------------------------------------
// MuFunction

MuFunction MuFunction::constant(double value) {
    std::ostringstream os;
    os << "const:" << value;
    return MuFunction([value](double) { return value; }, [](double) { return 0.0; }, false, os.str());
}

MuFunction MuFunction::sinusoidal(double amplitude, double omega) {
    std::ostringstream os;
    os << "sin:" << amplitude << "," << omega;
    return MuFunction([amplitude, omega](double t) { return 1.0 + amplitude * std::sin(omega * t); },
                      [amplitude, omega](double t) { return amplitude * omega * std::cos(omega * t); },
                      true, os.str());
}

MuFunction MuFunction::from_callable(std::function<double(double)> value,
                                     std::function<double(double)> derivative) {
    if (!value) throw std::invalid_argument("MuFunction: null callable");
    return MuFunction(std::move(value), std::move(derivative), true, "callable");
}

double MuFunction::derivative(double t) const {
    if (derivative_) return derivative_(t);
    const double h = 1e-6;
    return (value_(t + h) - value_(t - h)) / (2.0 * h);
}

// ---------------------------------------------------------------------------
// KeplerHamiltonian

double KeplerHamiltonian::radius(const Vec& q) const {
    double r = std::sqrt(dot(q, q));
    if (r < singularity_radius) throw DomainError("kepler: r < 1e-8 (singularity)");
    return r;
}

double KeplerHamiltonian::eval(const Vec& q, const Vec& p, double t) const {
    require_dim(q, p, 2, "kepler");
    return 0.5 * dot(p, p) - mu_.value(t) / radius(q);
}

Vec KeplerHamiltonian::dq(const Vec& q, const Vec& p, double t) const {
    require_dim(q, p, 2, "kepler");
    double r = radius(q);
    double f = mu_.value(t) / (r * r * r);
    return Vec{f * q[0], f * q[1]};
}

Vec KeplerHamiltonian::dp(const Vec& q, const Vec& p, double) const {
    require_dim(q, p, 2, "kepler");
    return p;
}

double KeplerHamiltonian::dt(const Vec& q, const Vec& p, double t) const {
    require_dim(q, p, 2, "kepler");
    if (!mu_.time_dependent()) return 0.0;
    return -mu_.derivative(t) / radius(q);
}

std::string KeplerHamiltonian::name() const {
    return mu_.time_dependent() ? "kepler-timedep" : "kepler";
}

// ---------------------------------------------------------------------------
// Potentials

namespace {

class ZeroPotential final : public Potential {
public:
    explicit ZeroPotential(std::size_t n) : n_(n) {}
    double eval(const Vec&, double) const override { return 0.0; }
    Vec dq(const Vec&, double) const override { return Vec(n_, 0.0); }
    double dt(const Vec&, double) const override { return 0.0; }
    std::size_t dimension() const override { return n_; }
    std::string name() const override { return "zero"; }

private:
    std::size_t n_;
};

class ConstantPotential final : public Potential {
public:
    ConstantPotential(std::size_t n, double v) : n_(n), v_(v) {}
    double eval(const Vec&, double) const override { return v_; }
    Vec dq(const Vec&, double) const override { return Vec(n_, 0.0); }
    double dt(const Vec&, double) const override { return 0.0; }
    std::size_t dimension() const override { return n_; }
    std::string name() const override { return "constant"; }

private:
    std::size_t n_;
    double v_;
};

class HarmonicPotential final : public Potential {
public:
    HarmonicPotential(std::size_t n, double k) : n_(n), k_(k) {}
    double eval(const Vec& q, double) const override { return 0.5 * k_ * dot(q, q); }
    Vec dq(const Vec& q, double) const override {
        Vec g(n_);
        for (std::size_t i = 0; i < n_; ++i) g[i] = k_ * q[i];
        return g;
    }
    double dt(const Vec&, double) const override { return 0.0; }
    std::size_t dimension() const override { return n_; }
    std::string name() const override { return "harmonic"; }

private:
    std::size_t n_;
    double k_;
};

class CoulombPotential final : public Potential {
public:
    CoulombPotential(std::size_t n, double mu) : n_(n), mu_(mu) {}
    double eval(const Vec& q, double) const override { return -mu_ / radius(q); }
    Vec dq(const Vec& q, double) const override {
        double r = radius(q);
        double f = mu_ / (r * r * r);
        Vec g(n_);
        for (std::size_t i = 0; i < n_; ++i) g[i] = f * q[i];
        return g;
    }
    double dt(const Vec&, double) const override { return 0.0; }
    std::size_t dimension() const override { return n_; }
    std::string name() const override { return "coulomb"; }

private:
    double radius(const Vec& q) const {
        double r = std::sqrt(dot(q, q));
        if (r < 1e-8) throw DomainError("coulomb potential: r < 1e-8 (singularity)");
        return r;
    }
    std::size_t n_;
    double mu_;
};

}  // namespace

std::shared_ptr<const Potential> zero_potential(std::size_t n) {
    return std::make_shared<ZeroPotential>(n);
}
std::shared_ptr<const Potential> constant_potential(std::size_t n, double value) {
    return std::make_shared<ConstantPotential>(n, value);
}
std::shared_ptr<const Potential> harmonic_potential(std::size_t n, double k) {
    return std::make_shared<HarmonicPotential>(n, k);
}
std::shared_ptr<const Potential> coulomb_potential(std::size_t n, double mu) {
    return std::make_shared<CoulombPotential>(n, mu);
}

// ---------------------------------------------------------------------------
// RelativisticExtended

RelativisticExtended::RelativisticExtended(double m, double c, std::shared_ptr<const Potential> V)
    : m_(m), c_(c), V_(std::move(V)) {
    if (!(m_ > 0.0) || !(c_ > 0.0)) throw std::invalid_argument("relativistic: m and c must be positive");
    if (!V_) throw std::invalid_argument("relativistic: null potential");
}

double RelativisticExtended::eval(const ExtendedState& x) const {
    require_dim(x.q, x.p, dimension(), "relativistic-extended");
    double w = (x.e - V_->eval(x.q, x.t)) / c_;
    return (dot(x.p, x.p) - w * w) / (2.0 * m_) + 0.5 * m_ * c_ * c_;
}

ExtendedGradient RelativisticExtended::partials(const ExtendedState& x) const {
    require_dim(x.q, x.p, dimension(), "relativistic-extended");
    const double mc2 = m_ * c_ * c_;
    const double w = (x.e - V_->eval(x.q, x.t)) / mc2;  // = (e - V)/(m c^2)
    ExtendedGradient g;
    g.dq = V_->dq(x.q, x.t);
    for (double& v : g.dq) v *= w;
    g.dp = x.p;
    for (double& v : g.dp) v /= m_;
    g.dt = w * V_->dt(x.q, x.t);
    g.de = -w;
    return g;
}

// ---------------------------------------------------------------------------
// RelativisticConventional

RelativisticConventional::RelativisticConventional(double m, double c,
                                                   std::shared_ptr<const Potential> V)
    : m_(m), c_(c), V_(std::move(V)) {
    if (!(m_ > 0.0) || !(c_ > 0.0)) throw std::invalid_argument("relativistic: m and c must be positive");
    if (!V_) throw std::invalid_argument("relativistic: null potential");
}

double RelativisticConventional::eval(const Vec& q, const Vec& p, double t) const {
    require_dim(q, p, dimension(), "relativistic");
    double pc2 = dot(p, p) * c_ * c_;
    double mc2 = m_ * c_ * c_;
    return std::sqrt(pc2 + mc2 * mc2) + V_->eval(q, t);
}

Vec RelativisticConventional::dq(const Vec& q, const Vec& p, double t) const {
    require_dim(q, p, dimension(), "relativistic");
    return V_->dq(q, t);
}

Vec RelativisticConventional::dp(const Vec& q, const Vec& p, double) const {
    require_dim(q, p, dimension(), "relativistic");
    double pc2 = dot(p, p) * c_ * c_;
    double mc2 = m_ * c_ * c_;
    double root = std::sqrt(pc2 + mc2 * mc2);
    Vec g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) g[i] = p[i] * c_ * c_ / root;
    return g;
}

double RelativisticConventional::dt(const Vec& q, const Vec& p, double t) const {
    require_dim(q, p, dimension(), "relativistic");
    return V_->dt(q, t);
}

double energy_branch(const RelativisticExtended& He, const Vec& q, const Vec& p, double t) {
    const double m = He.m(), c = He.c();
    double mc = m * c;
    return He.potential().eval(q, t) + c * std::sqrt(dot(p, p) + mc * mc);
}

// ---------------------------------------------------------------------------
// StandardLift

StandardLift::StandardLift(std::shared_ptr<const ConventionalHamiltonian> H) : H_(std::move(H)) {
    if (!H_) throw std::invalid_argument("standard_lift: null Hamiltonian");
}

double StandardLift::eval(const ExtendedState& x) const {
    return H_->eval(x.q, x.p, x.t) - x.e;
}

ExtendedGradient StandardLift::partials(const ExtendedState& x) const {
    ExtendedGradient g;
    g.dq = H_->dq(x.q, x.p, x.t);
    g.dp = H_->dp(x.q, x.p, x.t);
    g.dt = H_->dt(x.q, x.p, x.t);
    g.de = -1.0;
    return g;
}

std::shared_ptr<const StandardLift> standard_lift(std::shared_ptr<const ConventionalHamiltonian> H) {
    return std::make_shared<StandardLift>(std::move(H));
}

// ---------------------------------------------------------------------------
// FreeParticleHamiltonian

double FreeParticleHamiltonian::eval(const Vec& q, const Vec& p, double) const {
    require_dim(q, p, n_, "free-particle");
    return 0.5 * dot(p, p);
}

Vec FreeParticleHamiltonian::dq(const Vec& q, const Vec& p, double) const {
    require_dim(q, p, n_, "free-particle");
    return Vec(n_, 0.0);
}

Vec FreeParticleHamiltonian::dp(const Vec& q, const Vec& p, double) const {
    require_dim(q, p, n_, "free-particle");
    return p;
}

double FreeParticleHamiltonian::dt(const Vec& q, const Vec& p, double) const {
    require_dim(q, p, n_, "free-particle");
    return 0.0;
}

}  // namespace extham
