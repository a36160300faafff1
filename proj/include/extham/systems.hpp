#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "extham/extended_function.hpp"
#include "extham/phase_space.hpp"

namespace extham {

// Conventional Hamiltonian H(q, p, t) with analytic first partials.
class ConventionalHamiltonian {
public:
    virtual ~ConventionalHamiltonian() = default;

    virtual double eval(const Vec& q, const Vec& p, double t) const = 0;
    virtual Vec dq(const Vec& q, const Vec& p, double t) const = 0;
    virtual Vec dp(const Vec& q, const Vec& p, double t) const = 0;
    virtual double dt(const Vec& q, const Vec& p, double t) const = 0;

    virtual std::size_t dimension() const = 0;
    virtual std::string name() const = 0;

    double eval(const ConventionalState& s) const { return eval(s.q, s.p, s.t); }
};

// Extended Hamiltonian He(q, p, t, e). Always carries analytic partials; the
// trajectory constraint is He = 0 along physical motion.
class ExtendedHamiltonian : public ExtendedFunction {
public:
    bool has_analytic_partials() const override { return true; }

    virtual std::size_t dimension() const = 0;
    virtual std::string name() const = 0;
};

// Time dependence of the Kepler strength parameter. If no analytic derivative
// is supplied, a central difference with step 1e-6 stands in.
class MuFunction {
public:
    MuFunction() : MuFunction(constant(1.0)) {}

    static MuFunction constant(double value);
    // mu(t) = 1 + amplitude * sin(omega * t)
    static MuFunction sinusoidal(double amplitude, double omega);
    static MuFunction from_callable(std::function<double(double)> value,
                                    std::function<double(double)> derivative = nullptr);

    double value(double t) const { return value_(t); }
    double derivative(double t) const;
    bool time_dependent() const { return time_dependent_; }
    const std::string& describe() const { return describe_; }

private:
    MuFunction(std::function<double(double)> value, std::function<double(double)> derivative,
               bool time_dependent, std::string describe)
        : value_(std::move(value)),
          derivative_(std::move(derivative)),
          time_dependent_(time_dependent),
          describe_(std::move(describe)) {}

    std::function<double(double)> value_;
    std::function<double(double)> derivative_;
    bool time_dependent_ = false;
    std::string describe_;
};

// Planar Kepler system H = p^2/2 - mu(t)/r with unit mass. Evaluation inside
// r < 1e-8 raises DomainError.
class KeplerHamiltonian final : public ConventionalHamiltonian {
public:
    explicit KeplerHamiltonian(MuFunction mu = MuFunction::constant(1.0)) : mu_(std::move(mu)) {}

    double eval(const Vec& q, const Vec& p, double t) const override;
    Vec dq(const Vec& q, const Vec& p, double t) const override;
    Vec dp(const Vec& q, const Vec& p, double t) const override;
    double dt(const Vec& q, const Vec& p, double t) const override;

    std::size_t dimension() const override { return 2; }
    std::string name() const override;

    const MuFunction& mu() const { return mu_; }

    static constexpr double singularity_radius = 1e-8;

private:
    double radius(const Vec& q) const;  // guarded
    MuFunction mu_;
};

// External scalar potential V(q, t) with analytic partials.
class Potential {
public:
    virtual ~Potential() = default;
    virtual double eval(const Vec& q, double t) const = 0;
    virtual Vec dq(const Vec& q, double t) const = 0;
    virtual double dt(const Vec& q, double t) const = 0;
    virtual std::size_t dimension() const = 0;
    virtual std::string name() const = 0;
};

std::shared_ptr<const Potential> zero_potential(std::size_t n);
std::shared_ptr<const Potential> constant_potential(std::size_t n, double value);
// V = k/2 * |q|^2
std::shared_ptr<const Potential> harmonic_potential(std::size_t n, double k);
// V = -mu / |q|, guarded at |q| < 1e-8
std::shared_ptr<const Potential> coulomb_potential(std::size_t n, double mu);

// Free relativistic point particle in an external potential, quadratic in the
// energy coordinate: He = [p^2 - ((e - V)/c)^2] / (2m) + m c^2 / 2.
// Natural units c = 1 are the default.
class RelativisticExtended final : public ExtendedHamiltonian {
public:
    RelativisticExtended(double m, double c, std::shared_ptr<const Potential> V);

    double eval(const ExtendedState& x) const override;
    ExtendedGradient partials(const ExtendedState& x) const override;

    std::size_t dimension() const override { return V_->dimension(); }
    std::string name() const override { return "relativistic-extended"; }

    double m() const { return m_; }
    double c() const { return c_; }
    const Potential& potential() const { return *V_; }

private:
    double m_, c_;
    std::shared_ptr<const Potential> V_;
};

// Square-root form of the same dynamics: H = sqrt(p^2 c^2 + m^2 c^4) + V.
class RelativisticConventional final : public ConventionalHamiltonian {
public:
    RelativisticConventional(double m, double c, std::shared_ptr<const Potential> V);

    double eval(const Vec& q, const Vec& p, double t) const override;
    Vec dq(const Vec& q, const Vec& p, double t) const override;
    Vec dp(const Vec& q, const Vec& p, double t) const override;
    double dt(const Vec& q, const Vec& p, double t) const override;

    std::size_t dimension() const override { return V_->dimension(); }
    std::string name() const override { return "relativistic"; }

    double m() const { return m_; }
    double c() const { return c_; }
    const Potential& potential() const { return *V_; }

private:
    double m_, c_;
    std::shared_ptr<const Potential> V_;
};

// Positive-energy root of He = 0 for the quadratic relativistic form:
// e = V + c * sqrt(p^2 + (m c)^2). Agrees with RelativisticConventional::eval.
double energy_branch(const RelativisticExtended& He, const Vec& q, const Vec& p, double t);

// Standard lift He = H(q, p, t) - e; its e-partial is identically -1, so the
// evolution parameter coincides with laboratory time.
class StandardLift final : public ExtendedHamiltonian {
public:
    explicit StandardLift(std::shared_ptr<const ConventionalHamiltonian> H);

    double eval(const ExtendedState& x) const override;
    ExtendedGradient partials(const ExtendedState& x) const override;

    std::size_t dimension() const override { return H_->dimension(); }
    std::string name() const override { return H_->name() + "-lift"; }

    const ConventionalHamiltonian& base() const { return *H_; }

private:
    std::shared_ptr<const ConventionalHamiltonian> H_;
};

std::shared_ptr<const StandardLift> standard_lift(std::shared_ptr<const ConventionalHamiltonian> H);

// Free particle H = p^2/2 (any dimension); handy as a minimal system.
class FreeParticleHamiltonian final : public ConventionalHamiltonian {
public:
    explicit FreeParticleHamiltonian(std::size_t n) : n_(n) {}

    double eval(const Vec& q, const Vec& p, double t) const override;
    Vec dq(const Vec& q, const Vec& p, double t) const override;
    Vec dp(const Vec& q, const Vec& p, double t) const override;
    double dt(const Vec& q, const Vec& p, double t) const override;

    std::size_t dimension() const override { return n_; }
    std::string name() const override { return "free-particle"; }

private:
    std::size_t n_;
};

}  // namespace extham
