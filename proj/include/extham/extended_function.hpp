#pragma once

#include <functional>
#include <memory>
#include <stdexcept>

#include "extham/phase_space.hpp"

namespace extham {

// First partial derivatives of a scalar function of (q, p, t, e).
struct ExtendedGradient {
    Vec dq;
    Vec dp;
    double dt = 0.0;
    double de = 0.0;
};

// Scalar function on extended phase space. Analytic partials are optional;
// callers fall back to finite differences when they are absent.
class ExtendedFunction {
public:
    virtual ~ExtendedFunction() = default;

    virtual double eval(const ExtendedState& x) const = 0;

    virtual bool has_analytic_partials() const { return false; }

    virtual ExtendedGradient partials(const ExtendedState&) const {
        throw std::logic_error("ExtendedFunction: analytic partials not available");
    }
};

// Adapter for ad-hoc functions (test probes, monitored quantities).
class LambdaFunction final : public ExtendedFunction {
public:
    using Eval = std::function<double(const ExtendedState&)>;
    using Partials = std::function<ExtendedGradient(const ExtendedState&)>;

    explicit LambdaFunction(Eval eval, Partials partials = nullptr)
        : eval_(std::move(eval)), partials_(std::move(partials)) {}

    double eval(const ExtendedState& x) const override { return eval_(x); }
    bool has_analytic_partials() const override { return static_cast<bool>(partials_); }
    ExtendedGradient partials(const ExtendedState& x) const override {
        if (!partials_) return ExtendedFunction::partials(x);
        return partials_(x);
    }

private:
    Eval eval_;
    Partials partials_;
};

}  // namespace extham
