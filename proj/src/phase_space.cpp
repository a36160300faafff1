#include "extham/phase_space.hpp"

#include <cmath>
#include <stdexcept>

#include "extham/systems.hpp"

namespace extham {

namespace {

bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

void check_qp(const Vec& q, const Vec& p) {
    if (q.empty()) throw std::invalid_argument("state: dimension must be >= 1");
    if (q.size() != p.size()) throw std::invalid_argument("state: q and p dimensions differ");
    if (!all_finite(q) || !all_finite(p)) throw std::invalid_argument("state: non-finite component");
}

}  // namespace

void validate_state(const ConventionalState& state) {
    check_qp(state.q, state.p);
    if (!std::isfinite(state.t)) throw std::invalid_argument("state: non-finite t");
}

void validate_state(const ExtendedState& state) {
    check_qp(state.q, state.p);
    if (!std::isfinite(state.t)) throw std::invalid_argument("state: non-finite t");
    if (!std::isfinite(state.e)) throw std::invalid_argument("state: non-finite e");
}

ExtendedState lift(const ConventionalState& state, const ConventionalHamiltonian& H) {
    validate_state(state);
    return ExtendedState{state.q, state.p, state.t, H.eval(state.q, state.p, state.t)};
}

ConventionalState project(const ExtendedState& xstate) {
    validate_state(xstate);
    return ConventionalState{xstate.q, xstate.p, xstate.t};
}

double constraint_residual(const ExtendedState& xstate, const ExtendedHamiltonian& He) {
    validate_state(xstate);
    return He.eval(xstate);
}

void Trajectory::push(double param, ExtendedState state) {
    validate_state(state);
    if (!std::isfinite(param)) throw std::invalid_argument("trajectory: non-finite parameter");
    if (!samples_.empty()) {
        if (param <= samples_.back().param)
            throw std::invalid_argument("trajectory: parameter must increase strictly");
        if (state.dimension() != samples_.front().state.dimension())
            throw std::invalid_argument("trajectory: dimension mismatch");
    }
    samples_.push_back(Sample{param, std::move(state)});
}

}  // namespace extham
