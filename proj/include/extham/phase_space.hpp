#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace extham {

using Vec = std::vector<double>;

class ConventionalHamiltonian;
class ExtendedHamiltonian;

// State of an n-degree-of-freedom system at laboratory time t.
struct ConventionalState {
    Vec q;
    Vec p;
    double t = 0.0;

    std::size_t dimension() const { return q.size(); }
};

// Point of the (2n+2)-dimensional extended phase space: time t and the energy
// coordinate e form an additional conjugate pair alongside (q, p).
struct ExtendedState {
    Vec q;
    Vec p;
    double t = 0.0;
    double e = 0.0;

    std::size_t dimension() const { return q.size(); }
};

// Throws std::invalid_argument unless q/p sizes match, n >= 1 and every
// component is finite.
void validate_state(const ConventionalState& state);
void validate_state(const ExtendedState& state);

// Embeds a conventional state on the He = 0 shell by setting e = H(q, p, t).
// Evaluation failures of H propagate as DomainError.
ExtendedState lift(const ConventionalState& state, const ConventionalHamiltonian& H);

// Drops the energy coordinate.
ConventionalState project(const ExtendedState& xstate);

// Value of the extended Hamiltonian at the state; zero exactly on shell.
double constraint_residual(const ExtendedState& xstate, const ExtendedHamiltonian& He);

// Which evolution parameter indexes a trajectory.
enum class ParameterKind { time_t, evolution_s };

// Ordered samples of an extended-phase-space path. The parameter column is
// strictly increasing; all states share one dimension.
class Trajectory {
public:
    struct Sample {
        double param;
        ExtendedState state;
    };

    explicit Trajectory(ParameterKind kind) : kind_(kind) {}

    ParameterKind parameter_kind() const { return kind_; }
    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    const Sample& operator[](std::size_t i) const { return samples_[i]; }
    const Sample& front() const { return samples_.front(); }
    const Sample& back() const { return samples_.back(); }
    std::size_t dimension() const { return samples_.empty() ? 0 : samples_.front().state.dimension(); }

    // Rejects non-finite, out-of-order or dimension-mismatched samples.
    void push(double param, ExtendedState state);

private:
    ParameterKind kind_;
    std::vector<Sample> samples_;
};

}  // namespace extham
