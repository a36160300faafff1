#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "extham/phase_space.hpp"
#include "extham/systems.hpp"

namespace extham {

// CSV layout: header `param,t,e,q1..qn,p1..pn,He_residual`, one row per
// sample, every value printed with 17 significant digits so that reading the
// file back reproduces each binary64 value bit-exactly.

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const ExtendedHamiltonian& He);
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const ExtendedHamiltonian& He);

struct ReadTrajectory {
    Trajectory traj;
    Vec he_residual;  // last CSV column, one entry per sample

    explicit ReadTrajectory(ParameterKind kind) : traj(kind) {}
};

// The file format does not record the parameter kind, so the caller states it.
// Malformed input (bad header, wrong column count, unparsable number) throws
// ConfigError.
ReadTrajectory read_trajectory_csv(std::istream& in, ParameterKind kind);
ReadTrajectory read_trajectory_csv(const std::string& path, ParameterKind kind);

}  // namespace extham
