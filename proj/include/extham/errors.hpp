#pragma once

#include <stdexcept>
#include <string>

namespace extham {

// Evaluation left the domain of a system function (e.g. a potential singularity).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// An integration or root-finding procedure failed to produce a trustworthy result
// (step underflow, step budget exhausted, non-finite state).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// A scenario configuration is malformed or inconsistent.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace extham
