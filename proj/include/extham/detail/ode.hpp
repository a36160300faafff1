#pragma once

#include <functional>

#include "extham/dynamics.hpp"
#include "extham/phase_space.hpp"

namespace extham::detail {

using Rhs = std::function<void(double param, const Vec& y, Vec& dydt)>;
using Record = std::function<void(double param, const Vec& y)>;

// Classical fixed-step RK4 over param in [0, span]; records the initial point
// and every step. The final step is clamped so the last recorded parameter is
// exactly `span`.
void drive_rk4(const Rhs& f, Vec& y, double span, const StepperConfig& cfg, const Record& record);

// Dormand-Prince 5(4) embedded adaptive pair; err_weight scales abs_tol per
// component.
void drive_rk45(const Rhs& f, Vec& y, double span, const StepperConfig& cfg, const Vec& err_weight,
                const Record& record);

void drive(const Rhs& f, Vec& y, double span, const StepperConfig& cfg, const Vec& err_weight,
           const Record& record);

}  // namespace extham::detail
