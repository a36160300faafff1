#include "extham/detail/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "extham/errors.hpp"

namespace extham::detail {

namespace {

bool all_finite(const Vec& y) {
    for (double v : y)
        if (!std::isfinite(v)) return false;
    return true;
}

[[noreturn]] void non_finite(double s) {
    std::ostringstream os;
    os << "integrate: non-finite state at parameter " << s;
    throw NumericalError(os.str());
}

void rk4_step(const Rhs& f, double s, double h, const Vec& y, Vec& out, Vec& k1, Vec& k2, Vec& k3,
              Vec& k4, Vec& tmp) {
    const std::size_t m = y.size();
    f(s, y, k1);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    f(s + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    f(s + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * k3[i];
    f(s + h, tmp, k4);
    const double h6 = h / 6.0;
    for (std::size_t i = 0; i < m; ++i)
        out[i] = y[i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

}  // namespace

void drive_rk4(const Rhs& f, Vec& y, double span, const StepperConfig& cfg, const Record& record) {
    const std::size_t m = y.size();
    Vec out(m), k1(m), k2(m), k3(m), k4(m), tmp(m);
    record(0.0, y);
    double s = 0.0;
    long steps = 0;
    while (s < span) {
        double h = cfg.step;
        bool last = false;
        if (s + h >= span) {
            h = span - s;
            last = true;
        }
        if (h <= 0.0) break;
        if (++steps > cfg.max_steps) throw NumericalError("integrate: step budget exhausted");
        rk4_step(f, s, h, y, out, k1, k2, k3, k4, tmp);
        y.swap(out);
        s = last ? span : s + h;
        if (!all_finite(y)) non_finite(s);
        record(s, y);
    }
}

void drive_rk45(const Rhs& f, Vec& y, double span, const StepperConfig& cfg, const Vec& err_weight,
                const Record& record) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                        b6 = 11.0 / 84;
    static const double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    const std::size_t m = y.size();
    Vec k1(m), k2(m), k3(m), k4(m), k5(m), k6(m), k7(m), tmp(m), ynew(m);
    record(0.0, y);
    double s = 0.0;
    double h = std::min(cfg.step, span);
    const double h_min = 1e-14 * std::max(1.0, span);
    long attempts = 0;
    while (s < span) {
        if (h > span - s) h = span - s;
        if (h < h_min) throw NumericalError("integrate: step underflow near singular behaviour");
        if (++attempts > cfg.max_steps) throw NumericalError("integrate: step budget exhausted");

        f(s, y, k1);
        for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        f(s + c2 * h, tmp, k2);
        for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(s + c3 * h, tmp, k3);
        for (std::size_t i = 0; i < m; ++i)
            tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(s + c4 * h, tmp, k4);
        for (std::size_t i = 0; i < m; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(s + c5 * h, tmp, k5);
        for (std::size_t i = 0; i < m; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        f(s + h, tmp, k6);
        for (std::size_t i = 0; i < m; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        f(s + h, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                             e7 * k7[i]);
            double scale = cfg.abs_tol * err_weight[i] +
                           cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            double r = ei / scale;
            err += r * r;
        }
        err = std::sqrt(err / static_cast<double>(m));

        if (err <= 1.0 || h <= h_min * 2.0) {
            bool last = (h >= span - s);
            s = last ? span : s + h;
            y = ynew;
            if (!all_finite(y)) non_finite(s);
            record(s, y);
        }
        double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
    }
}

void drive(const Rhs& f, Vec& y, double span, const StepperConfig& cfg, const Vec& err_weight,
           const Record& record) {
    if (cfg.method == StepMethod::rk4)
        drive_rk4(f, y, span, cfg, record);
    else
        drive_rk45(f, y, span, cfg, err_weight, record);
}

}  // namespace extham::detail
