#include "extham/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "extham/detail/ode.hpp"
#include "extham/errors.hpp"

namespace extham {

namespace {

void check_span(double span) {
    if (!std::isfinite(span) || span <= 0.0)
        throw std::invalid_argument("integrate: span must be positive and finite");
}

void check_cfg(const StepperConfig& cfg) {
    if (!std::isfinite(cfg.step) || cfg.step <= 0.0)
        throw std::invalid_argument("integrate: step must be positive and finite");
    if (cfg.max_steps <= 0) throw std::invalid_argument("integrate: max_steps must be positive");
    if (cfg.method == StepMethod::rk45) {
        if (!(cfg.abs_tol > 0.0) || !(cfg.rel_tol >= 0.0))
            throw std::invalid_argument("integrate: rk45 tolerances must be positive");
    }
}

using detail::Rhs;
using detail::drive;

}  // namespace

ConventionalRates conventional_rhs(const ConventionalHamiltonian& H, const ConventionalState& s) {
    validate_state(s);
    ConventionalRates r;
    r.dq = H.dp(s.q, s.p, s.t);
    r.dp = H.dq(s.q, s.p, s.t);
    for (double& v : r.dp) v = -v;
    r.de = H.dt(s.q, s.p, s.t);
    return r;
}

ExtendedRates extended_rhs(const ExtendedHamiltonian& He, const ExtendedState& x) {
    validate_state(x);
    ExtendedGradient g = He.partials(x);
    ExtendedRates r;
    r.dq = g.dp;
    r.dp.resize(g.dq.size());
    for (std::size_t i = 0; i < g.dq.size(); ++i) r.dp[i] = -g.dq[i];
    r.dt = -g.de;
    r.de = g.dt;
    return r;
}

Trajectory integrate_conventional(const ConventionalHamiltonian& H, const ConventionalState& initial,
                                  double span, const StepperConfig& cfg) {
    validate_state(initial);
    check_span(span);
    check_cfg(cfg);
    if (initial.dimension() != H.dimension())
        throw std::invalid_argument("integrate: state dimension does not match the system");

    const std::size_t n = initial.dimension();
    const double t0 = initial.t;
    Vec y(2 * n);
    std::copy(initial.q.begin(), initial.q.end(), y.begin());
    std::copy(initial.p.begin(), initial.p.end(), y.begin() + n);

    Vec q(n), p(n);
    Rhs f = [&](double s, const Vec& yy, Vec& dy) {
        const double t = t0 + s;
        std::copy(yy.begin(), yy.begin() + n, q.begin());
        std::copy(yy.begin() + n, yy.end(), p.begin());
        Vec hp = H.dp(q, p, t);
        Vec hq = H.dq(q, p, t);
        for (std::size_t i = 0; i < n; ++i) {
            dy[i] = hp[i];
            dy[n + i] = -hq[i];
        }
    };

    Trajectory traj(ParameterKind::time_t);
    auto record = [&](double s, const Vec& yy) {
        ExtendedState st;
        st.q.assign(yy.begin(), yy.begin() + n);
        st.p.assign(yy.begin() + n, yy.end());
        st.t = t0 + s;
        st.e = H.eval(st.q, st.p, st.t);
        const double param = st.t;
        traj.push(param, std::move(st));
    };

    Vec weight(2 * n, 1.0);
    drive(f, y, span, cfg, weight, record);
    return traj;
}

Trajectory integrate_extended(const ExtendedHamiltonian& He, const ExtendedState& initial,
                              double span, const StepperConfig& cfg, std::ostream* warnings) {
    validate_state(initial);
    check_span(span);
    check_cfg(cfg);
    if (initial.dimension() != He.dimension())
        throw std::invalid_argument("integrate: state dimension does not match the system");

    const std::size_t n = initial.dimension();
    const double residual0 = He.eval(initial);
    if (std::abs(residual0) > 1e-9 * std::max(1.0, cfg.energy_scale)) {
        std::ostream& os = warnings ? *warnings : std::cerr;
        os << "warning: initial state is off the He = 0 shell (He = " << residual0
           << "); He stays at this value along the run\n";
    }

    Vec y(2 * n + 2);
    std::copy(initial.q.begin(), initial.q.end(), y.begin());
    std::copy(initial.p.begin(), initial.p.end(), y.begin() + n);
    y[2 * n] = initial.t;
    y[2 * n + 1] = initial.e;

    ExtendedState xs;
    xs.q.resize(n);
    xs.p.resize(n);
    Rhs f = [&](double, const Vec& yy, Vec& dy) {
        std::copy(yy.begin(), yy.begin() + n, xs.q.begin());
        std::copy(yy.begin() + n, yy.begin() + 2 * n, xs.p.begin());
        xs.t = yy[2 * n];
        xs.e = yy[2 * n + 1];
        ExtendedGradient g = He.partials(xs);
        for (std::size_t i = 0; i < n; ++i) {
            dy[i] = g.dp[i];
            dy[n + i] = -g.dq[i];
        }
        dy[2 * n] = -g.de;
        dy[2 * n + 1] = g.dt;
    };

    Trajectory traj(ParameterKind::evolution_s);
    auto record = [&](double s, const Vec& yy) {
        ExtendedState st;
        st.q.assign(yy.begin(), yy.begin() + n);
        st.p.assign(yy.begin() + n, yy.begin() + 2 * n);
        st.t = yy[2 * n];
        st.e = yy[2 * n + 1];
        traj.push(s, std::move(st));
    };

    Vec weight(2 * n + 2, 1.0);
    weight[2 * n + 1] = cfg.energy_scale;
    drive(f, y, span, cfg, weight, record);
    return traj;
}

DriftReport monitor(const Trajectory& traj,
                    const std::function<double(const ExtendedState&)>& quantity,
                    const std::string& name) {
    if (traj.empty()) throw std::invalid_argument("monitor: empty trajectory");
    DriftReport rep;
    rep.name = name;
    rep.initial = quantity(traj[0].state);
    rep.param_at_max = traj[0].param;
    const double denom = std::abs(rep.initial) >= 1e-12 ? std::abs(rep.initial) : 1.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        double dev = std::abs(quantity(traj[i].state) - rep.initial);
        if (dev > rep.max_abs_deviation) {
            rep.max_abs_deviation = dev;
            rep.param_at_max = traj[i].param;
        }
    }
    rep.max_rel_deviation = rep.max_abs_deviation / denom;
    return rep;
}

namespace {

// Index of the 4-point window around param; trajectory has >= 1 sample.
std::size_t window_start(const Trajectory& traj, double param) {
    std::size_t m = traj.size();
    std::size_t lo = 0, hi = m;  // first sample with sample.param >= param
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (traj[mid].param < param)
            lo = mid + 1;
        else
            hi = mid;
    }
    if (m <= 4) return 0;
    std::size_t start = lo >= 2 ? lo - 2 : 0;
    if (start + 4 > m) start = m - 4;
    return start;
}

}  // namespace

ExtendedState interpolate_state(const Trajectory& traj, double param) {
    if (traj.empty()) throw std::invalid_argument("interpolate: empty trajectory");
    const double lo = traj.front().param, hi = traj.back().param;
    const double slack = 1e-9 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    if (param < lo - slack || param > hi + slack)
        throw std::invalid_argument("interpolate: parameter outside the sampled range");
    param = std::clamp(param, lo, hi);

    // Exact hit: return the stored sample.
    std::size_t start = window_start(traj, param);
    std::size_t count = std::min<std::size_t>(4, traj.size());
    for (std::size_t j = start; j < start + count; ++j)
        if (traj[j].param == param) return traj[j].state;

    const std::size_t n = traj.dimension();
    ExtendedState out;
    out.q.assign(n, 0.0);
    out.p.assign(n, 0.0);
    out.t = 0.0;
    out.e = 0.0;
    if (count == 1) return traj[0].state;

    for (std::size_t j = start; j < start + count; ++j) {
        double w = 1.0;
        for (std::size_t k = start; k < start + count; ++k) {
            if (k == j) continue;
            w *= (param - traj[k].param) / (traj[j].param - traj[k].param);
        }
        const ExtendedState& s = traj[j].state;
        for (std::size_t i = 0; i < n; ++i) {
            out.q[i] += w * s.q[i];
            out.p[i] += w * s.p[i];
        }
        out.t += w * s.t;
        out.e += w * s.e;
    }
    return out;
}

Trajectory resample(const Trajectory& traj, const std::vector<double>& params) {
    Trajectory out(traj.parameter_kind());
    for (double p : params) out.push(p, interpolate_state(traj, p));
    return out;
}

}  // namespace extham
