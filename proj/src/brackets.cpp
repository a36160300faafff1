#include "extham/brackets.hpp"

#include <cmath>
#include <stdexcept>

#include "extham/errors.hpp"

namespace extham {

namespace {

// Second-order central difference in one coordinate of the probe state; the
// denominator uses the step actually realized in floating point.
double central(const ExtendedFunction& f, ExtendedState& probe, double* coord, double step) {
    const double x0 = *coord;
    const double h = step * std::max(1.0, std::abs(x0));
    const double xp = x0 + h, xm = x0 - h;
    *coord = xp;
    const double fp = f.eval(probe);
    *coord = xm;
    const double fm = f.eval(probe);
    *coord = x0;
    return (fp - fm) / (xp - xm);
}

ExtendedGradient fd_gradient(const ExtendedFunction& f, const ExtendedState& x, double step) {
    const std::size_t n = x.dimension();
    ExtendedGradient g;
    g.dq.resize(n);
    g.dp.resize(n);
    ExtendedState probe = x;
    for (std::size_t i = 0; i < n; ++i) g.dq[i] = central(f, probe, &probe.q[i], step);
    for (std::size_t i = 0; i < n; ++i) g.dp[i] = central(f, probe, &probe.p[i], step);
    g.dt = central(f, probe, &probe.t, step);
    g.de = central(f, probe, &probe.e, step);
    return g;
}

}  // namespace

ExtendedGradient gradient(const ExtendedFunction& f, const ExtendedState& x,
                          const GradientScheme& scheme) {
    validate_state(x);
    if (!(scheme.fd_step > 0.0)) throw std::invalid_argument("gradient: fd_step must be positive");
    if (scheme.mode == GradientScheme::Mode::analytic && f.has_analytic_partials())
        return f.partials(x);
    return fd_gradient(f, x, scheme.fd_step);
}

namespace {

double bracket_of(const ExtendedGradient& gf, const ExtendedGradient& gg) {
    double sum = 0.0;
    for (std::size_t i = 0; i < gf.dq.size(); ++i)
        sum += gf.dq[i] * gg.dp[i] - gf.dp[i] * gg.dq[i];
    return sum - gf.dt * gg.de + gf.de * gg.dt;
}

}  // namespace

double extended_poisson(const ExtendedFunction& f, const ExtendedFunction& g,
                        const ExtendedState& x, const GradientScheme& scheme) {
    return bracket_of(gradient(f, x, scheme), gradient(g, x, scheme));
}

double total_time_derivative(const ExtendedFunction& I, const ConventionalHamiltonian& H,
                             const ExtendedState& x, const GradientScheme& scheme) {
    ExtendedGradient gi = gradient(I, x, scheme);
    Vec hq = H.dq(x.q, x.p, x.t);
    Vec hp = H.dp(x.q, x.p, x.t);
    double sum = gi.dt + gi.de * H.dt(x.q, x.p, x.t);
    for (std::size_t i = 0; i < hq.size(); ++i) sum += gi.dq[i] * hp[i] - gi.dp[i] * hq[i];
    return sum;
}

OnShellSampler::OnShellSampler(std::shared_ptr<const ConventionalHamiltonian> H, std::uint64_t seed)
    : OnShellSampler(std::move(H), seed, Bounds{}) {}

OnShellSampler::OnShellSampler(std::shared_ptr<const ConventionalHamiltonian> H, std::uint64_t seed,
                               Bounds bounds)
    : H_(std::move(H)), bounds_(bounds), state_(seed) {
    if (!H_) throw std::invalid_argument("sampler: null Hamiltonian");
    if (!(bounds_.q_hi > bounds_.q_lo) || !(bounds_.p_hi > bounds_.p_lo) ||
        !(bounds_.t_hi >= bounds_.t_lo) || !(bounds_.r_min >= 0.0))
        throw std::invalid_argument("sampler: inconsistent bounds");
}

// splitmix64: tiny, seed-stable across platforms.
double OnShellSampler::uniform(double lo, double hi) {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z = z ^ (z >> 31);
    double u = static_cast<double>(z >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

ExtendedState OnShellSampler::next() {
    const std::size_t n = H_->dimension();
    for (int attempt = 0; attempt < 10000; ++attempt) {
        ConventionalState s;
        s.q.resize(n);
        s.p.resize(n);
        double r2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s.q[i] = uniform(bounds_.q_lo, bounds_.q_hi);
            r2 += s.q[i] * s.q[i];
        }
        if (r2 < bounds_.r_min * bounds_.r_min) continue;
        for (std::size_t i = 0; i < n; ++i) s.p[i] = uniform(bounds_.p_lo, bounds_.p_hi);
        s.t = uniform(bounds_.t_lo, bounds_.t_hi);
        return lift(s, *H_);
    }
    throw NumericalError("sampler: rejection did not terminate; check bounds");
}

ScanStatistics conservation_scan(const ExtendedFunction& I, const ExtendedHamiltonian& He,
                                 OnShellSampler& sampler, long count,
                                 const GradientScheme& scheme) {
    if (count <= 0) throw std::invalid_argument("conservation_scan: count must be positive");
    ScanStatistics stats;
    double sum = 0.0;
    for (long k = 0; k < count; ++k) {
        try {
            ExtendedState x = sampler.next();
            double b = std::abs(extended_poisson(He, I, x, scheme));
            stats.max_abs = std::max(stats.max_abs, b);
            sum += b;
            ++stats.count;
        } catch (const DomainError&) {
            ++stats.failures;
        }
    }
    if (stats.count > 0) stats.mean_abs = sum / static_cast<double>(stats.count);
    return stats;
}

}  // namespace extham
