#ifndef SPIKEHYBRID_LIMIT_CYCLE_HPP
#define SPIKEHYBRID_LIMIT_CYCLE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "closed_form.hpp"
#include "errors.hpp"
#include "hybrid_arc.hpp"
#include "pendulum_model.hpp"

namespace spikehybrid {

struct OrbitSample {
    double phase = 0.0;
    double q1 = 0.0;
    double q2 = 0.0;
    Sign sigma = Sign::plus;
};

/**
 * The (2 pi / b, 2)-periodic orbit of the linear mode.
 *
 * Phase 0 is the post-jump state (0, mu* - I, -1). The first half-cycle
 * (sigma = -1) covers phases [0, pi/b], the second half (sigma = +1) covers
 * [pi/b, 2 pi/b] and is the mirror image (q1, q2, sigma) -> (-q1, -q2, -sigma)
 * of the first. Phase 2 pi/b is the pre-jump state (0, mu*, +1).
 */
struct LimitCycleDescriptor {
    SystemParams params;
    ModeConstants constants;
    double mu_star = 0.0;
    double period_T = 0.0;
    int period_N = 2;
    double max_amplitude = 0.0;
    int resolution = 0; ///< samples per half-cycle (excluding the closing node)
    std::vector<OrbitSample> orbit_samples; ///< first half then second half, both with end nodes

    /// Exact cycle state at phase s in half 0 (sigma = -1) or half 1 (sigma = +1), s in [0, pi/b].
    [[nodiscard]] PendulumState half_cycle_state(int half, double s) const {
        const auto q = flow_solution_post_jump(mu_star, s, params, constants);
        if (half == 0) return {q.q1, q.q2, Sign::minus};
        return {-q.q1, -q.q2, Sign::plus};
    }

    [[nodiscard]] PendulumState state_at_phase(double phase) const {
        const double hp = constants.inter_jump_time;
        phase = std::fmod(phase, period_T);
        if (phase < 0.0) phase += period_T;
        return phase <= hp ? half_cycle_state(0, phase) : half_cycle_state(1, phase - hp);
    }
};

inline LimitCycleDescriptor compute_cycle(const SystemParams& p, int resolution = 256) {
    if (p.dynamics != Dynamics::linear) throw ParamOutOfRange("the limit cycle is computed for linear dynamics only");
    p.validate();
    if (resolution < 64) throw ParamOutOfRange("cycle resolution must be >= 64 samples per half-cycle");
    LimitCycleDescriptor c;
    c.params = p;
    c.constants = mode_constants(p.alpha);
    c.mu_star = mu_star(p).mu_star;
    c.period_T = 2.0 * c.constants.inter_jump_time;
    c.period_N = 2;
    c.resolution = resolution;

    // |q1(s)| = |c| e^{as} sin(bs) peaks where tan(bs) = -b/a, and there sin(bs) = b.
    const double coeff = std::abs(post_jump_coefficient(c.mu_star, p.I, c.constants));
    const double s_peak = std::atan2(c.constants.b, -c.constants.a) / c.constants.b;
    c.max_amplitude = coeff * std::exp(c.constants.a * s_peak) * std::sin(c.constants.b * s_peak);

    const double hp = c.constants.inter_jump_time;
    c.orbit_samples.reserve(2 * static_cast<std::size_t>(resolution + 1));
    for (int half = 0; half < 2; ++half)
        for (int k = 0; k <= resolution; ++k) {
            const double s = hp * k / resolution;
            const auto x = c.half_cycle_state(half, s);
            c.orbit_samples.push_back({half * hp + s, x.q1, x.q2, x.sigma});
        }
    return c;
}

enum class DistanceMetric {
    full_state, ///< Euclidean norm over (q1, q2, sigma)
    planar      ///< (q1, q2) only
};

namespace detail {

inline double squared_distance(const PendulumState& x, const PendulumState& z, DistanceMetric m) {
    const double d1 = x.q1 - z.q1, d2 = x.q2 - z.q2;
    double d = d1 * d1 + d2 * d2;
    if (m == DistanceMetric::full_state) {
        const double ds = to_double(x.sigma) - to_double(z.sigma);
        d += ds * ds;
    }
    return d;
}

/// Minimizes a unimodal function on [lo, hi] by golden-section search.
template <class F>
double golden_section_min(F&& f, double lo, double hi, double tol = 1e-13) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
        if (!(x1 > lo && x2 < hi)) break;
    }
    return std::min({f(lo), f(hi), f1, f2});
}

} // namespace detail

/**
 * Distance from x to the limit cycle.
 *
 * Every local minimum of the sampled distance is refined by golden-section
 * search on the continuous phase using the exact cycle formula.
 */
inline double distance_to_cycle(const PendulumState& x, const LimitCycleDescriptor& cycle,
                                DistanceMetric metric = DistanceMetric::full_state) {
    const int res = cycle.resolution;
    const double hp = cycle.constants.inter_jump_time;
    double best = std::numeric_limits<double>::infinity();
    for (int half = 0; half < 2; ++half) {
        const auto* base = cycle.orbit_samples.data() + static_cast<std::ptrdiff_t>(half) * (res + 1);
        std::vector<double> d(static_cast<std::size_t>(res + 1));
        for (int k = 0; k <= res; ++k) {
            const auto& o = base[k];
            d[static_cast<std::size_t>(k)] = detail::squared_distance(x, {o.q1, o.q2, o.sigma}, metric);
        }
        auto f = [&](double s) { return detail::squared_distance(x, cycle.half_cycle_state(half, s), metric); };
        for (int k = 0; k <= res; ++k) {
            const double dk = d[static_cast<std::size_t>(k)];
            const bool left_ok = k == 0 || dk <= d[static_cast<std::size_t>(k - 1)];
            const bool right_ok = k == res || dk <= d[static_cast<std::size_t>(k + 1)];
            if (!(left_ok && right_ok)) continue;
            const double lo = hp * std::max(0, k - 1) / res;
            const double hi = hp * std::min(res, k + 1) / res;
            best = std::min({best, dk, detail::golden_section_min(f, lo, hi)});
        }
    }
    return std::sqrt(std::max(0.0, best));
}

struct PeriodicityReport {
    double max_deviation = 0.0;
    std::size_t samples_checked = 0;
    double tolerance = 0.0;
    bool passed = false;
};

/// Checks x(t + T*, j + 2) == x(t, j) on every sample whose shifted time lies in the domain.
inline PeriodicityReport verify_periodicity(const HybridArc<3>& arc, const LimitCycleDescriptor& cycle, double tol) {
    const double T = cycle.period_T;
    const auto final = arc.final_time();
    if (final.t < 2.0 * T) throw DomainTooShort("arc must span at least two periods of the cycle");
    PeriodicityReport rep;
    rep.tolerance = tol;
    for (const auto& seg : arc.segments) {
        const auto target_j = static_cast<std::size_t>(seg.j + cycle.period_N);
        if (target_j >= arc.segments.size()) break;
        const auto& target = arc.segments[target_j];
        for (const auto& s : seg.samples) {
            const double ts = s.t + T;
            if (ts > final.t) break;
            double dev = 0.0;
            const double slack = 1e-9 * std::max(1.0, ts);
            if (ts < target.t_start() - slack || ts > target.t_end() + slack) {
                dev = std::numeric_limits<double>::infinity();
            } else {
                const double tc = std::clamp(ts, target.t_start(), target.t_end());
                const auto y = arc_eval(arc, {tc, static_cast<int>(target_j)});
                double sq = 0.0;
                for (std::size_t i = 0; i < 3; ++i) sq += (y[i] - s.x[i]) * (y[i] - s.x[i]);
                dev = std::sqrt(sq);
            }
            rep.max_deviation = std::max(rep.max_deviation, dev);
            ++rep.samples_checked;
        }
    }
    rep.passed = rep.samples_checked > 0 && rep.max_deviation <= tol;
    return rep;
}

struct StabilityReport {
    double decay_rate_estimate = 0.0;
    double fit_residual = 0.0;
    double per_jump_contraction_observed = std::numeric_limits<double>::quiet_NaN();
    std::size_t samples_used = 0;
    std::size_t contraction_ratios_used = 0;
};

struct DecayFitOptions {
    double noise_floor = 1e-10;        ///< distances below this are excluded from the fit
    double contraction_floor = 1e-4;   ///< ratios need both velocity errors above this
    std::size_t min_jumps = 6;
    std::size_t min_samples = 10;
};

/**
 * Fits log |x(t, j)|_O = c - gamma (t + j) over the arc samples and measures
 * the per-jump contraction of the pre-jump velocity error |q2 - sigma mu*|.
 */
inline StabilityReport estimate_decay_rate(const HybridArc<3>& arc, const LimitCycleDescriptor& cycle,
                                           const DecayFitOptions& opt = {}) {
    if (arc.jumps.size() < opt.min_jumps)
        throw InsufficientData("decay fit needs at least " + std::to_string(opt.min_jumps) + " jumps");
    std::vector<double> xs, ys;
    for (const auto& seg : arc.segments)
        for (const auto& s : seg.samples) {
            const double d = distance_to_cycle(pendulum_state(s.x), cycle);
            if (d < opt.noise_floor) continue;
            xs.push_back(s.t + seg.j);
            ys.push_back(std::log(d));
        }
    if (xs.size() < opt.min_samples) throw InsufficientData("distances to the cycle are at the noise floor");

    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw InsufficientData("degenerate decay fit");
    const double slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (my + slope * (xs[i] - mx));
        rss += r * r;
    }

    StabilityReport rep;
    rep.decay_rate_estimate = -slope;
    rep.fit_residual = std::sqrt(rss / n);
    rep.samples_used = xs.size();

    std::vector<double> errors;
    for (const auto& jr : arc.jumps) errors.push_back(std::abs(jr.pre[1] - jr.pre[2] * cycle.mu_star));
    std::vector<double> ratios;
    for (std::size_t k = 0; k + 1 < errors.size(); ++k)
        if (errors[k] >= opt.contraction_floor && errors[k + 1] >= opt.contraction_floor)
            ratios.push_back(errors[k + 1] / errors[k]);
    rep.contraction_ratios_used = ratios.size();
    if (!ratios.empty()) {
        std::sort(ratios.begin(), ratios.end());
        const std::size_t m = ratios.size() / 2;
        rep.per_jump_contraction_observed =
            ratios.size() % 2 == 1 ? ratios[m] : 0.5 * (ratios[m - 1] + ratios[m]);
    }
    return rep;
}

struct ForwardInvarianceEntry {
    bool passed = true;
    bool initial_in_ball = false;
    double min_radius = std::numeric_limits<double>::infinity(); ///< over checked states
};

struct ForwardInvarianceReport {
    double radius = 0.0;
    std::vector<ForwardInvarianceEntry> arcs;
    [[nodiscard]] bool passed() const {
        return std::all_of(arcs.begin(), arcs.end(), [](const auto& e) { return e.passed; });
    }
};

/**
 * Checks that no recorded state comes within `radius` of the rest point.
 * When the initial state itself is inside the ball, its first flow segment is exempt.
 */
inline ForwardInvarianceReport verify_forward_invariance(const std::vector<HybridArc<3>>& arcs, double radius) {
    ForwardInvarianceReport rep;
    rep.radius = radius;
    for (const auto& arc : arcs) {
        ForwardInvarianceEntry e;
        const auto& x0 = arc.initial_state();
        e.initial_in_ball = std::hypot(x0[0], x0[1]) < radius;
        for (const auto& seg : arc.segments) {
            if (e.initial_in_ball && seg.j == 0) continue;
            for (const auto& s : seg.samples) e.min_radius = std::min(e.min_radius, std::hypot(s.x[0], s.x[1]));
        }
        e.passed = !(e.min_radius < radius);
        rep.arcs.push_back(e);
    }
    return rep;
}

using Polyline = std::vector<StateVector<3>>;

/// Dense resampling of an arc restricted to continuous times in [t_from, t_to], one polyline per segment.
inline std::vector<Polyline> orbit_polylines(const HybridArc<3>& arc, double t_from, double t_to,
                                             double spacing = 1e-3) {
    std::vector<Polyline> out;
    for (const auto& seg : arc.segments) {
        const double lo = std::max(t_from, seg.t_start());
        const double hi = std::min(t_to, seg.t_end());
        if (!(hi > lo)) continue;
        const auto n = static_cast<int>(std::ceil((hi - lo) / spacing));
        Polyline pl;
        pl.reserve(static_cast<std::size_t>(n + 1));
        for (int k = 0; k <= n; ++k) {
            const double t = k == n ? hi : lo + (hi - lo) * k / n;
            pl.push_back(arc_eval(arc, {t, seg.j}));
        }
        out.push_back(std::move(pl));
    }
    return out;
}

namespace detail {

inline double point_segment_distance(const StateVector<3>& p, const StateVector<3>& a, const StateVector<3>& b) {
    double ab2 = 0.0, ap_ab = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        ab2 += (b[i] - a[i]) * (b[i] - a[i]);
        ap_ab += (p[i] - a[i]) * (b[i] - a[i]);
    }
    const double u = ab2 > 0.0 ? std::clamp(ap_ab / ab2, 0.0, 1.0) : 0.0;
    double d2 = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double q = a[i] + u * (b[i] - a[i]) - p[i];
        d2 += q * q;
    }
    return std::sqrt(d2);
}

inline double directed_hausdorff(const std::vector<Polyline>& from, const std::vector<Polyline>& to) {
    double worst = 0.0;
    for (const auto& pl : from)
        for (const auto& p : pl) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& ql : to) {
                if (ql.size() == 1) best = std::min(best, point_segment_distance(p, ql[0], ql[0]));
                for (std::size_t i = 1; i < ql.size(); ++i)
                    best = std::min(best, point_segment_distance(p, ql[i - 1], ql[i]));
            }
            worst = std::max(worst, best);
        }
    return worst;
}

} // namespace detail

/// Symmetric Hausdorff distance between two sets of polylines (vertices against segments).
inline double hausdorff_distance(const std::vector<Polyline>& a, const std::vector<Polyline>& b) {
    return std::max(detail::directed_hausdorff(a, b), detail::directed_hausdorff(b, a));
}

struct Peak {
    double t = 0.0;
    double amplitude = 0.0; ///< |q1| at the velocity zero
};

/// Velocity zeros inside flow segments after t_from, refined by bisection on the interpolated arc.
inline std::vector<Peak> peak_amplitudes(const HybridArc<3>& arc, double t_from) {
    std::vector<Peak> peaks;
    for (const auto& seg : arc.segments) {
        for (std::size_t i = 1; i < seg.samples.size(); ++i) {
            const auto& a = seg.samples[i - 1];
            const auto& b = seg.samples[i];
            if (b.t < t_from) continue;
            if (!((a.x[1] > 0.0 && b.x[1] <= 0.0) || (a.x[1] < 0.0 && b.x[1] >= 0.0))) continue;
            double lo = a.t, hi = b.t;
            const bool lo_positive = a.x[1] > 0.0;
            for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                const double v = arc_eval(arc, {mid, seg.j})[1];
                ((v > 0.0) == lo_positive ? lo : hi) = mid;
            }
            const double tp = 0.5 * (lo + hi);
            if (tp < t_from) continue;
            peaks.push_back({tp, std::abs(arc_eval(arc, {tp, seg.j})[0])});
        }
    }
    return peaks;
}

} // namespace spikehybrid

#endif // SPIKEHYBRID_LIMIT_CYCLE_HPP
