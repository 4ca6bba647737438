#ifndef SPIKEHYBRID_CLOSED_FORM_HPP
#define SPIKEHYBRID_CLOSED_FORM_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "errors.hpp"
#include "hybrid_arc.hpp"
#include "pendulum_model.hpp"

namespace spikehybrid {

// Exact solutions of the linear mode. With a = -alpha/2 and b = sqrt(4 - alpha^2)/2
// the flow is a damped rotation of unit natural frequency (a^2 + b^2 = 1),
// and every zero crossing of q1 after the first is pi/b apart.

struct ModeConstants {
    double alpha = 0.0;
    double a = 0.0;
    double b = 0.0;
    double inter_jump_time = 0.0; ///< pi / b
    double contraction = 0.0;     ///< exp(a pi / b)
};

inline ModeConstants mode_constants(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw ParamOutOfRange("alpha must lie in the open interval (0, 2), got " + std::to_string(alpha));
    ModeConstants mc;
    mc.alpha = alpha;
    mc.a = -alpha / 2.0;
    mc.b = std::sqrt(4.0 - alpha * alpha) / 2.0;
    mc.inter_jump_time = std::numbers::pi / mc.b;
    mc.contraction = std::exp(mc.a * mc.inter_jump_time);
    return mc;
}

/// Planar part (q1, q2) of a state.
struct PlanarState {
    double q1 = 0.0;
    double q2 = 0.0;
};

using Matrix2 = std::array<std::array<double, 2>, 2>;

inline double determinant(const Matrix2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

inline PlanarState apply(const Matrix2& m, PlanarState v) {
    return {m[0][0] * v.q1 + m[0][1] * v.q2, m[1][0] * v.q1 + m[1][1] * v.q2};
}

/// Linear-mode state s time units after the initial state, before the first jump.
inline PlanarState flow_solution_initial(const PendulumState& x0, double s, const ModeConstants& mc) {
    const double c0 = (x0.q2 - x0.q1 * mc.a) / mc.b;
    const double ea = std::exp(mc.a * s);
    const double cs = std::cos(mc.b * s), sn = std::sin(mc.b * s);
    return {x0.q1 * ea * cs + c0 * ea * sn, x0.q2 * ea * cs + (c0 * mc.a - x0.q1 * mc.b) * ea * sn};
}

/// c(z) = (z + I sign(z)) / b, defined for z != 0.
inline double post_jump_coefficient(double q2_pre, double I, const ModeConstants& mc) {
    if (q2_pre == 0.0) throw DegenerateVelocity("pre-jump velocity must be nonzero");
    return (q2_pre + I * (q2_pre > 0.0 ? 1.0 : -1.0)) / mc.b;
}

/// Linear-mode state s time units after a jump whose pre-jump velocity was q2_pre.
inline PlanarState flow_solution_post_jump(double q2_pre, double s, const SystemParams& p, const ModeConstants& mc) {
    const double c = post_jump_coefficient(q2_pre, p.I, mc);
    const double ea = std::exp(mc.a * s);
    const double cs = std::cos(mc.b * s), sn = std::sin(mc.b * s);
    return {c * ea * sn, c * ea * (mc.a * sn + mc.b * cs)};
}

struct CycleFixedPoint {
    double mu_star = 0.0; ///< pre-jump velocity on the cycle when sigma = +1
};

inline CycleFixedPoint mu_star(const SystemParams& p) {
    p.validate();
    const auto mc = mode_constants(p.alpha);
    return {p.I * mc.contraction / (mc.contraction - 1.0)};
}

/// Pre-jump velocity at the next jump: -(q2 + I sign(q2)) exp(a pi / b).
inline double pre_jump_velocity_step(double q2_pre, const SystemParams& p, const ModeConstants& mc) {
    if (q2_pre == 0.0) throw DegenerateVelocity("pre-jump velocity must be nonzero");
    return -(q2_pre + p.I * (q2_pre > 0.0 ? 1.0 : -1.0)) * mc.contraction;
}

/**
 * First s >= 0 at which the linear flow from x0 reaches q1 = 0 with
 * sigma0 * q2 < 0.
 *
 * Zeros of q1 are bracketed on a grid of step pi/(64 b) and bisected to a
 * bracket width of 1e-12.
 */
inline double time_to_impact(const PendulumState& x0, const ModeConstants& mc) {
    if (x0.q1 == 0.0 && x0.q2 == 0.0) throw OriginState("time to impact is undefined at the rest state");
    const double s0 = to_double(x0.sigma);
    auto phi1 = [&](double s) { return flow_solution_initial(x0, s, mc).q1; };
    auto phi2 = [&](double s) { return s0 * flow_solution_initial(x0, s, mc).q2; };
    if (x0.q1 == 0.0 && phi2(0.0) < 0.0) return 0.0;

    const double grid = mc.inter_jump_time / 64.0;
    double prev_s = 0.0;
    double prev_v = phi1(0.0);
    for (int k = 1; k <= 64 * 4; ++k) {
        const double s = k * grid;
        const double v = phi1(s);
        if (v == 0.0 && phi2(s) < 0.0) return s;
        if ((prev_v < 0.0 && v > 0.0) || (prev_v > 0.0 && v < 0.0)) {
            double lo = prev_s, hi = s;
            while (hi - lo > 1e-12) {
                const double mid = 0.5 * (lo + hi);
                if (!(mid > lo && mid < hi)) break;
                const double vm = phi1(mid);
                if ((vm < 0.0) == (prev_v < 0.0) && vm != 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            const double root = 0.5 * (lo + hi);
            if (phi2(root) < 0.0) return root;
        }
        prev_s = s;
        prev_v = v;
    }
    throw Error("time to impact not found within four inter-jump intervals");
}

/// The matrix M(s) used in the stability argument; note det M(s) = b, not 1.
inline Matrix2 flow_matrix(double s, const ModeConstants& mc) {
    const double cs = std::cos(mc.b * s), sn = std::sin(mc.b * s);
    const double a = mc.a, b = mc.b;
    return {{{cs + (a / b) * sn, -sn}, {(a * a / b + b) * sn, b * cs - a * sn}}};
}

/// exp(A t) for A = [[0, 1], [-1, -alpha]]; negative t gives the backward flow.
inline Matrix2 flow_propagator(double t, const ModeConstants& mc) {
    const double ea = std::exp(mc.a * t);
    const double cs = std::cos(mc.b * t), sn = std::sin(mc.b * t);
    const double r = mc.a / mc.b;
    return {{{ea * (cs - r * sn), ea * sn / mc.b}, {-ea * sn / mc.b, ea * (cs + r * sn)}}};
}

/**
 * Point of the limit cycle that reaches the cycle's pre-jump state at the
 * same time tau(x0) as the flow from x0.
 *
 * Built with the exact backward flow exp(-A tau) applied to (0, sigma0 mu*).
 */
inline PendulumState cycle_phase_point(const PendulumState& x0, const SystemParams& p) {
    const auto mc = mode_constants(p.alpha);
    const double tau = time_to_impact(x0, mc);
    const double target = to_double(x0.sigma) * mu_star(p).mu_star;
    const auto q = apply(flow_propagator(-tau, mc), {0.0, target});
    return {q.q1, q.q2, x0.sigma};
}

/**
 * The exact linear-mode hybrid solution from an initial state in X0.
 *
 * Jump i (1-based) happens at t_i = tau + (i - 1) pi / b; pre-jump velocities
 * follow the recursion in pre_jump_velocity_step. Evaluation on segment j uses
 * that segment's formula for any t, so it can be compared against numerically
 * located jump times that differ by rounding.
 */
class ClosedFormSolution {
public:
    ClosedFormSolution(const PendulumState& x0, const SystemParams& p)
        : x0_(x0), params_(p), mc_(mode_constants(p.alpha)), tau_(time_to_impact(x0, mc_)) {
        p.validate();
        pre_velocities_.push_back(flow_solution_initial(x0_, tau_, mc_).q2);
    }

    [[nodiscard]] const ModeConstants& constants() const { return mc_; }
    [[nodiscard]] double first_impact() const { return tau_; }

    /// Continuous time of jump i, i >= 1.
    [[nodiscard]] double jump_time(int i) const { return tau_ + (i - 1) * mc_.inter_jump_time; }

    /// Velocity just before jump i, i >= 1.
    [[nodiscard]] double pre_jump_velocity(int i) const {
        while (static_cast<int>(pre_velocities_.size()) < i)
            pre_velocities_.push_back(pre_jump_velocity_step(pre_velocities_.back(), params_, mc_));
        return pre_velocities_[static_cast<std::size_t>(i - 1)];
    }

    [[nodiscard]] PendulumState state(HybridTime at) const {
        if (at.j == 0) {
            const auto q = flow_solution_initial(x0_, at.t, mc_);
            return {q.q1, q.q2, x0_.sigma};
        }
        const double v = pre_jump_velocity(at.j);
        const auto q = flow_solution_post_jump(v, at.t - jump_time(at.j), params_, mc_);
        return {q.q1, q.q2, v > 0.0 ? Sign::plus : Sign::minus};
    }

private:
    PendulumState x0_;
    SystemParams params_;
    ModeConstants mc_;
    double tau_;
    mutable std::vector<double> pre_velocities_;
};

/**
 * Hybrid arc sampled from the exact solution.
 *
 * Each full inter-jump segment holds samples_per_segment + 1 equally spaced
 * nodes, so nodes of segments j and j + 2 are aligned in phase.
 */
inline HybridArc<3> closed_form_arc(const PendulumState& x0, const SystemParams& p, double t_max, int j_max,
                                    int samples_per_segment = 256) {
    if (!(t_max > 0.0) || j_max < 1 || samples_per_segment < 1) throw ConfigError("invalid closed-form horizon");
    const ClosedFormSolution sol(x0, p);
    const auto& mc = sol.constants();
    const PendulumSystem sys(p);
    auto sample = [&](double t, const PendulumState& s) {
        const auto v = to_vector(s);
        return Sample<3>{t, v, sys.flow(v)};
    };

    HybridArc<3> arc;
    arc.meta.components = sys.component_names();
    arc.meta.interpolation = Interpolation::hermite_cubic;

    auto fill = [&](FlowSegment<3>& seg, double t_begin, double length, bool truncated) {
        const double t_end = truncated ? t_max : t_begin + length;
        const int n = std::max(1, static_cast<int>(std::ceil(samples_per_segment * (t_end - t_begin) /
                                                             mc.inter_jump_time)));
        const double dt = truncated ? mc.inter_jump_time / samples_per_segment : (t_end - t_begin) / n;
        for (int k = 1; k <= n; ++k) {
            double t = t_begin + k * dt;
            if (k == n || t > t_end) t = t_end;
            if (t <= seg.samples.back().t) continue;
            seg.samples.push_back(sample(t, sol.state({t, seg.j})));
            if (t == t_end) break;
        }
    };

    FlowSegment<3> seg{0, {sample(0.0, x0)}};
    const double tau = sol.first_impact();
    if (tau > 0.0) fill(seg, 0.0, tau, tau > t_max);
    if (tau > t_max) {
        arc.segments.push_back(std::move(seg));
        arc.meta.termination = Termination::time_horizon;
        return arc;
    }
    for (int j = 1;; ++j) {
        const double tj = sol.jump_time(j);
        const auto pre = pendulum_state(seg.samples.back().x);
        const auto post = select_jump(pre, p, Sign::plus);
        arc.jumps.push_back({tj, j - 1, to_vector(pre), to_vector(post), 0, "torque", false});
        arc.segments.push_back(std::move(seg));
        seg = FlowSegment<3>{j, {sample(tj, post)}};
        if (j >= j_max) {
            arc.meta.termination = Termination::jump_horizon;
            break;
        }
        const bool truncated = sol.jump_time(j + 1) > t_max;
        fill(seg, tj, mc.inter_jump_time, truncated);
        if (truncated) {
            arc.meta.termination = Termination::time_horizon;
            break;
        }
        // Keep segment boundary times identical to the jump-time formula.
        seg.samples.back().t = sol.jump_time(j + 1);
    }
    arc.segments.push_back(std::move(seg));
    return arc;
}

} // namespace spikehybrid

#endif // SPIKEHYBRID_CLOSED_FORM_HPP
