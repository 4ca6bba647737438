#ifndef SPIKEHYBRID_SOLVER_HPP
#define SPIKEHYBRID_SOLVER_HPP

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "hybrid_arc.hpp"
#include "integrators.hpp"
#include "sign.hpp"

namespace spikehybrid {

enum class IntegratorMethod { dopri5, rk4 };

/// Only jump-priority is supported: a state in the jump set always jumps before flowing.
enum class JumpPolicy { jump_priority };

inline const char* to_string(IntegratorMethod m) { return m == IntegratorMethod::dopri5 ? "dopri5" : "rk4"; }

struct SolverConfig {
    IntegratorMethod method = IntegratorMethod::dopri5;
    double step = 0.01;       ///< fixed step (rk4) or initial step (dopri5)
    double max_step = 0.1;    ///< dopri5 only
    double abs_tol = 1e-11;
    double rel_tol = 1e-11;
    double event_tol = 1e-12; ///< guard residual at localized events
    double zero_tol = 1e-10;  ///< membership tolerance for set predicates
    double t_max = 10.0;
    int j_max = 1000;
    JumpPolicy jump_policy = JumpPolicy::jump_priority;
    Sign sgn_zero_choice = Sign::plus;
    int max_zero_flow_jumps = 8;

    void validate() const {
        if (!(step > 0.0)) throw ConfigError("solver step must be > 0");
        if (!(max_step > 0.0)) throw ConfigError("solver max_step must be > 0");
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw ConfigError("integrator tolerances must be > 0");
        if (!(event_tol > 0.0) || !(zero_tol > 0.0)) throw ConfigError("event_tol and zero_tol must be > 0");
        if (event_tol > zero_tol) throw ConfigError("event_tol must not exceed zero_tol");
        if (!(t_max > 0.0)) throw ConfigError("T_max must be > 0");
        if (j_max < 1) throw ConfigError("J_max must be >= 1");
        if (max_zero_flow_jumps < 1) throw ConfigError("max_zero_flow_jumps must be >= 1");
    }
};

template <std::size_t N>
struct JumpOutcome {
    StateVector<N> post{};
    std::string label;
    bool sgn_selection = false;
    std::vector<std::string> notes; ///< copied into the arc warnings
};

/**
 * Interface of a hybrid system consumed by run_hybrid.
 *
 * The flow set is {x : every flow guard >= 0}; leaving it is detected by a
 * guard changing sign along the flow. Jump sets are indexed by channel and
 * tried in the order given by channel_priority().
 */
template <class S>
concept HybridSystem = requires(const S& s, const StateVector<S::dimension>& x, double tol, std::size_t k, Sign z) {
    { s.flow(x) } -> std::same_as<StateVector<S::dimension>>;
    { s.flow_guards(x) } -> std::same_as<std::array<double, S::guard_count>>;
    { s.in_flow_set(x, tol) } -> std::convertible_to<bool>;
    { s.in_jump_set(x, k, tol) } -> std::convertible_to<bool>;
    { s.jump(x, k, z) } -> std::same_as<JumpOutcome<S::dimension>>;
    { s.jump_images(x, k) } -> std::same_as<std::vector<StateVector<S::dimension>>>;
    { s.channel_priority() } -> std::same_as<std::array<std::size_t, S::channel_count>>;
    { s.component_names() } -> std::same_as<std::vector<std::string>>;
};

namespace detail {

template <HybridSystem S>
std::optional<std::size_t> active_channel(const S& sys, const StateVector<S::dimension>& x, double tol) {
    for (std::size_t k : sys.channel_priority())
        if (sys.in_jump_set(x, k, tol)) return k;
    return std::nullopt;
}

} // namespace detail

/**
 * Simulates a hybrid system from x0 under the jump-priority policy.
 *
 * The arc ends when t reaches cfg.t_max, when j reaches cfg.j_max, or when a
 * localized exit from the flow set is not covered by any jump set (the
 * maximal solution stops there). Guard crossings are localized by bisection
 * on re-integrated partial steps until the guard residual is <= event_tol.
 */
template <HybridSystem S>
HybridArc<S::dimension> run_hybrid(const S& sys, const StateVector<S::dimension>& x0, const SolverConfig& cfg) {
    constexpr std::size_t N = S::dimension;
    using Vec = StateVector<N>;
    cfg.validate();

    const bool in_c = sys.in_flow_set(x0, cfg.zero_tol);
    const bool in_d = detail::active_channel(sys, x0, cfg.zero_tol).has_value();
    if (!in_c && !in_d) throw InitialStateOutsideCD("initial state lies in neither the flow set nor the jump set");

    auto f = [&sys](const Vec& y) { return sys.flow(y); };
    auto advance = [&](const Vec& y, double h) -> Vec {
        if (cfg.method == IntegratorMethod::rk4) return rk4_step<N>(f, y, h);
        return dopri5_step<N>(f, y, h, cfg.abs_tol, cfg.rel_tol).x;
    };

    HybridArc<N> arc;
    arc.meta.components = sys.component_names();
    arc.meta.interpolation = Interpolation::hermite_cubic;

    double t = 0.0;
    int j = 0;
    Vec x = x0;
    FlowSegment<N> seg{j, {{t, x, f(x)}}};
    double h = cfg.method == IntegratorMethod::rk4 ? cfg.step : std::min(cfg.step, cfg.max_step);
    int zero_flow_jumps = 0;
    bool at_event = false;

    while (true) {
        if (auto ch = detail::active_channel(sys, x, cfg.event_tol)) {
            auto outcome = sys.jump(x, *ch, cfg.sgn_zero_choice);
            arc.jumps.push_back({t, j, x, outcome.post, static_cast<int>(*ch), outcome.label, outcome.sgn_selection});
            for (const auto& n : outcome.notes) arc.add_warning(n);
            const bool zero_length = seg.samples.size() == 1;
            zero_flow_jumps = zero_length ? zero_flow_jumps + 1 : 0;
            arc.segments.push_back(std::move(seg));
            ++j;
            x = outcome.post;
            seg = FlowSegment<N>{j, {{t, x, f(x)}}};
            at_event = false;
            if (zero_flow_jumps > cfg.max_zero_flow_jumps)
                throw StagnationError("more than " + std::to_string(cfg.max_zero_flow_jumps) +
                                      " consecutive jumps without flow at t=" + std::to_string(t));
            if (j >= cfg.j_max) {
                arc.meta.termination = Termination::jump_horizon;
                break;
            }
            continue;
        }
        if (t >= cfg.t_max) {
            arc.meta.termination = Termination::time_horizon;
            break;
        }
        if (at_event || !sys.in_flow_set(x, cfg.zero_tol)) {
            arc.meta.termination = Termination::left_flow_set;
            break;
        }

        const double remaining = cfg.t_max - t;
        double hs = 0.0;
        Vec xn{};
        double h_next = h;
        if (cfg.method == IntegratorMethod::rk4) {
            hs = std::min(h, remaining);
            xn = rk4_step<N>(f, x, hs);
        } else {
            while (true) {
                hs = std::min({h, remaining, cfg.max_step});
                const auto trial = dopri5_step<N>(f, x, hs, cfg.abs_tol, cfg.rel_tol);
                if (trial.error_norm <= 1.0) {
                    xn = trial.x;
                    h_next = dopri5_next_step(hs, trial.error_norm);
                    break;
                }
                h = dopri5_next_step(hs, trial.error_norm);
                if (h < 1e-14 * std::max(1.0, std::abs(t)))
                    throw Error("step size underflow at t=" + std::to_string(t));
            }
        }

        const auto g_new = sys.flow_guards(xn);
        std::optional<double> event_theta;
        for (std::size_t i = 0; i < S::guard_count; ++i) {
            if (!(g_new[i] < -cfg.event_tol)) continue;
            double lo = 0.0, hi = hs;
            std::optional<double> found;
            for (int it = 0; it < 400; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (!(mid > lo && mid < hi)) break;
                const double gm = sys.flow_guards(advance(x, mid))[i];
                if (std::abs(gm) <= cfg.event_tol) {
                    found = mid;
                    break;
                }
                (gm > 0.0 ? lo : hi) = mid;
            }
            if (!found)
                throw EventLocalizationFailure("guard " + std::to_string(i) + " sign change near t=" +
                                               std::to_string(t) + " could not be localized to event_tol");
            if (!event_theta || *found < *event_theta) event_theta = found;
        }

        if (event_theta) {
            const double te = t + *event_theta;
            if (te > t) {
                x = advance(x, *event_theta);
                t = te;
                seg.samples.push_back({t, x, f(x)});
            }
            at_event = true;
        } else {
            x = xn;
            t = hs == remaining ? cfg.t_max : t + hs;
            seg.samples.push_back({t, x, f(x)});
            if (cfg.method == IntegratorMethod::dopri5) h = h_next;
        }
    }
    arc.segments.push_back(std::move(seg));
    if constexpr (requires { sys.annotate(arc); }) sys.annotate(arc);
    return arc;
}

} // namespace spikehybrid

#endif // SPIKEHYBRID_SOLVER_HPP
