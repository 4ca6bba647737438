#ifndef SPIKEHYBRID_ADAPTATION_HPP
#define SPIKEHYBRID_ADAPTATION_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "hybrid_arc.hpp"
#include "pendulum_model.hpp"
#include "sign.hpp"
#include "solver.hpp"

namespace spikehybrid {

/// (q1, q2, sigma1, sigma2, I): pendulum state, sign trackers of q1 and q2, current pulse amplitude.
struct AugmentedState {
    double q1 = 0.0;
    double q2 = 0.0;
    Sign sigma1 = Sign::plus;
    Sign sigma2 = Sign::plus;
    double I = 0.0;

    friend bool operator==(const AugmentedState&, const AugmentedState&) = default;
};

inline StateVector<5> to_vector(const AugmentedState& x) {
    return {x.q1, x.q2, to_double(x.sigma1), to_double(x.sigma2), x.I};
}
inline AugmentedState augmented_state(const StateVector<5>& v) {
    return {v[0], v[1], sign_from_double(v[2]), sign_from_double(v[3]), v[4]};
}

/**
 * How the velocity-zero jump set is closed off.
 *
 * printed:        -a sigma2 sin(q1) <= 0 with a = -alpha/2, i.e. sigma2 sin(q1) <= 0
 * exit_direction: -sigma2 sin(q1) <= 0, the flow pushes sigma2 q2 negative
 *
 * Only exit_direction lets the peak-detection jump fire at an ordinary velocity
 * zero; under the printed rule a trajectory reaching its first peak has no
 * continuation and the arc ends with Termination::left_flow_set.
 */
enum class D2Rule { printed, exit_direction };

/// Order in which simultaneous torque and adaptation jumps are taken.
enum class TieBreak { torque_first, adapt_first };

inline const char* to_string(D2Rule r) { return r == D2Rule::printed ? "printed" : "exit_direction"; }
inline const char* to_string(TieBreak t) { return t == TieBreak::torque_first ? "torque_first" : "adapt_first"; }

inline D2Rule parse_d2_rule(std::string_view s) {
    if (s == "printed") return D2Rule::printed;
    if (s == "exit_direction") return D2Rule::exit_direction;
    throw ConfigError("d2_rule must be \"printed\" or \"exit_direction\", got \"" + std::string(s) + "\"");
}

inline TieBreak parse_tie_break(std::string_view s) {
    if (s == "torque_first") return TieBreak::torque_first;
    if (s == "adapt_first") return TieBreak::adapt_first;
    throw ConfigError("tie_break must be \"torque_first\" or \"adapt_first\", got \"" + std::string(s) + "\"");
}

/// epsilon = 0 disables adaptation: the adapt jump still flips sigma2 but leaves I unchanged.
struct AdaptationParams {
    double alpha = 0.5;
    double epsilon = 0.02;
    double q1_star = std::numbers::pi / 6.0;
    Dynamics dynamics = Dynamics::nonlinear;
    D2Rule d2_rule = D2Rule::exit_direction;
    TieBreak tie_break = TieBreak::torque_first;

    void validate() const {
        if (!(alpha > 0.0 && alpha < 2.0))
            throw ParamOutOfRange("alpha must lie in the open interval (0, 2), got " + std::to_string(alpha));
        if (!(epsilon >= 0.0)) throw ParamOutOfRange("epsilon must be >= 0, got " + std::to_string(epsilon));
        if (!(q1_star > 0.0 && q1_star < std::numbers::pi))
            throw ParamOutOfRange("q1_star must lie in (0, pi), got " + std::to_string(q1_star));
    }
};

inline bool in_flow_set_aug(const AugmentedState& x, double tol = 0.0) {
    return to_double(x.sigma1) * x.q1 >= -tol && to_double(x.sigma2) * x.q2 >= -tol;
}

/// Torque jump set: sigma1 q1 = 0, sigma1 q2 <= 0, sigma2 q2 >= 0.
inline bool in_D1(const AugmentedState& x, double tol = 0.0) {
    const double s1 = to_double(x.sigma1), s2 = to_double(x.sigma2);
    return std::abs(s1 * x.q1) <= tol && s1 * x.q2 <= tol && s2 * x.q2 >= -tol;
}

/// Peak-detection jump set: sigma1 q1 >= 0, sigma2 q2 = 0 and the direction condition selected by rule.
inline bool in_D2(const AugmentedState& x, const AdaptationParams& p, double tol = 0.0) {
    const double s1 = to_double(x.sigma1), s2 = to_double(x.sigma2);
    if (!(s1 * x.q1 >= -tol && std::abs(s2 * x.q2) <= tol)) return false;
    const double restoring = p.dynamics == Dynamics::linear ? x.q1 : std::sin(x.q1);
    const double a = -p.alpha / 2.0;
    const double cond = p.d2_rule == D2Rule::printed ? -a * s2 * restoring : -s2 * restoring;
    return cond <= tol;
}

inline StateVector<5> flow_map_aug(const AugmentedState& x, const AdaptationParams& p) {
    const double restoring = p.dynamics == Dynamics::linear ? x.q1 : std::sin(x.q1);
    return {x.q2, -restoring - p.alpha * x.q2, 0.0, 0.0, 0.0};
}

/// Torque spike: (q1, q2 + I z, z, sigma2, I) for z in SGN(q2).
inline std::vector<AugmentedState> jump_G1(const AugmentedState& x) {
    std::vector<AugmentedState> out;
    for (Sign z : sgn_set(x.q2)) out.push_back({x.q1, x.q2 + x.I * to_double(z), z, x.sigma2, x.I});
    return out;
}

/// Adaptation spike: (q1, q2, sigma1, -sigma2, I - eps w) for w in SGN(sigma1 q1 - q1*), before clamping.
inline std::vector<AugmentedState> jump_G2_unclamped(const AugmentedState& x, const AdaptationParams& p) {
    std::vector<AugmentedState> out;
    for (Sign w : sgn_set(to_double(x.sigma1) * x.q1 - p.q1_star))
        out.push_back({x.q1, x.q2, x.sigma1, flip(x.sigma2), x.I - p.epsilon * to_double(w)});
    return out;
}

/// Adaptation spike with I clamped at 0 from below.
inline std::vector<AugmentedState> jump_G2(const AugmentedState& x, const AdaptationParams& p) {
    auto out = jump_G2_unclamped(x, p);
    for (auto& y : out)
        if (y.I < 0.0) y.I = 0.0;
    return out;
}

namespace detail {

template <class T>
T pick_branch(const std::vector<T>& images, Sign zero_choice, Sign (*branch_sign)(const T&)) {
    if (images.size() == 1) return images.front();
    return branch_sign(images.front()) == zero_choice ? images.front() : images.back();
}

} // namespace detail

inline constexpr std::size_t channel_torque = 0;
inline constexpr std::size_t channel_adapt = 1;

/// The augmented closed loop as a HybridSystem over (q1, q2, sigma1, sigma2, I).
class AdaptiveSystem {
public:
    static constexpr std::size_t dimension = 5;
    static constexpr std::size_t guard_count = 2;
    static constexpr std::size_t channel_count = 2;

    explicit AdaptiveSystem(AdaptationParams p) : params_(p) { params_.validate(); }

    [[nodiscard]] const AdaptationParams& params() const { return params_; }

    [[nodiscard]] StateVector<5> flow(const StateVector<5>& x) const { return flow_map_aug(augmented_state(x), params_); }
    [[nodiscard]] std::array<double, 2> flow_guards(const StateVector<5>& x) const {
        return {x[2] * x[0], x[3] * x[1]};
    }
    [[nodiscard]] bool in_flow_set(const StateVector<5>& x, double tol) const {
        return in_flow_set_aug(augmented_state(x), tol);
    }
    [[nodiscard]] bool in_jump_set(const StateVector<5>& x, std::size_t k, double tol) const {
        const auto s = augmented_state(x);
        return k == channel_torque ? in_D1(s, tol) : in_D2(s, params_, tol);
    }
    [[nodiscard]] JumpOutcome<5> jump(const StateVector<5>& x, std::size_t k, Sign zero_choice) const {
        const auto s = augmented_state(x);
        JumpOutcome<5> out;
        if (k == channel_torque) {
            const auto images = jump_G1(s);
            out.post = to_vector(detail::pick_branch<AugmentedState>(
                images, zero_choice, [](const AugmentedState& y) { return y.sigma1; }));
            out.label = "torque";
            out.sgn_selection = images.size() > 1;
            return out;
        }
        const auto images = jump_G2_unclamped(s, params_);
        // sgn_set lists w = +1 first; zero_choice selects w.
        auto chosen = images.size() == 1 || zero_choice == Sign::plus ? images.front() : images.back();
        if (chosen.I < 0.0) {
            chosen.I = 0.0;
            out.notes.push_back("amplitude_collapse");
        }
        out.post = to_vector(chosen);
        out.label = "adapt";
        out.sgn_selection = images.size() > 1;
        return out;
    }
    [[nodiscard]] std::vector<StateVector<5>> jump_images(const StateVector<5>& x, std::size_t k) const {
        const auto s = augmented_state(x);
        std::vector<StateVector<5>> out;
        for (const auto& g : k == channel_torque ? jump_G1(s) : jump_G2(s, params_)) out.push_back(to_vector(g));
        return out;
    }
    [[nodiscard]] std::array<std::size_t, 2> channel_priority() const {
        if (params_.tie_break == TieBreak::torque_first) return {channel_torque, channel_adapt};
        return {channel_adapt, channel_torque};
    }
    [[nodiscard]] std::vector<std::string> component_names() const { return {"q1", "q2", "sigma1", "sigma2", "I"}; }

    void annotate(HybridArc<5>& arc) const {
        if (params_.dynamics != Dynamics::nonlinear) return;
        for (const auto& seg : arc.segments)
            for (const auto& s : seg.samples)
                if (std::abs(s.x[0]) > std::numbers::pi) {
                    arc.add_warning("angle_exceeds_pi");
                    return;
                }
    }

private:
    AdaptationParams params_;
};

inline HybridArc<5> simulate_adaptive(const AugmentedState& x0, const AdaptationParams& p, const SolverConfig& cfg) {
    if (!(x0.I >= 0.0)) throw ParamOutOfRange("initial pulse amplitude I must be >= 0");
    return run_hybrid(AdaptiveSystem(p), to_vector(x0), cfg);
}

struct AmplitudeEntry {
    double t = 0.0;
    double peak_amplitude = 0.0; ///< sigma1 q1 at the adaptation jump
    double I_after = 0.0;
    double I_before = 0.0;
};

/// One entry per adaptation jump.
inline std::vector<AmplitudeEntry> amplitude_trace(const HybridArc<5>& arc) {
    std::vector<AmplitudeEntry> out;
    for (const auto& jr : arc.jumps)
        if (jr.channel == static_cast<int>(channel_adapt))
            out.push_back({jr.t, jr.pre[2] * jr.pre[0], jr.post[4], jr.pre[4]});
    return out;
}

struct AdaptationDiagnostics {
    double t_from = 0.0;
    double delta = 0.0;
    std::size_t peaks_checked = 0;
    double max_band_error = 0.0;            ///< max |peak - q1*| over peaks after t_from
    bool within_band = false;
    std::size_t steady_steps = 0;
    double max_step_error = 0.0;            ///< max ||I_{k+1} - I_k| - eps| over unclamped steps after t_from
    bool steady_state_steps_exact = false;
    bool oscillating = false;               ///< I moves both up and down after t_from
    bool converged = false;
    std::size_t clamp_events = 0;
    std::vector<std::string> invariant_violations;
    std::size_t interleave_violations = 0;  ///< torque pairs without exactly one adapt jump between them
};

/**
 * Practical-convergence diagnostics of an adaptive run.
 *
 * converged requires at least one peak after t_from, every such peak inside
 * [q1* - delta, q1* + delta] and every unclamped I step equal to epsilon.
 */
inline AdaptationDiagnostics diagnose_adaptation(const HybridArc<5>& arc, const AdaptationParams& p, double t_from,
                                                 double delta, double step_tol = 1e-12) {
    AdaptationDiagnostics d;
    d.t_from = t_from;
    d.delta = delta;
    const auto trace = amplitude_trace(arc);
    bool up = false, down = false;
    for (const auto& e : trace) {
        const bool clamped = e.I_after == 0.0 && e.I_before - p.epsilon < 0.0;
        if (clamped) ++d.clamp_events;
        if (e.t < t_from) continue;
        ++d.peaks_checked;
        d.max_band_error = std::max(d.max_band_error, std::abs(e.peak_amplitude - p.q1_star));
        if (clamped) continue;
        ++d.steady_steps;
        const double step = e.I_after - e.I_before;
        d.max_step_error = std::max(d.max_step_error, std::abs(std::abs(step) - p.epsilon));
        up = up || step > 0.0;
        down = down || step < 0.0;
    }
    d.within_band = d.peaks_checked > 0 && d.max_band_error <= delta;
    d.steady_state_steps_exact = d.steady_steps > 0 && d.max_step_error <= step_tol;
    d.oscillating = up && down;
    d.converged = d.within_band && d.steady_state_steps_exact;

    Sign last_sigma2{};
    bool have_sigma2 = false;
    int adapts_since_torque = -1;
    for (std::size_t k = 0; k < arc.jumps.size(); ++k) {
        const auto& jr = arc.jumps[k];
        const std::string where = "jump " + std::to_string(k);
        if (jr.channel == static_cast<int>(channel_torque)) {
            if (jr.pre[3] != jr.post[3] || jr.pre[4] != jr.post[4])
                d.invariant_violations.push_back(where + ": torque jump changed sigma2 or I");
            if (jr.pre[1] != 0.0 && jr.post[2] == jr.pre[2])
                d.invariant_violations.push_back(where + ": sigma1 did not alternate");
            if (adapts_since_torque >= 0 && adapts_since_torque != 1) ++d.interleave_violations;
            adapts_since_torque = 0;
        } else {
            if (jr.pre[0] != jr.post[0] || jr.pre[1] != jr.post[1] || jr.pre[2] != jr.post[2])
                d.invariant_violations.push_back(where + ": adapt jump changed q1, q2 or sigma1");
            const Sign s2 = sign_from_double(jr.post[3]);
            if (have_sigma2 && s2 == last_sigma2) d.invariant_violations.push_back(where + ": sigma2 did not alternate");
            last_sigma2 = s2;
            have_sigma2 = true;
            const double step = jr.post[4] - jr.pre[4];
            const bool clamped = jr.post[4] == 0.0 && jr.pre[4] - p.epsilon < 0.0;
            if (!clamped && std::abs(std::abs(step) - p.epsilon) > step_tol)
                d.invariant_violations.push_back(where + ": I step differs from epsilon");
            if (adapts_since_torque >= 0) ++adapts_since_torque;
        }
    }
    return d;
}

} // namespace spikehybrid

#endif // SPIKEHYBRID_ADAPTATION_HPP
