#ifndef SPIKEHYBRID_PENDULUM_MODEL_HPP
#define SPIKEHYBRID_PENDULUM_MODEL_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "sign.hpp"
#include "solver.hpp"

namespace spikehybrid {

enum class Dynamics { linear, nonlinear };

inline const char* to_string(Dynamics d) { return d == Dynamics::linear ? "linear" : "nonlinear"; }

inline Dynamics parse_dynamics(std::string_view s) {
    if (s == "linear") return Dynamics::linear;
    if (s == "nonlinear") return Dynamics::nonlinear;
    throw ConfigError("dynamics must be \"linear\" or \"nonlinear\", got \"" + std::string(s) + "\"");
}

/// Damping alpha in (0, 2), pulse amplitude I > 0 and the flow dynamics.
struct SystemParams {
    double alpha = 0.5;
    double I = 0.1;
    Dynamics dynamics = Dynamics::linear;

    void validate() const {
        if (!(alpha > 0.0 && alpha < 2.0))
            throw ParamOutOfRange("alpha must lie in the open interval (0, 2), got " + std::to_string(alpha));
        if (!(I > 0.0)) throw ParamOutOfRange("pulse amplitude I must be > 0, got " + std::to_string(I));
    }
};

/// (q1, q2, sigma): angle, angular velocity and the sign tracker of q1.
struct PendulumState {
    double q1 = 0.0;
    double q2 = 0.0;
    Sign sigma = Sign::plus;

    friend bool operator==(const PendulumState&, const PendulumState&) = default;
};

inline StateVector<3> to_vector(const PendulumState& x) { return {x.q1, x.q2, to_double(x.sigma)}; }
inline PendulumState pendulum_state(const StateVector<3>& v) { return {v[0], v[1], sign_from_double(v[2])}; }

inline double sigma_q1(const PendulumState& x) { return to_double(x.sigma) * x.q1; }
inline double sigma_q2(const PendulumState& x) { return to_double(x.sigma) * x.q2; }

inline StateVector<3> flow_map(const PendulumState& x, const SystemParams& p) {
    const double restoring = p.dynamics == Dynamics::linear ? x.q1 : std::sin(x.q1);
    return {x.q2, -restoring - p.alpha * x.q2, 0.0};
}

/// Flow set: sigma * q1 >= -tol.
inline bool in_flow_set(const PendulumState& x, double tol = 0.0) { return sigma_q1(x) >= -tol; }

/// Jump set: |sigma * q1| <= tol and sigma * q2 <= tol.
inline bool in_jump_set(const PendulumState& x, double tol = 0.0) {
    return std::abs(sigma_q1(x)) <= tol && sigma_q2(x) <= tol;
}

/// Torque spike: every (0, q2 + I z, z) with z in SGN(q2). Two elements when q2 == 0.
inline std::vector<PendulumState> jump_map(const PendulumState& x, const SystemParams& p) {
    std::vector<PendulumState> out;
    for (Sign z : sgn_set(x.q2)) out.push_back({0.0, x.q2 + p.I * to_double(z), z});
    return out;
}

/// Resolves the set-valued jump map with the configured choice at q2 == 0.
inline PendulumState select_jump(const PendulumState& x, const SystemParams& p, Sign zero_choice) {
    const auto images = jump_map(x, p);
    if (images.size() == 1) return images.front();
    return images.front().sigma == zero_choice ? images.front() : images.back();
}

/// Membership in C u D minus the rest set {q1 = q2 = 0}.
inline bool in_X0(const PendulumState& x, double tol = 0.0) {
    if (x.q1 == 0.0 && x.q2 == 0.0) return false;
    return in_flow_set(x, tol) || in_jump_set(x, tol);
}

/**
 * Returns x with sigma replaced by sign(q1) when x lies outside C u D.
 *
 * sigma is an auxiliary variable whose consistent value is fixed by q1; states
 * typed with the opposite sign (sigma * q1 < 0) have no solution otherwise.
 * Returns nullopt when x is already admissible.
 */
inline std::optional<PendulumState> reseed_sigma(const PendulumState& x, double tol) {
    if (in_flow_set(x, tol) || in_jump_set(x, tol)) return std::nullopt;
    return PendulumState{x.q1, x.q2, x.q1 > 0.0 ? Sign::plus : Sign::minus};
}

/// The closed loop as a HybridSystem over (q1, q2, sigma).
class PendulumSystem {
public:
    static constexpr std::size_t dimension = 3;
    static constexpr std::size_t guard_count = 1;
    static constexpr std::size_t channel_count = 1;

    explicit PendulumSystem(SystemParams p) : params_(p) { params_.validate(); }

    [[nodiscard]] const SystemParams& params() const { return params_; }

    [[nodiscard]] StateVector<3> flow(const StateVector<3>& x) const { return flow_map(pendulum_state(x), params_); }
    [[nodiscard]] std::array<double, 1> flow_guards(const StateVector<3>& x) const { return {x[2] * x[0]}; }
    [[nodiscard]] bool in_flow_set(const StateVector<3>& x, double tol) const {
        return spikehybrid::in_flow_set(pendulum_state(x), tol);
    }
    [[nodiscard]] bool in_jump_set(const StateVector<3>& x, std::size_t, double tol) const {
        return spikehybrid::in_jump_set(pendulum_state(x), tol);
    }
    [[nodiscard]] JumpOutcome<3> jump(const StateVector<3>& x, std::size_t, Sign zero_choice) const {
        const auto s = pendulum_state(x);
        JumpOutcome<3> out;
        out.post = to_vector(select_jump(s, params_, zero_choice));
        out.label = "torque";
        out.sgn_selection = s.q2 == 0.0;
        return out;
    }
    [[nodiscard]] std::vector<StateVector<3>> jump_images(const StateVector<3>& x, std::size_t) const {
        std::vector<StateVector<3>> out;
        for (const auto& g : jump_map(pendulum_state(x), params_)) out.push_back(to_vector(g));
        return out;
    }
    [[nodiscard]] std::array<std::size_t, 1> channel_priority() const { return {0}; }
    [[nodiscard]] std::vector<std::string> component_names() const { return {"q1", "q2", "sigma"}; }

    void annotate(HybridArc<3>& arc) const {
        if (params_.dynamics != Dynamics::nonlinear) return;
        for (const auto& seg : arc.segments)
            for (const auto& s : seg.samples)
                if (std::abs(s.x[0]) > std::numbers::pi) {
                    arc.add_warning("angle_exceeds_pi");
                    return;
                }
    }

private:
    SystemParams params_;
};

/// Simulates the closed loop from x0.
inline HybridArc<3> simulate(const SystemParams& p, const PendulumState& x0, const SolverConfig& cfg) {
    return run_hybrid(PendulumSystem(p), to_vector(x0), cfg);
}

} // namespace spikehybrid

#endif // SPIKEHYBRID_PENDULUM_MODEL_HPP
