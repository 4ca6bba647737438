#ifndef SPIKEHYBRID_HYBRID_ARC_HPP
#define SPIKEHYBRID_HYBRID_ARC_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "integrators.hpp"

namespace spikehybrid {

/// A hybrid time instant: continuous time t and jump counter j.
struct HybridTime {
    double t = 0.0;
    int j = 0;

    friend bool operator==(const HybridTime&, const HybridTime&) = default;
};

inline HybridTime make_hybrid_time(double t, int j) {
    if (!(t >= 0.0) || j < 0) throw TimeOutsideDomain("hybrid time must satisfy t >= 0 and j >= 0");
    return {t, j};
}

/// One interval [t_begin, t_end] x {j} of a hybrid time domain.
struct DomainInterval {
    double t_begin = 0.0;
    double t_end = 0.0;
    int j = 0;
};

struct HybridTimeDomain {
    std::vector<DomainInterval> intervals;

    [[nodiscard]] bool contains(HybridTime at, double slack = 0.0) const {
        if (at.j < 0 || static_cast<std::size_t>(at.j) >= intervals.size()) return false;
        const auto& iv = intervals[static_cast<std::size_t>(at.j)];
        return at.t >= iv.t_begin - slack && at.t <= iv.t_end + slack;
    }
};

template <std::size_t N>
struct Sample {
    double t = 0.0;
    StateVector<N> x{};
    StateVector<N> dx{}; ///< flow-map value at x, used for Hermite interpolation
};

template <std::size_t N>
struct FlowSegment {
    int j = 0;
    std::vector<Sample<N>> samples;

    [[nodiscard]] double t_start() const { return samples.front().t; }
    [[nodiscard]] double t_end() const { return samples.back().t; }
};

template <std::size_t N>
struct JumpRecord {
    double t = 0.0;
    int j_before = 0;
    StateVector<N> pre{};
    StateVector<N> post{};
    int channel = 0;      ///< index of the jump set that fired
    std::string label;    ///< human-readable name of the jump map
    bool sgn_selection = false; ///< a set-valued branch was resolved by the configured choice
};

enum class Interpolation { hermite_cubic, linear };
enum class Termination { time_horizon, jump_horizon, left_flow_set };

inline const char* to_string(Interpolation s) {
    return s == Interpolation::hermite_cubic ? "hermite_cubic" : "linear";
}

inline const char* to_string(Termination t) {
    switch (t) {
    case Termination::time_horizon: return "time_horizon";
    case Termination::jump_horizon: return "jump_horizon";
    case Termination::left_flow_set: return "left_flow_set";
    }
    return "unknown";
}

struct ArcMetadata {
    std::vector<std::string> components;
    Interpolation interpolation = Interpolation::hermite_cubic;
    Termination termination = Termination::time_horizon;
    std::vector<std::string> warnings;
};

/// A hybrid arc: flow segments indexed by j, separated by instantaneous jumps.
template <std::size_t N>
struct HybridArc {
    static constexpr std::size_t dimension = N;

    ArcMetadata meta;
    std::vector<FlowSegment<N>> segments;
    std::vector<JumpRecord<N>> jumps;

    [[nodiscard]] HybridTimeDomain domain() const {
        HybridTimeDomain d;
        d.intervals.reserve(segments.size());
        for (const auto& s : segments) d.intervals.push_back({s.t_start(), s.t_end(), s.j});
        return d;
    }

    [[nodiscard]] const StateVector<N>& initial_state() const { return segments.front().samples.front().x; }
    [[nodiscard]] const StateVector<N>& final_state() const { return segments.back().samples.back().x; }
    [[nodiscard]] HybridTime final_time() const {
        return {segments.back().t_end(), segments.back().j};
    }
    [[nodiscard]] std::size_t jump_count() const { return jumps.size(); }

    void add_warning(const std::string& w) {
        if (std::find(meta.warnings.begin(), meta.warnings.end(), w) == meta.warnings.end())
            meta.warnings.push_back(w);
    }
};

namespace detail {

template <std::size_t N>
StateVector<N> interpolate(const Sample<N>& a, const Sample<N>& b, double t, Interpolation scheme) {
    const double h = b.t - a.t;
    const double s = (t - a.t) / h;
    StateVector<N> out{};
    if (scheme == Interpolation::linear) {
        for (std::size_t i = 0; i < N; ++i) out[i] = a.x[i] + s * (b.x[i] - a.x[i]);
        return out;
    }
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = h00 * a.x[i] + h10 * h * a.dx[i] + h01 * b.x[i] + h11 * h * b.dx[i];
    return out;
}

inline double time_slack(double t) { return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)); }

} // namespace detail

/**
 * Evaluates the arc at hybrid time (t, j).
 *
 * Node times return the stored sample exactly. Between nodes the scheme in
 * the arc metadata (Hermite cubic using stored derivatives, or linear) is
 * used. Times within a few ulps outside the segment are clamped to it.
 */
template <std::size_t N>
StateVector<N> arc_eval(const HybridArc<N>& arc, HybridTime at) {
    if (at.j < 0 || static_cast<std::size_t>(at.j) >= arc.segments.size())
        throw TimeOutsideDomain("jump index " + std::to_string(at.j) + " outside arc domain");
    const auto& seg = arc.segments[static_cast<std::size_t>(at.j)];
    const double slack = detail::time_slack(at.t);
    if (at.t < seg.t_start() - slack || at.t > seg.t_end() + slack)
        throw TimeOutsideDomain("time " + std::to_string(at.t) + " outside segment j=" + std::to_string(at.j));
    const auto& smp = seg.samples;
    if (at.t <= smp.front().t) return smp.front().x;
    if (at.t >= smp.back().t) return smp.back().x;
    auto it = std::lower_bound(smp.begin(), smp.end(), at.t,
                               [](const Sample<N>& s, double t) { return s.t < t; });
    if (it->t == at.t) return it->x;
    return detail::interpolate(*(it - 1), *it, at.t, arc.meta.interpolation);
}

/// Index of the segment that owns continuous time t; the later segment wins at jump instants.
template <std::size_t N>
int segment_at_time(const HybridArc<N>& arc, double t) {
    for (std::size_t k = arc.segments.size(); k-- > 0;)
        if (arc.segments[k].t_start() <= t) return static_cast<int>(k);
    return 0;
}

struct ValidationReport {
    std::vector<std::string> issues;
    [[nodiscard]] bool ok() const { return issues.empty(); }
};

namespace detail {

template <std::size_t N>
double max_abs_diff(const StateVector<N>& a, const StateVector<N>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < N; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace detail

/**
 * Checks the structural invariants of a hybrid arc against a system.
 *
 * The system must provide in_flow_set(x, tol), in_jump_set(x, channel, tol)
 * and jump_images(x, channel). An empty report means the arc is well formed.
 */
template <class System, std::size_t N>
ValidationReport domain_check(const HybridArc<N>& arc, const System& sys, double tol) {
    ValidationReport rep;
    auto flag = [&rep](std::string msg) { rep.issues.push_back(std::move(msg)); };
    if (arc.segments.empty()) {
        flag("arc has no flow segments");
        return rep;
    }
    if (arc.jumps.size() + 1 != arc.segments.size())
        flag("jump count " + std::to_string(arc.jumps.size()) + " does not match segment count " +
             std::to_string(arc.segments.size()));
    if (!arc.segments.front().samples.empty() && arc.segments.front().t_start() != 0.0)
        flag("domain does not start at t = 0");

    for (std::size_t k = 0; k < arc.segments.size(); ++k) {
        const auto& seg = arc.segments[k];
        const std::string where = "segment " + std::to_string(k);
        if (seg.j != static_cast<int>(k)) flag(where + ": jump index " + std::to_string(seg.j) + " != " + std::to_string(k));
        if (seg.samples.empty()) {
            flag(where + ": empty");
            continue;
        }
        for (std::size_t i = 1; i < seg.samples.size(); ++i)
            if (!(seg.samples[i].t > seg.samples[i - 1].t)) {
                flag(where + ": sample times not strictly increasing (domain monotonicity)");
                break;
            }
        for (const auto& s : seg.samples)
            if (!sys.in_flow_set(s.x, tol)) {
                flag(where + ": sample at t=" + std::to_string(s.t) + " outside flow set");
                break;
            }
        if (k > 0 && seg.t_start() < arc.segments[k - 1].t_end())
            flag(where + ": starts before the previous segment ends (domain monotonicity)");
    }

    for (std::size_t k = 0; k < arc.jumps.size() && k + 1 < arc.segments.size(); ++k) {
        const auto& jr = arc.jumps[k];
        const auto& before = arc.segments[k];
        const auto& after = arc.segments[k + 1];
        const std::string where = "jump " + std::to_string(k);
        if (before.samples.empty() || after.samples.empty()) continue;
        if (jr.j_before != static_cast<int>(k)) flag(where + ": wrong jump index");
        if (jr.t != before.t_end() || jr.t != after.t_start())
            flag(where + ": jump time does not match adjacent segment boundaries");
        if (detail::max_abs_diff(jr.pre, before.samples.back().x) != 0.0)
            flag(where + ": pre-state differs from terminal state of segment " + std::to_string(k));
        if (detail::max_abs_diff(jr.post, after.samples.front().x) != 0.0)
            flag(where + ": post-state differs from initial state of segment " + std::to_string(k + 1));
        if (!sys.in_jump_set(jr.pre, static_cast<std::size_t>(jr.channel), tol)) {
            flag(where + ": pre-state not in jump set");
            continue;
        }
        const auto images = sys.jump_images(jr.pre, static_cast<std::size_t>(jr.channel));
        const bool matched = std::any_of(images.begin(), images.end(), [&](const StateVector<N>& g) {
            return detail::max_abs_diff(g, jr.post) <= tol;
        });
        if (!matched) flag(where + ": post-state not in the image of the jump map");
    }
    return rep;
}

} // namespace spikehybrid

#endif // SPIKEHYBRID_HYBRID_ARC_HPP
