#ifndef SPIKEHYBRID_SERIALIZATION_HPP
#define SPIKEHYBRID_SERIALIZATION_HPP

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "adaptation.hpp"
#include "closed_form.hpp"
#include "errors.hpp"
#include "hybrid_arc.hpp"
#include "limit_cycle.hpp"

namespace spikehybrid {

using json = nlohmann::json;

enum class EventFlag : int { flow = 0, pre_jump = 1, post_jump = 2 };

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
        throw ConfigError("malformed number \"" + s + "\"");
    return v;
}

inline int parse_int(const std::string& s) {
    const double v = parse_double(s);
    if (v != static_cast<double>(static_cast<int>(v))) throw ConfigError("expected an integer, got \"" + s + "\"");
    return static_cast<int>(v);
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

inline int jump_kind_code(const std::string& label) {
    if (label == "torque") return 1;
    if (label == "adapt") return 2;
    return 0;
}

inline std::string jump_kind_label(int code) {
    if (code == 1) return "torque";
    if (code == 2) return "adapt";
    throw ConfigError("unknown jump_kind " + std::to_string(code));
}

} // namespace detail

/**
 * Flat CSV: t, j, <components...>, event_flag[, jump_kind].
 *
 * The first sample of every segment after a jump is flagged 2 and the last
 * sample before a jump is flagged 1; a single-sample segment squeezed between
 * two jumps appears as two rows. jump_kind (0 none, 1 torque, 2 adapt) names
 * the jump adjacent to flagged rows.
 */
template <std::size_t N>
std::string arc_to_csv(const HybridArc<N>& arc, bool with_jump_kind) {
    std::string out = "t,j";
    for (const auto& c : arc.meta.components) out += "," + c;
    out += ",event_flag";
    if (with_jump_kind) out += ",jump_kind";
    out += "\n";
    auto row = [&](const Sample<N>& s, int j, EventFlag flag, int kind) {
        out += detail::format_double(s.t) + "," + std::to_string(j);
        for (std::size_t i = 0; i < N; ++i) out += "," + detail::format_double(s.x[i]);
        out += "," + std::to_string(static_cast<int>(flag));
        if (with_jump_kind) out += "," + std::to_string(kind);
        out += "\n";
    };
    for (std::size_t k = 0; k < arc.segments.size(); ++k) {
        const auto& seg = arc.segments[k];
        const bool after_jump = k > 0;
        const bool before_jump = k < arc.jumps.size();
        const int kind_in = after_jump ? detail::jump_kind_code(arc.jumps[k - 1].label) : 0;
        const int kind_out = before_jump ? detail::jump_kind_code(arc.jumps[k].label) : 0;
        const std::size_t n = seg.samples.size();
        for (std::size_t i = 0; i < n; ++i) {
            const bool first = i == 0, last = i + 1 == n;
            if (first && after_jump) row(seg.samples[i], seg.j, EventFlag::post_jump, kind_in);
            if (last && before_jump) row(seg.samples[i], seg.j, EventFlag::pre_jump, kind_out);
            if (!(first && after_jump) && !(last && before_jump)) row(seg.samples[i], seg.j, EventFlag::flow, 0);
        }
    }
    return out;
}

/// Reads a CSV trace; the result uses linear interpolation (no derivatives are stored).
template <std::size_t N>
HybridArc<N> arc_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("empty CSV trace");
    const auto header = detail::split(line, ',');
    const bool with_kind = !header.empty() && header.back() == "jump_kind";
    const std::size_t expected = 2 + N + 1 + (with_kind ? 1 : 0);
    if (header.size() != expected || header[0] != "t" || header[1] != "j" || header[2 + N] != "event_flag")
        throw ConfigError("CSV header does not match a " + std::to_string(N) + "-component trace");

    HybridArc<N> arc;
    arc.meta.components.assign(header.begin() + 2, header.begin() + 2 + static_cast<std::ptrdiff_t>(N));
    arc.meta.interpolation = Interpolation::linear;
    bool pending_pre = false;
    StateVector<N> pre{};
    double pre_t = 0.0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = detail::split(line, ',');
        if (f.size() != expected) throw ConfigError("CSV row has " + std::to_string(f.size()) + " fields");
        Sample<N> s;
        s.t = detail::parse_double(f[0]);
        const int j = detail::parse_int(f[1]);
        for (std::size_t i = 0; i < N; ++i) s.x[i] = detail::parse_double(f[2 + i]);
        const int flag = detail::parse_int(f[2 + N]);
        const int kind = with_kind ? detail::parse_int(f[3 + N]) : 1;
        if (flag < 0 || flag > 2) throw ConfigError("event_flag must be 0, 1 or 2");

        if (flag == static_cast<int>(EventFlag::post_jump)) {
            if (!pending_pre) throw ConfigError("post-jump row without a preceding pre-jump row");
            arc.jumps.push_back({pre_t, j - 1, pre, s.x, kind == 2 ? 1 : 0, detail::jump_kind_label(kind), false});
            pending_pre = false;
        } else if (pending_pre) {
            throw ConfigError("pre-jump row not followed by a post-jump row");
        }
        if (arc.segments.empty() || arc.segments.back().j != j) {
            if (j != static_cast<int>(arc.segments.size())) throw ConfigError("CSV jump index out of order");
            arc.segments.push_back({j, {}});
        }
        auto& smp = arc.segments.back().samples;
        const bool repeat = !smp.empty() && smp.back().t == s.t && smp.back().x == s.x;
        if (!repeat) smp.push_back(s);
        if (flag == static_cast<int>(EventFlag::pre_jump)) {
            pending_pre = true;
            pre = s.x;
            pre_t = s.t;
        }
    }
    if (pending_pre) throw ConfigError("trace ends on a pre-jump row");
    if (arc.segments.empty()) throw ConfigError("CSV trace has no samples");
    return arc;
}

inline Termination parse_termination(const std::string& s) {
    if (s == "time_horizon") return Termination::time_horizon;
    if (s == "jump_horizon") return Termination::jump_horizon;
    if (s == "left_flow_set") return Termination::left_flow_set;
    throw ConfigError("unknown termination \"" + s + "\"");
}

inline Interpolation parse_interpolation(const std::string& s) {
    if (s == "hermite_cubic") return Interpolation::hermite_cubic;
    if (s == "linear") return Interpolation::linear;
    throw ConfigError("unknown interpolation \"" + s + "\"");
}

/// Nested JSON: metadata, domain intervals, segments (each sample is [t, x..., dx...]) and jumps.
template <std::size_t N>
json arc_to_json(const HybridArc<N>& arc) {
    json j;
    j["components"] = arc.meta.components;
    j["interpolation"] = to_string(arc.meta.interpolation);
    j["termination"] = to_string(arc.meta.termination);
    j["warnings"] = arc.meta.warnings;
    json dom = json::array();
    for (const auto& iv : arc.domain().intervals) dom.push_back({{"j", iv.j}, {"t_begin", iv.t_begin}, {"t_end", iv.t_end}});
    j["domain"] = dom;
    json segs = json::array();
    for (const auto& seg : arc.segments) {
        json samples = json::array();
        for (const auto& s : seg.samples) {
            json row = json::array();
            row.push_back(s.t);
            for (double v : s.x) row.push_back(v);
            for (double v : s.dx) row.push_back(v);
            samples.push_back(std::move(row));
        }
        segs.push_back({{"j", seg.j}, {"samples", std::move(samples)}});
    }
    j["segments"] = std::move(segs);
    json jumps = json::array();
    for (const auto& jr : arc.jumps)
        jumps.push_back({{"t", jr.t},
                         {"j_before", jr.j_before},
                         {"pre", jr.pre},
                         {"post", jr.post},
                         {"channel", jr.channel},
                         {"label", jr.label},
                         {"sgn_selection", jr.sgn_selection}});
    j["jumps"] = std::move(jumps);
    return j;
}

template <std::size_t N>
HybridArc<N> arc_from_json(const json& j) {
    try {
        HybridArc<N> arc;
        arc.meta.components = j.at("components").get<std::vector<std::string>>();
        if (arc.meta.components.size() != N) throw ConfigError("component count does not match");
        arc.meta.interpolation = parse_interpolation(j.at("interpolation").get<std::string>());
        arc.meta.termination = parse_termination(j.at("termination").get<std::string>());
        arc.meta.warnings = j.at("warnings").get<std::vector<std::string>>();
        for (const auto& sj : j.at("segments")) {
            FlowSegment<N> seg{sj.at("j").get<int>(), {}};
            for (const auto& row : sj.at("samples")) {
                if (row.size() != 1 + 2 * N) throw ConfigError("sample row has the wrong length");
                Sample<N> s;
                s.t = row[0].get<double>();
                for (std::size_t i = 0; i < N; ++i) {
                    s.x[i] = row[1 + i].get<double>();
                    s.dx[i] = row[1 + N + i].get<double>();
                }
                seg.samples.push_back(s);
            }
            if (seg.samples.empty()) throw ConfigError("segment without samples");
            arc.segments.push_back(std::move(seg));
        }
        for (const auto& jj : j.at("jumps"))
            arc.jumps.push_back({jj.at("t").get<double>(), jj.at("j_before").get<int>(),
                                 jj.at("pre").get<StateVector<N>>(), jj.at("post").get<StateVector<N>>(),
                                 jj.at("channel").get<int>(), jj.at("label").get<std::string>(),
                                 jj.at("sgn_selection").get<bool>()});
        if (arc.segments.empty()) throw ConfigError("arc has no segments");
        return arc;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed arc JSON: ") + e.what());
    }
}

inline std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

inline json to_json(const ModeConstants& mc) {
    return {{"alpha", mc.alpha},
            {"a", mc.a},
            {"b", mc.b},
            {"inter_jump_time", mc.inter_jump_time},
            {"contraction", mc.contraction}};
}

/// Summary of a cycle descriptor; orbit samples are included only on request.
inline json to_json(const LimitCycleDescriptor& c, bool with_samples = false) {
    json j{{"alpha", c.params.alpha},
           {"I", c.params.I},
           {"mu_star", c.mu_star},
           {"period_T", c.period_T},
           {"period_N", c.period_N},
           {"max_amplitude", c.max_amplitude},
           {"constants", to_json(c.constants)},
           {"resolution", c.resolution}};
    if (with_samples) {
        json s = json::array();
        for (const auto& o : c.orbit_samples) s.push_back({o.phase, o.q1, o.q2, to_int(o.sigma)});
        j["orbit_samples"] = std::move(s);
    }
    return j;
}

inline json to_json(const PeriodicityReport& r) {
    return {{"max_deviation", r.max_deviation},
            {"samples_checked", r.samples_checked},
            {"tolerance", r.tolerance},
            {"passed", r.passed}};
}

inline json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const StabilityReport& r) {
    return {{"decay_rate_estimate", r.decay_rate_estimate},
            {"fit_residual", r.fit_residual},
            {"per_jump_contraction_observed", nullable(r.per_jump_contraction_observed)},
            {"samples_used", r.samples_used},
            {"contraction_ratios_used", r.contraction_ratios_used}};
}

inline json to_json(const ForwardInvarianceReport& r) {
    json arcs = json::array();
    for (const auto& e : r.arcs)
        arcs.push_back({{"passed", e.passed}, {"initial_in_ball", e.initial_in_ball}, {"min_radius", nullable(e.min_radius)}});
    return {{"radius", r.radius}, {"passed", r.passed()}, {"arcs", std::move(arcs)}};
}

inline json to_json(const AdaptationDiagnostics& d) {
    return {{"t_from", d.t_from},
            {"delta", d.delta},
            {"peaks_checked", d.peaks_checked},
            {"max_band_error", d.max_band_error},
            {"within_band", d.within_band},
            {"steady_steps", d.steady_steps},
            {"max_step_error", d.max_step_error},
            {"steady_state_steps_exact", d.steady_state_steps_exact},
            {"oscillating", d.oscillating},
            {"converged", d.converged},
            {"clamp_events", d.clamp_events},
            {"invariant_violations", d.invariant_violations},
            {"interleave_violations", d.interleave_violations}};
}

inline std::string amplitude_trace_csv(const std::vector<AmplitudeEntry>& trace) {
    std::string out = "t,peak_amplitude,I_before,I_after\n";
    for (const auto& e : trace)
        out += detail::format_double(e.t) + "," + detail::format_double(e.peak_amplitude) + "," +
               detail::format_double(e.I_before) + "," + detail::format_double(e.I_after) + "\n";
    return out;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open \"" + path + "\"");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write \"" + path + "\"");
    out << content;
    if (!out) throw ConfigError("write to \"" + path + "\" failed");
}

} // namespace spikehybrid

#endif // SPIKEHYBRID_SERIALIZATION_HPP
