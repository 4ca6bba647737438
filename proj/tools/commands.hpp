#ifndef SPIKEHYBRID_TOOLS_COMMANDS_HPP
#define SPIKEHYBRID_TOOLS_COMMANDS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <future>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <spikehybrid/adaptation.hpp>
#include <spikehybrid/closed_form.hpp>
#include <spikehybrid/limit_cycle.hpp>
#include <spikehybrid/pendulum_model.hpp>
#include <spikehybrid/serialization.hpp>
#include <spikehybrid/svg.hpp>
#include <spikehybrid/verification.hpp>

#ifndef SPIKEHYBRID_VERSION
#define SPIKEHYBRID_VERSION "unknown"
#endif

namespace spikehybrid::cli {

enum ExitCode : int { exit_ok = 0, exit_verification_failed = 1, exit_config = 2, exit_solver = 3 };

/// Fully resolved parameters of one invocation.
struct RunConfig {
    std::string command;
    SystemParams system;
    std::vector<double> x0;
    SolverConfig solver;
    bool strict_x0 = false;

    double epsilon = 0.02;
    double q1_star = std::numbers::pi / 6.0;
    D2Rule d2_rule = D2Rule::exit_direction;
    TieBreak tie_break = TieBreak::torque_first;
    double delta = 0.05;
    double t_from = 60.0;

    std::vector<double> alphas;
    std::vector<double> Is;
    int jobs = 0;

    int resolution = 256;

    std::string out = "out";
    std::string format = "csv";
    bool svg = false;
    std::uint64_t seed = 7;
};

inline std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    if (text.find_first_not_of(" \t") == std::string::npos) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw ConfigError(what + ": empty list element");
        try {
            out.push_back(spikehybrid::detail::parse_double(item.substr(b, e - b + 1)));
        } catch (const ConfigError&) {
            throw ConfigError(what + ": \"" + item + "\" is not a decimal number");
        }
    }
    return out;
}

inline Sign parse_sign(double v, const std::string& what) {
    if (!is_exact_sign(v)) throw ConfigError(what + " must be exactly 1 or -1");
    return v > 0.0 ? Sign::plus : Sign::minus;
}

inline json command_defaults(const std::string& command) {
    json d{{"tmax", 30.0}};
    if (command == "simulate") d["x0"] = {std::numbers::pi / 4.0, -2.0, 1.0};
    if (command == "compare") d["x0"] = {0.0, 2.0, 1.0};
    if (command == "adapt") {
        d["tmax"] = 100.0;
        d["dynamics"] = "nonlinear";
        d["x0"] = {std::numbers::pi / 3.0, 2.0, 1.0, 1.0, 0.1};
    }
    if (command == "sweep") {
        d["alphas"] = {0.25, 0.5, 1.0};
        d["Is"] = {0.05, 0.1, 0.2};
    }
    return d;
}

inline const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys{
        "alpha",   "I",         "dynamics",  "x0",      "tmax",       "jmax",       "method",     "step",
        "max_step", "abs_tol",  "rel_tol",   "event_tol", "zero_tol", "sgn_zero_choice", "strict_x0", "epsilon",
        "q1_star", "d2_rule",   "tie_break", "delta",   "t_from",     "alphas",     "Is",         "jobs",
        "resolution", "out",       "format",  "svg",        "seed"};
    return keys;
}

/// Applies a flat JSON object of settings; unknown keys and mistyped values are configuration errors.
inline void apply_settings(RunConfig& rc, const json& j) {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    const auto& keys = known_keys();
    for (const auto& [key, value] : j.items())
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError("unknown configuration key \"" + key + "\"");
    auto num = [&](const char* k) {
        const auto& v = j.at(k);
        if (!v.is_number()) throw ConfigError(std::string(k) + " must be a number");
        return v.get<double>();
    };
    auto integer = [&](const char* k) {
        const auto& v = j.at(k);
        if (!v.is_number_integer()) throw ConfigError(std::string(k) + " must be an integer");
        return v.get<std::int64_t>();
    };
    auto str = [&](const char* k) {
        const auto& v = j.at(k);
        if (!v.is_string()) throw ConfigError(std::string(k) + " must be a string");
        return v.get<std::string>();
    };
    auto boolean = [&](const char* k) {
        const auto& v = j.at(k);
        if (!v.is_boolean()) throw ConfigError(std::string(k) + " must be true or false");
        return v.get<bool>();
    };
    auto list = [&](const char* k) {
        const auto& v = j.at(k);
        if (!v.is_array()) throw ConfigError(std::string(k) + " must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(std::string(k) + " must be an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    };
    if (j.contains("alpha")) rc.system.alpha = num("alpha");
    if (j.contains("I")) rc.system.I = num("I");
    if (j.contains("dynamics")) rc.system.dynamics = parse_dynamics(str("dynamics"));
    if (j.contains("x0")) rc.x0 = list("x0");
    if (j.contains("tmax")) rc.solver.t_max = num("tmax");
    if (j.contains("jmax")) rc.solver.j_max = static_cast<int>(integer("jmax"));
    if (j.contains("method")) {
        const auto m = str("method");
        if (m == "dopri5") rc.solver.method = IntegratorMethod::dopri5;
        else if (m == "rk4") rc.solver.method = IntegratorMethod::rk4;
        else throw ConfigError("method must be \"dopri5\" or \"rk4\", got \"" + m + "\"");
    }
    if (j.contains("step")) rc.solver.step = num("step");
    if (j.contains("max_step")) rc.solver.max_step = num("max_step");
    if (j.contains("abs_tol")) rc.solver.abs_tol = num("abs_tol");
    if (j.contains("rel_tol")) rc.solver.rel_tol = num("rel_tol");
    if (j.contains("event_tol")) rc.solver.event_tol = num("event_tol");
    if (j.contains("zero_tol")) rc.solver.zero_tol = num("zero_tol");
    if (j.contains("sgn_zero_choice")) rc.solver.sgn_zero_choice = parse_sign(num("sgn_zero_choice"), "sgn_zero_choice");
    if (j.contains("strict_x0")) rc.strict_x0 = boolean("strict_x0");
    if (j.contains("epsilon")) rc.epsilon = num("epsilon");
    if (j.contains("q1_star")) rc.q1_star = num("q1_star");
    if (j.contains("d2_rule")) rc.d2_rule = parse_d2_rule(str("d2_rule"));
    if (j.contains("tie_break")) rc.tie_break = parse_tie_break(str("tie_break"));
    if (j.contains("delta")) rc.delta = num("delta");
    if (j.contains("t_from")) rc.t_from = num("t_from");
    if (j.contains("alphas")) rc.alphas = list("alphas");
    if (j.contains("Is")) rc.Is = list("Is");
    if (j.contains("jobs")) rc.jobs = static_cast<int>(integer("jobs"));
    if (j.contains("resolution")) rc.resolution = static_cast<int>(integer("resolution"));
    if (j.contains("out")) rc.out = str("out");
    if (j.contains("format")) {
        rc.format = str("format");
        if (rc.format != "csv" && rc.format != "json" && rc.format != "both")
            throw ConfigError("format must be csv, json or both");
    }
    if (j.contains("svg")) rc.svg = boolean("svg");
    if (j.contains("seed")) {
        const auto s = integer("seed");
        if (s < 0) throw ConfigError("seed must be >= 0");
        rc.seed = static_cast<std::uint64_t>(s);
    }
}

/// Resolution order: command defaults, then the config file, then explicit flags.
inline RunConfig resolve(const std::string& command, const std::string& config_path, const json& flags) {
    RunConfig rc;
    rc.command = command;
    json merged = command_defaults(command);
    if (!config_path.empty()) {
        json file;
        try {
            file = json::parse(read_text_file(config_path));
        } catch (const json::exception& e) {
            throw ConfigError("config file \"" + config_path + "\": " + e.what());
        }
        if (!file.is_object()) throw ConfigError("config file must hold a JSON object");
        merged.update(file);
    }
    merged.update(flags);
    apply_settings(rc, merged);
    return rc;
}

inline json to_json(const RunConfig& rc) {
    return {{"command", rc.command},
            {"alpha", rc.system.alpha},
            {"I", rc.system.I},
            {"dynamics", to_string(rc.system.dynamics)},
            {"x0", rc.x0},
            {"solver", solver_to_json(rc.solver)},
            {"strict_x0", rc.strict_x0},
            {"epsilon", rc.epsilon},
            {"q1_star", rc.q1_star},
            {"d2_rule", to_string(rc.d2_rule)},
            {"tie_break", to_string(rc.tie_break)},
            {"delta", rc.delta},
            {"t_from", rc.t_from},
            {"alphas", rc.alphas},
            {"Is", rc.Is},
            {"jobs", rc.jobs},
            {"resolution", rc.resolution},
            {"out", rc.out},
            {"format", rc.format},
            {"svg", rc.svg},
            {"seed", rc.seed}};
}

/// Collects outputs and warnings and writes the manifest last.
class Run {
public:
    explicit Run(const RunConfig& rc) : rc_(rc) {
        std::error_code ec;
        std::filesystem::create_directories(rc.out, ec);
        if (ec) throw ConfigError("cannot create output directory \"" + rc.out + "\": " + ec.message());
    }

    void write(const std::string& name, const std::string& content) {
        write_text_file((std::filesystem::path(rc_.out) / name).string(), content);
        outputs_.push_back(name);
    }
    void warn(const std::string& w) {
        if (std::find(warnings_.begin(), warnings_.end(), w) == warnings_.end()) warnings_.push_back(w);
        std::cerr << "warning: " << w << "\n";
    }
    void result(const std::string& key, json value) { results_[key] = std::move(value); }
    [[nodiscard]] bool csv() const { return rc_.format == "csv" || rc_.format == "both"; }
    [[nodiscard]] bool json_out() const { return rc_.format == "json" || rc_.format == "both"; }

    void finish(int exit_code) {
        json m{{"tool", "spikehybrid"},
               {"version", SPIKEHYBRID_VERSION},
               {"config", to_json(rc_)},
               {"warnings", warnings_},
               {"outputs", outputs_},
               {"results", results_},
               {"exit_code", exit_code}};
        write_text_file((std::filesystem::path(rc_.out) / "manifest.json").string(), dump_json(m));
    }

private:
    const RunConfig& rc_;
    std::vector<std::string> outputs_;
    std::vector<std::string> warnings_;
    json results_ = json::object();
};

inline PendulumState pendulum_x0(const RunConfig& rc) {
    if (rc.x0.size() != 3) throw ConfigError("x0 must have three components q1,q2,sigma");
    return {rc.x0[0], rc.x0[1], parse_sign(rc.x0[2], "sigma in x0")};
}

inline AugmentedState augmented_x0(const RunConfig& rc) {
    if (rc.x0.size() != 5) throw ConfigError("x0 must have five components q1,q2,sigma1,sigma2,I");
    if (!(rc.x0[4] >= 0.0)) throw ConfigError("initial I must be >= 0");
    return {rc.x0[0], rc.x0[1], parse_sign(rc.x0[2], "sigma1 in x0"), parse_sign(rc.x0[3], "sigma2 in x0"), rc.x0[4]};
}

inline PendulumState admit(const RunConfig& rc, const PendulumState& x, Run& run, json* note_target) {
    if (rc.strict_x0) return x;
    std::vector<std::string> notes;
    const auto y = admissible_initial_state(x, rc.solver.zero_tol, &notes);
    for (const auto& n : notes) run.warn(n);
    if (note_target && !notes.empty()) (*note_target)["reseeded_x0"] = detail::state_json(y);
    return y;
}

template <std::size_t N>
svg::Series component_series(const HybridArc<N>& arc, std::size_t comp, std::string label, std::string color) {
    svg::Series s{std::move(label), std::move(color), 1.2, false, {}};
    for (const auto& seg : arc.segments) {
        std::vector<svg::Point> pts;
        for (const auto& smp : seg.samples) pts.push_back({smp.t, smp.x[comp]});
        s.pieces.push_back(svg::decimate(pts));
    }
    return s;
}

template <std::size_t N>
svg::Series phase_series(const HybridArc<N>& arc, std::string label, std::string color) {
    svg::Series s{std::move(label), std::move(color), 1.2, false, {}};
    for (const auto& seg : arc.segments) {
        std::vector<svg::Point> pts;
        for (const auto& smp : seg.samples) pts.push_back({smp.x[0], smp.x[1]});
        s.pieces.push_back(svg::decimate(pts));
    }
    return s;
}

inline svg::Series cycle_series(const LimitCycleDescriptor& c) {
    svg::Series s{"limit cycle (linear mode)", "#000000", 1.6, true, {}};
    std::vector<svg::Point> pts;
    for (const auto& o : c.orbit_samples) pts.push_back({o.q1, o.q2});
    s.pieces.push_back(pts);
    return s;
}

template <std::size_t N>
void write_trace(Run& run, const HybridArc<N>& arc, const std::string& stem, bool with_kind) {
    if (run.csv()) run.write(stem + ".csv", arc_to_csv(arc, with_kind));
    if (run.json_out()) run.write(stem + ".json", dump_json(arc_to_json(arc)));
}

inline int cmd_simulate(const RunConfig& rc) {
    rc.system.validate();
    Run run(rc);
    json info;
    const auto x0 = admit(rc, pendulum_x0(rc), run, &info);
    const auto arc = simulate(rc.system, x0, rc.solver);
    for (const auto& w : arc.meta.warnings) run.warn(w);
    write_trace(run, arc, "trace", false);
    info["x0_used"] = detail::state_json(x0);
    info["jumps"] = arc.jumps.size();
    info["termination"] = to_string(arc.meta.termination);
    info["final_time"] = {{"t", arc.final_time().t}, {"j", arc.final_time().j}};
    if (rc.system.dynamics == Dynamics::linear && in_X0(x0) && arc.final_time().t > 0.0) {
        const auto cyc = compute_cycle(rc.system);
        info["final_distance_to_cycle"] = distance_to_cycle(pendulum_state(arc.final_state()), cyc);
    }
    if (rc.svg) {
        const auto cyc = compute_cycle({rc.system.alpha, rc.system.I, Dynamics::linear});
        run.write("phase.svg", svg::render({{"phase portrait (" + std::string(to_string(rc.system.dynamics)) + ")", "q1", "q2",
                                             {phase_series(arc, "trajectory", "#1f77b4"), cycle_series(cyc)}}},
                                           640, 560));
        run.write("timeseries.svg", svg::render({{"angle", "t", "q1", {component_series(arc, 0, "", "#1f77b4")}},
                                                 {"velocity", "t", "q2", {component_series(arc, 1, "", "#d62728")}},
                                                 {"sign tracker", "t", "sigma", {component_series(arc, 2, "", "#2ca02c")}}}));
    }
    run.result("simulate", info);
    std::cout << dump_json(info);
    run.finish(exit_ok);
    return exit_ok;
}

inline json cycle_summary(const SystemParams& p, int resolution) {
    const auto c = compute_cycle(p, resolution);
    return to_json(c);
}

inline int cmd_cycle(const RunConfig& rc) {
    SystemParams p = rc.system;
    if (p.dynamics != Dynamics::linear) throw ConfigError("cycle is computed for linear dynamics only");
    p.validate();
    Run run(rc);
    const auto c = compute_cycle(p, rc.resolution);
    const json summary = to_json(c);
    run.write("cycle.json", dump_json(to_json(c, true)));
    if (rc.svg)
        run.write("cycle.svg", svg::render({{"hybrid limit cycle", "q1", "q2", {cycle_series(c)}}}, 640, 560));
    run.result("cycle", summary);
    std::cout << dump_json(summary);
    run.finish(exit_ok);
    return exit_ok;
}

inline int cmd_verify(const RunConfig& rc) {
    VerifyOptions opt;
    opt.params = {rc.system.alpha, rc.system.I, Dynamics::linear};
    opt.params.validate();
    opt.seed = rc.seed;
    opt.solver = rc.solver;
    opt.adaptation_delta = rc.delta;
    Run run(rc);
    const auto rep = run_verification(opt);
    for (const auto& n : rep.notes) run.warn(n);
    run.write("verify_report.json", dump_json(to_json(rep, opt)));
    for (const auto& c : rep.checks)
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.id << " " << c.name << " measured=" << detail::format_double(c.measured)
                  << " tolerance=" << detail::format_double(c.tolerance) << "\n";
    const int code = rep.passed() ? exit_ok : exit_verification_failed;
    run.result("verify", {{"passed", rep.passed()}});
    run.finish(code);
    return code;
}

inline int cmd_adapt(const RunConfig& rc) {
    AdaptationParams ap{rc.system.alpha, rc.epsilon, rc.q1_star, rc.system.dynamics, rc.d2_rule, rc.tie_break};
    ap.validate();
    Run run(rc);
    const auto x0 = augmented_x0(rc);
    const auto arc = simulate_adaptive(x0, ap, rc.solver);
    for (const auto& w : arc.meta.warnings) run.warn(w);
    write_trace(run, arc, "adapt_trace", true);
    const auto trace = amplitude_trace(arc);
    run.write("amplitude_trace.csv", amplitude_trace_csv(trace));
    std::string itrace = "t,I\n" + detail::format_double(0.0) + "," + detail::format_double(x0.I) + "\n";
    for (const auto& e : trace) itrace += detail::format_double(e.t) + "," + detail::format_double(e.I_after) + "\n";
    run.write("I_trace.csv", itrace);

    // Reference run with constant I from the same (q1, q2, sigma1).
    json info;
    std::optional<HybridArc<3>> reference;
    if (x0.I > 0.0) {
        const SystemParams fixed{rc.system.alpha, x0.I, rc.system.dynamics};
        const auto rx0 = admit(rc, {x0.q1, x0.q2, x0.sigma1}, run, nullptr);
        reference = simulate(fixed, rx0, rc.solver);
        write_trace(run, *reference, "constant_I_trace", false);
    } else {
        run.warn("initial I is 0; constant-I comparison skipped");
    }
    const auto diag = diagnose_adaptation(arc, ap, rc.t_from, rc.delta);
    if (!diag.converged) run.warn("adaptation did not reach the amplitude band within the horizon");
    info["diagnostics"] = to_json(diag);
    info["adapt_jumps"] = trace.size();
    info["jumps"] = arc.jumps.size();
    info["termination"] = to_string(arc.meta.termination);
    if (rc.svg) {
        std::vector<svg::Series> q1{component_series(arc, 0, "adaptive", "#1f77b4")};
        if (reference) q1.push_back(component_series(*reference, 0, "constant I", "#000000"));
        svg::Series band_lo{"q1* +/- delta", "#999999", 1.0, true, {}}, band_hi{"", "#999999", 1.0, true, {}};
        band_lo.pieces.push_back({{0.0, rc.q1_star - rc.delta}, {arc.final_time().t, rc.q1_star - rc.delta}});
        band_hi.pieces.push_back({{0.0, rc.q1_star + rc.delta}, {arc.final_time().t, rc.q1_star + rc.delta}});
        q1.push_back(band_lo);
        q1.push_back(band_hi);
        run.write("adapt_timeseries.svg",
                  svg::render({{"angle", "t", "q1", q1},
                               {"velocity", "t", "q2", {component_series(arc, 1, "", "#d62728")}},
                               {"sign trackers", "t", "sigma",
                                {component_series(arc, 2, "sigma1", "#2ca02c"), component_series(arc, 3, "sigma2", "#9467bd")}},
                               {"pulse amplitude", "t", "I", {component_series(arc, 4, "", "#ff7f0e")}}}));
        std::vector<svg::Series> ph{phase_series(arc, "adaptive", "#1f77b4")};
        if (reference) ph.push_back(phase_series(*reference, "constant I", "#000000"));
        run.write("adapt_phase.svg", svg::render({{"phase portrait", "q1", "q2", ph}}, 640, 560));
    }
    run.result("adapt", info);
    std::cout << dump_json(info);
    run.finish(exit_ok);
    return exit_ok;
}

inline int cmd_sweep(const RunConfig& rc) {
    if (rc.alphas.empty() || rc.Is.empty()) throw ConfigError("sweep grid is empty");
    std::vector<SystemParams> cells;
    for (double a : rc.alphas)
        for (double i : rc.Is) {
            const SystemParams p{a, i, Dynamics::linear};
            p.validate();
            cells.push_back(p);
        }
    Run run(rc);
    const std::size_t jobs = rc.jobs > 0 ? static_cast<std::size_t>(rc.jobs)
                                         : std::max<std::size_t>(1, std::thread::hardware_concurrency());
    std::vector<json> rows(cells.size());
    for (std::size_t start = 0; start < cells.size(); start += jobs) {
        std::vector<std::future<json>> batch;
        for (std::size_t k = start; k < std::min(cells.size(), start + jobs); ++k)
            batch.push_back(std::async(std::launch::async, [&, k] { return cycle_summary(cells[k], rc.resolution); }));
        for (std::size_t k = 0; k < batch.size(); ++k) rows[start + k] = batch[k].get();
    }
    std::string csv = "alpha,I,mu_star,period_T,contraction,max_amplitude\n";
    json table = json::array();
    for (const auto& r : rows) {
        csv += detail::format_double(r["alpha"].get<double>()) + "," + detail::format_double(r["I"].get<double>()) + "," +
               detail::format_double(r["mu_star"].get<double>()) + "," + detail::format_double(r["period_T"].get<double>()) +
               "," + detail::format_double(r["constants"]["contraction"].get<double>()) + "," +
               detail::format_double(r["max_amplitude"].get<double>()) + "\n";
        table.push_back(r);
    }
    if (run.csv()) run.write("sweep.csv", csv);
    if (run.json_out()) run.write("sweep.json", dump_json(table));
    run.result("sweep", {{"cells", rows.size()}});
    std::cout << csv;
    run.finish(exit_ok);
    return exit_ok;
}

inline int cmd_compare(const RunConfig& rc) {
    if (rc.system.dynamics != Dynamics::linear) throw ConfigError("compare needs linear dynamics (the closed form is linear)");
    rc.system.validate();
    Run run(rc);
    json info;
    const auto x0 = admit(rc, pendulum_x0(rc), run, &info);
    if (!in_X0(x0)) throw ConfigError("compare needs an initial state in X0");
    const auto arc = simulate(rc.system, x0, rc.solver);
    const ClosedFormSolution cf(x0, rc.system);
    const double state_budget = 1e-8, event_budget = 1e-9;
    double max_state = 0.0;
    for (const auto& seg : arc.segments)
        for (const auto& s : seg.samples) {
            const auto c = to_vector(cf.state({s.t, seg.j}));
            for (std::size_t i = 0; i < 3; ++i) max_state = std::max(max_state, std::abs(c[i] - s.x[i]));
        }
    double max_event = 0.0;
    json events = json::array();
    for (const auto& jr : arc.jumps) {
        const double tc = cf.jump_time(jr.j_before + 1);
        const double d = std::abs(jr.t - tc);
        max_event = std::max(max_event, d);
        events.push_back({{"j", jr.j_before + 1}, {"t_numeric", jr.t}, {"t_closed_form", tc}, {"discrepancy", d}});
    }
    const bool within = max_state <= state_budget && max_event <= event_budget;
    if (!within) run.warn("integrator discrepancy exceeds the accuracy budget");
    info["x0_used"] = detail::state_json(x0);
    info["max_state_discrepancy"] = max_state;
    info["max_event_time_discrepancy"] = max_event;
    info["state_budget"] = state_budget;
    info["event_budget"] = event_budget;
    info["within_budget"] = within;
    info["warning"] = !within;
    info["events"] = events;
    run.write("compare_report.json", dump_json(info));
    run.result("compare", {{"within_budget", within}, {"max_state_discrepancy", max_state},
                           {"max_event_time_discrepancy", max_event}});
    std::cout << "max_state_discrepancy=" << detail::format_double(max_state)
              << " max_event_time_discrepancy=" << detail::format_double(max_event)
              << (within ? " within budget\n" : " EXCEEDS budget\n");
    run.finish(exit_ok);
    return exit_ok;
}

/// Best-effort manifest for a run that failed after its configuration was resolved.
inline void write_failure_manifest(const RunConfig& rc, int exit_code, const std::string& message) {
    std::error_code ec;
    std::filesystem::create_directories(rc.out, ec);
    if (ec) return;
    json m{{"tool", "spikehybrid"},
           {"version", SPIKEHYBRID_VERSION},
           {"config", to_json(rc)},
           {"error", message},
           {"exit_code", exit_code}};
    try {
        write_text_file((std::filesystem::path(rc.out) / "manifest.json").string(), dump_json(m));
    } catch (const Error&) {
    }
}

inline int dispatch(const RunConfig& rc) {
    if (rc.command == "simulate") return cmd_simulate(rc);
    if (rc.command == "cycle") return cmd_cycle(rc);
    if (rc.command == "verify") return cmd_verify(rc);
    if (rc.command == "adapt") return cmd_adapt(rc);
    if (rc.command == "sweep") return cmd_sweep(rc);
    if (rc.command == "compare") return cmd_compare(rc);
    throw ConfigError("unknown command \"" + rc.command + "\"");
}

} // namespace spikehybrid::cli

#endif // SPIKEHYBRID_TOOLS_COMMANDS_HPP
