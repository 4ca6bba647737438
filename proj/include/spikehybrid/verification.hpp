#ifndef SPIKEHYBRID_VERIFICATION_HPP
#define SPIKEHYBRID_VERIFICATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "adaptation.hpp"
#include "closed_form.hpp"
#include "limit_cycle.hpp"
#include "pendulum_model.hpp"
#include "serialization.hpp"

namespace spikehybrid {

struct VerifyOptions {
    SystemParams params{0.5, 0.1, Dynamics::linear};
    std::uint64_t seed = 7;
    SolverConfig solver{};
    int corpus_size = 20;           ///< closed-form, inter-jump and decay checks
    int invariance_corpus_size = 50;
    int uniqueness_corpus_size = 10;
    double compare_horizon = 30.0;
    double convergence_time = 60.0;
    double nonlinear_horizon = 100.0;
    double adaptation_horizon = 100.0;
    double adaptation_delta = 0.05;
    AdaptationParams adaptation{};
    AugmentedState adaptation_x0{std::numbers::pi / 3.0, 2.0, Sign::plus, Sign::plus, 0.1};

    double tol_closed_form = 1e-8;
    double tol_inter_jump = 1e-8;
    double tol_periodicity = 1e-7;
    double tol_fixed_point = 1e-14;
    double tol_terminal_distance = 1e-6;
    double tol_hausdorff = 1e-5;
    double tol_contraction = 1e-6;
    double tol_peak_spread = 1e-3;
    double tol_step_exact = 1e-12;
    double hausdorff_spacing = 5e-3;
    double contraction_floor = 1e-4;
};

/// The three reference initial conditions of the linear and nonlinear reproduction checks.
inline std::vector<PendulumState> reference_initial_conditions() {
    using std::numbers::pi;
    return {{pi / 3.0, 2.0, Sign::minus}, {pi / 4.0, -2.0, Sign::plus}, {-pi / 6.0, 1.0, Sign::minus}};
}

/// Seeded initial conditions in X0: q1 ~ U(-1.2, 1.2), q2 ~ U(-1.5, 1.5), sigma = sign(q1).
inline std::vector<PendulumState> seeded_corpus(std::uint64_t seed, int n) {
    std::mt19937_64 rng(seed);
    std::vector<PendulumState> out;
    while (static_cast<int>(out.size()) < n) {
        const double u1 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const double q1 = -1.2 + 2.4 * u1;
        const PendulumState y{q1, -1.5 + 3.0 * u2, q1 > 0.0 ? Sign::plus : Sign::minus};
        if (in_X0(y)) out.push_back(y);
    }
    return out;
}

/// Replaces an inconsistent sigma by sign(q1); records the substitution in notes.
inline PendulumState admissible_initial_state(const PendulumState& x, double tol, std::vector<std::string>* notes) {
    if (auto r = reseed_sigma(x, tol)) {
        if (notes)
            notes->push_back("initial state (" + detail::format_double(x.q1) + ", " + detail::format_double(x.q2) + ", " +
                             std::to_string(to_int(x.sigma)) + ") is outside C u D; sigma reseeded to " +
                             std::to_string(to_int(r->sigma)));
        return *r;
    }
    return x;
}

struct CheckResult {
    int id = 0;
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    json details = json::object();
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    std::vector<std::string> notes;
    [[nodiscard]] bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
    }
};

namespace detail {

inline json state_json(const PendulumState& x) { return json::array({x.q1, x.q2, to_int(x.sigma)}); }

inline double closed_form_discrepancy(const HybridArc<3>& arc, const ClosedFormSolution& cf) {
    double m = 0.0;
    for (const auto& seg : arc.segments)
        for (const auto& s : seg.samples) {
            const auto c = to_vector(cf.state({s.t, seg.j}));
            for (std::size_t i = 0; i < 3; ++i) m = std::max(m, std::abs(c[i] - s.x[i]));
        }
    return m;
}

} // namespace detail

/**
 * Runs the full property suite. The report is a pure function of the options:
 * it carries no timings, hostnames or other run-dependent values.
 */
inline VerifyReport run_verification(const VerifyOptions& opt) {
    VerifyReport rep;
    const SystemParams p{opt.params.alpha, opt.params.I, Dynamics::linear};
    p.validate();
    const auto mc = mode_constants(p.alpha);
    const auto cycle = compute_cycle(p);
    const double ztol = opt.solver.zero_tol;

    SolverConfig base = opt.solver;
    base.j_max = std::max(base.j_max, 100000);

    const auto invariance_corpus = seeded_corpus(opt.seed, std::max(opt.invariance_corpus_size, opt.corpus_size));
    const std::vector<PendulumState> corpus(invariance_corpus.begin(), invariance_corpus.begin() + opt.corpus_size);

    // Closed form vs integrator, inter-jump gaps and decay on the main corpus.
    SolverConfig cmp = base;
    cmp.t_max = opt.compare_horizon;
    std::vector<HybridArc<3>> corpus_arcs;
    double worst_cf = 0.0, worst_gap = 0.0;
    std::size_t gaps = 0;
    json per_run = json::array();
    for (const auto& x0 : corpus) {
        auto arc = simulate(p, x0, cmp);
        const ClosedFormSolution cf(x0, p);
        const double d = detail::closed_form_discrepancy(arc, cf);
        double g = 0.0;
        for (std::size_t k = 1; k < arc.jumps.size(); ++k) {
            g = std::max(g, std::abs(arc.jumps[k].t - arc.jumps[k - 1].t - mc.inter_jump_time));
            ++gaps;
        }
        worst_cf = std::max(worst_cf, d);
        worst_gap = std::max(worst_gap, g);
        per_run.push_back({{"x0", detail::state_json(x0)}, {"max_discrepancy", d}, {"max_gap_error", g},
                           {"jumps", arc.jumps.size()}});
        corpus_arcs.push_back(std::move(arc));
    }
    rep.checks.push_back({1, "closed_form_equivalence", worst_cf <= opt.tol_closed_form, worst_cf, opt.tol_closed_form,
                          {{"runs", per_run}, {"horizon", opt.compare_horizon}}});
    rep.checks.push_back({2, "inter_jump_time", gaps > 0 && worst_gap <= opt.tol_inter_jump, worst_gap, opt.tol_inter_jump,
                          {{"pi_over_b", mc.inter_jump_time}, {"gaps_checked", gaps}}});

    // Periodicity of the cycle arc over three periods.
    {
        SolverConfig c = base;
        c.t_max = 3.0 * cycle.period_T;
        const PendulumState x0{0.0, cycle.mu_star, Sign::plus};
        const auto arc = simulate(p, x0, c);
        const auto pr = verify_periodicity(arc, cycle, opt.tol_periodicity);
        rep.checks.push_back({3, "cycle_periodicity", pr.passed, pr.max_deviation, opt.tol_periodicity,
                              {{"x0", detail::state_json(x0)}, {"mu_star", cycle.mu_star}, {"period_T", cycle.period_T},
                               {"period_N", cycle.period_N}, {"report", to_json(pr)}}});
    }

    // Fixed-point identity on a 5 x 5 grid.
    {
        double worst = 0.0;
        json grid = json::array();
        for (int ia = 1; ia <= 5; ++ia)
            for (int iI = 1; iI <= 5; ++iI) {
                const SystemParams q{2.0 * ia / 6.0, 0.01 + 0.49 * iI / 6.0, Dynamics::linear};
                const auto m = mode_constants(q.alpha);
                const double mu = mu_star(q).mu_star;
                const double r = std::abs(-(mu - q.I) * m.contraction + mu);
                worst = std::max(worst, r);
                grid.push_back({{"alpha", q.alpha}, {"I", q.I}, {"mu_star", mu}, {"residual", r}});
            }
        rep.checks.push_back({4, "fixed_point_identity", worst <= opt.tol_fixed_point, worst, opt.tol_fixed_point,
                              {{"grid", grid}}});
    }

    // Convergence of the reference initial conditions to the same cycle.
    SolverConfig conv = base;
    conv.t_max = opt.convergence_time;
    auto convergence = [&](const std::vector<PendulumState>& ics, json& runs, double& terminal, double& haus) {
        std::vector<std::vector<Polyline>> late;
        terminal = 0.0;
        haus = 0.0;
        for (const auto& x : ics) {
            const auto x0 = admissible_initial_state(x, ztol, &rep.notes);
            const auto arc = simulate(p, x0, conv);
            const double d = distance_to_cycle(pendulum_state(arc.final_state()), cycle);
            terminal = std::max(terminal, d);
            late.push_back(orbit_polylines(arc, opt.convergence_time - cycle.period_T, opt.convergence_time,
                                           opt.hausdorff_spacing));
            runs.push_back({{"x0", detail::state_json(x0)}, {"terminal_distance", d}, {"jumps", arc.jumps.size()}});
        }
        for (std::size_t a = 0; a < late.size(); ++a)
            for (std::size_t b = a + 1; b < late.size(); ++b) haus = std::max(haus, hausdorff_distance(late[a], late[b]));
    };
    {
        json runs = json::array();
        double terminal = 0.0, haus = 0.0;
        convergence(reference_initial_conditions(), runs, terminal, haus);
        const bool ok = terminal <= opt.tol_terminal_distance && haus <= opt.tol_hausdorff;
        rep.checks.push_back({5, "uniqueness_attractivity", ok, terminal, opt.tol_terminal_distance,
                              {{"runs", runs},
                               {"max_pairwise_hausdorff", haus},
                               {"hausdorff_tolerance", opt.tol_hausdorff},
                               {"t", opt.convergence_time}}});
    }

    // Contraction of the pre-jump velocity error and positive decay rates.
    {
        DecayFitOptions fit;
        fit.noise_floor = 100.0 * base.event_tol;
        fit.contraction_floor = opt.contraction_floor;
        double worst = 0.0, min_gamma = std::numeric_limits<double>::infinity();
        std::size_t ratios = 0;
        bool fits_ok = true;
        json runs = json::array();
        for (std::size_t k = 0; k < corpus_arcs.size(); ++k) {
            json r{{"x0", detail::state_json(corpus[k])}};
            try {
                const auto s = estimate_decay_rate(corpus_arcs[k], cycle, fit);
                min_gamma = std::min(min_gamma, s.decay_rate_estimate);
                if (s.contraction_ratios_used > 0) worst = std::max(worst, std::abs(s.per_jump_contraction_observed - mc.contraction));
                ratios += s.contraction_ratios_used;
                r["stability"] = to_json(s);
            } catch (const InsufficientData& e) {
                fits_ok = false;
                r["error"] = e.what();
            }
            runs.push_back(std::move(r));
        }
        const bool ok = fits_ok && ratios > 0 && worst <= opt.tol_contraction && min_gamma > 0.0;
        rep.checks.push_back({6, "exponential_decay", ok, worst, opt.tol_contraction,
                              {{"expected_contraction", mc.contraction},
                               {"min_decay_rate", fits_ok ? json(min_gamma) : json(nullptr)},
                               {"ratios_used", ratios},
                               {"runs", runs}}});
    }

    // Forward invariance of X0.
    {
        std::vector<HybridArc<3>> arcs;
        for (const auto& x0 : invariance_corpus) arcs.push_back(simulate(p, x0, cmp));
        const auto fr = verify_forward_invariance(arcs, 100.0 * base.event_tol);
        double min_r = std::numeric_limits<double>::infinity();
        for (const auto& e : fr.arcs) min_r = std::min(min_r, e.min_radius);
        rep.checks.push_back({7, "forward_invariance", fr.passed(), min_r, fr.radius,
                              {{"runs", fr.arcs.size()}, {"report", to_json(fr)}}});
    }

    // Nonlinear reproduction: common late-time peak amplitude.
    {
        SystemParams nl = p;
        nl.dynamics = Dynamics::nonlinear;
        SolverConfig c = base;
        c.t_max = opt.nonlinear_horizon;
        double lo = std::numeric_limits<double>::infinity(), hi = -std::numeric_limits<double>::infinity();
        std::size_t total = 0;
        json runs = json::array();
        for (const auto& x : reference_initial_conditions()) {
            const auto x0 = admissible_initial_state(x, ztol, nullptr);
            const auto arc = simulate(nl, x0, c);
            const auto peaks = peak_amplitudes(arc, opt.convergence_time);
            double rlo = std::numeric_limits<double>::infinity(), rhi = -rlo;
            for (const auto& pk : peaks) {
                rlo = std::min(rlo, pk.amplitude);
                rhi = std::max(rhi, pk.amplitude);
            }
            lo = std::min(lo, rlo);
            hi = std::max(hi, rhi);
            total += peaks.size();
            runs.push_back({{"x0", detail::state_json(x0)}, {"peaks", peaks.size()},
                            {"min_peak", peaks.empty() ? json(nullptr) : json(rlo)},
                            {"max_peak", peaks.empty() ? json(nullptr) : json(rhi)},
                            {"warnings", arc.meta.warnings}});
        }
        const double spread = total > 0 ? hi - lo : std::numeric_limits<double>::infinity();
        rep.checks.push_back({8, "nonlinear_common_oscillation", total > 0 && spread <= opt.tol_peak_spread,
                              total > 0 ? spread : -1.0, opt.tol_peak_spread,
                              {{"runs", runs}, {"t_from", opt.convergence_time}}});
    }

    // Adaptation practical convergence.
    {
        SolverConfig c = base;
        c.t_max = opt.adaptation_horizon;
        const auto arc = simulate_adaptive(opt.adaptation_x0, opt.adaptation, c);
        const auto d = diagnose_adaptation(arc, opt.adaptation, opt.convergence_time, opt.adaptation_delta,
                                           opt.tol_step_exact);
        const auto trace = amplitude_trace(arc);
        json late = json::array();
        double last_exit = std::numeric_limits<double>::quiet_NaN();
        for (const auto& e : trace) {
            if (e.t < opt.convergence_time) continue;
            late.push_back({{"t", e.t}, {"peak", e.peak_amplitude}, {"I", e.I_after}});
            if (std::abs(e.peak_amplitude - opt.adaptation.q1_star) > opt.adaptation_delta) last_exit = e.t;
        }
        const bool ok = d.converged && d.oscillating;
        rep.checks.push_back({9, "adaptation_practical_convergence", ok, d.max_band_error, opt.adaptation_delta,
                              {{"diagnostics", to_json(d)},
                               {"q1_star", opt.adaptation.q1_star},
                               {"epsilon", opt.adaptation.epsilon},
                               {"last_out_of_band_peak_t", nullable(last_exit)},
                               {"late_peaks", late},
                               {"warnings", arc.meta.warnings}}});
    }

    // Supplementary uniqueness probe over seeded initial conditions.
    {
        json runs = json::array();
        double terminal = 0.0, haus = 0.0;
        const auto ics = seeded_corpus(opt.seed ^ 0x9e3779b97f4a7c15ULL, opt.uniqueness_corpus_size);
        convergence(ics, runs, terminal, haus);
        const bool ok = terminal <= opt.tol_terminal_distance && haus <= opt.tol_hausdorff;
        rep.checks.push_back({11, "uniqueness_seeded_corpus", ok, terminal, opt.tol_terminal_distance,
                              {{"runs", runs},
                               {"max_pairwise_hausdorff", haus},
                               {"hausdorff_tolerance", opt.tol_hausdorff}}});
    }
    return rep;
}

inline json solver_to_json(const SolverConfig& c) {
    return {{"method", to_string(c.method)}, {"step", c.step},         {"max_step", c.max_step},
            {"abs_tol", c.abs_tol},          {"rel_tol", c.rel_tol},   {"event_tol", c.event_tol},
            {"zero_tol", c.zero_tol},        {"t_max", c.t_max},       {"j_max", c.j_max},
            {"jump_policy", "jump_priority"}, {"sgn_zero_choice", to_int(c.sgn_zero_choice)},
            {"max_zero_flow_jumps", c.max_zero_flow_jumps}};
}

inline json to_json(const VerifyReport& r, const VerifyOptions& opt) {
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"id", c.id},
                          {"name", c.name},
                          {"passed", c.passed},
                          {"measured", nullable(c.measured)},
                          {"tolerance", c.tolerance},
                          {"details", c.details}});
    return {{"seed", opt.seed},
            {"alpha", opt.params.alpha},
            {"I", opt.params.I},
            {"solver", solver_to_json(opt.solver)},
            {"passed", r.passed()},
            {"notes", r.notes},
            {"checks", checks}};
}

} // namespace spikehybrid

#endif // SPIKEHYBRID_VERIFICATION_HPP
