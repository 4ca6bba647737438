#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace spikehybrid;
using spikehybrid::cli::ExitCode;

namespace {

struct Bindings {
    std::vector<std::pair<CLI::Option*, std::function<void(json&)>>> setters;

    template <class T>
    void add(CLI::App* app, const std::string& flag, const std::string& key, T& target, const std::string& help) {
        setters.emplace_back(app->add_option(flag, target, help), [key, &target](json& j) { j[key] = target; });
    }
    void add_list(CLI::App* app, const std::string& flag, const std::string& key, std::string& target,
                  const std::string& help) {
        setters.emplace_back(app->add_option(flag, target, help), [key, &target](json& j) {
            j[key] = cli::parse_list(target, key);
        });
    }
    void add_flag(CLI::App* app, const std::string& flag, const std::string& key, bool& target, const std::string& help) {
        setters.emplace_back(app->add_flag(flag, target, help), [key, &target](json& j) { j[key] = target; });
    }
    [[nodiscard]] json collect() const {
        json j = json::object();
        for (const auto& [opt, set] : setters)
            if (opt->count() > 0) set(j);
        return j;
    }
};

struct Values {
    double alpha = 0, I = 0, tmax = 0, step = 0, max_step = 0, abs_tol = 0, rel_tol = 0, event_tol = 0, zero_tol = 0;
    double sgn_zero = 1, epsilon = 0, q1_star = 0, delta = 0, t_from = 0;
    int jmax = 0, jobs = 0, resolution = 0;
    std::int64_t seed = 0;
    std::string dynamics, method, x0, d2_rule, tie_break, alphas, Is, out, format, config;
    bool svg = false, strict_x0 = false;
};

void add_model(Bindings& b, CLI::App* s, Values& v) {
    b.add(s, "--alpha", "alpha", v.alpha, "damping in (0, 2)");
    b.add(s, "--I", "I", v.I, "pulse amplitude (> 0)");
    b.add(s, "--dynamics", "dynamics", v.dynamics, "linear | nonlinear");
}

void add_solver(Bindings& b, CLI::App* s, Values& v) {
    b.add(s, "--tmax", "tmax", v.tmax, "continuous-time horizon");
    b.add(s, "--jmax", "jmax", v.jmax, "jump horizon");
    b.add(s, "--method", "method", v.method, "dopri5 | rk4");
    b.add(s, "--step", "step", v.step, "fixed step (rk4) or initial step (dopri5)");
    b.add(s, "--max-step", "max_step", v.max_step, "largest dopri5 step");
    b.add(s, "--abs-tol", "abs_tol", v.abs_tol, "dopri5 absolute tolerance");
    b.add(s, "--rel-tol", "rel_tol", v.rel_tol, "dopri5 relative tolerance");
    b.add(s, "--event-tol", "event_tol", v.event_tol, "guard residual at localized events");
    b.add(s, "--zero-tol", "zero_tol", v.zero_tol, "set-membership tolerance");
    b.add(s, "--sgn-zero-choice", "sgn_zero_choice", v.sgn_zero, "branch taken by SGN(0): 1 or -1");
}

void add_x0(Bindings& b, CLI::App* s, Values& v, const std::string& help) {
    b.setters.emplace_back(s->add_option("--x0", v.x0, help), [&v](json& j) { j["x0"] = cli::parse_list(v.x0, "x0"); });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and verification of a pendulum driven by spiking torque pulses"};
    app.set_version_flag("--version", SPIKEHYBRID_VERSION);
    app.require_subcommand(1);
    app.fallthrough();
    Values v;
    Bindings b;
    app.add_option("--config", v.config, "JSON file with settings; flags override it");
    b.add(&app, "--out", "out", v.out, "output directory");
    b.add(&app, "--format", "format", v.format, "csv | json | both");
    b.add_flag(&app, "--svg", "svg", v.svg, "also write SVG plots");
    b.add(&app, "--seed", "seed", v.seed, "corpus seed");

    auto* sim = app.add_subcommand("simulate", "simulate the closed loop");
    add_model(b, sim, v);
    add_x0(b, sim, v, "q1,q2,sigma");
    add_solver(b, sim, v);
    b.add_flag(sim, "--strict-x0", "strict_x0", v.strict_x0, "reject initial states outside C u D instead of reseeding sigma");

    auto* cyc = app.add_subcommand("cycle", "limit-cycle summary for the linear mode");
    b.add(cyc, "--alpha", "alpha", v.alpha, "damping in (0, 2)");
    b.add(cyc, "--I", "I", v.I, "pulse amplitude (> 0)");
    b.add(cyc, "--resolution", "resolution", v.resolution, "orbit samples per half-cycle (>= 64)");

    auto* ver = app.add_subcommand("verify", "run the property suite on a seeded corpus");
    b.add(ver, "--alpha", "alpha", v.alpha, "damping in (0, 2)");
    b.add(ver, "--I", "I", v.I, "pulse amplitude (> 0)");
    b.add(ver, "--delta", "delta", v.delta, "adaptation band half-width");
    add_solver(b, ver, v);

    auto* ad = app.add_subcommand("adapt", "run the amplitude-adaptation loop");
    add_model(b, ad, v);
    add_x0(b, ad, v, "q1,q2,sigma1,sigma2,I");
    add_solver(b, ad, v);
    b.add(ad, "--epsilon", "epsilon", v.epsilon, "adaptation spike amplitude (>= 0)");
    b.add(ad, "--q1-star", "q1_star", v.q1_star, "target peak amplitude in (0, pi)");
    b.add(ad, "--d2-rule", "d2_rule", v.d2_rule, "exit_direction | printed");
    b.add(ad, "--tie-break", "tie_break", v.tie_break, "torque_first | adapt_first");
    b.add(ad, "--delta", "delta", v.delta, "amplitude band half-width for diagnostics");
    b.add(ad, "--t-from", "t_from", v.t_from, "start of the steady-state window");

    auto* sw = app.add_subcommand("sweep", "cycle constants over an (alpha, I) grid");
    b.add_list(sw, "--alphas", "alphas", v.alphas, "comma-separated alpha values");
    b.add_list(sw, "--Is", "Is", v.Is, "comma-separated I values");
    b.add(sw, "--jobs", "jobs", v.jobs, "parallel workers (0 = hardware threads)");
    b.add(sw, "--resolution", "resolution", v.resolution, "orbit samples per half-cycle (>= 64)");

    auto* cmp = app.add_subcommand("compare", "closed form against the integrator");
    add_model(b, cmp, v);
    add_x0(b, cmp, v, "q1,q2,sigma");
    add_solver(b, cmp, v);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ExitCode::exit_ok : ExitCode::exit_config;
    }

    const CLI::App* sub = app.get_subcommands().front();
    std::optional<cli::RunConfig> rc;
    try {
        rc = cli::resolve(sub->get_name(), v.config, b.collect());
        return cli::dispatch(*rc);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        if (rc) cli::write_failure_manifest(*rc, ExitCode::exit_config, e.what());
        return ExitCode::exit_config;
    } catch (const ParamOutOfRange& e) {
        std::cerr << "config error: " << e.what() << "\n";
        if (rc) cli::write_failure_manifest(*rc, ExitCode::exit_config, e.what());
        return ExitCode::exit_config;
    } catch (const OriginState& e) {
        std::cerr << "config error: " << e.what() << "\n";
        if (rc) cli::write_failure_manifest(*rc, ExitCode::exit_config, e.what());
        return ExitCode::exit_config;
    } catch (const Error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        if (rc) cli::write_failure_manifest(*rc, ExitCode::exit_solver, e.what());
        return ExitCode::exit_solver;
    }
}
