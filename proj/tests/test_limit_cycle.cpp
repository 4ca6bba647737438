#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <spikehybrid/limit_cycle.hpp>

using namespace spikehybrid;
using Catch::Approx;

namespace {

const SystemParams ref_params{0.5, 0.1, Dynamics::linear};

SolverConfig config(double t_max, int j_max = 10000) {
    SolverConfig c;
    c.t_max = t_max;
    c.j_max = j_max;
    return c;
}

/// Dense sampling of the cycle by propagating the post-jump state with exp(At).
std::vector<PendulumState> dense_cycle(const LimitCycleDescriptor& c, int n) {
    const auto mc = mode_constants(c.params.alpha);
    std::vector<PendulumState> out;
    for (int k = 0; k <= n; ++k) {
        const double s = mc.inter_jump_time * k / n;
        const auto q = apply(flow_propagator(s, mc), {0.0, c.mu_star - c.params.I});
        out.push_back({q.q1, q.q2, Sign::minus});
        out.push_back({-q.q1, -q.q2, Sign::plus});
    }
    return out;
}

double brute_distance(const PendulumState& x, const std::vector<PendulumState>& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& z : pts) {
        const double ds = to_double(x.sigma) - to_double(z.sigma);
        best = std::min(best, std::hypot(x.q1 - z.q1, x.q2 - z.q2, ds));
    }
    return best;
}

/// The sampled minimum overestimates the true distance by at most the chord sagitta.
void check_against_brute(double d, double brute) {
    CHECK(d <= brute + 1e-12);
    CHECK(brute - d <= 5e-8);
}

} // namespace

TEST_CASE("cycle descriptor at alpha = 0.5, I = 0.1", "[limit_cycle]") {
    const auto c = compute_cycle(ref_params);
    CHECK(c.mu_star == Approx(-0.0799675347852276).margin(1e-15));
    CHECK(c.period_T == Approx(6.48924588155778).margin(1e-13));
    CHECK(c.period_N == 2);
    CHECK(c.orbit_samples.size() == 2 * 257);
    CHECK(c.max_amplitude == Approx(0.128052503839206).margin(1e-14));
}

TEST_CASE("max amplitude agrees with a brute-force scan of the flow", "[limit_cycle]") {
    for (double alpha : {0.2, 0.5, 1.3}) {
        const SystemParams p{alpha, 0.1, Dynamics::linear};
        const auto c = compute_cycle(p);
        const auto mc = mode_constants(alpha);
        double best = 0.0;
        const int n = 200000;
        for (int k = 0; k <= n; ++k) {
            const auto q = apply(flow_propagator(mc.inter_jump_time * k / n, mc), {0.0, c.mu_star - p.I});
            best = std::max(best, std::abs(q.q1));
        }
        CHECK(c.max_amplitude == Approx(best).margin(1e-10));
        CHECK(c.max_amplitude >= best);
    }
}

TEST_CASE("doubling I doubles mu* and the max amplitude", "[limit_cycle]") {
    const auto c1 = compute_cycle(ref_params);
    const auto c2 = compute_cycle({0.5, 0.2, Dynamics::linear});
    CHECK(c2.mu_star == 2.0 * c1.mu_star);
    CHECK(c2.max_amplitude == Approx(2.0 * c1.max_amplitude).epsilon(1e-15));
    CHECK(c2.period_T == c1.period_T);
}

TEST_CASE("orbit halves mirror each other and the orbit closes through the jump", "[limit_cycle]") {
    const auto c = compute_cycle(ref_params, 128);
    const auto n = static_cast<std::size_t>(c.resolution + 1);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& a = c.orbit_samples[k];
        const auto& b = c.orbit_samples[k + n];
        CHECK(std::abs(a.q1 + b.q1) <= 1e-12);
        CHECK(std::abs(a.q2 + b.q2) <= 1e-12);
        CHECK(a.sigma == flip(b.sigma));
    }
    const auto& last = c.orbit_samples.back();
    CHECK(last.q1 == Approx(0.0).margin(1e-15));
    CHECK(last.q2 == Approx(c.mu_star).margin(1e-15));
    const auto post = jump_map({last.q1, last.q2, last.sigma}, ref_params);
    REQUIRE(post.size() == 1);
    CHECK(post[0].q2 == Approx(c.orbit_samples.front().q2).margin(1e-15));
    CHECK(post[0].sigma == c.orbit_samples.front().sigma);
}

TEST_CASE("compute_cycle rejects nonlinear mode and coarse resolution", "[limit_cycle]") {
    CHECK_THROWS_AS(compute_cycle({0.5, 0.1, Dynamics::nonlinear}), ParamOutOfRange);
    CHECK_THROWS_AS(compute_cycle(ref_params, 32), ParamOutOfRange);
    CHECK_THROWS_AS(compute_cycle({2.5, 0.1, Dynamics::linear}), ParamOutOfRange);
}

TEST_CASE("distance to the cycle", "[limit_cycle]") {
    const auto c = compute_cycle(ref_params);
    const auto dense = dense_cycle(c, 50000);
    CHECK(distance_to_cycle({0.0, c.mu_star, Sign::plus}, c) <= 1e-9);

    // At the peaks q2 = 0, so a shift in q1 is transverse to the orbit.
    const double s_peak = std::atan2(c.constants.b, -c.constants.a) / c.constants.b;
    for (double phase : {s_peak, s_peak + c.constants.inter_jump_time}) {
        auto x = c.state_at_phase(phase);
        CHECK(std::abs(x.q2) <= 1e-12);
        x.q1 += std::copysign(1e-3, x.q1);
        const double d = distance_to_cycle(x, c);
        CHECK(d >= 9e-4);
        CHECK(d <= 1.1e-3);
        check_against_brute(d, brute_distance(x, dense));
    }
    for (double phase : {0.7, 2.0, 4.1, 5.9}) {
        auto x = c.state_at_phase(phase);
        CHECK(distance_to_cycle(x, c) <= 1e-9);
        x.q1 += 1e-3;
        x.q2 -= 5e-4;
        check_against_brute(distance_to_cycle(x, c), brute_distance(x, dense));
    }

    const double origin = distance_to_cycle({0.0, 0.0, Sign::plus}, c);
    CHECK(origin > 0.0);
    check_against_brute(origin, brute_distance({0.0, 0.0, Sign::plus}, dense));

    const PendulumState far{0.4, -0.3, Sign::minus};
    check_against_brute(distance_to_cycle(far, c), brute_distance(far, dense));
    CHECK(distance_to_cycle(far, c, DistanceMetric::planar) <= distance_to_cycle(far, c));
}

TEST_CASE("periodicity of cycle arcs", "[limit_cycle]") {
    const auto c = compute_cycle(ref_params);
    const PendulumState fixed{0.0, c.mu_star, Sign::plus};

    const auto cf = closed_form_arc(fixed, ref_params, 3.0 * c.period_T, 100);
    const auto exact = verify_periodicity(cf, c, 1e-9);
    CHECK(exact.passed);
    CHECK(exact.max_deviation <= 1e-12);

    const auto num = simulate(ref_params, fixed, config(3.0 * c.period_T));
    const auto rep = verify_periodicity(num, c, 1e-7);
    CHECK(rep.passed);
    CHECK(rep.samples_checked > 100);

    const auto off = simulate(ref_params, {0.0, c.mu_star + 0.05, Sign::plus}, config(3.0 * c.period_T));
    CHECK(!verify_periodicity(off, c, 1e-7).passed);

    const auto short_arc = simulate(ref_params, fixed, config(1.5 * c.period_T));
    CHECK_THROWS_AS(verify_periodicity(short_arc, c, 1e-7), DomainTooShort);
}

TEST_CASE("decay rate and per-jump contraction", "[limit_cycle]") {
    const auto c = compute_cycle(ref_params);
    const auto arc = simulate(ref_params, {0.0, 2.0, Sign::plus}, config(60.0));
    const auto rep = estimate_decay_rate(arc, c);
    CHECK(rep.per_jump_contraction_observed == Approx(0.444344225088489).margin(1e-6));
    CHECK(rep.decay_rate_estimate > 0.0);
    CHECK(rep.samples_used >= 10);
    CHECK(rep.contraction_ratios_used >= 3);

    const auto on_cycle = closed_form_arc({0.0, c.mu_star, Sign::plus}, ref_params, 60.0, 100);
    CHECK_THROWS_AS(estimate_decay_rate(on_cycle, c), InsufficientData);

    const auto few = simulate(ref_params, {0.0, 2.0, Sign::plus}, config(10.0));
    CHECK_THROWS_AS(estimate_decay_rate(few, c), InsufficientData);
}

TEST_CASE("forward invariance of X0", "[limit_cycle]") {
    std::vector<HybridArc<3>> arcs;
    for (const PendulumState x0 : {PendulumState{0.9, 0.4, Sign::plus}, PendulumState{-1.1, 1.2, Sign::minus},
                                   PendulumState{0.0, -0.01, Sign::minus}})
        arcs.push_back(simulate(ref_params, x0, config(30.0)));
    const auto rep = verify_forward_invariance(arcs, 1e-10);
    CHECK(rep.passed());

    const auto tiny = simulate(ref_params, {0.0, 1e-12, Sign::plus}, config(20.0));
    REQUIRE(!tiny.jumps.empty());
    CHECK(tiny.jumps[0].t == 0.0);
    CHECK(std::abs(tiny.jumps[0].post[1]) == Approx(0.1).margin(1e-11));
    const auto rep2 = verify_forward_invariance({tiny}, 1e-10);
    CHECK(rep2.passed());
    CHECK(rep2.arcs[0].initial_in_ball);
    CHECK(rep2.arcs[0].min_radius > 0.01);
}

TEST_CASE("jump count grows by one every pi/b after the first jump", "[limit_cycle]") {
    const auto mc = mode_constants(0.5);
    const auto arc = simulate(ref_params, {0.7, 0.3, Sign::plus}, config(40.0));
    REQUIRE(!arc.jumps.empty());
    const double t1 = arc.jumps[0].t;
    for (const auto& seg : arc.segments) {
        if (seg.j == 0) continue;
        const double mid = 0.5 * (seg.t_start() + seg.t_end());
        CHECK(seg.j == static_cast<int>(std::floor((mid - t1) / mc.inter_jump_time)) + 1);
    }
}

TEST_CASE("Hausdorff distance between sampled orbits", "[limit_cycle]") {
    const std::vector<Polyline> a{{{0.0, 0.0, 1.0}, {1.0, 0.0, 1.0}}};
    const std::vector<Polyline> b{{{0.0, 0.5, 1.0}, {1.0, 0.5, 1.0}}, {{2.0, 0.0, 1.0}}};
    CHECK(hausdorff_distance(a, a) == 0.0);
    CHECK(hausdorff_distance(a, b) == Approx(1.0));
    CHECK(hausdorff_distance(a, b) == hausdorff_distance(b, a));

    const auto c = compute_cycle(ref_params);
    const auto x = simulate(ref_params, {0.9, 0.4, Sign::plus}, config(80.0));
    const auto y = simulate(ref_params, {-0.5, -1.0, Sign::minus}, config(80.0));
    const double h = hausdorff_distance(orbit_polylines(x, 60.0, 60.0 + c.period_T, 5e-3),
                                        orbit_polylines(y, 60.0, 60.0 + c.period_T, 5e-3));
    CHECK(h <= 1e-5);
}

TEST_CASE("peak amplitudes on the cycle match the descriptor", "[limit_cycle]") {
    const auto c = compute_cycle(ref_params);
    const auto arc = simulate(ref_params, {0.0, c.mu_star, Sign::plus}, config(30.0));
    const auto peaks = peak_amplitudes(arc, 0.0);
    REQUIRE(peaks.size() >= 8);
    for (const auto& pk : peaks) CHECK(pk.amplitude == Approx(c.max_amplitude).margin(1e-9));
}
