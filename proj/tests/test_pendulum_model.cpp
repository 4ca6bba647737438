#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include <spikehybrid/pendulum_model.hpp>

using namespace spikehybrid;
using Catch::Approx;

TEST_CASE("flow map in both dynamics", "[pendulum_model]") {
    const PendulumState x{std::numbers::pi / 3, 2.0, Sign::minus};
    const auto lin = flow_map(x, {0.5, 0.1, Dynamics::linear});
    CHECK(lin[0] == 2.0);
    CHECK(lin[1] == Approx(-2.04719755119660).margin(1e-13));
    CHECK(lin[2] == 0.0);
    const auto nl = flow_map(x, {0.5, 0.1, Dynamics::nonlinear});
    CHECK(nl[0] == 2.0);
    CHECK(nl[1] == Approx(-1.86602540378444).margin(1e-13));
    CHECK(nl[2] == 0.0);
    for (auto d : {Dynamics::linear, Dynamics::nonlinear})
        CHECK(flow_map({0.0, 0.0, Sign::plus}, {0.5, 0.1, d}) == StateVector<3>{0.0, 0.0, 0.0});
}

TEST_CASE("flow and jump set membership", "[pendulum_model]") {
    CHECK(in_flow_set({0.5, 7.0, Sign::plus}));
    CHECK_FALSE(in_flow_set({0.5, 7.0, Sign::minus}, 0.0));
    CHECK(in_flow_set({0.0, -3.0, Sign::plus}));
    CHECK(in_flow_set({-1e-11, 0.0, Sign::plus}, 1e-10));

    CHECK(in_jump_set({0.0, -1.0, Sign::plus}));
    CHECK_FALSE(in_jump_set({0.0, 1.0, Sign::plus}));
    CHECK(in_jump_set({0.0, 0.0, Sign::minus}));
    CHECK_FALSE(in_jump_set({0.2, -1.0, Sign::plus}, 1e-10));
}

TEST_CASE("jump map images", "[pendulum_model]") {
    const SystemParams p{0.5, 0.1, Dynamics::linear};
    auto g = jump_map({0.0, -1.0, Sign::plus}, p);
    REQUIRE(g.size() == 1);
    CHECK(g[0].q1 == 0.0);
    CHECK(g[0].q2 == Approx(-1.1).margin(1e-15));
    CHECK(g[0].sigma == Sign::minus);

    g = jump_map({0.0, 0.04443, Sign::minus}, p);
    REQUIRE(g.size() == 1);
    CHECK(g[0].q2 == Approx(0.14443).margin(1e-15));
    CHECK(g[0].sigma == Sign::plus);

    g = jump_map({0.0, 0.0, Sign::plus}, p);
    REQUIRE(g.size() == 2);
    CHECK(g[0] == PendulumState{0.0, 0.1, Sign::plus});
    CHECK(g[1] == PendulumState{0.0, -0.1, Sign::minus});
    CHECK(select_jump({0.0, 0.0, Sign::plus}, p, Sign::minus) == PendulumState{0.0, -0.1, Sign::minus});
}

TEST_CASE("set-valued sign", "[pendulum_model]") {
    CHECK(sgn_set(2.5) == std::vector<Sign>{Sign::plus});
    CHECK(sgn_set(-0.0001) == std::vector<Sign>{Sign::minus});
    CHECK(sgn_set(0.0) == std::vector<Sign>{Sign::plus, Sign::minus});
}

TEST_CASE("parameter validation", "[pendulum_model]") {
    CHECK_THROWS_AS((SystemParams{2.0, 0.1}.validate()), ParamOutOfRange);
    CHECK_THROWS_AS((SystemParams{0.0, 0.1}.validate()), ParamOutOfRange);
    CHECK_THROWS_AS((SystemParams{0.5, 0.0}.validate()), ParamOutOfRange);
    CHECK_THROWS_AS(parse_dynamics("quadratic"), ConfigError);
    CHECK(parse_dynamics("nonlinear") == Dynamics::nonlinear);
}

TEST_CASE("sigma is reseeded only for inadmissible states", "[pendulum_model]") {
    CHECK_FALSE(reseed_sigma({0.3, 1.0, Sign::plus}, 1e-10).has_value());
    const auto r = reseed_sigma({std::numbers::pi / 3, 2.0, Sign::minus}, 1e-10);
    REQUIRE(r.has_value());
    CHECK(r->sigma == Sign::plus);
    CHECK_FALSE(in_X0({0.0, 0.0, Sign::plus}));
    CHECK(in_X0({0.0, 1e-12, Sign::plus}));
}

TEST_CASE("jump and flow invariants hold on random states", "[pendulum_model][property]") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> vel(-3.0, 3.0), amp(0.01, 1.0);
    for (int k = 0; k < 500; ++k) {
        const SystemParams p{0.5, amp(rng), Dynamics::linear};
        const double q2 = vel(rng);
        if (q2 == 0.0) continue;
        const Sign sigma = q2 < 0.0 ? Sign::plus : Sign::minus; // makes the state a member of D
        const PendulumState pre{0.0, q2, sigma};
        REQUIRE(in_jump_set(pre));
        const auto post = jump_map(pre, p);
        REQUIRE(post.size() == 1);
        CHECK(post[0].q1 == 0.0);
        CHECK((post[0].q2 > 0.0) == (q2 > 0.0));
        CHECK(std::abs(post[0].q2) == Approx(std::abs(q2) + p.I).epsilon(1e-15));
        CHECK(post[0].sigma == (q2 > 0.0 ? Sign::plus : Sign::minus));
        CHECK(in_flow_set(post[0], 0.0));
    }
}

TEST_CASE("sigma is constant and V = q1^2 + q2^2 is nonincreasing along linear flow", "[pendulum_model][property]") {
    const SystemParams p{0.5, 0.1, Dynamics::linear};
    SolverConfig cfg;
    cfg.t_max = 30.0;
    cfg.j_max = 100;
    const auto arc = simulate(p, {0.7, -0.4, Sign::plus}, cfg);
    for (const auto& seg : arc.segments) {
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& s : seg.samples) {
            CHECK(s.x[2] == seg.samples.front().x[2]);
            const double V = s.x[0] * s.x[0] + s.x[1] * s.x[1];
            CHECK(V <= prev + 1e-10);
            prev = V;
        }
    }
}

TEST_CASE("nonlinear runs beyond pi are flagged", "[pendulum_model]") {
    SolverConfig cfg;
    cfg.t_max = 5.0;
    const auto arc = simulate({0.1, 0.1, Dynamics::nonlinear}, {0.0, 3.0, Sign::plus}, cfg);
    CHECK(std::find(arc.meta.warnings.begin(), arc.meta.warnings.end(), "angle_exceeds_pi") != arc.meta.warnings.end());
    const auto calm = simulate({0.5, 0.1, Dynamics::nonlinear}, {0.0, 1.0, Sign::plus}, cfg);
    CHECK(calm.meta.warnings.empty());
}
