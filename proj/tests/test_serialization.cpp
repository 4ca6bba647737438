#include <catch_amalgamated.hpp>

#include <spikehybrid/adaptation.hpp>
#include <spikehybrid/serialization.hpp>

using namespace spikehybrid;

namespace {

SolverConfig config(double t_max) {
    SolverConfig c;
    c.t_max = t_max;
    return c;
}

template <std::size_t N>
void require_same_states(const HybridArc<N>& a, const HybridArc<N>& b) {
    REQUIRE(a.segments.size() == b.segments.size());
    REQUIRE(a.jumps.size() == b.jumps.size());
    for (std::size_t k = 0; k < a.segments.size(); ++k) {
        REQUIRE(a.segments[k].j == b.segments[k].j);
        REQUIRE(a.segments[k].samples.size() == b.segments[k].samples.size());
        for (std::size_t i = 0; i < a.segments[k].samples.size(); ++i) {
            CHECK(a.segments[k].samples[i].t == b.segments[k].samples[i].t);
            CHECK(a.segments[k].samples[i].x == b.segments[k].samples[i].x);
        }
    }
    for (std::size_t k = 0; k < a.jumps.size(); ++k) {
        CHECK(a.jumps[k].t == b.jumps[k].t);
        CHECK(a.jumps[k].pre == b.jumps[k].pre);
        CHECK(a.jumps[k].post == b.jumps[k].post);
        CHECK(a.jumps[k].label == b.jumps[k].label);
    }
}

} // namespace

TEST_CASE("CSV round trip of a pendulum arc is bit-exact", "[serialization]") {
    const auto arc = simulate({0.5, 0.1, Dynamics::linear}, {0.3, -0.7, Sign::plus}, config(15.0));
    const auto csv = arc_to_csv(arc, false);
    CHECK(csv.rfind("t,j,q1,q2,sigma,event_flag\n", 0) == 0);
    const auto back = arc_from_csv<3>(csv);
    require_same_states(arc, back);
    CHECK(back.meta.interpolation == Interpolation::linear);
    CHECK(arc_to_csv(back, false) == csv);
}

TEST_CASE("CSV round trip of an adaptive arc keeps jump kinds", "[serialization]") {
    const AugmentedState x0{1.0, 2.0, Sign::plus, Sign::plus, 0.1};
    const auto arc = simulate_adaptive(x0, AdaptationParams{}, config(20.0));
    const auto csv = arc_to_csv(arc, true);
    CHECK(csv.rfind("t,j,q1,q2,sigma1,sigma2,I,event_flag,jump_kind\n", 0) == 0);
    const auto back = arc_from_csv<5>(csv);
    require_same_states(arc, back);
    for (std::size_t k = 0; k < arc.jumps.size(); ++k) CHECK(back.jumps[k].channel == arc.jumps[k].channel);
}

TEST_CASE("a segment of a single sample between two jumps survives the CSV round trip", "[serialization]") {
    const auto arc = simulate({0.5, 0.1, Dynamics::linear}, {0.0, 0.0, Sign::plus}, config(5.0));
    REQUIRE(arc.segments[0].samples.size() == 1);
    const auto back = arc_from_csv<3>(arc_to_csv(arc, false));
    require_same_states(arc, back);
}

TEST_CASE("JSON round trip preserves derivatives and metadata", "[serialization]") {
    const auto arc = simulate({0.5, 0.1, Dynamics::nonlinear}, {1.0, 0.5, Sign::plus}, config(12.0));
    const auto j = arc_to_json(arc);
    const auto back = arc_from_json<3>(json::parse(j.dump()));
    require_same_states(arc, back);
    CHECK(back.meta.interpolation == arc.meta.interpolation);
    CHECK(back.meta.termination == arc.meta.termination);
    CHECK(back.segments[1].samples[3].dx == arc.segments[1].samples[3].dx);
    CHECK(arc_to_json(back) == j);
}

TEST_CASE("malformed traces are configuration errors", "[serialization]") {
    CHECK_THROWS_AS(arc_from_csv<3>(""), ConfigError);
    CHECK_THROWS_AS(arc_from_csv<3>("t,j,q1,q2,event_flag\n"), ConfigError);
    CHECK_THROWS_AS(arc_from_csv<3>("t,j,q1,q2,sigma,event_flag\n0,0,1,2\n"), ConfigError);
    CHECK_THROWS_AS(arc_from_csv<3>("t,j,q1,q2,sigma,event_flag\n0,0,abc,2,1,0\n"), ConfigError);
    CHECK_THROWS_AS(arc_from_csv<3>("t,j,q1,q2,sigma,event_flag\n0,0,0,0,1,1\n"), ConfigError);
    CHECK_THROWS_AS(arc_from_csv<3>("t,j,q1,q2,sigma,event_flag\n0,0,0,0,1,2\n"), ConfigError);
    CHECK_THROWS_AS(arc_from_csv<3>("t,j,q1,q2,sigma,event_flag\n0,2,0,0,1,0\n"), ConfigError);
    CHECK_THROWS_AS(arc_from_json<3>(json::object()), ConfigError);
    CHECK_THROWS_AS(arc_from_json<3>(json{{"components", {"a"}}}), ConfigError);
}

TEST_CASE("reports serialize non-finite values as null", "[serialization]") {
    StabilityReport r;
    const auto j = to_json(r);
    CHECK(j["per_jump_contraction_observed"].is_null());
    const auto cj = to_json(compute_cycle({0.5, 0.1, Dynamics::linear}), true);
    CHECK(cj["period_N"] == 2);
    CHECK(cj["orbit_samples"].size() == 2 * 257);
}
