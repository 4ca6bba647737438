#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <spikehybrid/closed_form.hpp>

using namespace spikehybrid;
using Catch::Approx;
using big = boost::multiprecision::cpp_dec_float_50;

namespace {

struct BigConstants {
    big a, b, half_period, contraction;
};

BigConstants big_constants(double alpha) {
    const big al(alpha);
    BigConstants c;
    c.a = -al / 2;
    c.b = sqrt(big(4) - al * al) / 2;
    c.half_period = boost::math::constants::pi<big>() / c.b;
    c.contraction = exp(c.a * c.half_period);
    return c;
}

/// exp(A t) by a 50-digit Taylor series, independent of the closed-form expressions.
std::array<std::array<big, 2>, 2> big_expm(double alpha, double t) {
    using M = std::array<std::array<big, 2>, 2>;
    const M A{{{big(0), big(1)}, {big(-1), big(-alpha)}}};
    M sum{{{big(1), big(0)}, {big(0), big(1)}}}, term = sum;
    for (int k = 1; k < 200; ++k) {
        M next{};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) next[i][j] = (term[i][0] * A[0][j] + term[i][1] * A[1][j]) * big(t) / k;
        term = next;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) sum[i][j] += term[i][j];
    }
    return sum;
}

} // namespace

TEST_CASE("mode constants at alpha = 0.5", "[closed_form]") {
    const auto mc = mode_constants(0.5);
    CHECK(mc.a == -0.25);
    CHECK(mc.b == Approx(0.968245836551854).margin(1e-15));
    CHECK(mc.inter_jump_time == Approx(3.24462294077889).margin(1e-13));
    CHECK(mc.contraction == Approx(0.444344225088489).margin(1e-15));
    CHECK(mc.a * mc.a + mc.b * mc.b == Approx(1.0).margin(1e-15));
}

TEST_CASE("mode constants agree with 50-digit arithmetic across alpha", "[closed_form]") {
    for (double alpha : {1e-9, 0.1, 0.5, 1.0, 1.5, 1.9, 1.999}) {
        const auto mc = mode_constants(alpha);
        const auto ref = big_constants(alpha);
        CHECK(mc.a == Approx(ref.a.convert_to<double>()).epsilon(1e-15));
        // 4 - alpha^2 cancels near alpha = 2, so the relative error of b grows with 1 / (4 - alpha^2).
        const double cond = 1.0 + 4.0 / (4.0 - alpha * alpha);
        CHECK(mc.b == Approx(ref.b.convert_to<double>()).epsilon(1e-15 * cond));
        CHECK(mc.inter_jump_time == Approx(ref.half_period.convert_to<double>()).epsilon(1e-15 * cond));
        CHECK(mc.contraction ==
              Approx(ref.contraction.convert_to<double>()).epsilon(1e-15 * cond * (1.0 + mc.inter_jump_time)));
        CHECK(mc.contraction > 0.0);
        CHECK(mc.contraction < 1.0);
    }
}

TEST_CASE("undamped limit and excluded boundaries", "[closed_form]") {
    const auto mc = mode_constants(1e-9);
    CHECK(mc.a == Approx(0.0).margin(1e-9));
    CHECK(mc.b == Approx(1.0).margin(1e-12));
    CHECK(mc.contraction == Approx(1.0).margin(1e-8));
    CHECK_THROWS_AS(mode_constants(2.0), ParamOutOfRange);
    CHECK_THROWS_AS(mode_constants(0.0), ParamOutOfRange);
    CHECK_THROWS_AS(mode_constants(-0.3), ParamOutOfRange);
}

TEST_CASE("solution before the first jump", "[closed_form]") {
    const auto mc = mode_constants(0.5);
    const auto id = flow_solution_initial({0.37, -1.2, Sign::plus}, 0.0, mc);
    CHECK(id.q1 == 0.37);
    CHECK(id.q2 == Approx(-1.2).margin(1e-15));

    const auto half = flow_solution_initial({0.0, 0.1, Sign::plus}, mc.inter_jump_time, mc);
    CHECK(half.q1 == Approx(0.0).margin(1e-15));
    CHECK(half.q2 == Approx(-0.0444344225088489).margin(1e-15));

    const auto from_rest = flow_solution_initial({0.2, 0.0, Sign::plus}, mc.inter_jump_time, mc);
    CHECK(from_rest.q1 == Approx(-0.0888688450176978).margin(1e-15));
}

TEST_CASE("closed form matches the matrix exponential", "[closed_form]") {
    for (double alpha : {0.3, 0.5, 1.7}) {
        const auto mc = mode_constants(alpha);
        for (double t : {0.0, 0.4, 2.5, 7.0, -1.3}) {
            const auto E = big_expm(alpha, t);
            const auto P = flow_propagator(t, mc);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) CHECK(P[i][j] == Approx(E[i][j].convert_to<double>()).margin(1e-13));
            const PendulumState x0{0.3, -0.8, Sign::plus};
            const auto q = flow_solution_initial(x0, t, mc);
            CHECK(q.q1 == Approx((E[0][0] * big(0.3) + E[0][1] * big(-0.8)).convert_to<double>()).margin(1e-13));
            CHECK(q.q2 == Approx((E[1][0] * big(0.3) + E[1][1] * big(-0.8)).convert_to<double>()).margin(1e-13));
        }
    }
}

TEST_CASE("solution after a jump", "[closed_form]") {
    const SystemParams p{0.5, 0.1, Dynamics::linear};
    const auto mc = mode_constants(0.5);
    const double mu = mu_star(p).mu_star;
    const auto end = flow_solution_post_jump(mu, mc.inter_jump_time, p, mc);
    CHECK(end.q1 == Approx(0.0).margin(1e-15));
    CHECK(end.q2 == Approx(-mu).margin(1e-15));
    const auto start = flow_solution_post_jump(mu, 0.0, p, mc);
    CHECK(start.q1 == 0.0);
    CHECK(start.q2 == Approx(mu - 0.1).margin(1e-15));
    CHECK_THROWS_AS(flow_solution_post_jump(0.0, 1.0, p, mc), DegenerateVelocity);
    CHECK_THROWS_AS(post_jump_coefficient(0.0, 0.1, mc), DegenerateVelocity);
}

TEST_CASE("cycle fixed point", "[closed_form]") {
    const SystemParams p{0.5, 0.1, Dynamics::linear};
    const double mu = mu_star(p).mu_star;
    CHECK(mu == Approx(-0.0799675347852276).margin(1e-15));
    const auto ref = big_constants(0.5);
    CHECK(mu == Approx((big(0.1) * ref.contraction / (ref.contraction - 1)).convert_to<double>()).epsilon(1e-14));
    CHECK(mu_star({0.5, 0.2, Dynamics::linear}).mu_star == 2.0 * mu);
    const auto mc = mode_constants(0.5);
    CHECK(std::abs(-(mu - p.I) * mc.contraction + mu) <= 1e-14);
}

TEST_CASE("pre-jump velocity recursion", "[closed_form]") {
    const SystemParams p{0.5, 0.1, Dynamics::linear};
    const auto mc = mode_constants(0.5);
    CHECK(pre_jump_velocity_step(-1.0, p, mc) == Approx(0.488778647597338).margin(1e-15));
    const double mu = mu_star(p).mu_star;
    CHECK(pre_jump_velocity_step(mu, p, mc) == Approx(-mu).margin(1e-16));
    double e = std::abs(0.7 - (-mu));
    double v = 0.7;
    for (int k = 0; k < 10; ++k) {
        const double next = pre_jump_velocity_step(v, p, mc);
        const double sign = next > 0.0 ? 1.0 : -1.0;
        const double e_next = std::abs(next - sign * -mu);
        CHECK(e_next / e == Approx(mc.contraction).epsilon(1e-9));
        e = e_next;
        v = next;
    }
    CHECK_THROWS_AS(pre_jump_velocity_step(0.0, p, mc), DegenerateVelocity);
}

TEST_CASE("time to impact", "[closed_form]") {
    const auto mc = mode_constants(0.5);
    CHECK(time_to_impact({0.0, -0.3, Sign::plus}, mc) == 0.0);
    CHECK(time_to_impact({0.0, 0.1, Sign::plus}, mc) == Approx(mc.inter_jump_time).margin(1e-11));
    CHECK(time_to_impact({0.0, 1.0, Sign::plus}, mc) == Approx(mc.inter_jump_time).margin(1e-11));
    const double quarter = time_to_impact({0.757298012573348, 0.0, Sign::plus}, mc);
    CHECK(quarter > 0.0);
    CHECK(flow_solution_initial({0.757298012573348, 0.0, Sign::plus}, quarter, mc).q1 == Approx(0.0).margin(1e-11));
    CHECK_THROWS_AS(time_to_impact({0.0, 0.0, Sign::plus}, mc), OriginState);
}

TEST_CASE("printed flow matrix has determinant b", "[closed_form]") {
    const auto mc = mode_constants(0.5);
    for (double s : {0.0, 0.3, 1.7, 3.0}) {
        CHECK(determinant(flow_matrix(s, mc)) == Approx(mc.b).margin(1e-14));
        CHECK(determinant(flow_propagator(s, mc)) == Approx(std::exp(-0.5 * s)).margin(1e-14));
    }
}

TEST_CASE("cycle phase point is on the cycle flow and reaches mu* with x0", "[closed_form]") {
    const SystemParams p{0.5, 0.1, Dynamics::linear};
    const auto mc = mode_constants(0.5);
    const double mu = mu_star(p).mu_star;
    for (const PendulumState x0 : {PendulumState{0.5, 0.4, Sign::plus}, PendulumState{-0.9, -0.2, Sign::minus}}) {
        const double tau = time_to_impact(x0, mc);
        const auto z = cycle_phase_point(x0, p);
        const auto at_impact = apply(flow_propagator(tau, mc), {z.q1, z.q2});
        CHECK(at_impact.q1 == Approx(0.0).margin(1e-12));
        CHECK(at_impact.q2 == Approx(to_double(x0.sigma) * mu).margin(1e-12));
    }
}

TEST_CASE("closed-form solution object over several jumps", "[closed_form]") {
    const SystemParams p{0.5, 0.1, Dynamics::linear};
    const PendulumState x0{0.0, -1.0, Sign::minus};
    const ClosedFormSolution sol(x0, p);
    const auto& mc = sol.constants();
    CHECK(sol.first_impact() == Approx(mc.inter_jump_time).margin(1e-11));
    CHECK(sol.pre_jump_velocity(1) == Approx(0.444344225088489).margin(1e-12));
    CHECK(sol.pre_jump_velocity(2) == Approx(pre_jump_velocity_step(sol.pre_jump_velocity(1), p, mc)).margin(1e-15));
    CHECK(sol.jump_time(3) - sol.jump_time(2) == Approx(mc.inter_jump_time).margin(1e-12));
    const auto mid = sol.state({sol.jump_time(1) + 0.5 * mc.inter_jump_time, 1});
    CHECK(mid.sigma == Sign::plus);
    CHECK(mid.q1 > 0.0);

    const auto arc = closed_form_arc(x0, p, 20.0, 100);
    CHECK(domain_check(arc, PendulumSystem(p), 1e-9).ok());
    CHECK(arc.jumps.size() == 6);
    CHECK(arc.final_time().t == 20.0);
}
