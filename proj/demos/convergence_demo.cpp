// Distance to the limit cycle after each period, from three initial conditions.
#include <cstdio>
#include <numbers>

#include <spikehybrid/limit_cycle.hpp>
#include <spikehybrid/pendulum_model.hpp>

using namespace spikehybrid;

int main() {
    const SystemParams p{0.5, 0.1, Dynamics::linear};
    const auto cycle = compute_cycle(p);
    std::printf("mu* = %.12f  T* = %.12f  max |q1| = %.12f\n", cycle.mu_star, cycle.period_T, cycle.max_amplitude);

    SolverConfig cfg;
    cfg.t_max = 60.0;
    cfg.j_max = 1000;
    const PendulumState starts[] = {{std::numbers::pi / 3, 2.0, Sign::plus},
                                    {std::numbers::pi / 4, -2.0, Sign::plus},
                                    {-std::numbers::pi / 6, 1.0, Sign::minus}};
    for (const auto& x0 : starts) {
        const auto arc = simulate(p, x0, cfg);
        std::printf("x0 = (%+.4f, %+.4f, %+d)\n", x0.q1, x0.q2, to_int(x0.sigma));
        for (double t = 0.0; t <= cfg.t_max; t += cycle.period_T) {
            const int j = segment_at_time(arc, t);
            const auto x = arc_eval(arc, {t, j});
            std::printf("  t = %6.2f  j = %2d  |x|_O = %.3e\n", t, j, distance_to_cycle(pendulum_state(x), cycle));
        }
    }
}
