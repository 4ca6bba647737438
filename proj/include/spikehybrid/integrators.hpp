#ifndef SPIKEHYBRID_INTEGRATORS_HPP
#define SPIKEHYBRID_INTEGRATORS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace spikehybrid {

template <std::size_t N>
using StateVector = std::array<double, N>;

namespace detail {

template <std::size_t N>
constexpr StateVector<N> axpy(const StateVector<N>& x, double h, const StateVector<N>& k) {
    StateVector<N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = x[i] + h * k[i];
    return out;
}

} // namespace detail

/// Classic fourth-order Runge-Kutta step.
template <std::size_t N, class F>
StateVector<N> rk4_step(F&& f, const StateVector<N>& x, double h) {
    const auto k1 = f(x);
    const auto k2 = f(detail::axpy(x, 0.5 * h, k1));
    const auto k3 = f(detail::axpy(x, 0.5 * h, k2));
    const auto k4 = f(detail::axpy(x, h, k3));
    StateVector<N> out{};
    for (std::size_t i = 0; i < N; ++i)
        out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

template <std::size_t N>
struct EmbeddedStep {
    StateVector<N> x;
    double error_norm; ///< scaled RMS error estimate; the step is acceptable when <= 1
};

/**
 * Dormand-Prince 5(4) step with the standard embedded error estimator.
 *
 * The error is measured component-wise against atol + rtol * max(|x|, |x_new|)
 * and combined as an RMS norm (Hairer, Norsett & Wanner, Solving ODEs I).
 */
template <std::size_t N, class F>
EmbeddedStep<N> dopri5_step(F&& f, const StateVector<N>& x, double h, double atol, double rtol) {
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                     a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                     b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                     e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    const auto k1 = f(x);
    StateVector<N> y{};
    for (std::size_t i = 0; i < N; ++i) y[i] = x[i] + h * a21 * k1[i];
    const auto k2 = f(y);
    for (std::size_t i = 0; i < N; ++i) y[i] = x[i] + h * (a31 * k1[i] + a32 * k2[i]);
    const auto k3 = f(y);
    for (std::size_t i = 0; i < N; ++i) y[i] = x[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    const auto k4 = f(y);
    for (std::size_t i = 0; i < N; ++i)
        y[i] = x[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    const auto k5 = f(y);
    for (std::size_t i = 0; i < N; ++i)
        y[i] = x[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const auto k6 = f(y);
    StateVector<N> out{};
    for (std::size_t i = 0; i < N; ++i)
        out[i] = x[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    const auto k7 = f(out);

    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double err =
            h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double scale = atol + rtol * std::max(std::abs(x[i]), std::abs(out[i]));
        sum += (err / scale) * (err / scale);
    }
    return {out, std::sqrt(sum / static_cast<double>(N))};
}

/// Step-size update for a fifth-order method after a trial step with the given error norm.
inline double dopri5_next_step(double h, double error_norm) {
    constexpr double safety = 0.9, min_factor = 0.2, max_factor = 5.0;
    if (error_norm == 0.0) return h * max_factor;
    const double factor = safety * std::pow(error_norm, -0.2);
    return h * std::clamp(factor, min_factor, max_factor);
}

} // namespace spikehybrid

#endif // SPIKEHYBRID_INTEGRATORS_HPP
