#ifndef SPIKEHYBRID_SIGN_HPP
#define SPIKEHYBRID_SIGN_HPP

#include <vector>

namespace spikehybrid {

/// Logic sign variable, integer-coded so that set membership is exact.
enum class Sign : int { minus = -1, plus = 1 };

constexpr double to_double(Sign s) noexcept { return static_cast<double>(static_cast<int>(s)); }
constexpr int to_int(Sign s) noexcept { return static_cast<int>(s); }
constexpr Sign flip(Sign s) noexcept { return s == Sign::plus ? Sign::minus : Sign::plus; }

/// Decodes a stored component; anything positive maps to +1.
constexpr Sign sign_from_double(double v) noexcept { return v > 0.0 ? Sign::plus : Sign::minus; }

/// Strict parse used for user input: only exactly +1 and -1 are accepted.
constexpr bool is_exact_sign(double v) noexcept { return v == 1.0 || v == -1.0; }

/// Set-valued sign map: {+1} for z > 0, {-1} for z < 0, {+1, -1} at zero.
inline std::vector<Sign> sgn_set(double z) {
    if (z > 0.0) return {Sign::plus};
    if (z < 0.0) return {Sign::minus};
    return {Sign::plus, Sign::minus};
}

} // namespace spikehybrid

#endif // SPIKEHYBRID_SIGN_HPP
