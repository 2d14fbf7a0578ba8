#pragma once

#include "qbm/thermal.hpp"

namespace qbm::special {

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;
inline constexpr double pi = 3.14159265358979323846264338327950288;

/// Principal-value exponential integral Ei(x) for x > 0.
/// Throws DomainError for x <= 0 and OverflowError once Ei(x) leaves the
/// double range (x > ~716).
double exp_integral_ei(double x);

/// E1(x) = -Ei(-x) for x > 0.
double exp_integral_e1(double x);

/// e^{-x} Ei(x), finite for every x > 0.
double scaled_ei(double x);

/// e^{x} E1(x), finite for every x > 0.
double scaled_e1(double x);

/// V(x) = int_0^inf x^2 sin(u) / (x^2 + u^2) du
///      = (x/2) [e^{-x} Ei(x) + e^{x} E1(x)].
///
/// V(0) = 0, V(x) ~ x^2 (1 - gamma_E - ln x) for small x and
/// V(x) ~ 1 + 2/x^2 + 24/x^4 for large x. The function overshoots 1 near
/// x ~ 3.4 (maximum 1.1402) and approaches 1 from above.
double v_function(double x);

/// coth(hbar omega / 2 k_B T); exactly 1 when ctx.zero_T.
double coth_thermal(double omega, const ThermalContext& ctx);

/// cot(pi gamma / 2) / Gamma(gamma) on (-1, 1); 2/pi at gamma = 0.
double cot_over_gamma(double gamma);

/// Gamma(1 + gamma) on (-1, 1].
double gamma_one_plus(double gamma);

} // namespace qbm::special
