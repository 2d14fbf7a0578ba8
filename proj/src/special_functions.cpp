#include "qbm/special_functions.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>

#include "qbm/errors.hpp"

namespace qbm::special {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

// Positive zero of Ei.
constexpr double ei_root = 0.37250741078136663446199186658;

// Above this Ei is summed asymptotically; the smallest asymptotic term at the
// seam is ~ sqrt(2 pi x) e^{-x} < 1e-16.
constexpr double ei_asymptotic_seam = 40.0;

// Sum_{k>=1} x^k / (k k!), the regular part of Ei beyond gamma_E + ln x.
double ei_power_tail(double x)
{
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 500; ++k) {
        term *= x / k;
        const double contrib = term / k;
        sum += contrib;
        if (contrib < eps * sum)
            break;
    }
    return sum;
}

// Sum_{k>=1} (-1)^{k+1} x^k / (k k!), so that E1(x) = -gamma_E - ln x + this.
double e1_power_tail(double x)
{
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 200; ++k) {
        term *= -x / k;
        const double contrib = -term / k;
        sum += contrib;
        if (std::abs(contrib) < eps * std::abs(sum))
            break;
    }
    return sum;
}

// e^{-x} Ei(x) ~ (1/x) sum k!/x^k, truncated at the smallest term.
double ei_asymptotic_scaled(double x)
{
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double next = term * k / x;
        if (next > term)
            break;
        term = next;
        sum += term;
        if (term < eps * sum)
            break;
    }
    return sum / x;
}

// e^{x} E1(x) by the modified Lentz continued fraction; x > 1.
double e1_continued_fraction_scaled(double x)
{
    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < eps)
            return h;
    }
    throw NonConvergence("E1 continued fraction failed to converge", h);
}

// Ei near its root, where the series loses all relative accuracy:
// Ei(x) = int_{root}^{x} e^s / s ds.
double ei_near_root(double x)
{
    using boost::math::quadrature::gauss;
    return gauss<double, 20>::integrate([](double s) { return std::exp(s) / s; }, ei_root, x);
}

void require_positive(double x, const char* who)
{
    if (!(x > 0.0) || std::isnan(x))
        throw DomainError(std::string(who) + ": argument must be > 0");
}

} // namespace

double exp_integral_ei(double x)
{
    require_positive(x, "exp_integral_ei");
    if (std::abs(x - ei_root) < 0.1)
        return ei_near_root(x);
    if (x <= ei_asymptotic_seam)
        return euler_gamma + std::log(x) + ei_power_tail(x);
    // Split e^x to keep the product finite as long as possible.
    const double half = std::exp(0.5 * x);
    const double value = half * (half * ei_asymptotic_scaled(x));
    if (!std::isfinite(value))
        throw OverflowError("exp_integral_ei: result exceeds the double range");
    return value;
}

double exp_integral_e1(double x)
{
    require_positive(x, "exp_integral_e1");
    if (x <= 1.0)
        return -euler_gamma - std::log(x) + e1_power_tail(x);
    return std::exp(-x) * e1_continued_fraction_scaled(x);
}

double scaled_ei(double x)
{
    require_positive(x, "scaled_ei");
    if (x <= ei_asymptotic_seam)
        return std::exp(-x) * exp_integral_ei(x);
    return ei_asymptotic_scaled(x);
}

double scaled_e1(double x)
{
    require_positive(x, "scaled_e1");
    if (x <= 1.0)
        return std::exp(x) * exp_integral_e1(x);
    return e1_continued_fraction_scaled(x);
}

double v_function(double x)
{
    if (!(x >= 0.0))
        throw DomainError("v_function: argument must be >= 0");
    if (x == 0.0)
        return 0.0;
    if (x <= 1.0) {
        // The ln x pieces of Ei and E1 cancel; combine them analytically.
        const double s = -2.0 * std::sinh(x) * (euler_gamma + std::log(x)) +
                         std::exp(-x) * ei_power_tail(x) + std::exp(x) * e1_power_tail(x);
        return 0.5 * x * s;
    }
    if (x <= 700.0)
        return 0.5 * x * (scaled_ei(x) + scaled_e1(x));
    const double r = 1.0 / (x * x);
    return 1.0 + r * (2.0 + r * (24.0 + r * 720.0));
}

double coth_thermal(double omega, const ThermalContext& ctx)
{
    if (!(omega > 0.0))
        throw DomainError("coth_thermal: omega must be > 0");
    if (ctx.zero_T)
        return 1.0;
    const double y = omega * ctx.half_inverse_scale();
    if (y < 1e-2) {
        const double y2 = y * y;
        return 1.0 / y + y * (1.0 / 3.0 - y2 / 45.0);
    }
    return 1.0 + 2.0 / std::expm1(2.0 * y);
}

double cot_over_gamma(double gamma)
{
    if (!(gamma > -1.0 && gamma < 1.0))
        throw DomainError("cot_over_gamma: gamma must lie in (-1, 1)");
    if (std::abs(gamma) < 1e-4) {
        // gamma cot(pi gamma/2) / Gamma(1 + gamma), expanded to second order.
        const double c2 = 0.5 * euler_gamma * euler_gamma - pi * pi / 6.0;
        return (2.0 / pi) * (1.0 + gamma * (euler_gamma + gamma * c2));
    }
    const double half_angle = 0.5 * pi * gamma;
    return std::cos(half_angle) / (std::sin(half_angle) * std::tgamma(gamma));
}

double gamma_one_plus(double gamma)
{
    if (!(gamma > -1.0 && gamma <= 1.0))
        throw DomainError("gamma_one_plus: gamma must lie in (-1, 1]");
    return std::tgamma(1.0 + gamma);
}

} // namespace qbm::special
