#include "qbm/oscillatory_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qbm/errors.hpp"
#include "qbm/special_functions.hpp"

namespace qbm::quad {

namespace {

using special::pi;
constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr unsigned max_bisection_depth = 18;

template <unsigned N>
double gauss_kronrod(const Integrand& f, double a, double b, double tol, double* err, double* l1)
{
    return boost::math::quadrature::gauss_kronrod<double, N>::integrate(f, a, b, max_bisection_depth, tol, err, l1);
}

double kronrod_panel(const Integrand& f, double a, double b, double tol, int order, double* err, double* l1)
{
    switch (order) {
    case 15: return gauss_kronrod<15>(f, a, b, tol, err, l1);
    case 21: return gauss_kronrod<21>(f, a, b, tol, err, l1);
    case 31: return gauss_kronrod<31>(f, a, b, tol, err, l1);
    case 41: return gauss_kronrod<41>(f, a, b, tol, err, l1);
    case 51: return gauss_kronrod<51>(f, a, b, tol, err, l1);
    case 61: return gauss_kronrod<61>(f, a, b, tol, err, l1);
    default: throw DomainError("panel_order must be one of 15, 21, 31, 41, 51, 61");
    }
}

// Panel tolerance relative to each panel; panels may cancel, so keep it well
// below the requested tolerance.
double panel_tolerance(const QuadratureSpec& spec) { return std::max(spec.rel_tol * 1e-2, 1e3 * eps); }

// Zeros of the kernel: sin -> k pi, cos -> (k - 1/2) pi; boundary(0) = 0.
double boundary(Kernel kind, std::size_t k)
{
    if (k == 0)
        return 0.0;
    return kind == Kernel::Sin ? static_cast<double>(k) * pi : (static_cast<double>(k) - 0.5) * pi;
}

struct PanelSum {
    double value{0.0};
    double err{0.0};
    double l1{0.0};
};

double singular_integral(const Integrand& f, double a, double exponent, double tol, int order, double* err_out,
                         double* l1_out)
{
    if (!(exponent > -1.0))
        throw DomainError("endpoint singularity is not integrable (exponent <= -1)");
    const double q = 1.0 / (1.0 + exponent);
    auto g = [&](double s) {
        const double u = a * std::pow(s, q);
        return f(u) * a * q * std::pow(s, q - 1.0);
    };
    double total = 0.0;
    double err = 0.0;
    double l1 = 0.0;
    double hi = 1.0;
    double last = 0.0;
    double before_last = 0.0;
    bool truncated = false;
    // Each dyadic panel [hi/2, hi] is mapped onto [1/2, 1] so that the
    // Kronrod error floor scales with the panel contribution.
    for (int level = 0; level < 2000; ++level) {
        const double scale = hi;
        auto gs = [&](double r) { return g(scale * r); };
        double e = 0.0;
        double panel_l1 = 0.0;
        const double v = scale * kronrod_panel(gs, 0.5, 1.0, tol, order, &e, &panel_l1);
        if (!std::isfinite(v)) {
            // f over/underflows this close to 0 (large q).
            truncated = true;
            break;
        }
        before_last = last;
        last = v;
        total += v;
        err += scale * e;
        l1 += scale * panel_l1;
        hi *= 0.5;
        if (level >= 4 && std::abs(last) <= 1e-3 * tol * std::abs(total))
            break;
        if (a * std::pow(0.5 * hi, q) < 1e-300) {
            truncated = true;
            break;
        }
    }
    if (truncated) {
        // After the substitution the integrand tends to a constant, so the
        // untouched [0, hi] carries about one more panel's worth, and panels
        // halve from level to level.
        total += last;
        err += std::abs(last - 0.5 * before_last);
    } else {
        // The untouched remainder is of the order of the last panel.
        err += std::abs(last);
    }
    if (err_out)
        *err_out = err;
    if (l1_out)
        *l1_out = l1;
    return total;
}

IntegralResult accelerate(const Integrand& f, Kernel kind, double t, const QuadratureSpec& spec, bool formal,
                          std::size_t first_half_period, bool endpoint)
{
    spec.validate(kind);
    if (!(t > 0.0) || !std::isfinite(t))
        throw DomainError("oscillatory integral requires t > 0");

    const auto trig = kind == Kernel::Sin ? static_cast<double (*)(double)>(std::sin)
                                          : static_cast<double (*)(double)>(std::cos);
    const Integrand h = [&](double u) { return f(u / t) * trig(u); };
    const double ptol = panel_tolerance(spec);

    IntegralResult result;
    PanelSum acc;
    std::size_t k = first_half_period;
    {
        double e = 0.0;
        double l1 = 0.0;
        double v = 0.0;
        if (endpoint) {
            const double exponent = (kind == Kernel::Sin ? 1.0 : 0.0) - spec.endpoint_exponent;
            v = singular_integral(h, boundary(kind, 1), exponent, ptol, spec.panel_order, &e, &l1);
            k = 1;
        } else {
            v = kronrod_panel(h, boundary(kind, k), boundary(kind, k + 1), ptol, spec.panel_order, &e, &l1);
            k += 1;
        }
        acc = {v, e, l1};
        result.partial_sums.push_back(acc.value);
    }

    const std::size_t window = 2 * static_cast<std::size_t>(spec.accel_depth) + 1;
    auto add_panel = [&] {
        double e = 0.0;
        double l1 = 0.0;
        const double v = kronrod_panel(h, boundary(kind, k), boundary(kind, k + 1), ptol, spec.panel_order, &e, &l1);
        acc.value += v;
        acc.err += e;
        acc.l1 += l1;
        result.partial_sums.push_back(acc.value);
        ++k;
    };

    double estimate = acc.value;
    double err = std::numeric_limits<double>::infinity();
    double previous_step_err = std::numeric_limits<double>::infinity();
    while (result.partial_sums.size() < window + 1)
        add_panel();

    for (;;) {
        const auto& s = result.partial_sums;
        const std::vector<double> last(s.end() - static_cast<std::ptrdiff_t>(window), s.end());
        const std::vector<double> shifted(s.end() - static_cast<std::ptrdiff_t>(window) - 1, s.end() - 1);
        double prev_col = 0.0;
        const double a1 = iterated_aitken(last, spec.accel_depth, &prev_col);
        const double a0 = iterated_aitken(shifted, spec.accel_depth);
        if (!std::isfinite(a1) || !std::isfinite(a0))
            throw NonConvergence("oscillatory integral: extrapolation table is not finite", estimate / t);

        // Two consecutive extrapolations must agree; a single window can
        // settle by accident before the sums reach their asymptotic regime.
        const double step_err = std::abs(a1 - a0) + std::abs(a1 - prev_col);
        err = std::max(step_err, std::abs(a1 - estimate) + previous_step_err) + acc.err + 64.0 * eps * acc.l1;
        previous_step_err = step_err;
        estimate = a1;
        const double target = std::max(spec.rel_tol * std::abs(a1), spec.abs_tol * t);
        if (err <= target) {
            result.converged = true;
            break;
        }
        if (k - first_half_period >= spec.max_half_periods)
            break;
        add_panel();
    }

    if (!formal) {
        const double w = boundary(kind, k) / t;
        const double near = std::abs(f(w));
        const double far = std::abs(f(1e6 * w));
        if (std::isfinite(near) && near > 0.0 && !(far <= 0.5 * near))
            throw NonConvergence("oscillatory integral: integrand does not decay at large omega "
                                 "(use the Abel-regularized variant)",
                                 estimate / t);
    }

    result.value = estimate / t;
    result.err_estimate = err / t;
    result.half_periods_used = k - first_half_period;
    return result;
}

} // namespace

void QuadratureSpec::validate(Kernel kind) const
{
    if (!(rel_tol > 0.0 && rel_tol < 1.0))
        throw DomainError("rel_tol must lie in (0, 1)");
    if (!(abs_tol >= 0.0))
        throw DomainError("abs_tol must be >= 0");
    if (max_half_periods < 1)
        throw DomainError("max_half_periods must be >= 1");
    if (accel_depth < 1 || accel_depth > 60)
        throw DomainError("accel_depth must lie in [1, 60]");
    switch (panel_order) {
    case 15: case 21: case 31: case 41: case 51: case 61: break;
    default: throw DomainError("panel_order must be one of 15, 21, 31, 41, 51, 61");
    }
    const double limit = kind == Kernel::Sin ? 2.0 : 1.0;
    if (!(endpoint_exponent < limit))
        throw DomainError(kind == Kernel::Sin ? "endpoint_exponent must be < 2 for a sine kernel"
                                              : "endpoint_exponent must be < 1 for a cosine kernel");
}

double iterated_aitken(const std::vector<double>& sums, int depth, double* previous)
{
    if (sums.empty())
        throw DomainError("iterated_aitken: empty sequence");
    std::vector<double> col = sums;
    std::vector<double> prev = sums;
    for (int level = 0; level < depth && col.size() >= 3; ++level) {
        std::vector<double> next(col.size() - 2);
        for (std::size_t i = 0; i + 2 < col.size(); ++i) {
            const double d1 = col[i + 1] - col[i];
            const double d2 = col[i + 2] - col[i + 1];
            const double den = d2 - d1;
            next[i] = (den == 0.0 || !std::isfinite(den)) ? col[i + 2] : col[i + 2] - d2 * d2 / den;
        }
        prev = std::move(col);
        col = std::move(next);
    }
    if (previous)
        *previous = prev.back();
    return col.back();
}

IntegralResult integrate_oscillatory(const Integrand& f, Kernel kind, double t, const QuadratureSpec& spec)
{
    return accelerate(f, kind, t, spec, false, 0, true);
}

IntegralResult integrate_zero_T_formal(const Integrand& f, Kernel kind, double t, const QuadratureSpec& spec)
{
    return accelerate(f, kind, t, spec, true, 0, true);
}

IntegralResult integrate_oscillatory_tail(const Integrand& f, Kernel kind, double t, std::size_t first_half_period,
                                          const QuadratureSpec& spec, bool formal)
{
    if (first_half_period == 0)
        return accelerate(f, kind, t, spec, formal, 0, true);
    return accelerate(f, kind, t, spec, formal, first_half_period, false);
}

double integrate_interval(const Integrand& f, double a, double b, double rel_tol, double* err, int panel_order)
{
    return kronrod_panel(f, a, b, rel_tol, panel_order, err, nullptr);
}

double integrate_to_infinity(const Integrand& f, double a, double rel_tol, double* err)
{
    thread_local boost::math::quadrature::exp_sinh<double> integrator;
    double e = 0.0;
    double l1 = 0.0;
    const double v = integrator.integrate(f, a, std::numeric_limits<double>::infinity(), rel_tol, &e, &l1);
    if (err)
        *err = e + 64.0 * eps * l1;
    return v;
}

double integrate_endpoint_singular(const Integrand& f, double a, double exponent, double rel_tol, double* err,
                                   int panel_order)
{
    return singular_integral(f, a, exponent, rel_tol, panel_order, err, nullptr);
}

} // namespace qbm::quad
