#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace qbm::quad {

enum class Kernel { Sin, Cos };

struct QuadratureSpec {
    double rel_tol{1e-8};
    double abs_tol{1e-14};
    std::size_t max_half_periods{10000};
    int panel_order{15};  // Kronrod points per panel: 15, 21, 31, 41, 51 or 61
    int accel_depth{12};  // iterated Aitken levels
    // Known small-omega behavior f(omega) ~ omega^{-p}. Integrable against
    // sin for p < 2 and against cos for p < 1.
    double endpoint_exponent{0.0};

    // Throws DomainError when a field is out of range for the given kernel.
    void validate(Kernel kind) const;

    bool operator==(const QuadratureSpec&) const = default;
};

struct IntegralResult {
    double value{0.0};
    double err_estimate{0.0};
    std::size_t half_periods_used{0};
    bool converged{false};
    // Partial sums over [0, (k+1) pi / t]; kept for diagnostics.
    std::vector<double> partial_sums;
};

using Integrand = std::function<double(double)>;

/// int_0^inf f(omega) trig(omega t) d omega.
///
/// The substituted variable u = omega t is split into half periods
/// [k pi, (k+1) pi]. The first panel is mapped through u = pi s^q, which
/// removes the omega^{-p} endpoint singularity, and integrated on a dyadic
/// mesh toward s = 0; the remaining panels use adaptive Gauss-Kronrod. The
/// alternating partial sums are extrapolated by iterated Aitken over a
/// sliding window of 2*accel_depth+1 sums.
///
/// Returns converged == false when the budget runs out before the tolerance
/// is met. Throws NonConvergence when f fails a decay probe past the window
/// or the extrapolation is not finite, and DomainError for t <= 0.
IntegralResult integrate_oscillatory(const Integrand& f, Kernel kind, double t, const QuadratureSpec& spec = {});

/// Same machinery without the decay probe: f may tend to a nonzero constant
/// at infinity. The extrapolated alternating sums then give the Abel
/// (distributional) value, e.g. int_0^inf sin(omega t) d omega => 1/t.
IntegralResult integrate_zero_T_formal(const Integrand& f, Kernel kind, double t, const QuadratureSpec& spec = {});

/// int_{k0 pi / t}^inf f(omega) trig(omega t) d omega with f regular on the
/// whole range (no endpoint treatment). Abel-summed when `formal`.
IntegralResult integrate_oscillatory_tail(const Integrand& f, Kernel kind, double t, std::size_t first_half_period,
                                          const QuadratureSpec& spec = {}, bool formal = false);

/// Adaptive Gauss-Kronrod on a finite interval.
double integrate_interval(const Integrand& f, double a, double b, double rel_tol, double* err = nullptr,
                          int panel_order = 15);

/// Non-oscillatory int_a^inf f(omega) d omega for algebraically decaying f.
double integrate_to_infinity(const Integrand& f, double a, double rel_tol, double* err = nullptr);

/// int_0^a f(omega) d omega with f ~ omega^{e} near 0 (e > -1), via the same
/// graded substitution as the first oscillatory panel.
double integrate_endpoint_singular(const Integrand& f, double a, double exponent, double rel_tol, double* err = nullptr,
                                   int panel_order = 15);

/// Iterated Aitken delta-squared on a sequence of partial sums. Returns the
/// final extrapolated value and, through `previous`, the last entry of the
/// preceding column.
double iterated_aitken(const std::vector<double>& sums, int depth, double* previous = nullptr);

} // namespace qbm::quad
