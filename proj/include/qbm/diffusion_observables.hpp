#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qbm/bath_models.hpp"
#include "qbm/oscillatory_quadrature.hpp"
#include "qbm/thermal.hpp"

namespace qbm {

// A value together with its absolute error estimate (zero for closed forms).
struct Evaluation {
    double value{0.0};
    double err_estimate{0.0};
};

struct ObservableSeries {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> err_estimates;
    std::string meta;

    std::size_t size() const { return times.size(); }
    // Throws DomainError unless lengths match and times increase strictly.
    void check() const;
};

struct AsymptoteComparison {
    std::vector<double> times;
    std::vector<double> numeric;
    std::vector<double> asymptotic;
    std::vector<double> deviation;  // |numeric - asymptotic| / max(|asymptotic|, floor)
    double fitted_slope{0.0};       // log-log slope of `numeric` over the tail window
    double asymptotic_slope{0.0};   // same fit applied to `asymptotic`
    double max_tail_deviation{0.0};
};

// --------------------------------------------------------------------------
// Exact observables. Each is an integral over Im alpha(omega + i0+) against
// a kernel; the smooth part goes through oscillatory quadrature and the
// delta / delta' terms are added in closed form.
// --------------------------------------------------------------------------

/// Symmetrized correlation (1/2)<x(t)x(0) + x(0)x(t)>. Finite only for the
/// harmonic bath and for zero-temperature power laws with gamma < 0; every
/// other case throws DivergentObservable (infrared divergence).
Evaluation position_correlation(const BathModel& model, const ThermalContext& ctx, double t,
                                const quad::QuadratureSpec& spec = {});

/// Mean-square displacement s(t) = <[x(t) - x(0)]^2>; s(0) = 0.
Evaluation msd(const BathModel& model, const ThermalContext& ctx, double t, const quad::QuadratureSpec& spec = {});

/// ds/dt. The QED bath at m = 0 diverges like 1/t as t -> 0 at T > 0; this is
/// returned as-is and reflects mass renormalization, not a numerical defect.
Evaluation msd_rate(const BathModel& model, const ThermalContext& ctx, double t,
                    const quad::QuadratureSpec& spec = {});

/// Exact zero-temperature ds/dt from the V function (Ohmic, QED), the
/// bound-oscillator law (Harmonic) or zero (free particle). For QED at m = 0
/// the result 2 hbar tau_e / (pi M t) holds with 1/t read as a principal
/// value. Throws DomainError for the power-law bath.
double msd_rate_closed_zero_T(const BathModel& model, double t, double hbar = 1.0);

/// (hbar/m) coth(hbar b / 2kT) sin(b t), written directly.
double msd_rate_harmonic_closed(const Harmonic& model, const ThermalContext& ctx, double t);

/// (2kT/M)(t + tau_e coth(pi k T t / hbar)) at maximal coupling (m = 0);
/// 2 hbar tau_e / (pi M t) at zero temperature.
double msd_rate_qed_maximal_coupling(const Qed& model, const ThermalContext& ctx, double t);

/// Long-time ds/dt. Valid for t well beyond the bath time scales (m/zeta,
/// 1/b, m tau_e/(M - m)) and, at T > 0, beyond hbar/kT; not enforced.
double msd_rate_asymptotic(const BathModel& model, const ThermalContext& ctx, double t);

/// Long-time s(t). The zero-temperature logarithmic laws carry the Euler
/// constant inside the prefactor:
///   Ohmic: (2 hbar / pi zeta) (ln(zeta t / m) + gamma_E)
///   QED:   (2 hbar tau_e / pi M) (ln((M - m) t / m tau_e) + gamma_E)
/// Zero-temperature power laws with gamma < 0 are bound: s(t) tends to
/// 2<x^2> and the t^gamma term is the decaying correction below it.
double msd_asymptotic(const BathModel& model, const ThermalContext& ctx, double t);

/// C(t) with [x(0), x(t)] = i C(t); temperature independent.
Evaluation commutator_magnitude(const BathModel& model, double t, double hbar = 1.0,
                                const quad::QuadratureSpec& spec = {});

/// (hbar/M){t + tau_e (1 - exp(-(M - m) t / (m tau_e)))}.
double commutator_qed_closed(const Qed& model, double t, double hbar = 1.0);

/// Long-time C(t): hbar t^gamma / (m b^{1-gamma} Gamma(1+gamma)) for power
/// laws, hbar/zeta for Ohmic, hbar (t + tau_e)/M for QED, hbar t/M free.
double commutator_asymptotic(const BathModel& model, double t, double hbar = 1.0);

// --------------------------------------------------------------------------
// Series helpers
// --------------------------------------------------------------------------

enum class Spacing { Linear, Log };

std::vector<double> make_time_grid(double t_min, double t_max, std::size_t n, Spacing spacing);

/// Least-squares slope of log(value) against log(t) over the last
/// tail_fraction of the points.
double fit_anomalous_exponent(const ObservableSeries& series, double tail_fraction);

/// Least-squares slope of value against t over the whole series.
double fit_linear_drift(const ObservableSeries& series);

AsymptoteComparison compare_asymptote(const ObservableSeries& series, const std::vector<double>& asymptotic,
                                      double tail_fraction, double floor = 1e-300);

// Long-time log-log exponent of s (msd = true) or ds/dt. NaN where the law
// is not a power (zero-temperature logarithms, bound or frozen motion).
double expected_exponent(const BathModel& model, const ThermalContext& ctx, bool msd);

} // namespace qbm
