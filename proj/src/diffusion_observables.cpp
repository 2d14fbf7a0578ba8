#include "qbm/diffusion_observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

#include "qbm/errors.hpp"
#include "qbm/special_functions.hpp"

namespace qbm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using special::coth_thermal;
using special::euler_gamma;
using special::pi;

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// Small-omega exponent p of the regular part, Im alpha ~ omega^{-p}.
// Ohmic and QED: 1/omega. Power law: omega^{-(1+gamma)}.
double regular_exponent(const BathModel& model)
{
    if (const auto* p = std::get_if<PowerLaw>(&model))
        return 1.0 + p->gamma;
    return 1.0;
}

// Models whose regular part tends to a nonzero constant times 1/omega at
// large omega, so that omega * Im alpha does not decay (QED at m = 0).
bool regular_part_saturates(const BathModel& model)
{
    const auto* q = std::get_if<Qed>(&model);
    return q && q->m == 0.0;
}

// lim_{omega->0} omega coth(hbar omega / 2kT): 2kT/hbar, or 0 at T = 0.
double thermal_slope(const ThermalContext& ctx)
{
    return ctx.zero_T ? 0.0 : 2.0 * ctx.kB * ctx.T / ctx.hbar;
}

void require_time(double t, bool allow_zero, const char* who)
{
    if (!(allow_zero ? t >= 0.0 : t > 0.0) || !std::isfinite(t))
        throw DomainError(std::string(who) + (allow_zero ? ": t must be >= 0" : ": t must be > 0"));
}

Evaluation from_result(const quad::IntegralResult& r, double scale, const char* who)
{
    if (!r.converged)
        throw NonConvergence(std::string(who) + ": quadrature did not reach the requested tolerance",
                             scale * r.value);
    return {scale * r.value, std::abs(scale) * r.err_estimate};
}

quad::QuadratureSpec with_exponent(quad::QuadratureSpec spec, double p)
{
    spec.endpoint_exponent = p;
    return spec;
}

} // namespace

// ------------------------------ correlation ----------------------------------

Evaluation position_correlation(const BathModel& model, const ThermalContext& ctx, double t,
                                const quad::QuadratureSpec& spec)
{
    require_time(t, true, "position_correlation");
    if (const auto* h = std::get_if<Harmonic>(&model)) {
        const double var = ctx.hbar / (2.0 * h->m * h->b) * coth_thermal(h->b, ctx);
        return {var * std::cos(h->b * t), 0.0};
    }
    const auto* p = std::get_if<PowerLaw>(&model);
    if (!p || !ctx.zero_T || !(p->gamma < 0.0))
        throw DivergentObservable("position correlation diverges for " + model_name(model) +
                                  (ctx.zero_T ? "" : " at finite temperature") +
                                  " (unbound particle); use msd instead");

    // Zero-temperature power law with gamma < 0: Im alpha ~ omega^{-(1+gamma)}
    // is integrable against cos.
    const auto spectrum = im_alpha_boundary(model);
    const double scale = ctx.hbar / pi;
    const quad::Integrand f = [&](double w) { return spectrum.regular(w); };
    if (t == 0.0) {
        double err = 0.0;
        // Split at the bath scale: singular piece plus algebraic tail.
        const double a = p->b;
        double e1 = 0.0;
        const double head =
            quad::integrate_endpoint_singular(f, a, -(1.0 + p->gamma), spec.rel_tol * 1e-2, &e1, spec.panel_order);
        const double tail = quad::integrate_to_infinity(f, a, spec.rel_tol * 1e-2, &err);
        return {scale * (head + tail), scale * (e1 + err)};
    }
    const auto r = quad::integrate_oscillatory(f, quad::Kernel::Cos, t, with_exponent(spec, regular_exponent(model)));
    return from_result(r, scale, "position_correlation");
}

// ---------------------------------- msd --------------------------------------

Evaluation msd(const BathModel& model, const ThermalContext& ctx, double t, const quad::QuadratureSpec& spec)
{
    require_time(t, true, "msd");
    if (t == 0.0)
        return {0.0, 0.0};

    const auto spectrum = im_alpha_boundary(model);
    const double two_hbar_over_pi = 2.0 * ctx.hbar / pi;

    // delta'(omega) against (2hbar/pi) coth (1 - cos omega t): half weight times
    // the slope at 0, i.e. -(c/2) (2hbar/pi) (2kT/hbar) t^2 / 2 = (kT/M) t^2.
    double value = -0.5 * spectrum.delta_prime_coeff * two_hbar_over_pi * thermal_slope(ctx) * 0.5 * t * t;
    double err = 0.0;

    for (const auto& pair : spectrum.delta_pairs) {
        const double w0 = pair.frequency;
        value += two_hbar_over_pi * pair.weight * coth_thermal(w0, ctx) * (1.0 - std::cos(w0 * t));
    }

    if (spectrum.has_regular_part()) {
        if (regular_part_saturates(model))
            throw DivergentObservable("msd diverges logarithmically for the QED bath at maximal coupling (m = 0)");

        const quad::Integrand F = [&](double w) { return spectrum.regular(w) * coth_thermal(w, ctx); };
        // F ~ omega^{-p}: p = p_reg (+1 from coth at T > 0).
        const double p = regular_exponent(model) + (ctx.zero_T ? 0.0 : 1.0);
        const double tol = spec.rel_tol * 1e-2;

        // u = omega t. [0, 3pi/2]: F (1 - cos u), integrand ~ u^{2-p}.
        constexpr std::size_t split_panel = 2;  // cos zero at 3pi/2
        const double u_split = 1.5 * pi;
        const quad::Integrand head_integrand = [&](double u) {
            const double s = std::sin(0.5 * u);
            return F(u / t) * 2.0 * s * s;
        };
        double e_head = 0.0;
        const double head =
            quad::integrate_endpoint_singular(head_integrand, u_split, 2.0 - p, tol, &e_head, spec.panel_order) / t;

        // [A, inf): int F - int F cos(omega t).
        const double a = u_split / t;
        double e_flat = 0.0;
        const double flat = quad::integrate_to_infinity(F, a, tol, &e_flat);
        const auto osc = quad::integrate_oscillatory_tail(F, quad::Kernel::Cos, t, split_panel, spec);
        if (!osc.converged)
            throw NonConvergence("msd: quadrature did not reach the requested tolerance",
                                 value + two_hbar_over_pi * (head + flat - osc.value));

        value += two_hbar_over_pi * (head + flat - osc.value);
        err += two_hbar_over_pi * (e_head / t + e_flat + osc.err_estimate);
    }
    return {value, err};
}

// -------------------------------- msd rate -----------------------------------

Evaluation msd_rate(const BathModel& model, const ThermalContext& ctx, double t, const quad::QuadratureSpec& spec)
{
    require_time(t, false, "msd_rate");
    const auto spectrum = im_alpha_boundary(model);
    const double two_hbar_over_pi = 2.0 * ctx.hbar / pi;

    // delta' against (2hbar/pi) omega coth sin(omega t): slope (2hbar/pi)(2kT/hbar) t.
    double value = -0.5 * spectrum.delta_prime_coeff * two_hbar_over_pi * thermal_slope(ctx) * t;
    double err = 0.0;

    for (const auto& pair : spectrum.delta_pairs) {
        const double w0 = pair.frequency;
        value += two_hbar_over_pi * pair.weight * w0 * coth_thermal(w0, ctx) * std::sin(w0 * t);
    }

    if (spectrum.has_regular_part()) {
        const quad::Integrand f = [&](double w) { return spectrum.regular(w) * w * coth_thermal(w, ctx); };
        // f ~ omega^{-p}: p_reg - 1 (the omega factor) + 1 at T > 0 (coth).
        const double p = regular_exponent(model) - 1.0 + (ctx.zero_T ? 0.0 : 1.0);
        const auto s = with_exponent(spec, p);
        const auto r = regular_part_saturates(model) ? quad::integrate_zero_T_formal(f, quad::Kernel::Sin, t, s)
                                                     : quad::integrate_oscillatory(f, quad::Kernel::Sin, t, s);
        const auto part = from_result(r, two_hbar_over_pi, "msd_rate");
        value += part.value;
        err += part.err_estimate;
    }
    return {value, err};
}

double msd_rate_harmonic_closed(const Harmonic& h, const ThermalContext& ctx, double t)
{
    return ctx.hbar / h.m * coth_thermal(h.b, ctx) * std::sin(h.b * t);
}

double msd_rate_qed_maximal_coupling(const Qed& q, const ThermalContext& ctx, double t)
{
    require_time(t, false, "msd_rate_qed_maximal_coupling");
    if (q.m != 0.0)
        throw DomainError("msd_rate_qed_maximal_coupling: requires bare mass m = 0");
    if (ctx.zero_T)
        return 2.0 * ctx.hbar * q.tau_e / (pi * q.M * t);
    const double kT = ctx.kB * ctx.T;
    const double x = pi * kT * t / ctx.hbar;
    const double coth = x < 1e-2 ? 1.0 / x + x / 3.0 : 1.0 + 2.0 / std::expm1(2.0 * x);
    return 2.0 * kT / q.M * (t + q.tau_e * coth);
}

double msd_rate_closed_zero_T(const BathModel& model, double t, double hbar)
{
    require_time(t, false, "msd_rate_closed_zero_T");
    return std::visit(
        overloaded{
            [&](const Ohmic& o) {
                return 2.0 * hbar / (pi * o.zeta * t) * special::v_function(o.zeta * t / o.m);
            },
            [&](const PowerLaw&) -> double {
                throw DomainError("msd_rate_closed_zero_T: no closed form for the power-law bath; use msd_rate");
            },
            [&](const Harmonic& h) { return hbar / h.m * std::sin(h.b * t); },
            [&](const Qed& q) {
                if (q.m == q.M)
                    return 0.0;
                const double prefactor = 2.0 * hbar * q.tau_e / (pi * q.M * t);
                if (q.m == 0.0)
                    return prefactor;
                return prefactor * special::v_function((q.M - q.m) * t / (q.m * q.tau_e));
            },
            [](const FreeParticle&) { return 0.0; },
        },
        model);
}

// ------------------------------- asymptotics ---------------------------------

double msd_rate_asymptotic(const BathModel& model, const ThermalContext& ctx, double t)
{
    require_time(t, false, "msd_rate_asymptotic");
    const double kT = ctx.kB * ctx.T;
    const double hbar = ctx.hbar;
    return std::visit(
        overloaded{
            [&](const Ohmic& o) { return ctx.zero_T ? 2.0 * hbar / (pi * o.zeta * t) : 2.0 * kT / o.zeta; },
            [&](const PowerLaw& p) {
                const double mb = p.m * std::pow(p.b, 1.0 - p.gamma);
                if (ctx.zero_T)
                    return hbar * special::cot_over_gamma(p.gamma) / mb * std::pow(t, p.gamma - 1.0);
                return 2.0 * kT / (mb * special::gamma_one_plus(p.gamma)) * std::pow(t, p.gamma);
            },
            [](const Harmonic&) { return 0.0; },
            [&](const Qed& q) {
                const double tau = q.m < q.M ? q.tau_e : 0.0;
                if (ctx.zero_T)
                    return 2.0 * hbar * tau / (pi * q.M * t);
                return 2.0 * kT / q.M * (t + tau);
            },
            [&](const FreeParticle& f) { return ctx.zero_T ? 0.0 : 2.0 * kT * t / f.M; },
        },
        model);
}

double msd_asymptotic(const BathModel& model, const ThermalContext& ctx, double t)
{
    require_time(t, false, "msd_asymptotic");
    const double kT = ctx.kB * ctx.T;
    const double hbar = ctx.hbar;
    auto log_law = [&](double prefactor, double rate) { return prefactor * (std::log(rate * t) + euler_gamma); };
    return std::visit(
        overloaded{
            [&](const Ohmic& o) {
                if (ctx.zero_T)
                    return log_law(2.0 * hbar / (pi * o.zeta), o.zeta / o.m);
                return 2.0 * kT * t / o.zeta;
            },
            [&](const PowerLaw& p) {
                const double mb = p.m * std::pow(p.b, 1.0 - p.gamma);
                if (!ctx.zero_T)
                    return 2.0 * kT / (mb * std::tgamma(2.0 + p.gamma)) * std::pow(t, 1.0 + p.gamma);
                if (std::abs(p.gamma) < 1e-8)
                    return log_law(2.0 * hbar / (pi * mb), p.b);
                // hbar cot(pi g/2) / (Gamma(1+g) m b^{1-g}) t^g; Gamma(1+g) = g Gamma(g).
                const double power = hbar * special::cot_over_gamma(p.gamma) / (p.gamma * mb) * std::pow(t, p.gamma);
                if (p.gamma > 0.0)
                    return power;
                // Bound: s -> 2<x^2> = 2 hbar / (m b (1-g) sin(pi |g| / (1-g))).
                const double plateau =
                    2.0 * hbar / (p.m * p.b * (1.0 - p.gamma) * std::sin(-pi * p.gamma / (1.0 - p.gamma)));
                return plateau + power;
            },
            [&](const Harmonic& h) { return hbar / (h.m * h.b) * coth_thermal(h.b, ctx); },
            [&](const Qed& q) -> double {
                if (!ctx.zero_T) {
                    const double tau = q.m < q.M ? q.tau_e : 0.0;
                    return kT / q.M * t * t + 2.0 * kT * tau / q.M * t;
                }
                if (q.m == q.M)
                    return 0.0;
                if (q.m == 0.0)
                    throw DivergentObservable("msd diverges for the QED bath at maximal coupling (m = 0)");
                return log_law(2.0 * hbar * q.tau_e / (pi * q.M), (q.M - q.m) / (q.m * q.tau_e));
            },
            [&](const FreeParticle& f) { return kT / f.M * t * t; },
        },
        model);
}

// ------------------------------- commutator ----------------------------------

Evaluation commutator_magnitude(const BathModel& model, double t, double hbar, const quad::QuadratureSpec& spec)
{
    require_time(t, true, "commutator_magnitude");
    if (!(hbar > 0.0))
        throw DomainError("commutator_magnitude: hbar must be > 0");
    if (t == 0.0)
        return {0.0, 0.0};

    const auto spectrum = im_alpha_boundary(model);
    const double two_hbar_over_pi = 2.0 * hbar / pi;
    // delta' against (2hbar/pi) sin(omega t): slope (2hbar/pi) t.
    double value = -0.5 * spectrum.delta_prime_coeff * two_hbar_over_pi * t;
    double err = 0.0;
    for (const auto& pair : spectrum.delta_pairs)
        value += two_hbar_over_pi * pair.weight * std::sin(pair.frequency * t);

    if (spectrum.has_regular_part()) {
        const quad::Integrand f = [&](double w) { return spectrum.regular(w); };
        const auto r =
            quad::integrate_oscillatory(f, quad::Kernel::Sin, t, with_exponent(spec, regular_exponent(model)));
        const auto part = from_result(r, two_hbar_over_pi, "commutator_magnitude");
        value += part.value;
        err += part.err_estimate;
    }
    return {value, err};
}

double commutator_qed_closed(const Qed& q, double t, double hbar)
{
    require_time(t, true, "commutator_qed_closed");
    if (q.m == q.M)
        return hbar * t / q.M;
    // 1 - e^{-x} via expm1; at m = 0 the exponential vanishes for every t > 0.
    const double rise = q.m == 0.0 ? (t > 0.0 ? 1.0 : 0.0) : -std::expm1(-(q.M - q.m) * t / (q.m * q.tau_e));
    return hbar / q.M * (t + q.tau_e * rise);
}

double commutator_asymptotic(const BathModel& model, double t, double hbar)
{
    require_time(t, true, "commutator_asymptotic");
    return std::visit(overloaded{
                          [&](const Ohmic& o) { return hbar / o.zeta; },
                          [&](const PowerLaw& p) {
                              const double mb = p.m * std::pow(p.b, 1.0 - p.gamma);
                              return hbar / (mb * special::gamma_one_plus(p.gamma)) * std::pow(t, p.gamma);
                          },
                          [&](const Harmonic& h) { return hbar / (h.m * h.b) * std::sin(h.b * t); },
                          [&](const Qed& q) {
                              const double tau = q.m < q.M ? q.tau_e : 0.0;
                              return hbar / q.M * (t + tau);
                          },
                          [&](const FreeParticle& f) { return hbar * t / f.M; },
                      },
                      model);
}

// --------------------------------- series ------------------------------------

void ObservableSeries::check() const
{
    if (values.size() != times.size() || err_estimates.size() != times.size())
        throw DomainError("ObservableSeries: times, values and err_estimates differ in length");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0.0))
            throw DomainError("ObservableSeries: times must be positive");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw DomainError("ObservableSeries: times must increase strictly");
    }
}

std::vector<double> make_time_grid(double t_min, double t_max, std::size_t n, Spacing spacing)
{
    if (!(t_min > 0.0) || !(t_max > t_min) || n < 2)
        throw DomainError("time grid requires 0 < t_min < t_max and n >= 2");
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(n - 1);
        grid[i] = spacing == Spacing::Linear ? t_min + (t_max - t_min) * f
                                             : t_min * std::pow(t_max / t_min, f);
    }
    grid.front() = t_min;
    grid.back() = t_max;
    return grid;
}

namespace {

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0)
        throw InsufficientData("slope fit needs distinct abscissae");
    return sxy / sxx;
}

std::size_t tail_start(std::size_t n, double tail_fraction)
{
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
        throw DomainError("tail_fraction must lie in (0, 1]");
    const auto count = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n) - 1e-9));
    if (count < 8)
        throw InsufficientData("exponent fit needs at least 8 points in the tail window");
    return n - count;
}

double log_log_slope(const std::vector<double>& t, const std::vector<double>& v, std::size_t first)
{
    std::vector<double> x, y;
    for (std::size_t i = first; i < t.size(); ++i) {
        if (!(v[i] > 0.0))
            throw NonPositiveValues("exponent fit needs strictly positive values in the tail window");
        x.push_back(std::log(t[i]));
        y.push_back(std::log(v[i]));
    }
    return least_squares_slope(x, y);
}

} // namespace

double fit_anomalous_exponent(const ObservableSeries& series, double tail_fraction)
{
    series.check();
    const std::size_t first = tail_start(series.size(), tail_fraction);
    return log_log_slope(series.times, series.values, first);
}

double fit_linear_drift(const ObservableSeries& series)
{
    series.check();
    if (series.size() < 2)
        throw InsufficientData("drift fit needs at least 2 points");
    return least_squares_slope(series.times, series.values);
}

AsymptoteComparison compare_asymptote(const ObservableSeries& series, const std::vector<double>& asymptotic,
                                      double tail_fraction, double floor)
{
    series.check();
    if (asymptotic.size() != series.size())
        throw DomainError("compare_asymptote: asymptotic values must match the series length");
    AsymptoteComparison c;
    c.times = series.times;
    c.numeric = series.values;
    c.asymptotic = asymptotic;
    const std::size_t first = tail_start(series.size(), tail_fraction);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double d = std::abs(series.values[i] - asymptotic[i]) / std::max(std::abs(asymptotic[i]), floor);
        c.deviation.push_back(d);
        if (i >= first)
            c.max_tail_deviation = std::max(c.max_tail_deviation, d);
    }
    c.fitted_slope = log_log_slope(series.times, series.values, first);
    c.asymptotic_slope = log_log_slope(series.times, asymptotic, first);
    return c;
}

double expected_exponent(const BathModel& model, const ThermalContext& ctx, bool for_msd)
{
    const double shift = for_msd ? 1.0 : 0.0;
    return std::visit(overloaded{
                          [&](const Ohmic&) { return ctx.zero_T ? (for_msd ? nan : -1.0) : shift; },
                          [&](const PowerLaw& p) {
                              if (!ctx.zero_T)
                                  return p.gamma + shift;
                              if (for_msd && p.gamma == 0.0)
                                  return nan;
                              return p.gamma - 1.0 + shift;
                          },
                          [](const Harmonic&) { return nan; },
                          [&](const Qed& q) {
                              if (!ctx.zero_T)
                                  return 1.0 + shift;
                              if (q.m == q.M || for_msd)
                                  return nan;
                              return -1.0;
                          },
                          [&](const FreeParticle&) { return ctx.zero_T ? nan : 1.0 + shift; },
                      },
                      model);
}

} // namespace qbm
