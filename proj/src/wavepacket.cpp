#include "qbm/wavepacket.hpp"

#include <cmath>
#include <type_traits>
#include <variant>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qbm/errors.hpp"
#include "qbm/special_functions.hpp"

namespace qbm {

MeasurementSetup MeasurementSetup::make(double sigma1, double sigma2, double t)
{
    if (!(sigma1 > 0.0) || !std::isfinite(sigma1))
        throw DomainError("measurement: sigma1 must be > 0 (the initial width cannot vanish)");
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2))
        throw DomainError("measurement: sigma2 must be >= 0");
    if (!(t >= 0.0) || !std::isfinite(t))
        throw DomainError("measurement: t must be >= 0");
    return MeasurementSetup{sigma1, sigma2, t};
}

std::string to_string(DominantTerm term)
{
    switch (term) {
    case DominantTerm::Displacement: return "displacement";
    case DominantTerm::LogarithmicDisplacement: return "log-displacement";
    case DominantTerm::UncertaintySpreading: return "uncertainty";
    case DominantTerm::Bounded: return "bounded";
    }
    return "unknown";
}

WidthTerms packet_width_terms(const BathModel& model, const ThermalContext& ctx, const MeasurementSetup& setup,
                              const quad::QuadratureSpec& spec)
{
    const auto checked = MeasurementSetup::make(setup.sigma1, setup.sigma2, setup.t);
    WidthTerms w;
    w.initial = checked.sigma1 * checked.sigma1;
    w.final = checked.sigma2 * checked.sigma2;
    if (checked.t == 0.0)
        return w;
    w.displacement = msd(model, ctx, checked.t, spec).value;
    const double c = commutator_magnitude(model, checked.t, ctx.hbar, spec).value;
    w.uncertainty = c * c / (4.0 * w.initial);
    return w;
}

Evaluation packet_width_sq(const BathModel& model, const ThermalContext& ctx, const MeasurementSetup& setup,
                           const quad::QuadratureSpec& spec)
{
    const auto checked = MeasurementSetup::make(setup.sigma1, setup.sigma2, setup.t);
    const double s1 = checked.sigma1 * checked.sigma1;
    const double s2 = checked.sigma2 * checked.sigma2;
    if (checked.t == 0.0)
        return {s1 + s2, 0.0};
    const auto s = msd(model, ctx, checked.t, spec);
    const auto c = commutator_magnitude(model, checked.t, ctx.hbar, spec);
    const double value = s.value + s1 + c.value * c.value / (4.0 * s1) + s2;
    const double err = s.err_estimate + std::abs(c.value) * c.err_estimate / (2.0 * s1);
    return {value, err};
}

AsymptoticWidth packet_width_asymptotic(const BathModel& model, const ThermalContext& ctx,
                                        const MeasurementSetup& setup)
{
    const auto checked = MeasurementSetup::make(setup.sigma1, setup.sigma2, setup.t);
    if (!(checked.t > 0.0))
        throw DomainError("packet_width_asymptotic: t must be > 0");
    AsymptoticWidth out;
    auto& w = out.terms;
    w.initial = checked.sigma1 * checked.sigma1;
    w.final = checked.sigma2 * checked.sigma2;
    const double t = checked.t;
    const double c = commutator_asymptotic(model, t, ctx.hbar);
    w.uncertainty = c * c / (4.0 * w.initial);

    const auto* ohmic = std::get_if<Ohmic>(&model);
    const auto* power = std::get_if<PowerLaw>(&model);
    if (ctx.zero_T && ohmic) {
        // Leading log, without the Euler constant.
        w.displacement = 2.0 * ctx.hbar / (special::pi * ohmic->zeta) * std::log(ohmic->zeta * t / ohmic->m);
    } else if (ctx.zero_T && power && power->gamma == 0.0) {
        const double zeta = power->m * power->b;
        w.displacement = 2.0 * ctx.hbar / (special::pi * zeta) * std::log(power->b * t);
    } else {
        w.displacement = msd_asymptotic(model, ctx, t);
    }

    const double kT = ctx.kB * ctx.T;
    out.dominant = std::visit(
        [&](const auto& m) -> DominantTerm {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, Harmonic>) {
                return DominantTerm::Bounded;
            } else if constexpr (std::is_same_v<M, Ohmic>) {
                return ctx.zero_T ? DominantTerm::LogarithmicDisplacement : DominantTerm::Displacement;
            } else if constexpr (std::is_same_v<M, PowerLaw>) {
                if (!ctx.zero_T || m.gamma < 0.0)
                    return DominantTerm::Displacement;
                if (m.gamma == 0.0)
                    return DominantTerm::LogarithmicDisplacement;
                return DominantTerm::UncertaintySpreading;
            } else {
                // Free particle and QED: both s and C^2 grow like t^2 at T > 0;
                // their ratio is 8 pi sigma1^2 / lambda^2 = 4 M kT sigma1^2 / hbar^2.
                if (ctx.zero_T)
                    return DominantTerm::UncertaintySpreading;
                const double mass = m.M;
                const double thermal = kT / mass;
                const double quantum = ctx.hbar * ctx.hbar / (4.0 * mass * mass * w.initial);
                return thermal >= quantum ? DominantTerm::Displacement : DominantTerm::UncertaintySpreading;
            }
        },
        model);
    return out;
}

namespace {

// <x^2> where it is finite without regularization.
double finite_equal_time_variance(const BathModel& model, const ThermalContext& ctx, const quad::QuadratureSpec& spec)
{
    return position_correlation(model, ctx, 0.0, spec).value;
}

} // namespace

JointGaussianParams joint_gaussian_params(const BathModel& model, const ThermalContext& ctx,
                                          const MeasurementSetup& setup, std::optional<double> equal_time_var,
                                          const quad::QuadratureSpec& spec)
{
    const auto checked = MeasurementSetup::make(setup.sigma1, setup.sigma2, setup.t);
    double var = 0.0;
    if (equal_time_var) {
        if (!(*equal_time_var >= 0.0))
            throw DomainError("equal-time variance must be >= 0");
        var = *equal_time_var;
    } else {
        var = finite_equal_time_variance(model, ctx, spec);  // throws DivergentObservable
    }

    const double s1 = checked.sigma1 * checked.sigma1;
    const double s2 = checked.sigma2 * checked.sigma2;
    const double c = commutator_magnitude(model, checked.t, ctx.hbar, spec).value;
    // With a supplied variance the lagged correlation follows from s(t):
    // (1/2)<x(t1)x(t2) + x(t2)x(t1)> = <x^2> - s(t)/2.
    const double corr = equal_time_var ? var - 0.5 * msd(model, ctx, checked.t, spec).value
                                       : position_correlation(model, ctx, checked.t, spec).value;

    const double sigma_sq = s1 + var;
    const double tau_sq = s2 + var + c * c / (4.0 * s1);
    if (!(tau_sq > 0.0))
        throw DegenerateGaussian("second-measurement width vanishes");
    JointGaussianParams p;
    p.sigma = std::sqrt(sigma_sq);
    p.tau = std::sqrt(tau_sq);
    p.rho = corr / (p.sigma * p.tau);
    if (!(p.rho * p.rho < 1.0 - 1e-14))
        throw DegenerateGaussian("joint measurement distribution is degenerate (rho^2 >= 1)");
    return p;
}

double joint_density(const JointGaussianParams& p, double x1, double x2)
{
    const double one_minus = 1.0 - p.rho * p.rho;
    if (!(one_minus > 0.0) || !(p.sigma > 0.0) || !(p.tau > 0.0))
        throw DegenerateGaussian("joint measurement distribution is degenerate");
    const double a = x1 / p.sigma;
    const double b = x2 / p.tau;
    const double q = (a * a - 2.0 * p.rho * a * b + b * b) / (2.0 * one_minus);
    return std::exp(-q) / (2.0 * special::pi * p.sigma * p.tau * std::sqrt(one_minus));
}

double joint_density(const BathModel& model, const ThermalContext& ctx, const MeasurementSetup& setup, double x1,
                     double x2, std::optional<double> equal_time_var, const quad::QuadratureSpec& spec)
{
    return joint_density(joint_gaussian_params(model, ctx, setup, equal_time_var, spec), x1, x2);
}

double integrate_joint_density(const JointGaussianParams& p, const std::function<double(double, double)>& g,
                               double rel_tol)
{
    using boost::math::quadrature::gauss_kronrod;
    constexpr double box = 8.0;
    // Integrate x2 given x1 around the conditional mean, where the mass sits
    // even when rho is close to 1.
    const double cond_sd = p.tau * std::sqrt(1.0 - p.rho * p.rho);
    auto inner = [&](double x1) {
        const double mean = p.rho * p.tau / p.sigma * x1;
        auto h = [&](double x2) { return joint_density(p, x1, x2) * g(x1, x2); };
        return gauss_kronrod<double, 31>::integrate(h, mean - box * cond_sd, mean + box * cond_sd, 15, rel_tol);
    };
    return gauss_kronrod<double, 31>::integrate(inner, -box * p.sigma, box * p.sigma, 15, rel_tol);
}

} // namespace qbm
