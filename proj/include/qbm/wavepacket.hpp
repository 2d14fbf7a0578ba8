#pragma once

#include <functional>
#include <optional>
#include <string>

#include "qbm/bath_models.hpp"
#include "qbm/diffusion_observables.hpp"
#include "qbm/oscillatory_quadrature.hpp"
#include "qbm/thermal.hpp"

namespace qbm {

// Two Gaussian position measurements separated by t. The initial width must
// be positive; the final one may be zero.
struct MeasurementSetup {
    double sigma1{1.0};
    double sigma2{0.0};
    double t{0.0};

    static MeasurementSetup make(double sigma1, double sigma2, double t);
};

struct JointGaussianParams {
    double sigma{1.0};
    double tau{1.0};
    double rho{0.0};
};

// The four contributions to w^2. The commutator is purely imaginary,
// [x(t1), x(t2)] = i C, so the uncertainty term -[x,x']^2 / 4 sigma1^2 is
// +C^2 / 4 sigma1^2 >= 0.
struct WidthTerms {
    double displacement{0.0};  // s(t)
    double initial{0.0};       // sigma1^2
    double uncertainty{0.0};   // C(t)^2 / (4 sigma1^2)
    double final{0.0};         // sigma2^2

    double total() const { return displacement + initial + uncertainty + final; }
};

enum class DominantTerm {
    Displacement,             // s(t) wins at long times
    LogarithmicDisplacement,  // zero-temperature Ohmic-type ln t growth
    UncertaintySpreading,     // C^2 / 4 sigma1^2 wins
    Bounded,                  // harmonic: nothing grows
};

std::string to_string(DominantTerm term);

/// w^2(t) = s(t) + sigma1^2 + C(t)^2 / (4 sigma1^2) + sigma2^2, assembled from
/// the exact msd and commutator.
Evaluation packet_width_sq(const BathModel& model, const ThermalContext& ctx, const MeasurementSetup& setup,
                           const quad::QuadratureSpec& spec = {});

WidthTerms packet_width_terms(const BathModel& model, const ThermalContext& ctx, const MeasurementSetup& setup,
                              const quad::QuadratureSpec& spec = {});

struct AsymptoticWidth {
    WidthTerms terms;
    DominantTerm dominant{DominantTerm::Displacement};
    double value() const { return terms.total(); }
};

/// Long-time w^2 from the asymptotic s(t) and C(t), with the term that
/// dominates as t grows.
AsymptoticWidth packet_width_asymptotic(const BathModel& model, const ThermalContext& ctx,
                                        const MeasurementSetup& setup);

/// sigma^2 = sigma1^2 + <x^2>, tau^2 = sigma2^2 + <x^2> + C^2/4 sigma1^2,
/// sigma tau rho = (1/2)<x(t1)x(t2) + x(t2)x(t1)>.
/// `equal_time_var` overrides <x^2>; when absent it is computed where finite
/// and DivergentObservable is thrown otherwise.
JointGaussianParams joint_gaussian_params(const BathModel& model, const ThermalContext& ctx,
                                          const MeasurementSetup& setup,
                                          std::optional<double> equal_time_var = std::nullopt,
                                          const quad::QuadratureSpec& spec = {});

double joint_density(const JointGaussianParams& params, double x1, double x2);

/// W(1,2) for measurement outcomes x1, x2.
double joint_density(const BathModel& model, const ThermalContext& ctx, const MeasurementSetup& setup, double x1,
                     double x2, std::optional<double> equal_time_var = std::nullopt,
                     const quad::QuadratureSpec& spec = {});

/// Numerical int int W(1,2) g(x1, x2) dx1 dx2 over a +-8 standard deviation
/// box, by nested adaptive Gauss-Kronrod.
double integrate_joint_density(const JointGaussianParams& params, const std::function<double(double, double)>& g,
                               double rel_tol = 1e-12);

} // namespace qbm
