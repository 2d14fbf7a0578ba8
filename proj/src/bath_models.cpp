#include "qbm/bath_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

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

using special::pi;

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw DomainError(what);
}

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

// Boundary values z = omega + i0 arrive with Im z == 0; pin the sign of the
// zero so that arg(-i z) = -pi/2 sign(omega) on the principal branch.
Complex minus_i_times(Complex z)
{
    const double im = z.imag() == 0.0 ? 0.0 : z.imag();
    return {im, -z.real()};
}

void require_upper_half_plane(Complex z, const char* who)
{
    if (z.imag() < 0.0 || std::isnan(z.imag()) || std::isnan(z.real()))
        throw DomainError(std::string(who) + ": requires Im z >= 0");
}

Complex power_law_kernel(double gamma, double b, double m, Complex z)
{
    const Complex w = minus_i_times(z);
    if (w == Complex{0.0, 0.0})
        throw PoleError("power-law kernel evaluated at z = 0");
    return m * std::pow(b, 1.0 - gamma) * std::pow(w, gamma);
}

Complex harmonic_kernel(double m, double b, Complex z)
{
    // Formal kernel m b^2 / (-i z) reproducing alpha = 1/(-m z^2 + m b^2).
    const Complex w = minus_i_times(z);
    if (w == Complex{0.0, 0.0})
        throw PoleError("harmonic kernel evaluated at z = 0");
    return m * b * b / w;
}

Complex qed_kernel(const Qed& q, Complex z)
{
    // (M - m)^2 z / (M tau_e z + i (M - m)), the cutoff form with Omega eliminated.
    const double d = q.M - q.m;
    if (d == 0.0)
        return {0.0, 0.0};
    return d * d * z / (q.M * q.tau_e * z + Complex{0.0, d});
}

// Re mu(z) straight from raw parameters, so out-of-range power laws can be
// probed without constructing a model.
Complex raw_kernel(const KernelParameters& p, Complex z)
{
    if (p.kind == "ohmic")
        return {p.zeta, 0.0};
    if (p.kind == "power-law")
        return power_law_kernel(p.gamma, p.b, p.m, z);
    if (p.kind == "harmonic")
        return harmonic_kernel(p.m, p.b, z);
    if (p.kind == "qed")
        return qed_kernel(Qed{p.M, p.m, p.tau_e}, z);
    if (p.kind == "free")
        return {0.0, 0.0};
    throw DomainError("unknown model kind '" + p.kind + "'");
}

} // namespace

// ------------------------------- constructors --------------------------------

Ohmic Ohmic::make(double zeta, double m)
{
    require(positive_finite(zeta), "ohmic: zeta must be > 0");
    require(positive_finite(m), "ohmic: m must be > 0");
    return Ohmic{zeta, m};
}

PowerLaw PowerLaw::make(double gamma, double b, double m)
{
    if (gamma == -1.0)
        throw DomainError("power-law: gamma = -1 is the harmonically bound particle; use model.kind = harmonic");
    if (gamma == 1.0)
        throw DomainError("power-law: gamma = +1 is a pure mass shift; use model.kind = qed or free");
    require(gamma > -1.0 && gamma < 1.0,
            "power-law: gamma must satisfy -1 < gamma < 1 (positive-real kernel)");
    require(positive_finite(b), "power-law: b must be > 0");
    require(positive_finite(m), "power-law: m must be > 0");
    return PowerLaw{gamma, b, m};
}

Harmonic Harmonic::make(double m, double b)
{
    require(positive_finite(m), "harmonic: m must be > 0");
    require(positive_finite(b), "harmonic: b must be > 0");
    return Harmonic{m, b};
}

Qed Qed::make(double M, double m, double tau_e)
{
    require(positive_finite(M), "qed: M must be > 0");
    require(m >= 0.0 && m <= M, "qed: bare mass m must satisfy 0 <= m <= M");
    require(positive_finite(tau_e), "qed: tau_e must be > 0");
    return Qed{M, m, tau_e};
}

FreeParticle FreeParticle::make(double M)
{
    require(positive_finite(M), "free: M must be > 0");
    return FreeParticle{M};
}

std::string model_name(const BathModel& model)
{
    return std::visit(overloaded{
                          [](const Ohmic&) { return std::string("ohmic"); },
                          [](const PowerLaw&) { return std::string("power-law"); },
                          [](const Harmonic&) { return std::string("harmonic"); },
                          [](const Qed&) { return std::string("qed"); },
                          [](const FreeParticle&) { return std::string("free"); },
                      },
                      model);
}

// --------------------------------- kernels -----------------------------------

Complex mu_tilde(const BathModel& model, Complex z)
{
    require_upper_half_plane(z, "mu_tilde");
    return std::visit(overloaded{
                          [](const Ohmic& o) { return Complex{o.zeta, 0.0}; },
                          [&](const PowerLaw& p) { return power_law_kernel(p.gamma, p.b, p.m, z); },
                          [&](const Harmonic& h) { return harmonic_kernel(h.m, h.b, z); },
                          [&](const Qed& q) { return qed_kernel(q, z); },
                          [](const FreeParticle&) { return Complex{0.0, 0.0}; },
                      },
                      model);
}

Complex qed_mu_tilde_cutoff_form(const Qed& q, Complex z)
{
    require_upper_half_plane(z, "qed_mu_tilde_cutoff_form");
    const double omega_c = q.cutoff();
    return q.M * q.tau_e * z * omega_c * omega_c / (z + Complex{0.0, omega_c});
}

Complex qed_susceptibility_cutoff_form(const Qed& q, Complex z)
{
    require_upper_half_plane(z, "qed_susceptibility_cutoff_form");
    const double omega_c = q.cutoff();
    const Complex i{0.0, 1.0};
    return (z + i * omega_c) / (-q.m * z * z * z - i * q.M * omega_c * z * z);
}

Complex susceptibility(const BathModel& model, Complex z)
{
    require_upper_half_plane(z, "susceptibility");
    const Complex i{0.0, 1.0};
    auto invert = [](Complex denom) {
        if (denom == Complex{0.0, 0.0})
            throw PoleError("susceptibility evaluated on a pole");
        return 1.0 / denom;
    };
    return std::visit(
        overloaded{
            [&](const Ohmic& o) { return invert(-o.m * z * z - i * z * o.zeta); },
            [&](const PowerLaw& p) {
                return invert(-p.m * z * z - i * z * power_law_kernel(p.gamma, p.b, p.m, z));
            },
            [&](const Harmonic& h) {
                if (z.imag() == 0.0 && std::abs(std::abs(z.real()) - h.b) <= 1e-14 * h.b)
                    throw PoleError("harmonic susceptibility has poles at z = +-b");
                return invert(h.m * (h.b * h.b - z * z));
            },
            [&](const Qed& q) {
                const double d = q.M - q.m;
                const Complex num = d - i * q.M * z * q.tau_e;
                return num * invert(-q.M * z * z * (d - i * q.m * z * q.tau_e));
            },
            [&](const FreeParticle& f) { return -invert(f.M * z * z); },
        },
        model);
}

SpectralDecomposition im_alpha_boundary(const BathModel& model)
{
    return std::visit(
        overloaded{
            [](const Ohmic& o) {
                SpectralDecomposition s;
                s.regular = [zeta = o.zeta, m = o.m](double w) {
                    return zeta / (w * (m * m * w * w + zeta * zeta));
                };
                return s;
            },
            [](const PowerLaw& p) {
                SpectralDecomposition s;
                const double c = std::cos(0.5 * pi * p.gamma);
                const double two_s = 2.0 * std::sin(0.5 * pi * p.gamma);
                s.regular = [=, b = p.b, m = p.m, e = 1.0 - p.gamma](double w) {
                    const double r = std::pow(w / b, e);
                    return c / (m * w * w * (r + 1.0 / r + two_s));
                };
                return s;
            },
            [](const Harmonic& h) {
                SpectralDecomposition s;
                s.delta_pairs.push_back({h.b, pi / (2.0 * h.m * h.b)});
                return s;
            },
            [](const Qed& q) {
                SpectralDecomposition s;
                s.delta_prime_coeff = -pi / q.M;
                const double d = q.M - q.m;
                if (d > 0.0) {
                    s.regular = [d, M = q.M, m = q.m, tau = q.tau_e](double w) {
                        const double mw = m * w * tau;
                        return d * d * tau / (M * w * (d * d + mw * mw));
                    };
                }
                return s;
            },
            [](const FreeParticle& f) {
                SpectralDecomposition s;
                s.delta_prime_coeff = -pi / f.M;
                return s;
            },
        },
        model);
}

// -------------------------------- validation ---------------------------------

KernelParameters kernel_parameters(const BathModel& model)
{
    return std::visit(overloaded{
                          [](const Ohmic& o) {
                              KernelParameters k;
                              k.kind = "ohmic";
                              k.zeta = o.zeta;
                              k.m = o.m;
                              return k;
                          },
                          [](const PowerLaw& p) {
                              KernelParameters k;
                              k.kind = "power-law";
                              k.gamma = p.gamma;
                              k.b = p.b;
                              k.m = p.m;
                              return k;
                          },
                          [](const Harmonic& h) {
                              KernelParameters k;
                              k.kind = "harmonic";
                              k.m = h.m;
                              k.b = h.b;
                              return k;
                          },
                          [](const Qed& q) {
                              KernelParameters k;
                              k.kind = "qed";
                              k.M = q.M;
                              k.m = q.m;
                              k.tau_e = q.tau_e;
                              return k;
                          },
                          [](const FreeParticle& f) {
                              KernelParameters k;
                              k.kind = "free";
                              k.M = f.M;
                              return k;
                          },
                      },
                      model);
}

BathModel make_model(const KernelParameters& p)
{
    if (p.kind == "ohmic")
        return Ohmic::make(p.zeta, p.m);
    if (p.kind == "power-law")
        return PowerLaw::make(p.gamma, p.b, p.m);
    if (p.kind == "harmonic")
        return Harmonic::make(p.m, p.b);
    if (p.kind == "qed")
        return Qed::make(p.M, p.m, p.tau_e);
    if (p.kind == "free")
        return FreeParticle::make(p.M);
    throw DomainError("unknown model kind '" + p.kind + "' (expected ohmic, power-law, harmonic, qed or free)");
}

double frequency_scale(const BathModel& model)
{
    return std::visit(overloaded{
                          [](const Ohmic& o) { return o.zeta / o.m; },
                          [](const PowerLaw& p) { return p.b; },
                          [](const Harmonic& h) { return h.b; },
                          [](const Qed& q) {
                              return q.m > 0.0 && q.m < q.M ? (q.M - q.m) / (q.m * q.tau_e) : 1.0 / q.tau_e;
                          },
                          [](const FreeParticle&) { return 1.0; },
                      },
                      model);
}

namespace {

double raw_frequency_scale(const KernelParameters& p)
{
    if (p.kind == "ohmic" && p.m > 0.0 && p.zeta > 0.0)
        return p.zeta / p.m;
    if ((p.kind == "power-law" || p.kind == "harmonic") && p.b > 0.0)
        return p.b;
    if (p.kind == "qed" && p.tau_e > 0.0)
        return 1.0 / p.tau_e;
    return 1.0;
}

std::string parameter_verdict(const KernelParameters& p)
{
    try {
        (void)make_model(p);
    } catch (const DomainError& e) {
        return e.what();
    }
    return {};
}

} // namespace

ValidationReport validate_positive_real(const KernelParameters& params, std::size_t n_samples)
{
    if (n_samples < 16)
        throw DomainError("validate_positive_real: n_samples must be >= 16");

    ValidationReport report;
    report.samples = n_samples;
    report.parameter_diagnostic = parameter_verdict(params);
    report.parameters_ok = report.parameter_diagnostic.empty();

    if (params.kind != "ohmic" && params.kind != "power-law" && params.kind != "harmonic" &&
        params.kind != "qed" && params.kind != "free") {
        report.interior_ok = report.boundary_ok = false;
        return report;
    }
    // Numerical checks need finite positive scales even when the verdict fails.
    if (!(params.b > 0.0) || !(params.m >= 0.0) || !(params.M > 0.0) || !(params.tau_e > 0.0) ||
        !std::isfinite(params.gamma)) {
        report.interior_ok = report.boundary_ok = false;
        return report;
    }

    const double scale = raw_frequency_scale(params);

    // R2 low-discrepancy sequence mapped to |z| in [1e-3, 1e3] scale, arg in (0, pi).
    constexpr double g = 1.32471795724474602596;
    constexpr double a1 = 1.0 / g;
    constexpr double a2 = 1.0 / (g * g);
    report.worst_interior_value = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < n_samples; ++n) {
        const double u = std::fmod(0.5 + a1 * static_cast<double>(n + 1), 1.0);
        const double v = std::fmod(0.5 + a2 * static_cast<double>(n + 1), 1.0);
        const double r = scale * std::pow(10.0, -3.0 + 6.0 * u);
        const double theta = pi * (0.001 + 0.998 * v);
        const Complex z = std::polar(r, theta);
        const double re = raw_kernel(params, z).real();
        if (re < report.worst_interior_value) {
            report.worst_interior_value = re;
            report.worst_interior_point = z;
        }
    }
    // Free particle has mu == 0: non-negative on the closed half plane, the
    // degenerate positive-real case.
    const bool allow_zero = params.kind == "free" || (params.kind == "qed" && params.m == params.M);
    report.interior_ok = allow_zero ? report.worst_interior_value >= 0.0 : report.worst_interior_value > 0.0;

    const std::size_t n_boundary = std::max<std::size_t>(n_samples, 64);
    for (std::size_t n = 0; n < n_boundary; ++n) {
        const double w = scale * std::pow(10.0, -4.0 + 8.0 * static_cast<double>(n) / (n_boundary - 1));
        const double plus = raw_kernel(params, Complex{w, 0.0}).real();
        const double minus = raw_kernel(params, Complex{-w, 0.0}).real();
        const double mag = std::max({std::abs(plus), std::abs(minus), 1e-300});
        const double asym = std::abs(plus - minus) / mag;
        double violation = 0.0;
        if (asym > 1e-12)
            violation = asym;
        if (plus < -1e-14 * mag)
            violation = std::max(violation, -plus / mag);
        if (violation > report.worst_boundary_violation) {
            report.worst_boundary_violation = violation;
            report.worst_boundary_frequency = w;
        }
    }
    report.boundary_ok = report.worst_boundary_violation == 0.0;
    return report;
}

ValidationReport validate_positive_real(const BathModel& model, std::size_t n_samples)
{
    return validate_positive_real(kernel_parameters(model), n_samples);
}

std::string ValidationReport::to_text() const
{
    std::ostringstream out;
    out.precision(6);
    out << "parameter range : " << (parameters_ok ? "ok" : "FAIL");
    if (!parameters_ok)
        out << " (" << parameter_diagnostic << ")";
    out << "\n";
    out << "Re mu(z) > 0    : " << (interior_ok ? "ok" : "FAIL") << " over " << samples
        << " upper-half-plane samples; min Re mu = " << worst_interior_value << " at z = ("
        << worst_interior_point.real() << ", " << worst_interior_point.imag() << ")\n";
    out << "boundary        : " << (boundary_ok ? "ok" : "FAIL")
        << " (Re mu(-w+i0) = Re mu(w+i0) >= 0); worst violation = " << worst_boundary_violation;
    if (!boundary_ok)
        out << " at w = " << worst_boundary_frequency;
    out << "\n";
    out << "verdict         : " << (passed() ? "PASS" : "FAIL") << "\n";
    return out.str();
}

} // namespace qbm
