// Memory kernels, the susceptibility and its boundary spectrum.

#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qbm {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Bath catalog. Each alternative validates on construction via make().
// ---------------------------------------------------------------------------

// Constant kernel mu(z) = zeta.
struct Ohmic {
    double zeta{1.0};  // friction constant
    double m{1.0};     // particle mass
    static Ohmic make(double zeta, double m);
};

// Colored noise: mu(z) = m b^{1-gamma} (-i z)^gamma with -1 < gamma < 1.
struct PowerLaw {
    double gamma{0.0};
    double b{1.0};  // frequency scale
    double m{1.0};
    static PowerLaw make(double gamma, double b, double m);
};

// Free oscillator alpha(z) = 1 / (-m z^2 + m b^2); the gamma = -1 edge.
struct Harmonic {
    double m{1.0};
    double b{1.0};  // oscillator frequency
    static Harmonic make(double m, double b);
};

// Radiation-field kernel in the (M, m, tau_e) parameterization.
// M is the renormalized mass, m in [0, M] the bare mass.
struct Qed {
    double M{1.0};
    double m{0.5};
    double tau_e{1.0};
    static Qed make(double M, double m, double tau_e);

    // Cutoff Omega = (M - m) / (M tau_e).
    double cutoff() const { return (M - m) / (M * tau_e); }
};

// No coupling; equivalent to Qed with m == M.
struct FreeParticle {
    double M{1.0};
    static FreeParticle make(double M);
};

using BathModel = std::variant<Ohmic, PowerLaw, Harmonic, Qed, FreeParticle>;

std::string model_name(const BathModel& model);

// ---------------------------------------------------------------------------
// Boundary spectrum Im alpha(omega + i0+)
// ---------------------------------------------------------------------------

// Coefficient pair weight * [delta(omega - frequency) - delta(omega + frequency)].
struct DeltaPair {
    double frequency{0.0};
    double weight{0.0};
};

// Im alpha(omega + i0+) on omega > 0 split into a smooth part plus
// distributional terms that are only ever consumed in closed form.
//
// Half-line convention: delta'(omega) integrated over [0, inf) against g
// contributes -g'(0)/2 (half weight).
struct SpectralDecomposition {
    std::function<double(double)> regular;
    double delta_prime_coeff{0.0};
    std::vector<DeltaPair> delta_pairs;

    bool has_regular_part() const { return static_cast<bool>(regular); }
    double regular_at(double omega) const { return regular ? regular(omega) : 0.0; }
};

// Fourier transform of the memory function; requires Im z >= 0 (Im z == 0 is
// read as the boundary value z = omega + i0+).
Complex mu_tilde(const BathModel& model, Complex z);

// Susceptibility alpha(z) = 1/(-m z^2 - i z mu(z)); Qed uses the
// rational (M, m, tau_e) form and Harmonic the bound-oscillator form.
Complex susceptibility(const BathModel& model, Complex z);

// QED kernel written with the cutoff Omega and the prefactor M tau_e
// (= 2e^2/3c^3). Used to cross-check the (M, m, tau_e) parameterization.
Complex qed_mu_tilde_cutoff_form(const Qed& model, Complex z);
Complex qed_susceptibility_cutoff_form(const Qed& model, Complex z);

SpectralDecomposition im_alpha_boundary(const BathModel& model);

// ---------------------------------------------------------------------------
// Positive-real validation
// ---------------------------------------------------------------------------

struct ValidationReport {
    bool parameters_ok{true};
    std::string parameter_diagnostic;

    bool interior_ok{true};          // Re mu(z) > 0 on the upper half plane
    bool boundary_ok{true};          // Re mu(-w+i0) == Re mu(w+i0) >= 0
    double worst_interior_value{0.0};
    Complex worst_interior_point{};
    double worst_boundary_violation{0.0};
    double worst_boundary_frequency{0.0};
    std::size_t samples{0};

    bool passed() const { return parameters_ok && interior_ok && boundary_ok; }
    std::string to_text() const;
};

// Kernel description used by the validator; lets raw (unvalidated) power-law
// parameters be checked without going through PowerLaw::make.
struct KernelParameters {
    std::string kind;  // "ohmic", "power-law", "harmonic", "qed", "free"
    double zeta{1.0};
    double gamma{0.0};
    double b{1.0};
    double m{1.0};
    double M{1.0};
    double tau_e{1.0};

    bool operator==(const KernelParameters&) const = default;
};

KernelParameters kernel_parameters(const BathModel& model);

// Parameter-range verdict plus numerical checks on a quasi-random grid of
// n_samples points (n_samples >= 16). Never throws for bad parameters.
ValidationReport validate_positive_real(const KernelParameters& params, std::size_t n_samples = 256);
ValidationReport validate_positive_real(const BathModel& model, std::size_t n_samples = 256);

// Build a model from raw parameters, throwing DomainError with the validator's
// diagnostic when they are out of range.
BathModel make_model(const KernelParameters& params);

// Characteristic frequency used to scale sampling grids.
double frequency_scale(const BathModel& model);

} // namespace qbm
