#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>

#include "oracles.hpp"
#include "qbm/diffusion_observables.hpp"
#include "qbm/errors.hpp"
#include "qbm/special_functions.hpp"

using namespace qbm;
using Cx = std::complex<double>;

namespace {

const Cx I{0.0, 1.0};

// Im alpha(omega + i0) from alpha = 1/(-m z^2 - i z mu(z)), written out here
// independently of the library's spectral decomposition.
double im_alpha_ohmic(double zeta, double m, double w) { return (1.0 / (-m * w * w - I * w * zeta)).imag(); }

double im_alpha_power(double g, double b, double m, double w)
{
    const Cx mu = m * std::pow(b, 1.0 - g) * std::pow(-I * w, g);
    return (1.0 / (-m * w * w - I * w * mu)).imag();
}

double im_alpha_qed(double M, double m, double tau, double w)
{
    const double om = (M - m) / (M * tau);
    const Cx mu = M * tau * w * om * om / (w + I * om);
    return (1.0 / (-m * w * w - I * w * mu)).imag();
}

double coth_or_one(double w, double T) { return T == 0.0 ? 1.0 : oracle::coth(w / (2.0 * T)); }

// (2/pi) int Im alpha omega coth sin(omega t) d omega in natural units.
double rate_oracle(const std::function<double(double)>& im_alpha, double T, double t)
{
    return 2.0 / oracle::pi *
           oracle::fourier_integral([&](double w) { return im_alpha(w) * w * coth_or_one(w, T); }, t);
}

double commutator_oracle(const std::function<double(double)>& im_alpha, double t)
{
    return 2.0 / oracle::pi * oracle::fourier_integral(im_alpha, t);
}

ObservableSeries series_of(const std::vector<double>& t, const std::function<double(double)>& f)
{
    ObservableSeries s;
    s.times = t;
    for (double x : t) {
        s.values.push_back(f(x));
        s.err_estimates.push_back(0.0);
    }
    return s;
}

const auto T0 = ThermalContext::zero();
const auto T1 = ThermalContext::make(1.0);

} // namespace

// ------------------------------ free particle ---------------------------------

TEST_CASE("free particle: exact distributional terms")
{
    const BathModel free = FreeParticle{2.0};
    const auto ctx = ThermalContext::make(3.0);
    for (double t : {0.0, 1e-3, 0.5, 1.0, 2.0, 1e3}) {
        CAPTURE(t);
        CHECK(std::abs(msd(free, ctx, t).value - 1.5 * t * t) <= 1e-14 * (1.5 * t * t));
        CHECK(msd(free, T0, t).value == 0.0);
        CHECK(std::abs(commutator_magnitude(free, t).value - t / 2.0) <= 1e-14 * t / 2.0);
        CHECK(msd(free, ctx, t).err_estimate == 0.0);
    }
    CHECK(oracle::rel(msd_rate(free, ctx, 2.0).value, 2.0 * 3.0 * 2.0 / 2.0) < 1e-14);
    CHECK(msd_rate(free, T0, 2.0).value == 0.0);
    CHECK(msd_rate_closed_zero_T(free, 2.0) == 0.0);
    CHECK(msd(FreeParticle{1.0}, T1, 1.0).value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(msd(FreeParticle{1.0}, T1, 2.0).value == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(msd_asymptotic(free, ctx, 7.0) == doctest::Approx(msd(free, ctx, 7.0).value).epsilon(1e-15));
}

TEST_CASE("free particle with explicit constants")
{
    const auto ctx = ThermalContext::make(2.0, 0.3, 1.5);
    const BathModel free = FreeParticle{0.5};
    CHECK(oracle::rel(msd(free, ctx, 4.0).value, 1.5 * 2.0 / 0.5 * 16.0) < 1e-14);
    CHECK(oracle::rel(commutator_magnitude(free, 4.0, 0.3).value, 0.3 * 4.0 / 0.5) < 1e-14);
}

// -------------------------------- harmonic -----------------------------------

TEST_CASE("harmonic: bound motion through the delta pair")
{
    const Harmonic h{1.5, 0.8};
    const BathModel model = h;
    for (double T : {0.0, 0.4, 5.0}) {
        const auto ctx = ThermalContext::make(T);
        const double c = coth_or_one(h.b, T);
        for (double t : {0.1, 1.0, 2.7, 10.0}) {
            CAPTURE(T);
            CAPTURE(t);
            const double rate = 1.0 / h.m * c * std::sin(h.b * t);
            CHECK(std::abs(msd_rate(model, ctx, t).value - rate) <= 1e-14 * std::abs(rate) + 1e-16);
            CHECK(std::abs(msd_rate_harmonic_closed(h, ctx, t) - msd_rate(model, ctx, t).value) <= 1e-15);
            const double s = c / (h.m * h.b) * (1.0 - std::cos(h.b * t));
            CHECK(std::abs(msd(model, ctx, t).value - s) <= 1e-14 * s);
            const double comm = std::sin(h.b * t) / (h.m * h.b);
            CHECK(std::abs(commutator_magnitude(model, t).value - comm) <= 1e-14);
            const double corr = c / (2.0 * h.m * h.b) * std::cos(h.b * t);
            CHECK(std::abs(position_correlation(model, ctx, t).value - corr) <= 1e-14);
        }
    }
    CHECK(position_correlation(model, T0, 0.0).value == doctest::Approx(1.0 / (2.0 * h.m * h.b)).epsilon(1e-15));
    CHECK(oracle::rel(position_correlation(model, T1, 0.0).value, oracle::coth(h.b / 2.0) / (2.0 * h.m * h.b)) <
          1e-14);
    CHECK(oracle::rel(msd_rate_closed_zero_T(model, 1.3), std::sin(h.b * 1.3) / h.m) < 1e-15);
    CHECK(msd_rate_asymptotic(model, T1, 10.0) == 0.0);
}

// --------------------------------- Ohmic -------------------------------------

TEST_CASE("Ohmic finite T: quadrature vs brute-force oracle")
{
    const double zeta = 0.7;
    const double m = 1.3;
    const BathModel model = Ohmic{zeta, m};
    for (double T : {0.2, 1.0}) {
        for (double t : {0.05, 0.7, 3.0, 20.0}) {
            CAPTURE(T);
            CAPTURE(t);
            const auto ctx = ThermalContext::make(T);
            const double ref = rate_oracle([&](double w) { return im_alpha_ohmic(zeta, m, w); }, T, t);
            const auto r = msd_rate(model, ctx, t);
            CHECK(oracle::rel(r.value, ref) < 1e-7);
            CHECK(std::abs(r.value - ref) <= 10.0 * r.err_estimate + 1e-9 * std::abs(ref));
        }
    }
}

TEST_CASE("Ohmic zero T: closed form, quadrature and oracle")
{
    const double zeta = 1.0;
    const double m = 1.0;
    const BathModel model = Ohmic{zeta, m};
    for (double t : oracle::log_grid(0.1, 100.0, 16)) {
        CAPTURE(t);
        const double closed = msd_rate_closed_zero_T(model, t);
        CHECK(oracle::rel(closed, 2.0 / (oracle::pi * zeta * t) * oracle::v_function(zeta * t / m)) < 1e-9);
        CHECK(oracle::rel(msd_rate(model, T0, t).value, closed) < 1e-7);
    }
    for (double t : {0.3, 4.0}) {
        const double ref = rate_oracle([&](double w) { return im_alpha_ohmic(zeta, m, w); }, 0.0, t);
        CHECK(oracle::rel(msd_rate(model, T0, t).value, ref) < 1e-7);
    }
}

TEST_CASE("Ohmic long-time laws")
{
    const BathModel model = Ohmic{1.0, 1.0};
    // Normal diffusion.
    CHECK(oracle::rel(msd_rate(model, T1, 200.0).value, 2.0) < 1e-2);
    CHECK(msd_rate_asymptotic(model, T1, 200.0) == 2.0);
    CHECK(oracle::rel(msd_rate_asymptotic(model, T0, 5.0), 2.0 / (oracle::pi * 5.0)) < 1e-15);

    // Zero-temperature logarithm.
    const double t4 = 1e4;
    const double law4 = 2.0 / oracle::pi * (std::log(t4) + oracle::euler_gamma);
    CHECK(oracle::rel(msd(model, T0, t4).value, law4) < 1e-2);
    CHECK(oracle::rel(msd_asymptotic(model, T0, t4), law4) < 1e-15);
    const double t3 = 1e3;
    CHECK(oracle::rel(msd_asymptotic(model, T0, t3), msd(model, T0, t3).value) < 2e-2);
}

TEST_CASE("Ohmic msd integrates the rate")
{
    // s(t) = int_0^t ds/dt' dt', the latter from the V closed form.
    const BathModel model = Ohmic{2.0, 0.5};
    const double t = 3.0;
    auto rate = [&](double s) { return s == 0.0 ? 0.0 : msd_rate_closed_zero_T(model, s); };
    const double integral = oracle::integrate_graded(rate, 0.0, t, 60);
    CHECK(oracle::rel(msd(model, T0, t).value, integral) < 1e-7);
}

TEST_CASE("classical limit of Ohmic diffusion")
{
    const BathModel model = Ohmic{1.0, 1.0};
    const double t = 300.0;
    const double a = msd_rate(model, ThermalContext::make(1.0, 1.0, 1.0), t).value;
    const double b = msd_rate(model, ThermalContext::make(1.0, 10.0, 1.0), t).value;
    CHECK(oracle::rel(b, a) < 5e-3);
}

// -------------------------------- power law ----------------------------------

TEST_CASE("power law: quadrature vs oracle")
{
    for (double g : {-0.5, 0.5}) {
        const double b = 1.2;
        const double m = 0.8;
        const BathModel model = PowerLaw{g, b, m};
        auto ia = [&](double w) { return im_alpha_power(g, b, m, w); };
        for (double T : {0.0, 1.0}) {
            for (double t : {0.5, 4.0}) {
                CAPTURE(g);
                CAPTURE(T);
                CAPTURE(t);
                const auto ctx = ThermalContext::make(T);
                CHECK(oracle::rel(msd_rate(model, ctx, t).value, rate_oracle(ia, T, t)) < 1e-7);
            }
        }
        CHECK(oracle::rel(commutator_magnitude(model, 2.0).value, commutator_oracle(ia, 2.0)) < 1e-7);
    }
}

TEST_CASE("power law asymptotic constants")
{
    const BathModel half = PowerLaw{0.5, 1.0, 1.0};
    CHECK(oracle::rel(msd_rate_asymptotic(half, T1, 1.0), 2.0 / std::tgamma(1.5)) < 1e-14);

    // gamma = 0 at zero T is the Ohmic law with zeta = m b.
    const BathModel flat = PowerLaw{0.0, 2.0, 1.5};
    for (double t : {1.0, 10.0})
        CHECK(oracle::rel(msd_rate_asymptotic(flat, T0, t), 2.0 / (oracle::pi * 3.0 * t)) < 1e-14);
    CHECK(oracle::rel(msd_rate_asymptotic(flat, T0, 10.0), msd_rate_asymptotic(Ohmic{3.0, 1.5}, T0, 10.0)) < 1e-14);
    CHECK(oracle::rel(msd_asymptotic(flat, T0, 1e3), msd_asymptotic(Ohmic{3.0, 1.5}, T0, 1e3)) < 1e-14);

    // msd laws are the time integrals of the rate laws.
    const BathModel neg = PowerLaw{-0.4, 1.0, 1.0};
    const double t = 50.0;
    CHECK(oracle::rel(msd_asymptotic(neg, T1, t), msd_rate_asymptotic(neg, T1, t) * t / 0.6) < 1e-13);
    CHECK(oracle::rel(msd_asymptotic(half, T0, t), msd_rate_asymptotic(half, T0, t) * t / 0.5) < 1e-13);

    CHECK_THROWS_AS(msd_rate_closed_zero_T(half, 1.0), DomainError);
}

TEST_CASE("power law gamma < 0 at T = 0 is bound")
{
    const BathModel model = PowerLaw{-0.5, 1.3, 0.8};
    const double var = position_correlation(model, T0, 0.0).value;
    const double far = 1e12;
    // The t^gamma correction is 1e-6 of the plateau there.
    CHECK(oracle::rel(msd_asymptotic(model, T0, far), 2.0 * var) < 1e-5);
    for (double t : {1e2, 1e3, 1e4}) {
        CAPTURE(t);
        const double exact = msd(model, T0, t).value;
        CHECK(exact < 2.0 * var);
        CHECK(std::abs(exact - msd_asymptotic(model, T0, t)) < 0.05 * (2.0 * var - exact));
    }
}

TEST_CASE("power law: anomalous exponents and one-power rule")
{
    const auto grid = make_time_grid(1e2, 1e4, 24, Spacing::Log);
    for (double g : {-0.5, 0.0, 0.5}) {
        CAPTURE(g);
        const BathModel model = PowerLaw{g, 1.0, 1.0};
        const auto hot = series_of(grid, [&](double t) { return msd_rate(model, T1, t).value; });
        const auto cold = series_of(grid, [&](double t) { return msd_rate(model, T0, t).value; });
        const double s_hot = fit_anomalous_exponent(hot, 0.5);
        const double s_cold = fit_anomalous_exponent(cold, 0.5);
        CHECK(std::abs(s_hot - g) < 0.02);
        CHECK(std::abs(s_cold - (s_hot - 1.0)) < 0.05);
    }
}

TEST_CASE("power law zero T correlation is finite for gamma < 0")
{
    const double g = -0.5;
    const BathModel model = PowerLaw{g, 1.0, 1.0};
    auto ia = [&](double w) { return im_alpha_power(g, 1.0, 1.0, w); };
    const double t = 1.5;
    const double ref = 1.0 / oracle::pi * oracle::fourier_integral(ia, t, false);
    CHECK(oracle::rel(position_correlation(model, T0, t).value, ref) < 1e-7);
    // Equal-time variance: plain integral of Im alpha.
    const double var = 1.0 / oracle::pi *
                       (oracle::integrate_graded(ia, 0.0, 1.0, 200) +
                        oracle::integrate([&](double x) { return ia(1.0 / x) / (x * x); }, 0.0, 1.0, 400));
    CHECK(oracle::rel(position_correlation(model, T0, 0.0).value, var) < 1e-7);

    CHECK_THROWS_AS(position_correlation(model, T1, 1.0), DivergentObservable);
    CHECK_THROWS_AS(position_correlation(PowerLaw{0.5, 1.0, 1.0}, T0, 1.0), DivergentObservable);
    CHECK_THROWS_AS(position_correlation(Ohmic{1.0, 1.0}, T1, 1.0), DivergentObservable);
    CHECK_THROWS_AS(position_correlation(FreeParticle{1.0}, T1, 0.0), DivergentObservable);
}

// ----------------------------------- QED -------------------------------------

TEST_CASE("QED maximal coupling closed form")
{
    const Qed q{1.0, 0.0, 0.5};
    const BathModel model = q;
    for (double t : oracle::log_grid(0.1, 100.0, 12)) {
        CAPTURE(t);
        const double closed = 2.0 * (t + q.tau_e / std::tanh(oracle::pi * t));
        CHECK(oracle::rel(msd_rate_qed_maximal_coupling(q, T1, t), closed) < 1e-14);
        CHECK(oracle::rel(msd_rate(model, T1, t).value, closed) < 1e-6);
    }
    CHECK(oracle::rel(msd_rate_qed_maximal_coupling(q, T0, 2.0), 2.0 * 0.5 / (oracle::pi * 2.0)) < 1e-15);
    CHECK(oracle::rel(msd_rate(model, T0, 2.0).value, 2.0 * 0.5 / (oracle::pi * 2.0)) < 1e-6);
    CHECK_THROWS_AS(msd(model, T1, 1.0), DivergentObservable);
    CHECK_THROWS_AS(msd_rate_qed_maximal_coupling(Qed{1.0, 0.5, 1.0}, T1, 1.0), DomainError);
}

TEST_CASE("QED general coupling: closed form and oracle")
{
    const Qed q{1.0, 0.5, 1.0};
    const BathModel model = q;
    auto ia = [&](double w) { return im_alpha_qed(q.M, q.m, q.tau_e, w); };
    for (double t : oracle::log_grid(0.05, 50.0, 10)) {
        CAPTURE(t);
        const double closed = 2.0 * q.tau_e / (oracle::pi * q.M * t) * oracle::v_function((q.M - q.m) * t / (q.m * q.tau_e));
        CHECK(oracle::rel(msd_rate_closed_zero_T(model, t), closed) < 1e-9);
        CHECK(oracle::rel(msd_rate(model, T0, t).value, closed) < 1e-6);
    }
    for (double t : {0.3, 3.0}) {
        // At finite T the delta' term adds 2kT t / M to the regular integral.
        const double ref = rate_oracle(ia, 1.0, t) + 2.0 * t / q.M;
        CHECK(oracle::rel(msd_rate(model, T1, t).value, ref) < 1e-7);
    }
    // m -> 0 at fixed t approaches the maximal-coupling law.
    const double t = 2.0;
    const double limit = 2.0 * q.tau_e / (oracle::pi * q.M * t);
    CHECK(oracle::rel(msd_rate_closed_zero_T(Qed{1.0, 1e-9, 1.0}, t), limit) < 1e-6);
    CHECK(msd_rate_closed_zero_T(Qed{1.0, 0.0, 1.0}, t) == limit);
    CHECK(msd_rate_closed_zero_T(Qed{1.0, 1.0, 1.0}, t) == 0.0);
}

TEST_CASE("QED long-time laws")
{
    const Qed q{1.0, 0.5, 1.0};
    const BathModel model = q;
    // (2 hbar tau_e / pi M)(ln((M - m) t / m tau_e) + gamma_E).
    const double t = 1e3 * q.tau_e;
    auto rate = [&](double s) { return s == 0.0 ? 0.0 : msd_rate_closed_zero_T(model, s); };
    const double integrated = oracle::integrate_graded(rate, 0.0, 1.0, 60) +
                              oracle::integrate([&](double x) { return rate(std::exp(x)) * std::exp(x); }, 0.0,
                                                std::log(t), 400);
    const double law = 2.0 * q.tau_e / (oracle::pi * q.M) * (std::log(1e3) + oracle::euler_gamma);
    CHECK(oracle::rel(msd_asymptotic(model, T0, t), law) < 1e-14);
    CHECK(oracle::rel(integrated, law) < 1e-2);
    CHECK(oracle::rel(msd(model, T0, t).value, integrated) < 1e-6);

    // Finite T: ds/dt grows with slope 2kT/M, the free-particle law.
    const auto grid = make_time_grid(50.0, 100.0, 11, Spacing::Linear);
    const auto series = series_of(grid, [&](double s) { return msd_rate(model, T1, s).value; });
    CHECK(oracle::rel(fit_linear_drift(series), 2.0 / q.M) < 1e-2);
    CHECK(oracle::rel(msd_rate_asymptotic(model, T1, 100.0), 2.0 * (100.0 + 1.0)) < 1e-15);

    // Zero T, m = 0: ds/dt ~ t^{-1}; finite T: ~ t. Two powers apart.
    const BathModel maximal = Qed{1.0, 0.0, 1.0};
    const auto g2 = make_time_grid(10.0, 1000.0, 16, Spacing::Log);
    const double cold = fit_anomalous_exponent(series_of(g2, [&](double s) { return msd_rate(maximal, T0, s).value; }), 1.0);
    const double hot = fit_anomalous_exponent(series_of(g2, [&](double s) { return msd_rate(maximal, T1, s).value; }), 1.0);
    CHECK(std::abs(cold + 1.0) < 0.02);
    CHECK(std::abs(hot - cold - 2.0) < 0.05);
}

// -------------------------------- commutator ---------------------------------

TEST_CASE("commutator vanishes at t = 0")
{
    for (const BathModel& model : {BathModel{Ohmic{1.0, 1.0}}, BathModel{PowerLaw{0.3, 1.0, 1.0}},
                                   BathModel{Harmonic{1.0, 1.0}}, BathModel{Qed{1.0, 0.5, 1.0}},
                                   BathModel{FreeParticle{1.0}}})
        CHECK(commutator_magnitude(model, 0.0).value == 0.0);
}

TEST_CASE("QED commutator")
{
    const Qed q{1.0, 0.5, 1.0};
    const BathModel model = q;
    auto ia = [&](double w) { return im_alpha_qed(q.M, q.m, q.tau_e, w); };
    for (double t : oracle::log_grid(0.01, 100.0, 12)) {
        CAPTURE(t);
        const double closed = (t + q.tau_e * (1.0 - std::exp(-(q.M - q.m) * t / (q.m * q.tau_e)))) / q.M;
        CHECK(oracle::rel(commutator_qed_closed(q, t), closed) < 1e-14);
        CHECK(oracle::rel(commutator_magnitude(model, t).value, closed) < 1e-6);
    }
    // Regular part alone against the oracle; the delta' adds hbar t / M.
    CHECK(oracle::rel(commutator_magnitude(model, 0.7).value, commutator_oracle(ia, 0.7) + 0.7 / q.M) < 1e-7);

    // Long time: (hbar/M)(t + tau_e). Short time: slope hbar/m (bare mass).
    CHECK(oracle::rel(commutator_magnitude(model, 50.0).value, commutator_asymptotic(model, 50.0)) < 1e-6);
    const double h = 1e-3 * q.m * q.tau_e / (q.M - q.m);
    const double slope = commutator_magnitude(model, h).value / h;
    CHECK(oracle::rel(slope, 1.0 / q.m) < 5e-3);

    CHECK(oracle::rel(commutator_qed_closed(Qed{1.0, 1.0, 1.0}, 3.0), 3.0) < 1e-15);
    CHECK(oracle::rel(commutator_qed_closed(Qed{1.0, 0.0, 1.0}, 3.0), 4.0) < 1e-15);
}

TEST_CASE("commutator long-time laws")
{
    const BathModel p = PowerLaw{0.5, 1.0, 1.0};
    const double t = 2e3;
    CHECK(oracle::rel(commutator_magnitude(p, t).value, commutator_asymptotic(p, t)) < 2e-2);
    const BathModel o = Ohmic{2.0, 1.0};
    CHECK(oracle::rel(commutator_magnitude(o, 40.0).value, 0.5) < 1e-6);
    CHECK(commutator_asymptotic(o, 40.0) == 0.5);
    CHECK(oracle::rel(commutator_magnitude(o, 40.0, 3.0).value, 1.5) < 1e-6);
}

// --------------------------- consistency invariants ---------------------------

TEST_CASE("finite differences of msd match msd_rate")
{
    const std::vector<BathModel> models = {Ohmic{1.0, 1.0}, Qed{1.0, 0.5, 1.0}};
    for (const auto& model : models) {
        for (double T : {0.0, 1.0}) {
            const auto ctx = ThermalContext::make(T);
            for (double t : {0.1, 1.0, 10.0, 100.0}) {
                CAPTURE(model_name(model));
                CAPTURE(T);
                CAPTURE(t);
                const double h = 1e-3 * t;
                const auto up = msd(model, ctx, t + h);
                const auto down = msd(model, ctx, t - h);
                const double fd = (up.value - down.value) / (2.0 * h);
                const auto rate = msd_rate(model, ctx, t);
                // Centered difference error (h^2/6) s''' plus the quadrature
                // errors amplified by 1/h.
                const double truncation = 1e-6 * std::abs(rate.value) + 1e-7 * std::abs(up.value) / t;
                const double combined = (up.err_estimate + down.err_estimate) / (2.0 * h) + rate.err_estimate;
                CHECK(std::abs(fd - rate.value) <= 10.0 * combined + truncation);
            }
        }
    }
}

TEST_CASE("msd is nonnegative and nondecreasing at finite T")
{
    const std::vector<BathModel> models = {Ohmic{1.0, 1.0}, PowerLaw{-0.5, 1.0, 1.0}, PowerLaw{0.5, 1.0, 1.0},
                                           Qed{1.0, 0.5, 1.0}, FreeParticle{1.0}};
    const auto grid = make_time_grid(0.01, 100.0, 25, Spacing::Log);
    for (const auto& model : models) {
        double prev = 0.0;
        CHECK(msd(model, T1, 0.0).value == 0.0);
        for (double t : grid) {
            CAPTURE(model_name(model));
            CAPTURE(t);
            const double s = msd(model, T1, t).value;
            CHECK(s >= 0.0);
            CHECK(s >= prev);
            prev = s;
        }
    }
}

TEST_CASE("sine-power identity")
{
    for (double g : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
        CAPTURE(g);
        quad::QuadratureSpec spec;
        spec.endpoint_exponent = g + 1.0;
        const auto r = quad::integrate_oscillatory([g](double x) { return std::pow(x, -g - 1.0); }, quad::Kernel::Sin,
                                                   1.0, spec);
        const double exact = oracle::pi / (2.0 * std::tgamma(1.0 + g) * std::cos(oracle::pi * g / 2.0));
        CHECK(oracle::rel(r.value, exact) < 1e-6);
    }
}

// --------------------------------- helpers -----------------------------------

TEST_CASE("time grids and fits")
{
    const auto lin = make_time_grid(1.0, 3.0, 5, Spacing::Linear);
    CHECK(lin == std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0});
    const auto lg = make_time_grid(1.0, 1e4, 5, Spacing::Log);
    CHECK(lg.front() == 1.0);
    CHECK(lg.back() == 1e4);
    CHECK(oracle::rel(lg[2], 100.0) < 1e-14);
    CHECK_THROWS_AS(make_time_grid(0.0, 1.0, 5, Spacing::Log), DomainError);
    CHECK_THROWS_AS(make_time_grid(2.0, 1.0, 5, Spacing::Log), DomainError);
    CHECK_THROWS_AS(make_time_grid(1.0, 2.0, 1, Spacing::Log), DomainError);

    const auto grid = make_time_grid(1.0, 100.0, 20, Spacing::Log);
    const BathModel free = FreeParticle{1.0};
    const auto s = series_of(grid, [&](double t) { return msd(free, T1, t).value; });
    CHECK(std::abs(fit_anomalous_exponent(s, 1.0) - 2.0) < 1e-3);
    CHECK(std::abs(fit_anomalous_exponent(s, 0.5) - 2.0) < 1e-3);

    const auto few = series_of(make_time_grid(1.0, 2.0, 7, Spacing::Log), [](double t) { return t; });
    CHECK_THROWS_AS(fit_anomalous_exponent(few, 1.0), InsufficientData);
    const auto neg = series_of(grid, [](double t) { return std::sin(t); });
    CHECK_THROWS_AS(fit_anomalous_exponent(neg, 1.0), NonPositiveValues);
    auto bad = s;
    bad.times[3] = bad.times[2];
    CHECK_THROWS_AS(bad.check(), DomainError);
    bad = s;
    bad.values.pop_back();
    CHECK_THROWS_AS(bad.check(), DomainError);

    CHECK(oracle::rel(fit_linear_drift(series_of(grid, [](double t) { return 3.0 * t - 1.0; })), 3.0) < 1e-13);
}

TEST_CASE("Ohmic finite T tail slope")
{
    const BathModel model = Ohmic{1.0, 1.0};
    const auto grid = make_time_grid(1e2, 1e4, 16, Spacing::Log);
    const auto s = series_of(grid, [&](double t) { return msd_rate(model, T1, t).value; });
    CHECK(std::abs(fit_anomalous_exponent(s, 1.0)) < 0.02);
}

TEST_CASE("power law gamma = -1/2 finite T exponent over [1e2, 1e4]")
{
    const BathModel model = PowerLaw{-0.5, 1.0, 1.0};
    const auto grid = make_time_grid(1e2, 1e4, 16, Spacing::Log);
    const auto s = series_of(grid, [&](double t) { return msd_rate(model, T1, t).value; });
    CHECK(std::abs(fit_anomalous_exponent(s, 1.0) + 0.5) < 0.02);
}

TEST_CASE("asymptote comparison")
{
    const auto grid = make_time_grid(1.0, 10.0, 10, Spacing::Log);
    const auto s = series_of(grid, [](double t) { return 2.0 * t; });
    std::vector<double> asym;
    for (double t : grid)
        asym.push_back(2.0 * t * (1.0 + 0.01 / t));
    const auto c = compare_asymptote(s, asym, 1.0);
    REQUIRE(c.deviation.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(oracle::rel(c.deviation[i], std::abs(s.values[i] - asym[i]) / std::abs(asym[i])) < 1e-12);
    CHECK(c.max_tail_deviation == doctest::Approx(c.deviation.front()));
    CHECK(std::abs(c.fitted_slope - 1.0) < 1e-12);
    CHECK_THROWS_AS(compare_asymptote(s, std::vector<double>(3, 1.0), 1.0), DomainError);

    CHECK(expected_exponent(Ohmic{1.0, 1.0}, T1, false) == 0.0);
    CHECK(expected_exponent(Ohmic{1.0, 1.0}, T1, true) == 1.0);
    CHECK(std::isnan(expected_exponent(Ohmic{1.0, 1.0}, T0, true)));
    CHECK(expected_exponent(PowerLaw{0.5, 1.0, 1.0}, T0, false) == -0.5);
    CHECK(expected_exponent(Qed{1.0, 0.0, 1.0}, T0, false) == -1.0);
    CHECK(expected_exponent(FreeParticle{1.0}, T1, true) == 2.0);
    CHECK(std::isnan(expected_exponent(Harmonic{1.0, 1.0}, T1, false)));
}

TEST_CASE("argument checks")
{
    const BathModel model = Ohmic{1.0, 1.0};
    CHECK_THROWS_AS(msd_rate(model, T1, 0.0), DomainError);
    CHECK_THROWS_AS(msd(model, T1, -1.0), DomainError);
    CHECK_THROWS_AS(commutator_magnitude(model, -1.0), DomainError);
    CHECK_THROWS_AS(commutator_magnitude(model, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(msd_rate_asymptotic(model, T1, 0.0), DomainError);
    CHECK_THROWS_AS(ThermalContext::make(-1.0), DomainError);
    CHECK(ThermalContext::make(0.0).zero_T);
    CHECK_FALSE(ThermalContext::make(1e-3).zero_T);
}
