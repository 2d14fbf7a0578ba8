#pragma once

namespace qbm {

// Temperature plus the unit constants hbar and k_B.
//
// zero_T selects the zero-temperature prescription (coth -> 1 before any
// expansion). It is forced on when T == 0.
struct ThermalContext {
    double T{0.0};
    double hbar{1.0};
    double kB{1.0};
    bool zero_T{true};

    // Throws DomainError on T < 0 or non-positive constants.
    static ThermalContext make(double T, double hbar = 1.0, double kB = 1.0);
    static ThermalContext zero(double hbar = 1.0, double kB = 1.0) { return make(0.0, hbar, kB); }

    // hbar / (2 k_B T); infinite at zero temperature.
    double half_inverse_scale() const;
};

namespace units {
// CODATA exact values (SI).
inline constexpr double hbar_si = 1.054571817e-34;   // J s
inline constexpr double kB_si = 1.380649e-23;        // J / K
// Characteristic electron time 2e^2 / 3Mc^3.
inline constexpr double tau_e_si = 6.25e-24;          // s
} // namespace units

} // namespace qbm
