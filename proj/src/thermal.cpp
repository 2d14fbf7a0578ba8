#include "qbm/thermal.hpp"

#include <cmath>
#include <limits>

#include "qbm/errors.hpp"

namespace qbm {

ThermalContext ThermalContext::make(double T, double hbar, double kB)
{
    if (!(T >= 0.0) || !std::isfinite(T))
        throw DomainError("temperature must be finite and >= 0");
    if (!(hbar > 0.0) || !(kB > 0.0))
        throw DomainError("hbar and k_B must be positive");
    return ThermalContext{T, hbar, kB, T == 0.0};
}

double ThermalContext::half_inverse_scale() const
{
    if (zero_T)
        return std::numeric_limits<double>::infinity();
    return hbar / (2.0 * kB * T);
}

} // namespace qbm
