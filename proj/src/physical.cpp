#include "oam/physical.hpp"

#include "oam/errors.hpp"
#include "oam/lattice.hpp"

#include <fmt/format.h>

#include <cmath>

namespace oam
{
void CavitySpec::validate() const
{
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw ConfigError(fmt::format("cavity length must be positive (got {})", length));
    }
    if (!(reflectivity >= 0.0 && reflectivity < 1.0)) {
        throw ConfigError(fmt::format("beam-splitter reflectivity must lie in [0, 1) (got {})", reflectivity));
    }
}

double free_spectral_range(double length)
{
    if (!(length > 0.0)) {
        throw ConfigError(fmt::format("cavity length must be positive (got {})", length));
    }
    return 2.0 * pi * speed_of_light / length;
}

double coupling_alpha(double reflectivity)
{
    if (!(reflectivity >= 0.0 && reflectivity < 1.0)) {
        throw ConfigError(fmt::format("beam-splitter reflectivity must lie in [0, 1) (got {})", reflectivity));
    }
    return reflectivity / (1.0 + (1.0 - reflectivity));
}

double tunneling_rate(double reflectivity, double fsr)
{
    const double alpha = coupling_alpha(reflectivity);
    return fsr * alpha * (1.0 + alpha) / (2.0 * pi);
}

CavityEstimate estimate(const CavitySpec &spec)
{
    spec.validate();
    CavityEstimate e;
    e.fsr = free_spectral_range(spec.length);
    e.alpha = coupling_alpha(spec.reflectivity);
    e.kappa = tunneling_rate(spec.reflectivity, e.fsr);
    e.bandwidth = 4.0 * e.kappa;
    if (e.kappa > 0.0) {
        e.min_pulse_width = 2.5 / e.kappa;
        e.min_write_time = 12.0 * pi / (2.0 * e.kappa);
    }
    return e;
}

std::string format_angular(double omega)
{
    const double hz = omega / (2.0 * pi);
    if (std::abs(hz) >= 1e9) {
        return fmt::format("2pi x {:.4g} GHz", hz * 1e-9);
    }
    if (std::abs(hz) >= 1e6) {
        return fmt::format("2pi x {:.4g} MHz", hz * 1e-6);
    }
    if (std::abs(hz) >= 1e3) {
        return fmt::format("2pi x {:.4g} kHz", hz * 1e-3);
    }
    return fmt::format("2pi x {:.4g} Hz", hz);
}

} // namespace oam
