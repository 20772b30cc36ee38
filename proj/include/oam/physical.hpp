#ifndef OAM_PHYSICAL_HPP
#define OAM_PHYSICAL_HPP

#include <string>

namespace oam
{
inline constexpr double speed_of_light = 299792458.0; // m/s

struct CavitySpec
{
    double length = 0.3;       // total optical path L (m)
    double reflectivity = 0.25; // beam-splitter power reflectivity r_B^2

    void validate() const;
};

// Omega0 = 2 pi c / L (rad/s).
double free_spectral_range(double length);

// alpha = r^2 / (1 + t^2) with t^2 = 1 - r^2.
double coupling_alpha(double reflectivity);

// kappa = Omega0 alpha (1 + alpha) / 2 pi (rad/s).
double tunneling_rate(double reflectivity, double fsr);

struct CavityEstimate
{
    double fsr = 0.0;
    double alpha = 0.0;
    double kappa = 0.0;
    double bandwidth = 0.0;       // 4 kappa
    double min_pulse_width = 0.0; // 2.5 / kappa
    double min_write_time = 0.0;  // 12 pi / (2 kappa)
};

CavityEstimate estimate(const CavitySpec &spec);

// "2pi x 104.2 MHz" style rendering of an angular frequency.
std::string format_angular(double omega);

} // namespace oam

#endif // OAM_PHYSICAL_HPP
