#ifndef OAM_SPECTRUM_HPP
#define OAM_SPECTRUM_HPP

#include "oam/lattice.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace oam
{
struct BandPoint
{
    double K = 0.0;     // Bloch wave number in (-pi, pi]
    double omega = 0.0; // eigenfrequency
    double v_g = 0.0;   // group velocity, sites per unit time
};

// omega0 - 2 kappa cos(K - phi)          (one auxiliary cavity)
// omega0 - 2 kappa cos(phi) cos(K)       (two auxiliary cavities)
double dispersion(double K, double phi, double kappa, double omega0, int num_aux);
// d omega / d K for the same bands.
double group_velocity(double K, double phi, double kappa, double omega0, int num_aux);

// |v_g| at a frequency inside the band: sqrt((2 kappa_eff)^2 - (omega - omega0)^2).
// Throws BandEdgeError outside the band.
double group_velocity_at_frequency(double omega, double kappa, double omega0, int num_aux, double phi);

// `count` equally spaced K over (-pi, pi].
std::vector<BandPoint> band_points(double phi, double kappa, double omega0, int num_aux, std::size_t count);

std::vector<double> linear_grid(double lo, double hi, std::size_t count);

struct ResponseMetadata
{
    int sites_used = 0;
    double sup_change = 0.0; // sup |f_N - f_{N/2}| at the reported size
    bool converged = false;
    bool regularized = false;
    std::string note;
};

struct ResponseCurve
{
    std::vector<double> omega;
    std::vector<double> f;
    ResponseMetadata meta;

    std::vector<double> decibels() const;
};

struct ResponseOptions
{
    double tolerance = 1e-6;
    int max_sites = 1 << 15;
    double phi = 0.0;
    unsigned threads = 1;
};

// Port transfer function f(omega) = |1 + <0|G|0>|^2 with
//   G = -i port_rate (omega - H + i diag(gamma)/2)^{-1}
// on the truncated lattice, doubled until the curve stops changing.
ResponseCurve filter_response(const LatticeConfig &lattice, const LossModel &losses,
                              const std::vector<double> &omega, const ResponseOptions &options = {});

// Port-site diagonal element of (omega - H + i diag(gamma)/2)^{-1} for a fixed lattice.
// With `transparent_edges`, the two ends are terminated by the exact
// self-energy of a semi-infinite uniform lossless chain.
cplx port_resolvent(const LatticeConfig &lattice, const LossModel &losses, double omega, double phi,
                    bool transparent_edges = false);

void write_response_csv(std::ostream &os, const ResponseCurve &curve);

} // namespace oam

#endif // OAM_SPECTRUM_HPP
