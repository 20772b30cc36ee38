#ifndef OAM_FILTER_DESIGN_HPP
#define OAM_FILTER_DESIGN_HPP

#include "oam/spectrum.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace oam
{
// One OAM-lattice cavity used as a reflective stopband element. The port
// rate lives in losses.port_rate.
struct FilterStage
{
    double kappa = 1.0;
    double omega0 = 0.0;
    LossModel losses;

    void validate() const;
    double port_rate() const { return losses.port_rate; }
};

// The two frequencies omega0 -/+ Delta where 2 |v_g| equals the port rate:
// Delta = sqrt(4 kappa^2 - (port_rate / 2)^2).
std::pair<double, double> max_absorption_frequency(const FilterStage &stage);

// Port rate that puts the maximum absorption at omega_m.
double gamma_for_target(double omega_m, double kappa, double omega0);

// Stage whose maximum absorption sits at omega0 - offset, with losses
//   near_port * exp(-|j|) + uniform on top of the port rate.
FilterStage stage_for_target(double kappa, double omega0, double offset, double near_port, double uniform);

struct CascadeOptions
{
    ResponseOptions response;
    int initial_half_width = 32;
};

// Pointwise product of the stage transfer functions.
ResponseCurve cascade_response(const std::vector<FilterStage> &stages, const std::vector<double> &omega,
                               const CascadeOptions &options = {});

struct FilterMetrics
{
    double width_3db = 0.0;
    double width_25db = 0.0;
    double shape_factor = 0.0;
    double min_db = 0.0;       // rejection depth
    double min_omega = 0.0;    // location of the deepest minimum
    bool has_hump = false;
    double hump_db = 0.0;      // max of f between the two deepest minima
    double hump_omega = 0.0;
    std::pair<double, double> edges_3db{0.0, 0.0};
    std::pair<double, double> edges_25db{0.0, 0.0};
};

// Widths from linear-in-dB interpolation of the threshold crossings around
// the deepest minimum of a sampled curve.
FilterMetrics filter_metrics(const ResponseCurve &curve);

// Same, with each bracketed crossing bisected on `f` until the widths are
// stable to `rel_tol`.
FilterMetrics filter_metrics(const ResponseCurve &curve, const std::function<double(double)> &f,
                             double rel_tol = 1e-3);

// Exact f(omega) of a cascade at one frequency (used for crossing refinement).
double cascade_value(const std::vector<FilterStage> &stages, double omega, int half_width = 512);

struct DesignTarget
{
    double center = 0.0;     // stopband centre (rad/time)
    double width_3db = 4.4;  // desired -3 dB stopband width
    double rejection_db = 25.0;
    double near_port = 0.1;  // loss model, in units of kappa
    double uniform = 0.1;
    std::size_t grid_points = 2001;
};

struct DesignResult
{
    double kappa = 0.0;
    std::vector<FilterStage> stages;
    std::vector<double> offsets; // absorption offsets below centre, in units of kappa
    FilterMetrics metrics;
    ResponseCurve curve;
    bool meets_rejection = false;
};

// Two-stage design: one stage absorbs near the band edge, the other nearer
// the centre. The offsets are chosen on a grid to maximise the shape factor
// subject to the rejection target, then kappa is scaled to hit the width.
DesignResult design_two_stage(const DesignTarget &target);

} // namespace oam

#endif // OAM_FILTER_DESIGN_HPP
