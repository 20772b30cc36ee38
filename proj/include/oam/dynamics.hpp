#ifndef OAM_DYNAMICS_HPP
#define OAM_DYNAMICS_HPP

#include "oam/lattice.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace oam
{
// Everything needed to integrate the coupled-mode equations once.
struct Scenario
{
    LatticeConfig lattice;
    LossModel losses;
    PhaseSchedule schedule = PhaseSchedule::constant(0.0);
    InputPulse input;

    double t_start = 0.0;
    double t_end = 1.0;
    double dt = 1e-3;
    // Simulate in the frame rotating at omega0; the carrier is removed from
    // both the amplitudes and the port fields.
    bool rotating_frame = true;

    // Initial site amplitudes (empty: cavity starts empty).
    std::vector<cplx> initial;

    // Warn when an edge site exceeds this fraction of the peak stored energy.
    double boundary_fraction = 1e-6;
    // Keep every n-th step of the full site-amplitude table (0: choose so
    // that roughly 2000 snapshots are kept).
    std::size_t amplitude_stride = 0;

    void validate() const;

    // Frequency of the simulation frame.
    double frame_frequency() const { return rotating_frame ? lattice.omega0 : 0.0; }
    std::size_t num_steps() const;
    // Largest dt the stability check accepts.
    double max_stable_dt() const;
};

// Half-width that keeps a wavefront launched at t_start inside the lattice up
// to t_end: ceil(2 kappa T) + margin.
int default_half_width(double kappa, double duration, int margin = 16);

// Cumulative energy bookkeeping. In the absence of numerical error
//   stored_final - stored_initial = input - output - intrinsic_loss.
struct FluxLedger
{
    double input_energy = 0.0;
    double output_energy = 0.0;
    double intrinsic_loss = 0.0;
    double stored_initial = 0.0;
    double stored_final = 0.0;

    double imbalance() const;
    // |imbalance| relative to the energy that passed through the system.
    double relative_residual() const;
};

struct Trajectory
{
    int j_min = 0;
    int j_max = 0;
    double frame_frequency = 0.0;

    std::vector<double> times;
    std::vector<cplx> e_in;
    std::vector<cplx> e_out;
    std::vector<double> stored; // sum_j |a_j|^2 at each time

    // Down-sampled site amplitudes, one row per entry in snapshot_times.
    std::vector<double> snapshot_times;
    std::vector<std::vector<cplx>> snapshots;

    std::vector<cplx> final_amplitudes;
    FluxLedger ledger;

    double peak_stored = 0.0;
    // Largest edge-site population relative to the running peak stored energy.
    double boundary_peak_fraction = 0.0;
    bool boundary_contaminated = false;

    double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
    std::size_t snapshot_index_near(double t) const;
    std::vector<double> populations(std::size_t snapshot) const;
};

// Right-hand side of the coupled-mode equations at time t:
//   da_j/dt = -i omega0 a_j + i [h a_{j+1} + conj(h) a_{j-1}] - gamma_j/2 a_j + delta_{j,0} sqrt(port) E_in(t)
// with h = kappa e^{-i phi(t)} (or kappa cos phi for two auxiliary cavities).
// In the rotating frame the -i omega0 term is dropped and E_in is shifted by omega0.
void derivative(std::span<const cplx> a, double t, const Scenario &scenario, std::span<cplx> out);
std::vector<cplx> derivative(std::span<const cplx> a, double t, const Scenario &scenario);

// Port relation E_out = -E_in + sqrt(port_rate) a_0.
inline cplx output_field(cplx a0, cplx e_in, double port_rate)
{
    return -e_in + std::sqrt(port_rate) * a0;
}

// Classical fourth-order Runge-Kutta over the scenario's fixed time grid.
Trajectory integrate(const Scenario &scenario);

// t, Re/Im E_in, Re/Im E_out, stored energy.
void write_trajectory_csv(std::ostream &os, const Trajectory &traj);
// One row per snapshot: t followed by |a_j|^2 for j = j_min..j_max.
void write_population_csv(std::ostream &os, const Trajectory &traj);

} // namespace oam

#endif // OAM_DYNAMICS_HPP
