#ifndef OAM_MEMORY_HPP
#define OAM_MEMORY_HPP

#include "oam/dynamics.hpp"

#include <string>
#include <vector>

namespace oam
{
enum class MemoryVariant
{
    PresetEcho, // one auxiliary cavity, phase echo 0 -> pi/2 -> -pi/2 -> -pi
    OnDemand    // two auxiliary cavities, 0 -> pi/2 (frozen) -> pi
};

const char *to_string(MemoryVariant v);
MemoryVariant memory_variant_from_string(const std::string &name);

// Write/store/read timing. Phase switches happen at the boundaries
// t_io, t_io + t_s (and t_io + 2 t_s for the echo variant); each ramp is
// centred on its boundary.
struct MemoryPlan
{
    MemoryVariant variant = MemoryVariant::PresetEcho;
    double t_io = 20.0;
    double t_s = 10.0; // echo: per half; on-demand: total hold
    double ramp = 1.0;
    double readout = 0.0; // length of the read plateau; 0 means 2 t_io

    void validate() const;

    std::vector<double> boundaries() const;
    std::vector<double> plateau_phases() const;
    double read_start() const { return boundaries().back(); }
    double end_time() const { return read_start() + (readout > 0.0 ? readout : 2.0 * t_io); }
    // Nominal storage time: t_io + 2 t_s (echo) or t_io + t_s (on-demand).
    double ideal_delay() const;
};

PhaseSchedule build_schedule(const MemoryPlan &plan);

struct DesignFlag
{
    bool passed = false;
    double margin = 0.0;
};

struct DesignChecks
{
    DesignFlag bandwidth; // 2 kappa t_io >= 12 pi
    DesignFlag emission;  // l_max / M >= 2 kappa t_io
    DesignFlag pulse;     // t_p >= 2.5 / kappa
    bool all_passed() const { return bandwidth.passed && emission.passed && pulse.passed; }
};

DesignChecks check_design(double kappa, double t_io, double l_max, int step_index, double t_p);

struct MemoryReport
{
    double efficiency = 0.0;
    double fidelity = 0.0;
    double delay = 0.0;
    double ideal_delay = 0.0;
    int peak_oam = 0;
    double input_energy = 0.0;
    double output_energy = 0.0;
    // Stored energy left at the end relative to its peak.
    double residual_fraction = 0.0;
    bool readout_complete = false;
    bool boundary_ok = true;
    int lattice_half_width = 0;
    DesignChecks design;

    bool valid() const { return boundary_ok; }
};

struct MemoryOptions
{
    double dt = 0.0;          // 0: 1e-3 / kappa
    bool auto_size = true;    // replace the lattice range by the light-cone default
    double boundary_fraction = 1e-6;
    std::size_t amplitude_stride = 0;
};

struct MemoryRun
{
    MemoryReport report;
    Scenario scenario;
    Trajectory trajectory;
};

// Wave-packet overlap between output and input maximised over delay:
//   max_tau |sum conj(out(t)) in(t - tau)|^2 / (sum |out|^2 sum |in|^2)
// on a common uniform grid with spacing dt. Returns {fidelity, tau}.
std::pair<double, double> best_overlap(const std::vector<cplx> &out, const std::vector<cplx> &in, double dt);

MemoryRun run_memory(const MemoryPlan &plan, const LatticeConfig &lattice, const LossModel &losses,
                     const InputPulse &input, const MemoryOptions &options = {});

// Gaussian input centred in the write window, carrier at omega0.
InputPulse default_memory_pulse(const MemoryPlan &plan, const LatticeConfig &lattice, double t_p);

} // namespace oam

#endif // OAM_MEMORY_HPP
