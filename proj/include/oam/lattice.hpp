#ifndef OAM_LATTICE_HPP
#define OAM_LATTICE_HPP

#include "oam/errors.hpp"

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <span>
#include <vector>

namespace oam
{
using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// Synthetic OAM lattice. Site j carries OAM l = j * step_index; j = 0 is the
// port site that couples to the input/output field.
struct LatticeConfig
{
    int j_min = -64;
    int j_max = 64;
    double kappa = 1.0;  // tunneling rate (rad/time)
    double omega0 = 0.0; // main-cavity resonance (rad/time)
    int num_aux = 1;     // 1: single auxiliary cavity; 2: two with opposite imbalance
    int step_index = 1;  // SLM step M

    void validate() const;

    int num_sites() const { return j_max - j_min + 1; }
    // Array offset of site j.
    int offset(int j) const { return j - j_min; }
    int port_offset() const { return -j_min; }
    bool contains(int j) const { return j >= j_min && j <= j_max; }

    // Effective nearest-neighbour hopping amplitude used in the upper
    // (j -> j+1) slot of the coupling matrix.
    cplx hopping(double phi) const;
};

// Per-site loss rates:
//   gamma_j = port_rate * delta_{j,0}
//           + site0_extra * delta_{j,0} + near_port * exp(-|j| / decay_length) + uniform
// where everything except the port term is the intrinsic loss. `overrides`
// replaces the intrinsic part at individual sites.
struct LossModel
{
    double port_rate = 0.0;
    double site0_extra = 0.0;
    double near_port = 0.0;
    double decay_length = 1.0;
    double uniform = 0.0;
    std::map<int, double> overrides;

    static LossModel port_only(double port_rate);

    void validate() const;

    double intrinsic(int j) const;
    double total(int j) const { return intrinsic(j) + (j == 0 ? port_rate : 0.0); }
    bool lossless_interior() const;
};

// Total loss rate at site j, including the port contribution at j = 0.
double loss_rate(const LossModel &model, const LatticeConfig &lattice, int j);

enum class RampShape
{
    RaisedCosine,
    Linear
};

struct PhaseSegment
{
    double start = 0.0; // time at which the ramp towards `phase` begins
    double phase = 0.0; // target phase imbalance (radians)
    double ramp = 0.0;  // ramp duration; 0 means an instantaneous switch
};

// Piecewise phase-imbalance profile phi(t). Each segment ramps from the
// previous segment's target to its own target over [start, start + ramp] and
// then holds.
class PhaseSchedule
{
public:
    explicit PhaseSchedule(std::vector<PhaseSegment> segments,
                           RampShape shape = RampShape::RaisedCosine);

    static PhaseSchedule constant(double phase);

    double phase_at(double t) const;

    std::span<const PhaseSegment> segments() const { return segments_; }
    RampShape shape() const { return shape_; }
    // Time at which the last ramp finishes.
    double settle_time() const;

private:
    std::vector<PhaseSegment> segments_;
    RampShape shape_;
};

inline double phase_at(const PhaseSchedule &schedule, double t) { return schedule.phase_at(t); }

enum class EnvelopeKind
{
    None,
    Gaussian,
    Sampled
};

// Input field at the port. Gaussian:
//   E(t) = scale * exp(-(t - center)^2 / (2 width^2) - i carrier t)
// Sampled: the complex envelope is linearly interpolated from (sample_times,
// samples) and multiplied by scale * exp(-i carrier t); zero outside the samples.
struct InputPulse
{
    EnvelopeKind kind = EnvelopeKind::None;
    double scale = 1.0;
    double width = 1.0;
    double carrier = 0.0;
    double center = 0.0;
    std::vector<double> sample_times;
    std::vector<cplx> samples;

    static InputPulse none() { return {}; }
    static InputPulse gaussian(double scale, double width, double carrier, double center);

    void validate() const;

    cplx envelope(double t) const;
    // Field as seen in a frame rotating at frame_frequency:
    //   E(t) * exp(i frame_frequency t)
    cplx in_frame(double t, double frame_frequency) const;
    cplx operator()(double t) const { return in_frame(t, 0.0); }

    // Energy integral of |E|^2 over [t0, t1].
    double energy(double t0, double t1) const;
    double total_energy() const;
    // Interval outside which the envelope is negligible (|E|^2 < 1e-30 * peak).
    std::pair<double, double> support() const;
};

enum class Boundary
{
    Open,
    Periodic
};

// Coupling (effective Hamiltonian) matrix over the lattice sites: tridiagonal
// for open boundaries plus the two wrap-around corners for a ring.
struct CouplingMatrix
{
    std::vector<cplx> diag;
    std::vector<cplx> upper; // (k, k+1)
    std::vector<cplx> lower; // (k+1, k)
    cplx corner_upper{0.0}; // (n-1, 0), ring only
    cplx corner_lower{0.0}; // (0, n-1), ring only

    std::size_t size() const { return diag.size(); }
    Eigen::MatrixXcd dense() const;
};

// Lossless coupling matrix: diagonal omega0, super-diagonal kappa e^{-i phi},
// sub-diagonal kappa e^{+i phi} (num_aux = 1) or kappa cos(phi) on both
// (num_aux = 2).
CouplingMatrix coupling_matrix(const LatticeConfig &lattice, double phi,
                               Boundary boundary = Boundary::Open);
// Same with diagonal omega0 - i gamma_j / 2.
CouplingMatrix coupling_matrix(const LatticeConfig &lattice, double phi, const LossModel &losses,
                               Boundary boundary = Boundary::Open);

} // namespace oam

#endif // OAM_LATTICE_HPP
