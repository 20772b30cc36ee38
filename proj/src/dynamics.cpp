#include "oam/dynamics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace oam
{
namespace
{
// RK4 is stable on the imaginary axis up to |z| = 2 sqrt(2) and on the
// negative real axis up to 2.785; stay inside both with some room.
constexpr double kStabilityBound = 2.5;
// Largest phase advance per step allowed for the driving carrier.
constexpr double kCarrierBound = 0.5;

double spectral_radius(const Scenario &s)
{
    double gamma_max = 0.0;
    for (int j = s.lattice.j_min; j <= s.lattice.j_max; ++j) {
        gamma_max = std::max(gamma_max, s.losses.total(j));
    }
    const double hop = s.lattice.num_sites() > 1 ? 2.0 * s.lattice.kappa : 0.0;
    return hop + 0.5 * gamma_max + (s.rotating_frame ? 0.0 : std::abs(s.lattice.omega0));
}

double carrier_offset(const Scenario &s)
{
    if (s.input.kind == EnvelopeKind::None) {
        return 0.0;
    }
    return std::abs(s.input.carrier - s.frame_frequency());
}
} // namespace

void Scenario::validate() const
{
    lattice.validate();
    losses.validate();
    input.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ConfigError(fmt::format("dt must be positive (got {})", dt));
    }
    if (!(t_end > t_start)) {
        throw ConfigError(fmt::format("t_end ({}) must exceed t_start ({})", t_end, t_start));
    }
    if (!initial.empty() && initial.size() != static_cast<std::size_t>(lattice.num_sites())) {
        throw ConfigError(fmt::format("initial state has {} entries, lattice has {} sites", initial.size(),
                                      lattice.num_sites()));
    }
    if (!(boundary_fraction > 0.0)) {
        throw ConfigError("boundary_fraction must be positive");
    }
    const double limit = max_stable_dt();
    if (dt > limit) {
        throw NumericalError(fmt::format("time step {} exceeds the stability limit {}", dt, limit),
                             fmt::format("dt = {:.6g}", 0.5 * limit));
    }
}

double Scenario::max_stable_dt() const
{
    double limit = kStabilityBound / std::max(spectral_radius(*this), 1e-300);
    const double offset = carrier_offset(*this);
    if (offset > 0.0) {
        limit = std::min(limit, kCarrierBound / offset);
    }
    return limit;
}

std::size_t Scenario::num_steps() const
{
    return static_cast<std::size_t>(std::ceil((t_end - t_start) / dt - 1e-9));
}

int default_half_width(double kappa, double duration, int margin)
{
    return static_cast<int>(std::ceil(2.0 * kappa * duration)) + margin;
}

double FluxLedger::imbalance() const
{
    return (stored_final - stored_initial) - (input_energy - output_energy - intrinsic_loss);
}

double FluxLedger::relative_residual() const
{
    const double scale = std::max({input_energy, stored_initial, output_energy, 1e-300});
    return std::abs(imbalance()) / scale;
}

std::size_t Trajectory::snapshot_index_near(double t) const
{
    if (snapshot_times.empty()) {
        return 0;
    }
    auto it = std::lower_bound(snapshot_times.begin(), snapshot_times.end(), t);
    if (it == snapshot_times.end()) {
        return snapshot_times.size() - 1;
    }
    const auto k = static_cast<std::size_t>(std::distance(snapshot_times.begin(), it));
    if (k > 0 && std::abs(snapshot_times[k - 1] - t) <= std::abs(snapshot_times[k] - t)) {
        return k - 1;
    }
    return k;
}

std::vector<double> Trajectory::populations(std::size_t snapshot) const
{
    const auto &row = snapshots.at(snapshot);
    std::vector<double> p(row.size());
    std::transform(row.begin(), row.end(), p.begin(), [](cplx v) { return std::norm(v); });
    return p;
}

// ---------------------------------------------------------------------------

namespace
{
// Precomputed pieces of the right-hand side shared by all stages.
class Rhs
{
public:
    explicit Rhs(const Scenario &s)
        : s_(s),
          n_(static_cast<std::size_t>(s.lattice.num_sites())),
          port_(static_cast<std::size_t>(s.lattice.port_offset())),
          sqrt_port_(std::sqrt(s.losses.port_rate)),
          frame_(s.frame_frequency())
    {
        diag_.resize(n_);
        intrinsic_.resize(n_);
        const double onsite = s.rotating_frame ? 0.0 : s.lattice.omega0;
        for (int j = s.lattice.j_min; j <= s.lattice.j_max; ++j) {
            const auto k = static_cast<std::size_t>(s.lattice.offset(j));
            diag_[k] = cplx(-0.5 * s.losses.total(j), -onsite);
            intrinsic_[k] = s.losses.intrinsic(j);
        }
    }

    cplx input(double t) const { return s_.input.in_frame(t, frame_); }
    cplx output(std::span<const cplx> a, cplx e_in) const { return output_field(a[port_], e_in, s_.losses.port_rate); }

    // out = f(a, t); returns the intrinsic loss power sum_j gamma_j |a_j|^2.
    double eval(std::span<const cplx> a, double t, cplx e_in, std::span<cplx> out) const
    {
        const cplx h = s_.lattice.hopping(s_.schedule.phase_at(t));
        const cplx ih = cplx(0.0, 1.0) * h;
        const cplx ihc = cplx(0.0, 1.0) * std::conj(h);
        double loss = 0.0;
        for (std::size_t k = 0; k < n_; ++k) {
            cplx v = diag_[k] * a[k];
            if (k + 1 < n_) {
                v += ih * a[k + 1];
            }
            if (k > 0) {
                v += ihc * a[k - 1];
            }
            out[k] = v;
            loss += intrinsic_[k] * std::norm(a[k]);
        }
        out[port_] += sqrt_port_ * e_in;
        return loss;
    }

    std::size_t size() const { return n_; }
    std::size_t port() const { return port_; }

private:
    const Scenario &s_;
    std::size_t n_;
    std::size_t port_;
    double sqrt_port_;
    double frame_;
    std::vector<cplx> diag_;
    std::vector<double> intrinsic_;
};

double norm2(std::span<const cplx> a)
{
    double s = 0.0;
    for (cplx v : a) {
        s += std::norm(v);
    }
    return s;
}
} // namespace

void derivative(std::span<const cplx> a, double t, const Scenario &scenario, std::span<cplx> out)
{
    const Rhs rhs(scenario);
    if (a.size() != rhs.size() || out.size() != rhs.size()) {
        throw ConfigError(fmt::format("amplitude vector has {} entries, lattice has {} sites", a.size(), rhs.size()));
    }
    rhs.eval(a, t, rhs.input(t), out);
}

std::vector<cplx> derivative(std::span<const cplx> a, double t, const Scenario &scenario)
{
    std::vector<cplx> out(a.size());
    derivative(a, t, scenario, out);
    return out;
}

Trajectory integrate(const Scenario &scenario)
{
    scenario.validate();

    const Rhs rhs(scenario);
    const std::size_t n = rhs.size();
    const std::size_t steps = scenario.num_steps();
    const double h = scenario.dt;
    const std::size_t stride =
        scenario.amplitude_stride > 0 ? scenario.amplitude_stride : std::max<std::size_t>(1, steps / 2000);

    Trajectory traj;
    traj.j_min = scenario.lattice.j_min;
    traj.j_max = scenario.lattice.j_max;
    traj.frame_frequency = scenario.frame_frequency();
    traj.times.reserve(steps + 1);
    traj.e_in.reserve(steps + 1);
    traj.e_out.reserve(steps + 1);
    traj.stored.reserve(steps + 1);

    std::vector<cplx> a = scenario.initial.empty() ? std::vector<cplx>(n, cplx{}) : scenario.initial;
    std::vector<cplx> k1(n), k2(n), k3(n), k4(n), tmp(n);

    auto record = [&](std::size_t step, double t, cplx e_in) {
        const double stored = norm2(a);
        traj.times.push_back(t);
        traj.e_in.push_back(e_in);
        traj.e_out.push_back(rhs.output(a, e_in));
        traj.stored.push_back(stored);
        if (!std::isfinite(stored)) {
            throw NumericalError(fmt::format("integration diverged at t = {}", t),
                                 fmt::format("dt = {:.6g}", 0.5 * h));
        }
        traj.peak_stored = std::max(traj.peak_stored, stored);
        if (traj.peak_stored > 0.0 && n > 1) {
            const double edge = std::max(std::norm(a.front()), std::norm(a.back()));
            traj.boundary_peak_fraction = std::max(traj.boundary_peak_fraction, edge / traj.peak_stored);
        }
        if (step % stride == 0 || step == steps) {
            traj.snapshot_times.push_back(t);
            traj.snapshots.push_back(a);
        }
    };

    // Port powers and intrinsic loss are integrated with the same stage
    // weights as the amplitudes, as extra components of the state.
    auto port_power = [&](std::span<const cplx> y, cplx e_in, double &p_in, double &p_out) {
        p_in = std::norm(e_in);
        p_out = std::norm(rhs.output(y, e_in));
    };

    traj.ledger.stored_initial = norm2(a);
    const double t0 = scenario.t_start;
    cplx e_now = rhs.input(t0);
    record(0, t0, e_now);

    for (std::size_t step = 0; step < steps; ++step) {
        const double t = t0 + static_cast<double>(step) * h;
        const double t_half = t + 0.5 * h;
        const double t_next = t0 + static_cast<double>(step + 1) * h;
        const cplx e_half = rhs.input(t_half);
        const cplx e_next = rhs.input(t_next);

        double in1, out1, in2, out2, in3, out3, in4, out4;
        const double l1 = rhs.eval(a, t, e_now, k1);
        port_power(a, e_now, in1, out1);
        for (std::size_t k = 0; k < n; ++k) {
            tmp[k] = a[k] + 0.5 * h * k1[k];
        }
        const double l2 = rhs.eval(tmp, t_half, e_half, k2);
        port_power(tmp, e_half, in2, out2);
        for (std::size_t k = 0; k < n; ++k) {
            tmp[k] = a[k] + 0.5 * h * k2[k];
        }
        const double l3 = rhs.eval(tmp, t_half, e_half, k3);
        port_power(tmp, e_half, in3, out3);
        for (std::size_t k = 0; k < n; ++k) {
            tmp[k] = a[k] + h * k3[k];
        }
        const double l4 = rhs.eval(tmp, t_next, e_next, k4);
        port_power(tmp, e_next, in4, out4);

        for (std::size_t k = 0; k < n; ++k) {
            a[k] += (h / 6.0) * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        }
        traj.ledger.input_energy += (h / 6.0) * (in1 + 2.0 * in2 + 2.0 * in3 + in4);
        traj.ledger.output_energy += (h / 6.0) * (out1 + 2.0 * out2 + 2.0 * out3 + out4);
        traj.ledger.intrinsic_loss += (h / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4);

        e_now = e_next;
        record(step + 1, t_next, e_now);
    }

    traj.ledger.stored_final = norm2(a);
    traj.final_amplitudes = std::move(a);
    traj.boundary_contaminated = traj.boundary_peak_fraction > scenario.boundary_fraction;
    return traj;
}

// ---------------------------------------------------------------------------

void write_trajectory_csv(std::ostream &os, const Trajectory &traj)
{
    os << "t,re_e_in,im_e_in,re_e_out,im_e_out,stored_energy\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", traj.times[i], traj.e_in[i].real(),
                          traj.e_in[i].imag(), traj.e_out[i].real(), traj.e_out[i].imag(), traj.stored[i]);
    }
}

void write_population_csv(std::ostream &os, const Trajectory &traj)
{
    os << "t";
    for (int j = traj.j_min; j <= traj.j_max; ++j) {
        os << ",j" << j;
    }
    os << '\n';
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        os << fmt::format("{:.17g}", traj.snapshot_times[i]);
        for (cplx v : traj.snapshots[i]) {
            os << fmt::format(",{:.17g}", std::norm(v));
        }
        os << '\n';
    }
}

} // namespace oam
