#include "oam/memory.hpp"

#include <fftw3.h>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace oam
{
const char *to_string(MemoryVariant v)
{
    return v == MemoryVariant::PresetEcho ? "preset_echo" : "on_demand";
}

MemoryVariant memory_variant_from_string(const std::string &name)
{
    if (name == "preset_echo") {
        return MemoryVariant::PresetEcho;
    }
    if (name == "on_demand") {
        return MemoryVariant::OnDemand;
    }
    throw ConfigError(fmt::format("unknown memory variant '{}' (expected preset_echo or on_demand)", name));
}

void MemoryPlan::validate() const
{
    if (!(t_io > 0.0) || !(t_s > 0.0)) {
        throw ConfigError(fmt::format("t_io and t_s must be positive (got {}, {})", t_io, t_s));
    }
    if (!(ramp >= 0.0)) {
        throw ConfigError(fmt::format("ramp duration must be >= 0 (got {})", ramp));
    }
    if (ramp >= std::min(t_io, t_s)) {
        throw ConfigError(fmt::format("ramp duration {} overlaps a plateau (t_io = {}, t_s = {})", ramp, t_io, t_s));
    }
    if (readout < 0.0) {
        throw ConfigError("readout duration must be >= 0");
    }
    if (readout > 0.0 && readout < t_io) {
        throw ConfigError(fmt::format("readout plateau {} is shorter than t_io = {}", readout, t_io));
    }
}

std::vector<double> MemoryPlan::boundaries() const
{
    if (variant == MemoryVariant::PresetEcho) {
        return {t_io, t_io + t_s, t_io + 2.0 * t_s};
    }
    return {t_io, t_io + t_s};
}

std::vector<double> MemoryPlan::plateau_phases() const
{
    if (variant == MemoryVariant::PresetEcho) {
        return {0.0, 0.5 * pi, -0.5 * pi, -pi};
    }
    return {0.0, 0.5 * pi, pi};
}

double MemoryPlan::ideal_delay() const
{
    return variant == MemoryVariant::PresetEcho ? t_io + 2.0 * t_s : t_io + t_s;
}

PhaseSchedule build_schedule(const MemoryPlan &plan)
{
    plan.validate();
    const auto bounds = plan.boundaries();
    const auto phases = plan.plateau_phases();
    std::vector<PhaseSegment> segs;
    segs.push_back({0.0, phases[0], 0.0});
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        segs.push_back({bounds[i] - 0.5 * plan.ramp, phases[i + 1], plan.ramp});
    }
    return PhaseSchedule(std::move(segs));
}

DesignChecks check_design(double kappa, double t_io, double l_max, int step_index, double t_p)
{
    DesignChecks c;
    const double bandwidth_product = 2.0 * kappa * t_io;
    c.bandwidth.margin = bandwidth_product - 12.0 * pi;
    c.bandwidth.passed = c.bandwidth.margin >= 0.0;
    c.emission.margin = l_max / static_cast<double>(step_index) - bandwidth_product;
    c.emission.passed = c.emission.margin >= 0.0;
    c.pulse.margin = t_p - 2.5 / kappa;
    c.pulse.passed = c.pulse.margin >= 0.0;
    return c;
}

InputPulse default_memory_pulse(const MemoryPlan &plan, const LatticeConfig &lattice, double t_p)
{
    return InputPulse::gaussian(1.0, t_p, lattice.omega0, 0.5 * plan.t_io);
}

// ---------------------------------------------------------------------------

namespace
{
// FFTW planning is not thread-safe.
std::mutex &fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

class FftBuffer
{
public:
    explicit FftBuffer(std::size_t n)
        : n_(n), data_(static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * n)))
    {
        std::lock_guard lock(fftw_planner_mutex());
        forward_ = fftw_plan_dft_1d(static_cast<int>(n), data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_1d(static_cast<int>(n), data_, data_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftBuffer()
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
        fftw_free(data_);
    }
    FftBuffer(const FftBuffer &) = delete;
    FftBuffer &operator=(const FftBuffer &) = delete;

    cplx *data() { return reinterpret_cast<cplx *>(data_); }
    void forward() { fftw_execute(forward_); }
    void backward() { fftw_execute(backward_); }
    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    fftw_complex *data_;
    fftw_plan forward_{};
    fftw_plan backward_{};
};

std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n) {
        p <<= 1;
    }
    return p;
}

double trapezoid_energy(const std::vector<cplx> &v, std::size_t begin, std::size_t end, double dt)
{
    if (end <= begin + 1) {
        return 0.0;
    }
    double s = 0.5 * (std::norm(v[begin]) + std::norm(v[end - 1]));
    for (std::size_t i = begin + 1; i + 1 < end; ++i) {
        s += std::norm(v[i]);
    }
    return s * dt;
}
} // namespace

std::pair<double, double> best_overlap(const std::vector<cplx> &out, const std::vector<cplx> &in, double dt)
{
    if (out.size() != in.size() || out.empty()) {
        throw ConfigError("overlap needs two equally sampled, non-empty signals");
    }
    double e_out = 0.0, e_in = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        e_out += std::norm(out[i]);
        e_in += std::norm(in[i]);
    }
    if (e_out <= 0.0 || e_in <= 0.0) {
        return {0.0, 0.0};
    }

    const std::size_t n = out.size();
    const std::size_t m = next_pow2(2 * n);
    FftBuffer a(m), b(m);
    std::fill(a.data(), a.data() + m, cplx{});
    std::fill(b.data(), b.data() + m, cplx{});
    std::copy(out.begin(), out.end(), a.data());
    std::copy(in.begin(), in.end(), b.data());
    a.forward();
    b.forward();
    for (std::size_t k = 0; k < m; ++k) {
        a.data()[k] *= std::conj(b.data()[k]);
    }
    a.backward();
    // a[k] = m * sum_t out(t + k) conj(in(t)), negative lags wrapped.

    auto corr2 = [&](std::size_t k) { return std::norm(a.data()[k % m]); };
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t k = 0; k < m; ++k) {
        if (k >= n && k <= m - n) {
            continue;
        }
        const double v = corr2(k);
        if (v > best_val) {
            best_val = v;
            best = k;
        }
    }
    const double scale = static_cast<double>(m) * static_cast<double>(m);
    const double fidelity = best_val / scale / (e_out * e_in);

    // Parabolic refinement of the peak position.
    const double ym = corr2(best + m - 1), y0 = best_val, yp = corr2(best + 1);
    const double denom = ym - 2.0 * y0 + yp;
    const double shift = denom < 0.0 ? 0.5 * (ym - yp) / denom : 0.0;
    const auto lag = static_cast<double>(best) - (best > m / 2 ? static_cast<double>(m) : 0.0);
    return {fidelity, (lag + shift) * dt};
}

MemoryRun run_memory(const MemoryPlan &plan, const LatticeConfig &lattice, const LossModel &losses,
                     const InputPulse &input, const MemoryOptions &options)
{
    plan.validate();
    lattice.validate();
    losses.validate();
    input.validate();
    if (input.kind == EnvelopeKind::None) {
        throw ConfigError("memory run needs an input pulse");
    }
    const double total = input.total_energy();
    const double inside = input.energy(0.0, plan.t_io);
    if (!(total > 0.0) || inside < 0.999 * total) {
        throw ConfigError(fmt::format("only {:.4f}% of the pulse energy lies inside the write window [0, {}]",
                                      total > 0.0 ? 100.0 * inside / total : 0.0, plan.t_io));
    }

    MemoryRun run;
    Scenario &s = run.scenario;
    s.lattice = lattice;
    if (options.auto_size) {
        const int half = default_half_width(lattice.kappa, plan.end_time());
        s.lattice.j_min = -half;
        s.lattice.j_max = half;
    }
    s.losses = losses;
    s.schedule = build_schedule(plan);
    s.input = input;
    s.t_start = 0.0;
    s.t_end = plan.end_time();
    s.dt = options.dt > 0.0 ? options.dt : 1e-3 / lattice.kappa;
    s.rotating_frame = true;
    s.boundary_fraction = options.boundary_fraction;
    s.amplitude_stride = options.amplitude_stride;

    run.trajectory = integrate(s);
    const Trajectory &traj = run.trajectory;
    MemoryReport &r = run.report;

    const double dt = s.dt;
    const std::size_t n = traj.times.size();
    const double read_from = plan.read_start() - 0.5 * plan.ramp;
    const auto first_read = static_cast<std::size_t>(
        std::distance(traj.times.begin(), std::lower_bound(traj.times.begin(), traj.times.end(), read_from - 1e-12)));

    r.input_energy = trapezoid_energy(traj.e_in, 0, n, dt);
    r.output_energy = trapezoid_energy(traj.e_out, first_read, n, dt);
    r.efficiency = r.input_energy > 0.0 ? r.output_energy / r.input_energy : 0.0;

    std::vector<cplx> windowed(n, cplx{});
    std::copy(traj.e_out.begin() + static_cast<std::ptrdiff_t>(first_read), traj.e_out.end(),
              windowed.begin() + static_cast<std::ptrdiff_t>(first_read));
    std::tie(r.fidelity, r.delay) = best_overlap(windowed, traj.e_in, dt);
    r.ideal_delay = plan.ideal_delay();

    double peak_pop = 0.0;
    for (const auto &row : traj.snapshots) {
        for (cplx v : row) {
            peak_pop = std::max(peak_pop, std::norm(v));
        }
    }
    int peak_site = 0;
    for (const auto &row : traj.snapshots) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (std::norm(row[k]) > 1e-6 * peak_pop) {
                peak_site = std::max(peak_site, std::abs(static_cast<int>(k) + traj.j_min));
            }
        }
    }
    r.peak_oam = peak_site * s.lattice.step_index;

    r.residual_fraction = traj.peak_stored > 0.0 ? traj.stored.back() / traj.peak_stored : 0.0;
    r.readout_complete = r.residual_fraction < 1e-4;
    r.boundary_ok = !traj.boundary_contaminated;
    r.lattice_half_width = s.lattice.j_max;
    const double t_p = input.kind == EnvelopeKind::Gaussian ? input.width : 0.0;
    r.design = check_design(s.lattice.kappa, plan.t_io, static_cast<double>(s.lattice.j_max * s.lattice.step_index),
                            s.lattice.step_index, t_p);
    return run;
}

} // namespace oam
