#include "oam/lattice.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace oam
{
void LatticeConfig::validate() const
{
    if (j_min > 0 || j_max < 0) {
        throw ConfigError(fmt::format("lattice range [{}, {}] must contain the port site j = 0", j_min, j_max));
    }
    if (!(kappa > 0.0) || !std::isfinite(kappa)) {
        throw ConfigError(fmt::format("kappa must be positive and finite (got {})", kappa));
    }
    if (!std::isfinite(omega0)) {
        throw ConfigError("omega0 must be finite");
    }
    if (num_aux != 1 && num_aux != 2) {
        throw ConfigError(fmt::format("num_aux must be 1 or 2 (got {})", num_aux));
    }
    if (step_index < 1) {
        throw ConfigError(fmt::format("step_index must be >= 1 (got {})", step_index));
    }
}

cplx LatticeConfig::hopping(double phi) const
{
    if (num_aux == 2) {
        // (kappa/2)(e^{-i phi} + e^{+i phi})
        return {kappa * std::cos(phi), 0.0};
    }
    return kappa * std::polar(1.0, -phi);
}

LossModel LossModel::port_only(double port_rate)
{
    LossModel m;
    m.port_rate = port_rate;
    return m;
}

void LossModel::validate() const
{
    auto check = [](double v, const char *name) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ConfigError(fmt::format("loss parameter {} must be finite and >= 0 (got {})", name, v));
        }
    };
    check(port_rate, "port_rate");
    check(site0_extra, "site0_extra");
    check(near_port, "near_port");
    check(uniform, "uniform");
    if (!(decay_length > 0.0) || !std::isfinite(decay_length)) {
        throw ConfigError(fmt::format("loss decay_length must be positive (got {})", decay_length));
    }
    for (const auto &[j, v] : overrides) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ConfigError(fmt::format("loss override at site {} must be >= 0 (got {})", j, v));
        }
    }
}

double LossModel::intrinsic(int j) const
{
    if (auto it = overrides.find(j); it != overrides.end()) {
        return it->second;
    }
    double rate = uniform;
    if (near_port != 0.0) {
        rate += near_port * std::exp(-std::abs(static_cast<double>(j)) / decay_length);
    }
    if (j == 0) {
        rate += site0_extra;
    }
    return rate;
}

bool LossModel::lossless_interior() const
{
    if (site0_extra != 0.0 || near_port != 0.0 || uniform != 0.0) {
        return false;
    }
    return std::all_of(overrides.begin(), overrides.end(), [](const auto &kv) { return kv.second == 0.0; });
}

double loss_rate(const LossModel &model, const LatticeConfig &lattice, int j)
{
    if (!lattice.contains(j)) {
        throw IndexError(fmt::format("site {} outside lattice [{}, {}]", j, lattice.j_min, lattice.j_max));
    }
    return model.total(j);
}

// ---------------------------------------------------------------------------

PhaseSchedule::PhaseSchedule(std::vector<PhaseSegment> segments, RampShape shape)
    : segments_(std::move(segments)), shape_(shape)
{
    if (segments_.empty()) {
        throw ConfigError("phase schedule has no segments");
    }
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto &s = segments_[i];
        if (!std::isfinite(s.start) || !std::isfinite(s.phase) || !std::isfinite(s.ramp)) {
            throw ConfigError(fmt::format("phase segment {} has a non-finite field", i));
        }
        if (s.ramp < 0.0) {
            throw ConfigError(fmt::format("phase segment {} has negative ramp duration {}", i, s.ramp));
        }
        if (i > 0) {
            const auto &prev = segments_[i - 1];
            if (!(s.start > prev.start)) {
                throw ConfigError(fmt::format("phase segments must be strictly ordered by start time (segment {})", i));
            }
            if (prev.start + prev.ramp > s.start) {
                throw ConfigError(fmt::format("ramp of phase segment {} overlaps segment {}", i - 1, i));
            }
        }
    }
}

PhaseSchedule PhaseSchedule::constant(double phase) { return PhaseSchedule({{0.0, phase, 0.0}}); }

double PhaseSchedule::phase_at(double t) const
{
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double v, const PhaseSegment &s) { return v < s.start; });
    if (it == segments_.begin()) {
        return segments_.front().phase;
    }
    const auto idx = static_cast<std::size_t>(std::distance(segments_.begin(), it)) - 1;
    const PhaseSegment &seg = segments_[idx];
    if (idx == 0 || seg.ramp == 0.0 || t >= seg.start + seg.ramp) {
        return seg.phase;
    }
    const double from = segments_[idx - 1].phase;
    const double u = (t - seg.start) / seg.ramp;
    const double w = shape_ == RampShape::RaisedCosine ? 0.5 - 0.5 * std::cos(pi * u) : u;
    return from + (seg.phase - from) * w;
}

double PhaseSchedule::settle_time() const
{
    const auto &last = segments_.back();
    return last.start + last.ramp;
}

// ---------------------------------------------------------------------------

InputPulse InputPulse::gaussian(double scale, double width, double carrier, double center)
{
    InputPulse p;
    p.kind = EnvelopeKind::Gaussian;
    p.scale = scale;
    p.width = width;
    p.carrier = carrier;
    p.center = center;
    return p;
}

void InputPulse::validate() const
{
    if (!std::isfinite(scale) || !std::isfinite(carrier) || !std::isfinite(center)) {
        throw ConfigError("input pulse has a non-finite parameter");
    }
    if (kind == EnvelopeKind::Gaussian && !(width > 0.0)) {
        throw ConfigError(fmt::format("gaussian pulse width must be positive (got {})", width));
    }
    if (kind == EnvelopeKind::Sampled) {
        if (sample_times.size() < 2 || sample_times.size() != samples.size()) {
            throw ConfigError("sampled pulse needs >= 2 samples with matching time axis");
        }
        for (std::size_t i = 1; i < sample_times.size(); ++i) {
            if (!(sample_times[i] > sample_times[i - 1])) {
                throw ConfigError("sampled pulse times must be strictly increasing");
            }
        }
    }
}

cplx InputPulse::envelope(double t) const
{
    switch (kind) {
    case EnvelopeKind::None:
        return 0.0;
    case EnvelopeKind::Gaussian: {
        const double x = (t - center) / width;
        return scale * std::exp(-0.5 * x * x);
    }
    case EnvelopeKind::Sampled: {
        if (t < sample_times.front() || t > sample_times.back()) {
            return 0.0;
        }
        auto it = std::upper_bound(sample_times.begin(), sample_times.end(), t);
        if (it == sample_times.end()) {
            return scale * samples.back();
        }
        const auto k = static_cast<std::size_t>(std::distance(sample_times.begin(), it));
        const double u = (t - sample_times[k - 1]) / (sample_times[k] - sample_times[k - 1]);
        return scale * (samples[k - 1] + (samples[k] - samples[k - 1]) * u);
    }
    }
    return 0.0;
}

cplx InputPulse::in_frame(double t, double frame_frequency) const
{
    if (kind == EnvelopeKind::None) {
        return 0.0;
    }
    return envelope(t) * std::polar(1.0, -(carrier - frame_frequency) * t);
}

double InputPulse::energy(double t0, double t1) const
{
    if (t1 <= t0) {
        return 0.0;
    }
    switch (kind) {
    case EnvelopeKind::None:
        return 0.0;
    case EnvelopeKind::Gaussian:
        return scale * scale * width * std::sqrt(pi) * 0.5 *
               (std::erf((t1 - center) / width) - std::erf((t0 - center) / width));
    case EnvelopeKind::Sampled: {
        // |E|^2 is quadratic on each linear piece; integrate exactly.
        double sum = 0.0;
        for (std::size_t k = 1; k < sample_times.size(); ++k) {
            const double a = std::max(t0, sample_times[k - 1]);
            const double b = std::min(t1, sample_times[k]);
            if (b <= a) {
                continue;
            }
            const cplx p = envelope(a);
            const cplx q = envelope(b);
            sum += (b - a) * (std::norm(p) + std::real(p * std::conj(q)) + std::norm(q)) / 3.0;
        }
        return sum;
    }
    }
    return 0.0;
}

double InputPulse::total_energy() const
{
    const auto [a, b] = support();
    if (kind == EnvelopeKind::Gaussian) {
        return scale * scale * width * std::sqrt(pi);
    }
    return energy(a, b);
}

std::pair<double, double> InputPulse::support() const
{
    switch (kind) {
    case EnvelopeKind::None:
        return {0.0, 0.0};
    case EnvelopeKind::Gaussian:
        return {center - 8.31 * width, center + 8.31 * width};
    case EnvelopeKind::Sampled:
        return {sample_times.front(), sample_times.back()};
    }
    return {0.0, 0.0};
}

// ---------------------------------------------------------------------------

Eigen::MatrixXcd CouplingMatrix::dense() const
{
    const auto n = static_cast<Eigen::Index>(diag.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        m(k, k) = diag[static_cast<std::size_t>(k)];
    }
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        m(k, k + 1) = upper[static_cast<std::size_t>(k)];
        m(k + 1, k) = lower[static_cast<std::size_t>(k)];
    }
    if (n > 2) {
        m(n - 1, 0) += corner_upper;
        m(0, n - 1) += corner_lower;
    }
    return m;
}

namespace
{
CouplingMatrix assemble(const LatticeConfig &lattice, double phi, const LossModel *losses, Boundary boundary)
{
    lattice.validate();
    if (losses != nullptr) {
        losses->validate();
    }
    const auto n = static_cast<std::size_t>(lattice.num_sites());
    const cplx hop = lattice.hopping(phi);

    CouplingMatrix m;
    m.diag.resize(n);
    for (int j = lattice.j_min; j <= lattice.j_max; ++j) {
        const double gamma = losses != nullptr ? losses->total(j) : 0.0;
        m.diag[static_cast<std::size_t>(lattice.offset(j))] = cplx(lattice.omega0, -0.5 * gamma);
    }
    m.upper.assign(n > 0 ? n - 1 : 0, hop);
    m.lower.assign(n > 0 ? n - 1 : 0, std::conj(hop));
    if (boundary == Boundary::Periodic && n > 2) {
        // site n-1 couples forward onto site 0, like an upper entry
        m.corner_upper = hop;
        m.corner_lower = std::conj(hop);
    }
    return m;
}
} // namespace

CouplingMatrix coupling_matrix(const LatticeConfig &lattice, double phi, Boundary boundary)
{
    return assemble(lattice, phi, nullptr, boundary);
}

CouplingMatrix coupling_matrix(const LatticeConfig &lattice, double phi, const LossModel &losses, Boundary boundary)
{
    return assemble(lattice, phi, &losses, boundary);
}

} // namespace oam
