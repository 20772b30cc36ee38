#include "oam/filter_design.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <future>

namespace oam
{
void FilterStage::validate() const
{
    if (!(kappa > 0.0)) {
        throw ConfigError(fmt::format("stage kappa must be positive (got {})", kappa));
    }
    losses.validate();
}

std::pair<double, double> max_absorption_frequency(const FilterStage &stage)
{
    stage.validate();
    const double g = stage.port_rate();
    if (!(g > 0.0)) {
        throw BandEdgeError("port rate must be positive for an absorption maximum to exist");
    }
    if (g > 4.0 * stage.kappa) {
        throw BandEdgeError(fmt::format("port rate {} exceeds 4 kappa = {}: no in-band absorption maximum", g,
                                        4.0 * stage.kappa));
    }
    const double delta = std::sqrt(std::max(0.0, 4.0 * stage.kappa * stage.kappa - 0.25 * g * g));
    return {stage.omega0 - delta, stage.omega0 + delta};
}

double gamma_for_target(double omega_m, double kappa, double omega0)
{
    const double d = omega_m - omega0;
    if (!(kappa > 0.0) || std::abs(d) >= 2.0 * kappa) {
        throw BandEdgeError(fmt::format("target offset {} is not inside the band (half width {})", d, 2.0 * kappa));
    }
    return 2.0 * std::sqrt(4.0 * kappa * kappa - d * d);
}

FilterStage stage_for_target(double kappa, double omega0, double offset, double near_port, double uniform)
{
    FilterStage s;
    s.kappa = kappa;
    s.omega0 = omega0;
    s.losses.port_rate = gamma_for_target(omega0 - offset, kappa, omega0);
    s.losses.near_port = near_port;
    s.losses.uniform = uniform;
    return s;
}

namespace
{
LatticeConfig stage_lattice(const FilterStage &s, int half_width)
{
    LatticeConfig lat;
    lat.j_min = -half_width;
    lat.j_max = half_width;
    lat.kappa = s.kappa;
    lat.omega0 = s.omega0;
    return lat;
}
} // namespace

ResponseCurve cascade_response(const std::vector<FilterStage> &stages, const std::vector<double> &omega,
                               const CascadeOptions &options)
{
    if (stages.empty()) {
        throw ConfigError("a cascade needs at least one stage");
    }
    for (const auto &s : stages) {
        s.validate();
    }

    std::vector<ResponseCurve> parts(stages.size());
    if (options.response.threads > 1 && stages.size() > 1) {
        std::vector<std::future<ResponseCurve>> futures;
        for (const auto &s : stages) {
            futures.push_back(std::async(std::launch::async, [&, s] {
                return filter_response(stage_lattice(s, options.initial_half_width), s.losses, omega,
                                       options.response);
            }));
        }
        for (std::size_t i = 0; i < stages.size(); ++i) {
            parts[i] = futures[i].get();
        }
    } else {
        for (std::size_t i = 0; i < stages.size(); ++i) {
            parts[i] = filter_response(stage_lattice(stages[i], options.initial_half_width), stages[i].losses, omega,
                                       options.response);
        }
    }

    ResponseCurve total;
    total.omega = omega;
    total.f.assign(omega.size(), 1.0);
    total.meta.converged = true;
    for (const auto &p : parts) {
        for (std::size_t i = 0; i < omega.size(); ++i) {
            total.f[i] *= p.f[i];
        }
        total.meta.sites_used = std::max(total.meta.sites_used, p.meta.sites_used);
        total.meta.sup_change = std::max(total.meta.sup_change, p.meta.sup_change);
        total.meta.converged = total.meta.converged && p.meta.converged;
        if (p.meta.regularized) {
            total.meta.regularized = true;
            total.meta.note = p.meta.note;
        }
    }
    return total;
}

double cascade_value(const std::vector<FilterStage> &stages, double omega, int half_width)
{
    double f = 1.0;
    for (const auto &s : stages) {
        const LatticeConfig lat = stage_lattice(s, half_width);
        const bool transparent = s.losses.lossless_interior();
        const cplx g00 = cplx(0.0, -s.losses.port_rate) * port_resolvent(lat, s.losses, omega, 0.0, transparent);
        f *= std::norm(1.0 + g00);
    }
    return f;
}

// ---------------------------------------------------------------------------

namespace
{
double to_db(double v) { return 10.0 * std::log10(std::max(v, 1e-300)); }

double interpolate_crossing(double x0, double y0, double x1, double y1, double level)
{
    if (y1 == y0) {
        return 0.5 * (x0 + x1);
    }
    return x0 + (level - y0) * (x1 - x0) / (y1 - y0);
}

struct Bracket
{
    double outside = 0.0; // above the threshold
    double inside = 0.0;  // below the threshold
    double y_outside = 0.0;
    double y_inside = 0.0;
};

// Crossings of `level` on both sides of index `centre` (db[centre] < level).
std::pair<Bracket, Bracket> find_crossings(const std::vector<double> &omega, const std::vector<double> &db,
                                           std::size_t centre, double level)
{
    std::size_t l = centre;
    while (l > 0 && db[l - 1] < level) {
        --l;
    }
    std::size_t r = centre;
    while (r + 1 < db.size() && db[r + 1] < level) {
        ++r;
    }
    Bracket left, right;
    if (l == 0) {
        left = {omega[0], omega[0], db[0], db[0]};
    } else {
        left = {omega[l - 1], omega[l], db[l - 1], db[l]};
    }
    if (r + 1 == db.size()) {
        right = {omega[r], omega[r], db[r], db[r]};
    } else {
        right = {omega[r + 1], omega[r], db[r + 1], db[r]};
    }
    return {left, right};
}

double crossing_position(const Bracket &b, double level)
{
    if (b.outside == b.inside) {
        return b.inside;
    }
    return interpolate_crossing(b.outside, b.y_outside, b.inside, b.y_inside, level);
}

Bracket refine(Bracket b, double level, const std::function<double(double)> &f, double abs_tol)
{
    if (b.outside == b.inside) {
        return b;
    }
    for (int it = 0; it < 200 && std::abs(b.outside - b.inside) > abs_tol; ++it) {
        const double mid = 0.5 * (b.outside + b.inside);
        const double y = to_db(f(mid));
        if (y < level) {
            b.inside = mid;
            b.y_inside = y;
        } else {
            b.outside = mid;
            b.y_outside = y;
        }
    }
    return b;
}

FilterMetrics measure(const ResponseCurve &curve, const std::function<double(double)> *f, double rel_tol)
{
    if (curve.omega.size() < 3 || curve.omega.size() != curve.f.size()) {
        throw ConfigError("filter metrics need a curve with at least three samples");
    }
    const auto db = curve.decibels();
    const auto it_min = std::min_element(db.begin(), db.end());
    const auto centre = static_cast<std::size_t>(std::distance(db.begin(), it_min));

    FilterMetrics m;
    m.min_db = *it_min;
    m.min_omega = curve.omega[centre];
    if (m.min_db >= -3.0) {
        throw NoStopbandError(fmt::format("curve never drops below -3 dB (minimum {:.3f} dB)", m.min_db));
    }

    auto edges = [&](double level) {
        auto [l, r] = find_crossings(curve.omega, db, centre, level);
        double lo = crossing_position(l, level);
        double hi = crossing_position(r, level);
        if (f != nullptr) {
            const double tol = std::max(rel_tol * 1e-2 * std::abs(hi - lo), 1e-15);
            lo = crossing_position(refine(l, level, *f, tol), level);
            hi = crossing_position(refine(r, level, *f, tol), level);
        }
        return std::pair<double, double>{lo, hi};
    };

    m.edges_3db = edges(-3.0);
    m.width_3db = m.edges_3db.second - m.edges_3db.first;
    if (m.min_db < -25.0) {
        m.edges_25db = edges(-25.0);
        m.width_25db = m.edges_25db.second - m.edges_25db.first;
    }
    m.shape_factor = m.width_3db > 0.0 ? m.width_25db / m.width_3db : 0.0;

    std::vector<std::size_t> minima;
    for (std::size_t i = 1; i + 1 < db.size(); ++i) {
        if (db[i] < db[i - 1] && db[i] <= db[i + 1]) {
            minima.push_back(i);
        }
    }
    if (minima.size() >= 2) {
        std::partial_sort(minima.begin(), minima.begin() + 2, minima.end(),
                          [&](std::size_t a, std::size_t b) { return db[a] < db[b]; });
        const std::size_t a = std::min(minima[0], minima[1]);
        const std::size_t b = std::max(minima[0], minima[1]);
        if (b > a + 1) {
            const auto top = std::max_element(db.begin() + static_cast<std::ptrdiff_t>(a + 1),
                                              db.begin() + static_cast<std::ptrdiff_t>(b));
            m.has_hump = true;
            m.hump_db = *top;
            m.hump_omega = curve.omega[static_cast<std::size_t>(std::distance(db.begin(), top))];
        }
    }
    return m;
}
} // namespace

FilterMetrics filter_metrics(const ResponseCurve &curve) { return measure(curve, nullptr, 0.0); }

FilterMetrics filter_metrics(const ResponseCurve &curve, const std::function<double(double)> &f, double rel_tol)
{
    return measure(curve, &f, rel_tol);
}

// ---------------------------------------------------------------------------

DesignResult design_two_stage(const DesignTarget &target)
{
    if (!(target.width_3db > 0.0)) {
        throw ConfigError("design width must be positive");
    }
    if (!(target.rejection_db > 3.0)) {
        throw ConfigError("design rejection must exceed 3 dB");
    }
    if (target.grid_points < 101) {
        throw ConfigError("design grid needs at least 101 points");
    }

    // Search in units of kappa about a zero centre, then rescale.
    const auto coarse = linear_grid(-3.0, 3.0, 801);
    double best_score = -1.0;
    double best_edge = 1.8, best_inner = 1.1;
    for (int ie = 0; ie <= 9; ++ie) {
        const double edge = 1.5 + 0.05 * ie;
        for (int ic = 0; ic <= 10; ++ic) {
            const double inner = 0.5 + 0.1 * ic;
            const std::vector<FilterStage> stages{
                stage_for_target(1.0, 0.0, edge, target.near_port, target.uniform),
                stage_for_target(1.0, 0.0, inner, target.near_port, target.uniform)};
            ResponseCurve c;
            c.omega = coarse;
            c.f.resize(coarse.size());
            for (std::size_t i = 0; i < coarse.size(); ++i) {
                c.f[i] = cascade_value(stages, coarse[i], 256);
            }
            FilterMetrics m;
            try {
                m = filter_metrics(c);
            } catch (const NoStopbandError &) {
                continue;
            }
            if (m.min_db > -target.rejection_db) {
                continue;
            }
            if (m.shape_factor > best_score) {
                best_score = m.shape_factor;
                best_edge = edge;
                best_inner = inner;
            }
        }
    }

    // Width scales linearly with kappa once losses are expressed in kappa.
    const std::vector<FilterStage> unit{stage_for_target(1.0, 0.0, best_edge, target.near_port, target.uniform),
                                        stage_for_target(1.0, 0.0, best_inner, target.near_port, target.uniform)};
    ResponseCurve unit_curve = cascade_response(unit, linear_grid(-3.0, 3.0, target.grid_points));
    const FilterMetrics unit_metrics =
        filter_metrics(unit_curve, [&](double w) { return cascade_value(unit, w); });
    const double kappa = target.width_3db / unit_metrics.width_3db;

    DesignResult result;
    result.kappa = kappa;
    result.offsets = {best_edge, best_inner};
    for (double off : result.offsets) {
        result.stages.push_back(
            stage_for_target(kappa, target.center, off * kappa, target.near_port * kappa, target.uniform * kappa));
    }
    result.curve = cascade_response(
        result.stages, linear_grid(target.center - 3.0 * kappa, target.center + 3.0 * kappa, target.grid_points));
    result.metrics =
        filter_metrics(result.curve, [&](double w) { return cascade_value(result.stages, w); });
    result.meets_rejection = result.metrics.min_db <= -target.rejection_db;
    return result;
}

} // namespace oam
