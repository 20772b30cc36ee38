#include "oam/spectrum.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

namespace oam
{
double dispersion(double K, double phi, double kappa, double omega0, int num_aux)
{
    if (num_aux == 2) {
        return omega0 - 2.0 * kappa * std::cos(phi) * std::cos(K);
    }
    return omega0 - 2.0 * kappa * std::cos(K - phi);
}

double group_velocity(double K, double phi, double kappa, double /*omega0*/, int num_aux)
{
    if (num_aux == 2) {
        return 2.0 * kappa * std::cos(phi) * std::sin(K);
    }
    return 2.0 * kappa * std::sin(K - phi);
}

double group_velocity_at_frequency(double omega, double kappa, double omega0, int num_aux, double phi)
{
    const double half_width = 2.0 * kappa * (num_aux == 2 ? std::abs(std::cos(phi)) : 1.0);
    const double detuning = omega - omega0;
    if (std::abs(detuning) > half_width) {
        throw BandEdgeError(fmt::format("frequency offset {} lies outside the band [-{}, {}]", detuning,
                                        half_width, half_width));
    }
    return std::sqrt(std::max(0.0, half_width * half_width - detuning * detuning));
}

std::vector<BandPoint> band_points(double phi, double kappa, double omega0, int num_aux, std::size_t count)
{
    std::vector<BandPoint> pts;
    pts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        // (-pi, pi], right-closed
        const double K = -pi + 2.0 * pi * static_cast<double>(i + 1) / static_cast<double>(count);
        pts.push_back({K, dispersion(K, phi, kappa, omega0, num_aux), group_velocity(K, phi, kappa, omega0, num_aux)});
    }
    return pts;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count)
{
    std::vector<double> g(count);
    if (count == 1) {
        g[0] = lo;
        return g;
    }
    for (std::size_t i = 0; i < count; ++i) {
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return g;
}

std::vector<double> ResponseCurve::decibels() const
{
    std::vector<double> db(f.size());
    std::transform(f.begin(), f.end(), db.begin(), [](double v) { return 10.0 * std::log10(std::max(v, 1e-300)); });
    return db;
}

// ---------------------------------------------------------------------------

namespace
{
// Retarded surface Green's function of a semi-infinite uniform chain with
// hopping magnitude t at detuning z.
cplx surface_green(double z, double t)
{
    const double t2 = t * t;
    const double disc = z * z - 4.0 * t2;
    if (disc < 0.0) {
        return cplx(z, -std::sqrt(-disc)) / (2.0 * t2);
    }
    const double root = std::copysign(std::sqrt(disc), z);
    return (z - root) / (2.0 * t2);
}
} // namespace

cplx port_resolvent(const LatticeConfig &lattice, const LossModel &losses, double omega, double phi,
                    bool transparent_edges)
{
    const double hop2 = std::norm(lattice.hopping(phi));
    const double z = omega - lattice.omega0;
    const cplx edge = transparent_edges && hop2 > 0.0 ? hop2 * surface_green(z, std::sqrt(hop2)) : cplx{};

    // Eliminate from each end towards the port; what remains of the
    // tridiagonal solve is the port row with both self-energies attached.
    cplx right = 0.0;
    if (lattice.j_max > 0) {
        cplx s = edge;
        for (int j = lattice.j_max; j >= 1; --j) {
            const cplx d = cplx(z, 0.5 * losses.total(j)) - s;
            s = hop2 / d;
        }
        right = s;
    }
    cplx left = 0.0;
    if (lattice.j_min < 0) {
        cplx s = edge;
        for (int j = lattice.j_min; j <= -1; ++j) {
            const cplx d = cplx(z, 0.5 * losses.total(j)) - s;
            s = hop2 / d;
        }
        left = s;
    }
    return 1.0 / (cplx(z, 0.5 * losses.total(0)) - left - right);
}

namespace
{
std::vector<double> evaluate(const LatticeConfig &lattice, const LossModel &losses, const std::vector<double> &omega,
                             double phi, bool transparent, unsigned threads)
{
    std::vector<double> f(omega.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const cplx g00 = cplx(0.0, -losses.port_rate) * port_resolvent(lattice, losses, omega[i], phi, transparent);
            f[i] = std::norm(1.0 + g00);
        }
    };
    const std::size_t n = omega.size();
    const unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (nt == 1) {
        work(0, n);
        return f;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back(work, n * t / nt, n * (t + 1) / nt);
    }
    for (auto &th : pool) {
        th.join();
    }
    return f;
}

double sup_diff(const std::vector<double> &a, const std::vector<double> &b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}
} // namespace

ResponseCurve filter_response(const LatticeConfig &lattice, const LossModel &losses, const std::vector<double> &omega,
                              const ResponseOptions &options)
{
    lattice.validate();
    losses.validate();
    if (omega.empty()) {
        throw ConfigError("frequency grid is empty");
    }

    ResponseCurve curve;
    curve.omega = omega;

    // A lossless lattice has no finite-size limit inside the band; close it
    // with the exact semi-infinite termination instead.
    const bool transparent = losses.lossless_interior() && std::norm(lattice.hopping(options.phi)) > 0.0;
    if (transparent) {
        curve.meta.regularized = true;
        curve.meta.note = "lossless lattice: edges terminated by the semi-infinite chain self-energy";
    }

    LatticeConfig current = lattice;
    std::vector<double> prev = evaluate(current, losses, omega, options.phi, transparent, options.threads);
    // Nothing to grow: a single site, or a wall on both sides.
    if (current.j_min == 0 && current.j_max == 0) {
        curve.f = std::move(prev);
        curve.meta.sites_used = 1;
        curve.meta.converged = true;
        return curve;
    }

    while (true) {
        LatticeConfig next = current;
        next.j_min = 2 * current.j_min;
        next.j_max = 2 * current.j_max;
        if (next.num_sites() > options.max_sites) {
            throw NumericalError(
                fmt::format("filter response did not converge to {} within {} sites (last change {:.3g})",
                            options.tolerance, current.num_sites(), curve.meta.sup_change),
                fmt::format("increase the lattice beyond {} sites or add intrinsic loss", 2 * current.num_sites()));
        }
        std::vector<double> f = evaluate(next, losses, omega, options.phi, transparent, options.threads);
        curve.meta.sup_change = sup_diff(prev, f);
        current = next;
        prev = std::move(f);
        if (curve.meta.sup_change < options.tolerance) {
            break;
        }
    }
    curve.f = std::move(prev);
    curve.meta.sites_used = current.num_sites();
    curve.meta.converged = true;
    return curve;
}

void write_response_csv(std::ostream &os, const ResponseCurve &curve)
{
    os << "omega,f,f_db\n";
    const auto db = curve.decibels();
    for (std::size_t i = 0; i < curve.omega.size(); ++i) {
        os << fmt::format("{:.17g},{:.17g},{:.17g}\n", curve.omega[i], curve.f[i], db[i]);
    }
}

} // namespace oam
