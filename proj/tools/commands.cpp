#include "commands.hpp"
#include "svg.hpp"

#include <oam/dynamics.hpp>
#include <oam/filter_design.hpp>
#include <oam/memory.hpp>
#include <oam/physical.hpp>
#include <oam/spectrum.hpp>

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace oamsim
{
namespace
{
using json = nlohmann::ordered_json;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

void write_file(const Output &out, const std::string &name, const std::string &body)
{
    std::ofstream f(out.dir / name, std::ios::binary);
    if (!f) {
        throw std::runtime_error(fmt::format("cannot write {}", (out.dir / name).string()));
    }
    f << body;
}

template <typename Fn>
void write_stream(const Output &out, const std::string &name, Fn &&fn)
{
    std::ofstream f(out.dir / name, std::ios::binary);
    if (!f) {
        throw std::runtime_error(fmt::format("cannot write {}", (out.dir / name).string()));
    }
    fn(f);
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_report(const Output &out, const Settings &s, const Metrics &m, json extra = json::object())
{
    json j;
    j["command"] = s.command;
    j["units"] = "rates in kappa, times in 1/kappa";
    j["kappa_rad_per_s"] = s.kappa_abs ? json(*s.kappa_abs) : json(nullptr);
    json metrics = json::object();
    for (const auto &[k, v] : m) {
        metrics[k] = number(v);
    }
    j["metrics"] = metrics;
    for (auto it = extra.begin(); it != extra.end(); ++it) {
        j[it.key()] = it.value();
    }
    write_file(out, "report.json", j.dump(2) + "\n");
}

oam::LatticeConfig lattice_of(const Settings &s, int half)
{
    oam::LatticeConfig lat;
    lat.j_min = -half;
    lat.j_max = half;
    lat.kappa = 1.0;
    lat.omega0 = s.omega0;
    lat.num_aux = s.num_aux;
    lat.step_index = s.step_index;
    return lat;
}

// Coarse copy of the population history for plotting: at most ~240 time
// columns, sites cropped to where anything ever happened.
Heatmap population_map(const oam::Trajectory &tr, const std::string &title)
{
    Heatmap map;
    map.title = title;
    map.x_label = "t kappa";
    map.y_label = "site j";
    if (tr.snapshots.empty()) {
        return map;
    }
    const std::size_t n = tr.snapshots.front().size();
    std::vector<double> peak(n, 0.0);
    double top = 0.0;
    for (std::size_t r = 0; r < tr.snapshots.size(); ++r) {
        for (std::size_t k = 0; k < n; ++k) {
            peak[k] = std::max(peak[k], std::norm(tr.snapshots[r][k]));
            top = std::max(top, peak[k]);
        }
    }
    std::size_t lo = 0, hi = n - 1;
    while (lo < hi && peak[lo] < 1e-4 * top) {
        ++lo;
    }
    while (hi > lo && peak[hi] < 1e-4 * top) {
        --hi;
    }
    const std::size_t stride = std::max<std::size_t>(1, tr.snapshots.size() / 240);
    for (std::size_t r = 0; r < tr.snapshots.size(); r += stride) {
        map.x.push_back(tr.snapshot_times[r]);
        std::vector<double> row;
        for (std::size_t k = lo; k <= hi; ++k) {
            row.push_back(std::norm(tr.snapshots[r][k]));
        }
        map.values.push_back(std::move(row));
    }
    for (std::size_t k = lo; k <= hi; ++k) {
        map.y.push_back(static_cast<double>(tr.j_min + static_cast<int>(k)));
    }
    return map;
}

LinePlot power_plot(const oam::Trajectory &tr, const std::string &title)
{
    double norm = 0.0;
    for (const auto &e : tr.e_in) {
        norm = std::max(norm, std::norm(e));
    }
    if (!(norm > 0.0)) {
        norm = 1.0;
    }
    const std::size_t stride = std::max<std::size_t>(1, tr.times.size() / 4000);
    Series in{"|E_in|^2", {}, {}}, outs{"|E_out|^2", {}, {}};
    for (std::size_t i = 0; i < tr.times.size(); i += stride) {
        in.x.push_back(tr.times[i]);
        in.y.push_back(std::norm(tr.e_in[i]) / norm);
        outs.x.push_back(tr.times[i]);
        outs.y.push_back(std::norm(tr.e_out[i]) / norm);
    }
    return {title, "t kappa", "intensity / max input", {in, outs}};
}

// ---------------------------------------------------------------------------

Metrics run_simulate(const Settings &s, const Output *out)
{
    oam::Scenario sc;
    const double duration = s.t_end - s.t_start;
    sc.lattice = lattice_of(s, s.half_width > 0 ? s.half_width : oam::default_half_width(1.0, duration));
    sc.losses = s.losses;
    if (s.schedule_times.size() == 1) {
        sc.schedule = oam::PhaseSchedule::constant(s.schedule_phases[0]);
    } else {
        std::vector<oam::PhaseSegment> segs;
        for (std::size_t i = 0; i < s.schedule_times.size(); ++i) {
            segs.push_back({s.schedule_times[i], s.schedule_phases[i], s.schedule_ramps[i]});
        }
        sc.schedule = oam::PhaseSchedule(std::move(segs), s.ramp_shape);
    }
    if (s.pulse_shape == "gaussian") {
        sc.input = oam::InputPulse::gaussian(s.amplitude, s.pulse_width, s.omega0 + s.detuning, s.pulse_center);
    } else {
        sc.input = oam::InputPulse::none();
    }
    sc.t_start = s.t_start;
    sc.t_end = s.t_end;
    sc.dt = s.dt;
    sc.rotating_frame = s.rotating;
    const oam::Trajectory tr = oam::integrate(sc);

    const Metrics m{{"input_energy", tr.ledger.input_energy},
                    {"output_energy", tr.ledger.output_energy},
                    {"intrinsic_loss", tr.ledger.intrinsic_loss},
                    {"stored_final", tr.ledger.stored_final},
                    {"ledger_residual", tr.ledger.relative_residual()},
                    {"peak_stored", tr.peak_stored},
                    {"boundary_peak_fraction", tr.boundary_peak_fraction},
                    {"lattice_half_width", static_cast<double>(sc.lattice.j_max)}};
    if (out != nullptr) {
        write_stream(*out, "trajectory.csv", [&](std::ostream &os) { oam::write_trajectory_csv(os, tr); });
        write_stream(*out, "populations.csv", [&](std::ostream &os) { oam::write_population_csv(os, tr); });
        json extra;
        extra["boundary_contaminated"] = tr.boundary_contaminated;
        write_report(*out, s, m, extra);
        if (out->svg) {
            write_file(*out, "trace.svg", render(power_plot(tr, "port intensities")));
            write_file(*out, "populations.svg", render(population_map(tr, "OAM populations |a_j|^2")));
        }
    }
    return m;
}

Metrics run_memory_command(const Settings &s, const Output *out)
{
    oam::MemoryPlan plan;
    plan.variant = oam::memory_variant_from_string(s.memory_variant);
    plan.t_io = s.t_io;
    plan.t_s = s.t_s;
    plan.ramp = s.ramp;
    plan.readout = s.readout;

    const oam::LatticeConfig lat = lattice_of(s, s.half_width > 0 ? s.half_width : 64);
    oam::MemoryOptions opt;
    opt.dt = s.memory_dt;
    opt.auto_size = s.half_width == 0;
    oam::InputPulse pulse = oam::default_memory_pulse(plan, lat, s.memory_pulse);
    pulse.scale = s.amplitude;
    pulse.carrier += s.detuning;

    const oam::MemoryRun run = oam::run_memory(plan, lat, s.losses, pulse, opt);
    oam::MemoryReport r = run.report;
    if (s.l_max > 0) {
        r.design = oam::check_design(1.0, plan.t_io, s.l_max, s.step_index, s.memory_pulse);
    }

    const Metrics m{{"efficiency", r.efficiency},
                    {"fidelity", r.fidelity},
                    {"delay", r.delay},
                    {"ideal_delay", r.ideal_delay},
                    {"peak_oam", static_cast<double>(r.peak_oam)},
                    {"residual_fraction", r.residual_fraction},
                    {"lattice_half_width", static_cast<double>(r.lattice_half_width)},
                    {"bandwidth_margin", r.design.bandwidth.margin},
                    {"emission_margin", r.design.emission.margin},
                    {"pulse_margin", r.design.pulse.margin}};
    if (out != nullptr) {
        const auto &tr = run.trajectory;
        write_stream(*out, "trajectory.csv", [&](std::ostream &os) { oam::write_trajectory_csv(os, tr); });
        write_stream(*out, "populations.csv", [&](std::ostream &os) { oam::write_population_csv(os, tr); });
        write_stream(*out, "trace.csv", [&](std::ostream &os) {
            double norm = 0.0;
            for (const auto &e : tr.e_in) {
                norm = std::max(norm, std::norm(e));
            }
            os << "t,input_intensity,output_intensity,phi\n";
            for (std::size_t i = 0; i < tr.times.size(); ++i) {
                os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", tr.times[i], std::norm(tr.e_in[i]) / norm,
                                  std::norm(tr.e_out[i]) / norm, run.scenario.schedule.phase_at(tr.times[i]));
            }
        });
        json extra;
        extra["variant"] = s.memory_variant;
        extra["readout_complete"] = r.readout_complete;
        extra["boundary_ok"] = r.boundary_ok;
        extra["design_checks"] = {{"bandwidth", r.design.bandwidth.passed},
                                  {"emission", r.design.emission.passed},
                                  {"pulse", r.design.pulse.passed}};
        write_report(*out, s, m, extra);
        if (out->svg) {
            write_file(*out, "trace.svg", render(power_plot(tr, fmt::format("{} memory", s.memory_variant))));
            write_file(*out, "populations.svg", render(population_map(tr, "OAM populations |a_j|^2")));
        }
    }
    return m;
}

Metrics run_bands(const Settings &s, const Output *out)
{
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::vector<std::vector<oam::BandPoint>> bands;
    for (double phi : s.band_phis) {
        bands.push_back(oam::band_points(phi, 1.0, s.omega0, s.band_num_aux, static_cast<std::size_t>(s.band_points)));
        for (const auto &p : bands.back()) {
            lo = std::min(lo, p.omega);
            hi = std::max(hi, p.omega);
        }
    }
    const Metrics m{{"omega_min", lo}, {"omega_max", hi}, {"bandwidth", hi - lo}};
    if (out != nullptr) {
        write_stream(*out, "bands.csv", [&](std::ostream &os) {
            os << "phi,K,omega,v_g\n";
            for (std::size_t b = 0; b < bands.size(); ++b) {
                for (const auto &p : bands[b]) {
                    os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", s.band_phis[b], p.K, p.omega, p.v_g);
                }
            }
        });
        write_report(*out, s, m);
        if (out->svg) {
            LinePlot plot{"band structure", "K", "omega / kappa", {}};
            for (std::size_t b = 0; b < bands.size(); ++b) {
                Series ser{fmt::format("phi = {:.4g}", s.band_phis[b]), {}, {}};
                for (const auto &p : bands[b]) {
                    ser.x.push_back(p.K);
                    ser.y.push_back(p.omega);
                }
                plot.series.push_back(std::move(ser));
            }
            write_file(*out, "bands.svg", render(plot));
        }
    }
    return m;
}

std::vector<oam::FilterStage> filter_stages(const Settings &s)
{
    if (s.stages.empty()) {
        throw ValidationError("stage1", "the filter needs at least one [stageN] section");
    }
    std::vector<oam::FilterStage> out;
    for (const auto &st : s.stages) {
        oam::FilterStage f;
        f.kappa = 1.0;
        f.omega0 = s.omega0;
        f.losses.port_rate = st.has_offset ? oam::gamma_for_target(s.omega0 - st.absorb_offset, 1.0, s.omega0) : st.port;
        f.losses.near_port = st.near_port;
        f.losses.decay_length = s.losses.decay_length;
        f.losses.uniform = st.uniform;
        out.push_back(f);
    }
    return out;
}

const std::vector<std::string> &filter_metric_names()
{
    static const std::vector<std::string> names{"width_3db", "width_25db", "shape_factor", "min_db",
                                                "min_omega", "hump_db",    "hump_omega"};
    return names;
}

void append_filter_metrics(Metrics &m, const std::string &prefix, const oam::ResponseCurve &curve,
                           const std::vector<oam::FilterStage> &stages, std::string &note)
{
    try {
        const auto fm = oam::filter_metrics(curve, [&](double w) { return oam::cascade_value(stages, w); });
        m.emplace_back(prefix + "width_3db", fm.width_3db);
        m.emplace_back(prefix + "width_25db", fm.min_db < -25.0 ? fm.width_25db : nan);
        m.emplace_back(prefix + "shape_factor", fm.min_db < -25.0 ? fm.shape_factor : nan);
        m.emplace_back(prefix + "min_db", fm.min_db);
        m.emplace_back(prefix + "min_omega", fm.min_omega);
        m.emplace_back(prefix + "hump_db", fm.has_hump ? fm.hump_db : nan);
        m.emplace_back(prefix + "hump_omega", fm.has_hump ? fm.hump_omega : nan);
    } catch (const oam::NoStopbandError &e) {
        for (const auto &n : filter_metric_names()) {
            m.emplace_back(prefix + n, nan);
        }
        note += (note.empty() ? "" : "; ") + prefix + e.what();
    }
}

Metrics run_filter(const Settings &s, const Output *out)
{
    const auto stages = filter_stages(s);
    const auto grid = oam::linear_grid(s.omega0 + s.filter_min, s.omega0 + s.filter_max,
                                       static_cast<std::size_t>(s.filter_points));
    oam::CascadeOptions opt;
    opt.response.threads = static_cast<unsigned>(s.filter_threads);
    opt.response.max_sites = s.filter_max_sites;

    std::vector<oam::ResponseCurve> parts;
    for (const auto &st : stages) {
        parts.push_back(oam::cascade_response({st}, grid, opt));
    }
    oam::ResponseCurve total;
    total.omega = grid;
    total.f.assign(grid.size(), 1.0);
    for (const auto &p : parts) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            total.f[i] *= p.f[i];
        }
        total.meta.sites_used = std::max(total.meta.sites_used, p.meta.sites_used);
    }

    Metrics m;
    std::string note;
    if (s.filter_combine == "cascade") {
        append_filter_metrics(m, "", total, stages, note);
    } else {
        for (std::size_t k = 0; k < stages.size(); ++k) {
            append_filter_metrics(m, fmt::format("stage{}.", s.stages[k].index), parts[k], {stages[k]}, note);
        }
    }
    m.emplace_back("sites_used", static_cast<double>(total.meta.sites_used));

    if (out != nullptr) {
        write_stream(*out, "response.csv", [&](std::ostream &os) {
            os << "omega";
            for (const auto &st : s.stages) {
                os << fmt::format(",f_stage{}", st.index);
            }
            os << ",f,f_db\n";
            const auto db = total.decibels();
            for (std::size_t i = 0; i < grid.size(); ++i) {
                os << fmt::format("{:.17g}", grid[i]);
                for (const auto &p : parts) {
                    os << fmt::format(",{:.17g}", p.f[i]);
                }
                os << fmt::format(",{:.17g},{:.17g}\n", total.f[i], db[i]);
            }
        });
        json extra;
        extra["combine"] = s.filter_combine;
        json ports = json::array();
        for (const auto &st : stages) {
            ports.push_back(st.losses.port_rate);
        }
        extra["port_rates"] = ports;
        std::string reg;
        for (const auto &p : parts) {
            if (p.meta.regularized) {
                reg = p.meta.note;
            }
        }
        extra["regularization"] = reg;
        extra["note"] = note;
        write_report(*out, s, m, extra);
        if (out->svg) {
            LinePlot plot{"filter function", "(omega - omega0) / kappa", "f (dB)", {}};
            plot.y_lo = -40.0;
            plot.y_hi = 2.0;
            auto add = [&](const std::string &label, const oam::ResponseCurve &c) {
                Series ser{label, {}, c.decibels()};
                for (double w : grid) {
                    ser.x.push_back(w - s.omega0);
                }
                plot.series.push_back(std::move(ser));
            };
            for (std::size_t k = 0; k < parts.size(); ++k) {
                add(fmt::format("stage {}", s.stages[k].index), parts[k]);
            }
            if (s.filter_combine == "cascade" && parts.size() > 1) {
                add("cascade", total);
            }
            write_file(*out, "response.svg", render(plot));
        }
    }
    return m;
}

Metrics run_design(const Settings &s, const Output *out)
{
    oam::DesignTarget t;
    t.center = s.design_center;
    t.width_3db = s.design_width;
    t.rejection_db = s.design_rejection;
    t.near_port = s.design_near_port;
    t.uniform = s.design_uniform;
    t.grid_points = static_cast<std::size_t>(s.design_points);
    const auto d = oam::design_two_stage(t);

    const Metrics m{{"kappa", d.kappa},
                    {"edge_offset", d.offsets[0]},
                    {"inner_offset", d.offsets[1]},
                    {"edge_port", d.stages[0].losses.port_rate},
                    {"inner_port", d.stages[1].losses.port_rate},
                    {"width_3db", d.metrics.width_3db},
                    {"width_25db", d.metrics.width_25db},
                    {"shape_factor", d.metrics.shape_factor},
                    {"min_db", d.metrics.min_db},
                    {"meets_rejection", d.meets_rejection ? 1.0 : 0.0}};
    if (out != nullptr) {
        write_stream(*out, "design.csv", [&](std::ostream &os) { oam::write_response_csv(os, d.curve); });
        json extra;
        extra["kappa_design_rad_per_s"] = s.kappa_abs ? json(d.kappa * *s.kappa_abs) : json(nullptr);
        write_report(*out, s, m, extra);
        if (out->svg) {
            LinePlot plot{"two-stage design", "omega / kappa", "f (dB)", {{"cascade", d.curve.omega, d.curve.decibels()}}};
            plot.y_lo = -40.0;
            plot.y_hi = 2.0;
            write_file(*out, "design.svg", render(plot));
        }
    }
    return m;
}

Metrics run_params(const Settings &s, const Output *out)
{
    oam::CavitySpec spec;
    spec.length = s.cavity_length;
    spec.reflectivity = s.reflectivity;
    const auto e = oam::estimate(spec);
    const Metrics m{{"length_m", spec.length},
                    {"reflectivity", spec.reflectivity},
                    {"fsr_rad_per_s", e.fsr},
                    {"alpha", e.alpha},
                    {"kappa_rad_per_s", e.kappa},
                    {"bandwidth_rad_per_s", e.bandwidth},
                    {"bandwidth_2pi_mhz", e.bandwidth / (2.0 * oam::pi) / 1e6},
                    {"min_pulse_width_s", e.min_pulse_width},
                    {"min_write_time_s", e.min_write_time}};
    if (out != nullptr) {
        write_stream(*out, "params.csv", [&](std::ostream &os) {
            for (std::size_t i = 0; i < m.size(); ++i) {
                os << (i ? "," : "") << m[i].first;
            }
            os << "\n";
            for (std::size_t i = 0; i < m.size(); ++i) {
                os << (i ? "," : "") << fmt::format("{:.17g}", m[i].second);
            }
            os << "\n";
        });
        json extra;
        extra["fsr"] = oam::format_angular(e.fsr);
        extra["bandwidth"] = oam::format_angular(e.bandwidth);
        write_report(*out, s, m, extra);
    }
    return m;
}
} // namespace

Metrics run_command(const Settings &s, const Output *out)
{
    if (s.command == "simulate") {
        return run_simulate(s, out);
    }
    if (s.command == "memory") {
        return run_memory_command(s, out);
    }
    if (s.command == "bands") {
        return run_bands(s, out);
    }
    if (s.command == "filter") {
        return run_filter(s, out);
    }
    if (s.command == "design") {
        return run_design(s, out);
    }
    if (s.command == "params") {
        return run_params(s, out);
    }
    throw ValidationError("run.command", fmt::format("unknown command '{}'", s.command));
}

std::vector<std::string> metric_names(const Settings &s)
{
    if (s.command == "simulate") {
        return {"input_energy", "output_energy", "intrinsic_loss", "stored_final", "ledger_residual", "peak_stored",
                "boundary_peak_fraction", "lattice_half_width"};
    }
    if (s.command == "memory") {
        return {"efficiency", "fidelity", "delay", "ideal_delay", "peak_oam", "residual_fraction",
                "lattice_half_width", "bandwidth_margin", "emission_margin", "pulse_margin"};
    }
    if (s.command == "bands") {
        return {"omega_min", "omega_max", "bandwidth"};
    }
    if (s.command == "filter") {
        std::vector<std::string> out;
        if (s.filter_combine == "cascade") {
            out = filter_metric_names();
        } else {
            for (const auto &st : s.stages) {
                for (const auto &n : filter_metric_names()) {
                    out.push_back(fmt::format("stage{}.{}", st.index, n));
                }
            }
        }
        out.push_back("sites_used");
        return out;
    }
    if (s.command == "design") {
        return {"kappa", "edge_offset", "inner_offset", "edge_port", "inner_port", "width_3db", "width_25db",
                "shape_factor", "min_db", "meets_rejection"};
    }
    return {"length_m", "reflectivity", "fsr_rad_per_s", "alpha", "kappa_rad_per_s", "bandwidth_rad_per_s",
            "bandwidth_2pi_mhz", "min_pulse_width_s", "min_write_time_s"};
}

} // namespace oamsim
