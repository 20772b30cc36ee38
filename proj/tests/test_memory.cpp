#include "oam/memory.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace oam;

namespace
{
LatticeConfig unit_lattice(int num_aux = 1)
{
    LatticeConfig lat;
    lat.kappa = 1.0;
    lat.num_aux = num_aux;
    return lat;
}

double population_drift(const Trajectory &tr, std::size_t from, std::size_t to)
{
    const auto ref = tr.populations(from);
    const double total = std::accumulate(ref.begin(), ref.end(), 0.0);
    double worst = 0.0;
    for (std::size_t r = from; r <= to; ++r) {
        const auto p = tr.populations(r);
        double d = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            d += std::abs(p[k] - ref[k]);
        }
        worst = std::max(worst, d / total);
    }
    return worst;
}
} // namespace

TEST_CASE("build_schedule: echo variant")
{
    MemoryPlan plan;
    plan.t_io = 20.0;
    plan.t_s = 10.0;
    plan.ramp = 1.0;
    const auto s = build_schedule(plan);
    CHECK(s.phase_at(5.0) == 0.0);
    CHECK(s.phase_at(plan.t_io + plan.t_s / 2) == doctest::Approx(pi / 2));
    CHECK(s.phase_at(plan.t_io + 1.5 * plan.t_s) == doctest::Approx(-pi / 2));
    CHECK(s.phase_at(plan.read_start() + 5.0) == doctest::Approx(-pi));
    // ramps are centred on the boundaries
    CHECK(s.phase_at(plan.t_io) == doctest::Approx(pi / 4));
    CHECK(plan.ideal_delay() == 40.0);
}

TEST_CASE("build_schedule: on-demand lengths differ only by the hold")
{
    std::vector<std::vector<PhaseSegment>> segs;
    for (double ts : {5.0, 20.0, 60.0}) {
        MemoryPlan plan;
        plan.variant = MemoryVariant::OnDemand;
        plan.t_s = ts;
        const auto s = build_schedule(plan);
        segs.emplace_back(s.segments().begin(), s.segments().end());
        CHECK(s.phase_at(plan.t_io + ts / 2) == doctest::Approx(pi / 2));
        CHECK(s.phase_at(plan.read_start() + 1.0) == doctest::Approx(pi));
    }
    for (std::size_t i = 1; i < segs.size(); ++i) {
        CHECK(segs[i].size() == segs[0].size());
        CHECK(segs[i][1].start == segs[0][1].start);
        CHECK(segs[i][2].start - segs[0][2].start == doctest::Approx(i == 1 ? 15.0 : 55.0));
    }
}

TEST_CASE("build_schedule rejects overlapping ramps")
{
    MemoryPlan plan;
    plan.t_s = 2.0;
    plan.ramp = 2.0;
    CHECK_THROWS_AS(build_schedule(plan), ConfigError);
    plan.ramp = 1.0;
    plan.t_io = -1.0;
    CHECK_THROWS_AS(build_schedule(plan), ConfigError);
    CHECK_THROWS_AS(memory_variant_from_string("instant"), ConfigError);
}

TEST_CASE("check_design arithmetic")
{
    auto c = check_design(1.0, 20.0, 60.0, 1, 2.5);
    CHECK(c.bandwidth.passed);
    CHECK(c.bandwidth.margin == doctest::Approx(40.0 - 12.0 * pi));
    CHECK(c.emission.passed);
    CHECK(c.emission.margin == doctest::Approx(20.0));
    CHECK(c.pulse.passed);

    c = check_design(1.0, 10.0, 60.0, 1, 2.5);
    CHECK_FALSE(c.bandwidth.passed);

    c = check_design(1.0, 20.0, 60.0, 2, 2.5);
    CHECK_FALSE(c.emission.passed);
    CHECK(c.emission.margin == doctest::Approx(-10.0));
    CHECK_FALSE(check_design(1.0, 20.0, 60.0, 1, 2.0).pulse.passed);
}

TEST_CASE("best_overlap finds a shifted copy")
{
    const double dt = 0.01;
    std::vector<cplx> in(4000), out(4000);
    for (std::size_t i = 0; i < in.size(); ++i) {
        const double t = static_cast<double>(i) * dt;
        in[i] = std::exp(-0.5 * (t - 5.0) * (t - 5.0));
        out[i] = cplx(0.0, 0.3) * std::exp(-0.5 * (t - 17.25) * (t - 17.25));
    }
    const auto [f, tau] = best_overlap(out, in, dt);
    CHECK(f == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(tau == doctest::Approx(12.25).epsilon(1e-4));
}

TEST_CASE("pulse must fit the write window")
{
    MemoryPlan plan;
    const auto lat = unit_lattice();
    const InputPulse late = InputPulse::gaussian(1.0, 2.5, 0.0, 18.0);
    CHECK_THROWS_AS(run_memory(plan, lat, LossModel::port_only(4.0), late), ConfigError);
}

TEST_CASE("echo memory: lossless storage and read-out")
{
    MemoryPlan plan;
    plan.ramp = 0.0;
    const auto lat = unit_lattice();
    const auto run = run_memory(plan, lat, LossModel::port_only(4.0), default_memory_pulse(plan, lat, 2.5));
    const auto &r = run.report;
    CHECK(r.efficiency >= 0.99);
    CHECK(r.efficiency <= 1.0 + 1e-9);
    CHECK(r.fidelity >= 0.99);
    CHECK(r.delay == doctest::Approx(40.0).epsilon(0.05));
    CHECK(r.boundary_ok);
    CHECK(r.peak_oam > 40);

    // echo symmetry: populations at read start equal those at write end
    const auto &tr = run.trajectory;
    const auto p_write = tr.populations(tr.snapshot_index_near(plan.t_io));
    const auto p_read = tr.populations(tr.snapshot_index_near(plan.read_start()));
    REQUIRE(std::abs(tr.snapshot_times[tr.snapshot_index_near(plan.t_io)] - plan.t_io) < 1e-9);
    REQUIRE(std::abs(tr.snapshot_times[tr.snapshot_index_near(plan.read_start())] - plan.read_start()) < 1e-9);
    const double total = std::accumulate(p_write.begin(), p_write.end(), 0.0);
    double diff = 0.0;
    for (std::size_t k = 0; k < p_write.size(); ++k) {
        diff += std::abs(p_read[k] - p_write[k]);
    }
    CHECK(diff < 1e-3 * total);
}

TEST_CASE("fidelity does not depend on the input scale")
{
    MemoryPlan plan;
    plan.t_io = 20.0;
    plan.t_s = 4.0;
    const auto lat = unit_lattice();
    LossModel losses = LossModel::port_only(4.0);
    losses.uniform = 0.01;
    InputPulse p = default_memory_pulse(plan, lat, 2.5);
    const auto a = run_memory(plan, lat, losses, p).report;
    p.scale = 7.5;
    const auto b = run_memory(plan, lat, losses, p).report;
    CHECK(a.fidelity == doctest::Approx(b.fidelity).epsilon(1e-12));
    CHECK(a.efficiency == doctest::Approx(b.efficiency).epsilon(1e-12));
}

TEST_CASE("on-demand memory freezes populations during the hold")
{
    MemoryPlan plan;
    plan.variant = MemoryVariant::OnDemand;
    plan.t_s = 20.0;
    plan.ramp = 1.0;
    const auto lat = unit_lattice(2);
    const auto run = run_memory(plan, lat, LossModel::port_only(4.0), default_memory_pulse(plan, lat, 2.5));
    const auto &tr = run.trajectory;
    const std::size_t from = tr.snapshot_index_near(plan.t_io + 0.5 * plan.ramp + 0.05);
    const std::size_t to = tr.snapshot_index_near(plan.t_io + plan.t_s - 0.5 * plan.ramp - 0.05);
    CHECK(to > from);
    CHECK(population_drift(tr, from, to) < 1e-3);
    CHECK(run.report.efficiency >= 0.99);
    CHECK(run.report.delay == doctest::Approx(plan.ideal_delay()).epsilon(0.05));
}

TEST_CASE("uniform loss scales the efficiency exponentially with the delay")
{
    MemoryPlan plan;
    const auto lat = unit_lattice();
    const InputPulse pulse = default_memory_pulse(plan, lat, 2.5);
    const auto base = run_memory(plan, lat, LossModel::port_only(4.0), pulse).report;
    for (double c : {0.002, 0.005, 0.01}) {
        LossModel losses = LossModel::port_only(4.0);
        losses.uniform = c;
        const auto r = run_memory(plan, lat, losses, pulse).report;
        const double predicted = base.efficiency * std::exp(-c * base.delay);
        CHECK(r.efficiency == doctest::Approx(predicted).epsilon(0.05));
        CHECK(r.efficiency < base.efficiency);
    }
}
