#include "oam/filter_design.hpp"

#include <doctest.h>

#include <cmath>

using namespace oam;

TEST_CASE("max absorption frequency")
{
    FilterStage s;
    s.losses.port_rate = 1.74356;
    auto [lo, hi] = max_absorption_frequency(s);
    CHECK(lo == doctest::Approx(-1.8).epsilon(1e-5));
    CHECK(hi == doctest::Approx(1.8).epsilon(1e-5));

    s.losses.port_rate = 3.34066;
    CHECK(max_absorption_frequency(s).first == doctest::Approx(-1.1).epsilon(1e-5));

    s.losses.port_rate = 4.0;
    CHECK(max_absorption_frequency(s).first == doctest::Approx(0.0));

    s.losses.port_rate = 4.5;
    CHECK_THROWS_AS(max_absorption_frequency(s), BandEdgeError);
    s.losses.port_rate = 0.0;
    CHECK_THROWS_AS(max_absorption_frequency(s), BandEdgeError);
}

TEST_CASE("gamma_for_target round trip")
{
    for (double kappa : {0.5, 1.0, 3.0}) {
        for (double frac : {-0.95, -0.5, 0.0, 0.3, 0.9}) {
            const double w0 = 1.2;
            const double wm = w0 + 2.0 * kappa * frac;
            FilterStage s;
            s.kappa = kappa;
            s.omega0 = w0;
            s.losses.port_rate = gamma_for_target(wm, kappa, w0);
            const auto [lo, hi] = max_absorption_frequency(s);
            CHECK(std::min(std::abs(lo - wm), std::abs(hi - wm)) < 1e-12 * (1 + std::abs(wm)));
        }
    }
    CHECK(gamma_for_target(-1.8, 1.0, 0.0) == doctest::Approx(1.74356).epsilon(1e-5));
    CHECK(gamma_for_target(-1.1, 1.0, 0.0) == doctest::Approx(3.34066).epsilon(1e-5));
    CHECK_THROWS_AS(gamma_for_target(2.0, 1.0, 0.0), BandEdgeError);
    CHECK_THROWS_AS(gamma_for_target(-2.5, 1.0, 0.0), BandEdgeError);
}

TEST_CASE("absorption is complete at the predicted frequency")
{
    for (double off : {0.4, 1.1, 1.8}) {
        const FilterStage s = stage_for_target(1.0, 0.0, off, 0.0, 0.0);
        CHECK(cascade_value({s}, -off) < 1e-10);
        CHECK(cascade_value({s}, off) < 1e-10);
    }
}

TEST_CASE("weak loss barely moves the absorption peak")
{
    const FilterStage s = stage_for_target(1.0, 0.0, 1.1, 0.0, 1e-3);
    const auto grid = linear_grid(-1.2, -1.0, 401);
    CascadeOptions opt;
    opt.response.max_sites = 1 << 18;
    const auto curve = cascade_response({s}, grid, opt);
    const auto m = filter_metrics(curve);
    CHECK(std::abs(m.min_omega + 1.1) < 1e-2);
}

TEST_CASE("cascade of one stage equals the stage response")
{
    const FilterStage s = stage_for_target(1.0, 0.5, 1.2, 0.1, 0.1);
    LatticeConfig lat;
    lat.j_min = -32;
    lat.j_max = 32;
    lat.omega0 = 0.5;
    const auto grid = linear_grid(-3, 3, 301);
    const auto single = filter_response(lat, s.losses, grid);
    const auto cascade = cascade_response({s}, grid);
    CHECK(single.f == cascade.f);
}

TEST_CASE("cascade composes monotonically")
{
    const auto grid = linear_grid(-3, 3, 301);
    const FilterStage a = stage_for_target(1.0, 0.0, 1.8, 0.1, 0.1);
    const FilterStage b = stage_for_target(1.0, 0.0, 1.1, 0.1, 0.1);
    const auto fa = cascade_response({a}, grid);
    const auto fb = cascade_response({b}, grid);
    CascadeOptions par;
    par.response.threads = 2;
    const auto fab = cascade_response({a, b}, grid, par);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(fab.f[i] <= fa.f[i] * (1 + 1e-12));
        CHECK(fab.f[i] <= fb.f[i] * (1 + 1e-12));
        CHECK(fab.f[i] == doctest::Approx(fa.f[i] * fb.f[i]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(cascade_response({}, grid), ConfigError);
}

TEST_CASE("metrics of an ideal rectangular stopband")
{
    ResponseCurve c;
    c.omega = linear_grid(-3, 3, 6001);
    for (double w : c.omega) {
        c.f.push_back(std::abs(w) < 1.0 ? 1e-4 : 1.0);
    }
    const auto m = filter_metrics(c);
    CHECK(m.width_3db == doctest::Approx(2.0).epsilon(2e-3));
    CHECK(m.width_25db == doctest::Approx(2.0).epsilon(2e-3));
    CHECK(m.shape_factor == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(m.min_db == doctest::Approx(-40.0));
    CHECK_FALSE(m.has_hump);
}

TEST_CASE("metrics on a flat curve report no stopband")
{
    ResponseCurve c;
    c.omega = linear_grid(-1, 1, 11);
    c.f.assign(11, 0.9);
    CHECK_THROWS_AS(filter_metrics(c), NoStopbandError);
}

TEST_CASE("single edge stage has a hump, the cascade suppresses it")
{
    const auto grid = linear_grid(-3, 3, 2001);
    const FilterStage c = stage_for_target(1.0, 0.0, 1.8, 0.1, 0.1);
    const FilterStage b = stage_for_target(1.0, 0.0, 1.1, 0.1, 0.1);
    const auto mc = filter_metrics(cascade_response({c}, grid));
    CHECK(mc.has_hump);
    CHECK(std::abs(mc.hump_omega) < 0.2);
    const auto mcb = filter_metrics(cascade_response({c, b}, grid));
    CHECK(mcb.min_db < -25.0);
    CHECK(mcb.shape_factor > mc.shape_factor);
}

TEST_CASE("refined crossings agree with a dense grid")
{
    const std::vector<FilterStage> stages{stage_for_target(1.0, 0.0, 1.8, 0.1, 0.1),
                                          stage_for_target(1.0, 0.0, 1.1, 0.1, 0.1)};
    const auto coarse = cascade_response(stages, linear_grid(-3, 3, 401));
    const auto fine = cascade_response(stages, linear_grid(-3, 3, 20001));
    const auto mr = filter_metrics(coarse, [&](double w) { return cascade_value(stages, w); });
    const auto mf = filter_metrics(fine);
    CHECK(mr.width_3db == doctest::Approx(mf.width_3db).epsilon(1e-3));
    CHECK(mr.width_25db == doctest::Approx(mf.width_25db).epsilon(1e-3));
}

TEST_CASE("two-stage design hits the width target")
{
    DesignTarget t;
    t.center = 10.0;
    t.width_3db = 4.4;
    const auto d = design_two_stage(t);
    CHECK(d.stages.size() == 2);
    CHECK(d.meets_rejection);
    CHECK(d.metrics.width_3db == doctest::Approx(4.4).epsilon(1e-2));
    CHECK(d.metrics.shape_factor > 0.8);
    const auto [lo, hi] = d.metrics.edges_3db;
    CHECK(0.5 * (lo + hi) == doctest::Approx(10.0).epsilon(1e-4));

    t.width_3db = -1.0;
    CHECK_THROWS_AS(design_two_stage(t), ConfigError);
}
