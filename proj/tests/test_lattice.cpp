#include "oam/lattice.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace oam;

namespace
{
LatticeConfig small_lattice(int half, int num_aux = 1)
{
    LatticeConfig lat;
    lat.j_min = -half;
    lat.j_max = half;
    lat.kappa = 1.3;
    lat.omega0 = 0.4;
    lat.num_aux = num_aux;
    return lat;
}
} // namespace

TEST_CASE("lattice config validation")
{
    LatticeConfig lat;
    CHECK_NOTHROW(lat.validate());

    lat.j_min = 1;
    CHECK_THROWS_AS(lat.validate(), ConfigError);
    lat = {};
    lat.j_max = -1;
    CHECK_THROWS_AS(lat.validate(), ConfigError);
    lat = {};
    lat.kappa = 0.0;
    CHECK_THROWS_AS(lat.validate(), ConfigError);
    lat = {};
    lat.num_aux = 3;
    CHECK_THROWS_AS(lat.validate(), ConfigError);
    lat = {};
    lat.step_index = 0;
    CHECK_THROWS_AS(lat.validate(), ConfigError);
}

TEST_CASE("phase_at on simple schedules")
{
    SUBCASE("single constant segment")
    {
        const PhaseSchedule s({{0.0, 0.0, 0.0}});
        CHECK(s.phase_at(5.0) == 0.0);
    }

    SUBCASE("echo plateaus")
    {
        const PhaseSchedule s({{0.0, 0.0, 0.0}, {20.0, pi / 2, 1.0}, {30.0, -pi / 2, 1.0}, {40.0, -pi, 1.0}});
        CHECK(s.phase_at(10.0) == 0.0);
        CHECK(s.phase_at(25.0) == doctest::Approx(pi / 2));
        CHECK(s.phase_at(35.0) == doctest::Approx(-pi / 2));
        CHECK(s.phase_at(60.0) == doctest::Approx(-pi));
    }

    SUBCASE("ramp midpoint is the mean")
    {
        const PhaseSchedule s({{0.0, 0.0, 0.0}, {10.0, pi / 2, 2.0}});
        CHECK(s.phase_at(11.0) == doctest::Approx(pi / 4).epsilon(1e-14));
        const PhaseSchedule lin({{0.0, 0.0, 0.0}, {10.0, pi / 2, 2.0}}, RampShape::Linear);
        CHECK(lin.phase_at(11.0) == doctest::Approx(pi / 4).epsilon(1e-14));
    }

    SUBCASE("before the first segment")
    {
        const PhaseSchedule s({{5.0, 0.7, 0.0}, {10.0, 0.0, 0.0}});
        CHECK(s.phase_at(-3.0) == 0.7);
    }

    SUBCASE("continuity across ramp ends")
    {
        const PhaseSchedule s({{0.0, 0.0, 0.0}, {10.0, 1.0, 2.0}, {15.0, -1.0, 3.0}});
        for (double edge : {10.0, 12.0, 15.0, 18.0}) {
            CHECK(s.phase_at(edge - 1e-9) == doctest::Approx(s.phase_at(edge + 1e-9)).epsilon(1e-6));
        }
    }
}

TEST_CASE("phase schedule rejects malformed input")
{
    CHECK_THROWS_AS(PhaseSchedule({}), ConfigError);
    CHECK_THROWS_AS(PhaseSchedule({{0.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}), ConfigError);
    CHECK_THROWS_AS(PhaseSchedule({{0.0, 0.0, -1.0}}), ConfigError);
    CHECK_THROWS_AS(PhaseSchedule({{0.0, 0.0, 0.0}, {1.0, 1.0, 5.0}, {2.0, 0.0, 0.0}}), ConfigError);
}

TEST_CASE("loss_rate parameterisation")
{
    const double kappa = 1.0;
    const LossModel ideal = LossModel::port_only(4.0 * kappa);
    const LatticeConfig lat = small_lattice(10);
    CHECK(loss_rate(ideal, lat, 0) == 4.0);
    CHECK(loss_rate(ideal, lat, 7) == 0.0);

    LossModel lossy = LossModel::port_only(4.0);
    lossy.near_port = 0.2;
    lossy.uniform = 0.01;
    // 0.2 e^{-1} + 0.01
    CHECK(loss_rate(lossy, lat, 1) == doctest::Approx(0.08357588823428847).epsilon(1e-14));
    CHECK(loss_rate(lossy, lat, -1) == loss_rate(lossy, lat, 1));
    CHECK(loss_rate(lossy, lat, 0) == doctest::Approx(4.0 + 0.2 + 0.01));

    CHECK_THROWS_AS(loss_rate(ideal, lat, 11), IndexError);
    CHECK_THROWS_AS(loss_rate(ideal, lat, -11), IndexError);

    LossModel over = lossy;
    over.overrides[3] = 0.5;
    CHECK(over.intrinsic(3) == 0.5);
    CHECK(over.total(0) == lossy.total(0));

    LossModel bad;
    bad.uniform = -0.1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("coupling_matrix entries")
{
    SUBCASE("phi = 0 is real symmetric")
    {
        LatticeConfig lat = small_lattice(1);
        const auto m = coupling_matrix(lat, 0.0).dense();
        CHECK(m.rows() == 3);
        CHECK((m - m.transpose()).norm() == 0.0);
        CHECK(m.imag().norm() == 0.0);
        CHECK(m(0, 1).real() == lat.kappa);
        CHECK(m(1, 0).real() == lat.kappa);
        CHECK(m(0, 0).real() == lat.omega0);
    }

    SUBCASE("two auxiliary cavities cancel at pi/2")
    {
        const auto m = coupling_matrix(small_lattice(3, 2), pi / 2).dense();
        for (Eigen::Index k = 0; k + 1 < m.rows(); ++k) {
            CHECK(std::abs(m(k, k + 1)) < 1e-15);
            CHECK(std::abs(m(k + 1, k)) < 1e-15);
        }
    }

    SUBCASE("phi = pi/2 lossless")
    {
        const LatticeConfig lat = small_lattice(2);
        const auto m = coupling_matrix(lat, pi / 2).dense();
        CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
        CHECK(std::abs(m(1, 2) - cplx(0.0, -lat.kappa)) < 1e-15);
        CHECK(std::abs(m(2, 1) - cplx(0.0, lat.kappa)) < 1e-15);
    }

    SUBCASE("loss enters the diagonal")
    {
        LossModel losses = LossModel::port_only(2.0);
        losses.uniform = 0.1;
        const LatticeConfig lat = small_lattice(2);
        const auto m = coupling_matrix(lat, 0.3, losses).dense();
        CHECK(m(2, 2) == cplx(lat.omega0, -0.5 * 2.1));
        CHECK(m(0, 0) == cplx(lat.omega0, -0.05));
    }
}

TEST_CASE("coupling_matrix properties over random configurations")
{
    std::mt19937 rng(20240611);
    std::uniform_real_distribution<double> phase(-pi, pi);
    std::uniform_int_distribution<int> half(1, 12);

    for (int trial = 0; trial < 50; ++trial) {
        const int h = half(rng);
        const double phi = phase(rng);
        LatticeConfig lat = small_lattice(h);

        // Hermitian without loss
        const Eigen::MatrixXcd m = coupling_matrix(lat, phi).dense();
        CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() == 0.0);

        // diag(e^{-i j phi}) gauges the phase away
        const Eigen::MatrixXcd m0 = coupling_matrix(lat, 0.0).dense();
        Eigen::VectorXcd u(m.rows());
        for (int j = lat.j_min; j <= lat.j_max; ++j) {
            u(lat.offset(j)) = std::polar(1.0, -j * phi);
        }
        const Eigen::MatrixXcd gauged = u.asDiagonal() * m * u.conjugate().asDiagonal();
        CHECK((gauged - m0).cwiseAbs().maxCoeff() < 1e-14);

        // two auxiliary cavities == one at hopping kappa cos(phi), zero phase
        LatticeConfig two = lat;
        two.num_aux = 2;
        LatticeConfig eff = lat;
        eff.kappa = lat.kappa * std::cos(phi);
        if (std::abs(eff.kappa) > 1e-12) {
            const Eigen::MatrixXcd a = coupling_matrix(two, phi).dense();
            Eigen::MatrixXcd b = coupling_matrix(lat, 0.0).dense();
            b.diagonal().setConstant(lat.omega0);
            for (Eigen::Index k = 0; k + 1 < b.rows(); ++k) {
                b(k, k + 1) = eff.kappa;
                b(k + 1, k) = eff.kappa;
            }
            CHECK((a - b).cwiseAbs().maxCoeff() < 1e-15);
        }
    }
}

TEST_CASE("periodic coupling matrix closes the ring")
{
    LatticeConfig lat = small_lattice(3);
    const auto m = coupling_matrix(lat, 0.4, Boundary::Periodic).dense();
    const auto n = m.rows();
    CHECK(m(n - 1, 0) == m(0, 1));
    CHECK(m(0, n - 1) == m(1, 0));
    CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("input pulse")
{
    const InputPulse g = InputPulse::gaussian(2.0, 2.5, 0.0, 10.0);
    CHECK(std::abs(g(10.0)) == doctest::Approx(2.0));
    CHECK(std::abs(g(12.5)) == doctest::Approx(2.0 * std::exp(-0.5)));
    CHECK(g.total_energy() == doctest::Approx(4.0 * 2.5 * std::sqrt(pi)));
    CHECK(g.energy(0.0, 20.0) / g.total_energy() == doctest::Approx(std::erf(4.0)));

    const InputPulse chirped = InputPulse::gaussian(1.0, 1.0, 3.0, 0.0);
    CHECK(std::arg(chirped(0.5)) == doctest::Approx(-1.5));
    CHECK(std::abs(chirped.in_frame(0.5, 3.0) - chirped.envelope(0.5)) < 1e-15);

    InputPulse sampled;
    sampled.kind = EnvelopeKind::Sampled;
    sampled.sample_times = {0.0, 1.0, 2.0};
    sampled.samples = {0.0, 1.0, 0.0};
    CHECK(std::abs(sampled(0.5) - cplx(0.5)) < 1e-15);
    CHECK(std::abs(sampled(3.0)) == 0.0);
    // two triangles of height 1: 2 * 1/3
    CHECK(sampled.total_energy() == doctest::Approx(2.0 / 3.0));

    InputPulse bad = g;
    bad.width = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
