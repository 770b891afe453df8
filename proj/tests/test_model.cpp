#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qclock/model.hpp"
#include "qclock/propagator.hpp"

using namespace qclock;

namespace {

// Reference values from high-precision quadrature.
constexpr double kSpreadUnitBump = 3.5086231665607962; // Delta H_c for delta = 1, hbar = 1
constexpr double kBumpArea = 0.443993816168079;        // int_{-1}^{1} exp(-1/(1-u^2)) du

}  // namespace

TEST_CASE("grid geometry") {
    const Grid g(-4.0, 12.0, 4096);
    CHECK(g.spacing() == 1.0 / 256.0);
    CHECK(g.position(0) == -4.0);
    CHECK(g.position(1024) == 0.0);
    CHECK(g.wavenumber(1) == doctest::Approx(2.0 * std::numbers::pi / 16.0));
    CHECK(g.wavenumber(2048) == doctest::Approx(-std::numbers::pi * 256.0));
    CHECK(g.wavenumber(4095) == doctest::Approx(-2.0 * std::numbers::pi / 16.0));
    CHECK_THROWS_AS(Grid(-4.0, 12.0, 1000), ValidationError);
    CHECK_THROWS_AS(Grid(1.0, 12.0, 64), ValidationError);
}

TEST_CASE("bump shape integral") {
    const int n = 200000;
    double acc = 0.0;
    for (int i = 1; i < n; ++i) acc += shape_value(CouplingShape::Bump, -1.0 + 2.0 * i / n);
    CHECK(acc * 2.0 / n == doctest::Approx(kBumpArea).epsilon(1e-12));
    CHECK(shape_value(CouplingShape::Bump, 1.0) == 0.0);
    CHECK(shape_value(CouplingShape::FlatTop, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("coupling profile: support and normalization") {
    const Grid g(-4.0, 12.0, 4096);
    for (auto shape : {CouplingShape::Bump, CouplingShape::FlatTop}) {
        const CouplingProfile p = coupling_profile(g, 1.0, std::numbers::pi / 4.0, shape);
        CHECK(p.integral == doctest::Approx(std::numbers::pi / 4.0).epsilon(1e-14));
        CHECK(g.spacing() * p.values.sum() == doctest::Approx(std::numbers::pi / 4.0).epsilon(1e-14));
        for (int j = 0; j < g.size(); ++j) {
            const double x = g.position(j);
            if (x <= 0.0 || x >= 1.0) CHECK(p.values(j) == 0.0);
        }
        CHECK(!p.degenerate);
    }
    CHECK(coupling_profile(g, 1.0, 0.0).degenerate);
    CHECK_THROWS_AS(coupling_profile(g, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(coupling_profile(g, 13.0, 1.0), ValidationError);
    CHECK_THROWS_AS(coupling_profile(g, 1.0, std::nan("")), ValidationError);
    CHECK_THROWS_AS(coupling_profile(g, 0.5 * g.spacing(), 1.0), ValidationError);
    CHECK(coupling_shape_from_string("flat-top") == CouplingShape::FlatTop);
    CHECK_THROWS_AS(coupling_shape_from_string("gauss"), ValidationError);
}

TEST_CASE("clock packet: support, norm and energy spread") {
    const Grid g(-4.0, 12.0, 4096);
    const ClockWaveFunction phi = bump_packet(g, 1.0, 0.0);
    CHECK(phi.norm() == doctest::Approx(1.0).epsilon(1e-14));
    for (int j = 0; j < g.size(); ++j) {
        const double x = g.position(j);
        if (x <= -1.0 || x >= 0.0) CHECK(phi[j] == cplx(0.0));
    }
    const ClockEnergyStats s = clock_energy_stats(phi, 1.0);
    CHECK(std::abs(s.mean) < 1e-12);
    CHECK(s.spread == doctest::Approx(kSpreadUnitBump).epsilon(1e-10));

    // Delta H_c scales with hbar / delta; the carrier moves only the mean.
    CHECK(clock_energy_stats(bump_packet(g, 0.5, 0.0), 2.0).spread ==
          doctest::Approx(4.0 * kSpreadUnitBump).epsilon(1e-8));
    const ClockEnergyStats moving = clock_energy_stats(bump_packet(g, 1.0, 3.0), 1.0);
    CHECK(moving.mean == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(moving.spread == doctest::Approx(kSpreadUnitBump).epsilon(1e-10));
}

TEST_CASE("model validation and wrap limits") {
    ModelConfig m;
    m.coupling_integral = 1.0;
    CHECK_NOTHROW(m.validate());
    CHECK_NOTHROW(validate_no_wrap(m, 4.0));
    // t_max + Delta + 2h <= x_max
    CHECK_NOTHROW(validate_no_wrap(m, 11.0 - 2.0 * m.grid.spacing()));
    try {
        validate_no_wrap(m, 20.0);
        FAIL("expected WrapError");
    } catch (const WrapError& e) {
        CHECK(e.min_x_max() == doctest::Approx(21.0 + 2.0 * m.grid.spacing()));
    }
    CHECK_THROWS_AS(validate_no_wrap(m, 0.0, -3.5), WrapError);
    CHECK_NOTHROW(validate_no_wrap(m, 0.0, -2.0));

    ModelConfig bad = m;
    bad.hbar = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = m;
    bad.system_hamiltonian = HermitianOperator::zero(3);
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("condition 1 holds for t <= 0 and fails once the packet enters") {
    ModelConfig m;
    m.coupling_integral = std::numbers::pi / 4.0;
    const Interaction v = build_interaction(m);
    const ClockWaveFunction phi0 = initial_packet(m);
    const PureState up = PureState::basis(2, 0);
    for (double t : {-2.0, -1.0, -0.25, 0.0}) {
        CHECK(condition1_residual(free_clock_evolve(phi0, t), up, v) == 0.0);
    }
    CHECK(condition1_residual(free_clock_evolve(phi0, 0.5 + 1.0), up, v) > 0.0);
    CHECK(condition2_witness(m, 1.5));

    ModelConfig off = m;
    off.coupling_integral = 0.0;
    CHECK_FALSE(condition2_witness(off, 1.5));
}
