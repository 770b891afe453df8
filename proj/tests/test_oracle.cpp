#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qclock/oracle.hpp"
#include "qclock/propagator.hpp"

using namespace qclock;

namespace {

constexpr double kBumpArea = 0.443993816168079;

// Independent reference: Simpson quadrature of the continuous bump.
double reference_cumulative(double x, double width, double target) {
    if (x <= 0.0) return 0.0;
    if (x >= width) return target;
    const int n = 20000;
    const double step = x / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double u = (2.0 * i * step - width) / width;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * shape_value(CouplingShape::Bump, u);
    }
    return target * (acc * step / 3.0) / (0.5 * width * kBumpArea);
}

}  // namespace

TEST_CASE("cumulative coupling matches quadrature of the continuous profile") {
    const Grid g(-4.0, 12.0, 4096);
    const double target = std::numbers::pi / 4.0;
    const CouplingProfile p = coupling_profile(g, 1.0, target);
    const RVector G = cumulative_coupling(p);
    double worst = 0.0;
    for (int j = 0; j < g.size(); j += 7) worst = std::max(worst, std::abs(G(j) - reference_cumulative(g.position(j), 1.0, target)));
    CHECK(worst < 1e-10);
    CHECK(G(1024) == 0.0);          // x = 0
    CHECK(G(1024 + 256) == p.integral); // x = Delta
    CHECK(G(0) == 0.0);
    CHECK(G(4095) == p.integral);
}

TEST_CASE("analytic branch states") {
    ModelConfig m;
    m.coupling_integral = 0.6;
    const ClockWaveFunction phi0 = initial_packet(m);
    const RVector G = cumulative_coupling(build_interaction(m).profile);
    // Past the coupling region each branch carries a uniform phase.
    const ClockWaveFunction late = free_clock_evolve(phi0, 2.5);
    const ClockWaveFunction up = analytic_branch_state(late, G, 1.0, 1.0);
    CHECK(std::abs(late.inner(up) - std::polar(1.0, -0.6)) < 1e-13);
    const ClockWaveFunction flipped = analytic_branch_state(late, G, 1.0, 1.0, BranchSign::Flipped);
    CHECK(std::abs(late.inner(flipped) - std::polar(1.0, 0.6)) < 1e-13);
    // Before entry nothing happens.
    CHECK(std::abs(overlap_kernel(phi0, G, 1.0) - 1.0) < 1e-15);
    CHECK(std::abs(overlap_kernel(late, G, 1.0) - std::polar(1.0, -1.2)) < 1e-13);
}

TEST_CASE("analytic reduced state") {
    const double s = 1.0 / std::numbers::sqrt2;
    const DensityMatrix rho = analytic_reduced_state(s, s, cplx(0.0, -1.0));
    CHECK(rho(0, 0).real() == doctest::Approx(0.5));
    CHECK(std::abs(rho(0, 1) - cplx(0.0, -0.5)) < 1e-15);
    CHECK(std::abs(rho(1, 0) - cplx(0.0, 0.5)) < 1e-15);
    // late-time fidelity to |+> for w = -i is 1/sqrt(2)
    CVector plus(2);
    plus << s, s;
    CHECK(fidelity(rho, density_from_pure(PureState(plus))) == doctest::Approx(s).epsilon(1e-14));
    CHECK_THROWS_AS(analytic_reduced_state(1.0, 1.0, 1.0), ValidationError);
}

TEST_CASE("branch sign resolves to the Schroedinger convention") {
    CHECK(resolve_branch_sign() == BranchSign::Schroedinger);
    CHECK(to_string(BranchSign::Schroedinger) == "schroedinger");
}

TEST_CASE("simulated dephasing matches the closed form") {
    ModelConfig m;
    m.coupling_integral = std::numbers::pi / 4.0;
    const double s = 1.0 / std::numbers::sqrt2;
    CVector plus(2);
    plus << s, s;
    const ClockWaveFunction phi0 = initial_packet(m);
    const RVector G = cumulative_coupling(build_interaction(m).profile);
    CompositeState state = CompositeState::product(phi0, PureState(plus));
    const StrangPropagator prop(m);
    double t = 0.0;
    for (double next : {0.3, 0.7, 1.2, 2.5}) {
        prop.advance(state, next - t, 1e-3);
        t = next;
        const DensityMatrix analytic = analytic_reduced_state(s, s, overlap_kernel(free_clock_evolve(phi0, t), G, 1.0));
        CHECK(max_abs_diff(reduced_states(state).system.matrix(), analytic.matrix()) < 1e-6);
    }
}
