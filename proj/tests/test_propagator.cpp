#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qclock/propagator.hpp"

using namespace qclock;

namespace {

ModelConfig small_model(double integral) {
    ModelConfig m;
    m.grid = Grid(-2.0, 4.0, 128);
    m.coupling_integral = integral;
    return m;
}

PureState plus_state() {
    CVector v(2);
    v << 1.0, 1.0;
    return PureState(v / std::numbers::sqrt2);
}

}  // namespace

TEST_CASE("free clock evolution is an exact shift") {
    const Grid g(-4.0, 12.0, 4096);
    const ClockWaveFunction phi = bump_packet(g, 1.0, 0.0);
    const double h = g.spacing();

    // Commensurate shift: a pure index roll.
    const ClockWaveFunction rolled = free_clock_evolve(phi, 37 * h);
    for (int j = 37; j < g.size(); ++j) CHECK(rolled[j] == phi[j - 37]);

    // Fourier shift agrees with the roll up to round-off.
    const ClockWaveFunction half = free_clock_evolve(free_clock_evolve(phi, 0.5 * h), 0.5 * h);
    CHECK(max_abs_diff(half.amplitudes(), free_clock_evolve(phi, h).amplitudes()) < 1e-12);
    CHECK(free_clock_evolve(phi, 0.3).norm() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(max_abs_diff(free_clock_evolve(free_clock_evolve(phi, 1.3), -1.3).amplitudes(), phi.amplitudes()) < 1e-12);
}

TEST_CASE("free system evolution") {
    const HermitianOperator hx = HermitianOperator::pauli_x();
    const PureState zero = PureState::basis(2, 0);
    // e^{-i sigma_x t}|0> = cos t |0> - i sin t |1>
    const PureState out = free_system_evolve(zero, hx, 0.3, 1.0);
    CHECK(std::abs(out.amplitudes()(0) - std::cos(0.3)) < 1e-15);
    CHECK(std::abs(out.amplitudes()(1) - cplx(0.0, -std::sin(0.3))) < 1e-15);
    const DensityMatrix rho = free_system_evolve(density_from_pure(zero), hx, 0.6, 2.0);
    CHECK(rho(0, 0).real() == doctest::Approx(std::cos(0.3) * std::cos(0.3)));
}

TEST_CASE("Strang propagation preserves the norm and reduces to free motion without coupling") {
    ModelConfig m;
    m.coupling_integral = 0.0;
    m.system_hamiltonian = HermitianOperator::pauli_x();
    const ClockWaveFunction phi0 = initial_packet(m);
    const CompositeState start = CompositeState::product(phi0, plus_state());
    const EvolutionResult r = strang_evolve(start, m, 1.25, 1e-2);
    const CompositeState exact = CompositeState::product(
        free_clock_evolve(phi0, 1.25), free_system_evolve(plus_state(), m.system_hamiltonian, 1.25, 1.0));
    CHECK(l2_distance(r.state, exact) < 1e-12);
    CHECK(r.state.norm() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("strang_evolve edge cases") {
    ModelConfig m;
    m.coupling_integral = 1.0;
    const CompositeState start = CompositeState::product(initial_packet(m), plus_state());
    const EvolutionResult zero = strang_evolve(start, m, 0.0, 1e-3);
    CHECK(l2_distance(zero.state, start) == 0.0);
    CHECK_THROWS_AS(strang_evolve(start, m, 1e-3, 1e-2), ValidationError);
    CHECK_THROWS_AS(strang_evolve(start, m, 20.0, 1e-2), WrapError);
}

TEST_CASE("split-operator agrees with the dense propagator") {
    const double t = 2.0; // delta + Delta
    SUBCASE("pure dephasing") {
        const ModelConfig m = small_model(std::numbers::pi / 4.0);
        const CompositeState start = CompositeState::product(initial_packet(m), plus_state());
        const CompositeState dense = dense_oracle_evolve(start, m, t);
        CompositeState split = start;
        StrangPropagator(m).advance(split, t, 1e-4);
        CHECK(l2_distance(split, dense) < 1e-8);
    }
    SUBCASE("non-commuting system Hamiltonian") {
        ModelConfig m = small_model(0.7);
        m.system_hamiltonian = HermitianOperator(0.8 * HermitianOperator::pauli_x().matrix());
        const CompositeState start = CompositeState::product(initial_packet(m), PureState::basis(2, 0));
        const CompositeState dense = dense_oracle_evolve(start, m, t);
        CompositeState split = start;
        StrangPropagator(m).advance(split, t, 1e-4);
        CHECK(l2_distance(split, dense) < 1e-8);
    }
}

TEST_CASE("Strang error is second order") {
    ModelConfig m;
    m.coupling_integral = 1.0;
    m.system_hamiltonian = HermitianOperator(0.5 * HermitianOperator::pauli_x().matrix());
    const CompositeState start = CompositeState::product(initial_packet(m), plus_state());
    const double t = 0.75; // mid transit
    CompositeState ref = start;
    StrangPropagator prop(m);
    prop.advance(ref, t, 1e-4);
    double prev = 0.0;
    for (double dt : {4e-3, 2e-3}) {
        CompositeState s = start;
        prop.advance(s, t, dt);
        const double err = l2_distance(s, ref);
        if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.1));
        prev = err;
    }
}

TEST_CASE("partial final step covers durations that are not multiples of dt") {
    const ModelConfig m = small_model(0.5);
    const CompositeState start = CompositeState::product(initial_packet(m), plus_state());
    CompositeState a = start, b = start;
    const StrangPropagator prop(m);
    prop.advance(a, 1.0005, 1e-3);
    prop.advance(b, 1.0, 1e-3);
    prop.advance(b, 0.0005, 1e-3);
    CHECK(l2_distance(a, b) < 1e-13);
}

TEST_CASE("reduced states and the interaction norm") {
    const ModelConfig m = small_model(std::numbers::pi / 4.0);
    const CompositeState product = CompositeState::product(initial_packet(m), plus_state());
    const ReducedStates r0 = reduced_states(product);
    CHECK(r0.clock_purity == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(purity(r0.system) == doctest::Approx(1.0).epsilon(1e-13));
    REQUIRE(r0.clock_dense);
    CHECK(r0.clock_dense->trace().real() == doctest::Approx(1.0));
    CHECK(interaction_norm(product, build_interaction(m)) == 0.0);

    CompositeState mid = product;
    StrangPropagator(m).advance(mid, 0.5, 1e-3);
    const ReducedStates r = reduced_states(mid);
    CHECK(r.clock_purity < 1.0 - 1e-3);
    // Schmidt spectra of the two marginals coincide.
    CHECK(purity(r.system) == doctest::Approx(r.clock_purity).epsilon(1e-12));
    CHECK(interaction_norm(mid, build_interaction(m)) > 0.0);
}

TEST_CASE("autocorrelation") {
    const Grid g(-4.0, 12.0, 4096);
    const ClockWaveFunction phi = bump_packet(g, 1.0, 0.0);
    CHECK(autocorrelation(phi, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(autocorrelation(phi, 1.0) < 1e-12); // disjoint supports
}

TEST_CASE("dense oracle refuses large systems") {
    ModelConfig m;
    m.coupling_integral = 1.0;
    const CompositeState s = CompositeState::product(initial_packet(m), plus_state());
    CHECK_THROWS_AS(dense_oracle_evolve(s, m, 1.0), ValidationError);
}
