#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qclock/statelib.hpp"

using namespace qclock;

namespace {

CVector ket(cplx a, cplx b) {
    CVector v(2);
    v << a, b;
    return v;
}

DensityMatrix diag(double p) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = p;
    m(1, 1) = 1.0 - p;
    return DensityMatrix(m);
}

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

}  // namespace

TEST_CASE("operators are validated on construction") {
    CMatrix m(2, 2);
    m << 1.0, cplx(0, 1), cplx(0, 1), 0.0;
    CHECK_THROWS_AS(HermitianOperator{m}, ValidationError);
    CHECK_THROWS_AS(HermitianOperator{CMatrix::Zero(2, 3)}, ValidationError);
    CHECK(HermitianOperator::pauli_y().matrix()(0, 1) == cplx(0, -1));
    CHECK(hermiticity_defect(HermitianOperator::pauli_x().matrix()) == 0.0);
}

TEST_CASE("states reject bad normalization, trace and negativity") {
    CHECK_THROWS_AS(PureState(ket(1.0, 1.0)), ValidationError);
    CHECK_NOTHROW(PureState(ket(kInvSqrt2, cplx(0, kInvSqrt2))));

    CMatrix neg = CMatrix::Zero(2, 2);
    neg(0, 0) = 1.1;
    neg(1, 1) = -0.1;
    CHECK_THROWS_AS(DensityMatrix{neg}, ValidationError);
    CMatrix bad_trace = CMatrix::Identity(2, 2);
    CHECK_THROWS_AS(DensityMatrix{bad_trace}, ValidationError);
    // tolerance is 1e-12 on the trace
    CMatrix near = 0.5 * CMatrix::Identity(2, 2);
    near(0, 0) += 5e-13;
    CHECK_NOTHROW(DensityMatrix{near});
}

TEST_CASE("fidelity of reference pairs") {
    const DensityMatrix zero = density_from_pure(PureState::basis(2, 0));
    const DensityMatrix one = density_from_pure(PureState::basis(2, 1));
    const DensityMatrix plus = density_from_pure(PureState(ket(kInvSqrt2, kInvSqrt2)));
    const DensityMatrix mixed = DensityMatrix::maximally_mixed(2);

    CHECK(fidelity(zero, zero) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fidelity(zero, one) == doctest::Approx(0.0));
    CHECK(fidelity(zero, plus) == doctest::Approx(kInvSqrt2).epsilon(1e-14));
    CHECK(fidelity(plus, mixed) == doctest::Approx(kInvSqrt2).epsilon(1e-14));
    // classical states: Bhattacharyya coefficient
    CHECK(fidelity(diag(0.9), diag(0.5)) ==
          doctest::Approx(std::sqrt(0.45) + std::sqrt(0.05)).epsilon(1e-14));
    CHECK(fidelity(diag(0.3), diag(0.8)) == doctest::Approx(fidelity(diag(0.8), diag(0.3))).epsilon(1e-15));
}

TEST_CASE("fidelity stays accurate next to a pure state") {
    // rho1 = (1-e)|0><0| + e|1><1| against |0>: F = sqrt(1 - e) exactly.
    const DensityMatrix zero = density_from_pure(PureState::basis(2, 0));
    for (double e : {1e-6, 1e-9, 1e-12}) {
        const double f = fidelity(zero, diag(1.0 - e));
        CHECK(1.0 - f * f == doctest::Approx(e).epsilon(1e-6));
    }
}

TEST_CASE("trace distance and Fuchs-van de Graaf") {
    const DensityMatrix zero = density_from_pure(PureState::basis(2, 0));
    const DensityMatrix one = density_from_pure(PureState::basis(2, 1));
    const DensityMatrix plus = density_from_pure(PureState(ket(kInvSqrt2, kInvSqrt2)));
    CHECK(trace_distance(zero, one) == doctest::Approx(2.0));
    CHECK(trace_distance(zero, plus) == doctest::Approx(std::numbers::sqrt2).epsilon(1e-14));
    CHECK(trace_distance(diag(0.9), diag(0.6)) == doctest::Approx(0.6));
    CHECK(fuchs_van_de_graaf_check(zero, plus));
    CHECK(fuchs_van_de_graaf_check(diag(0.9), DensityMatrix::maximally_mixed(2)));
}

TEST_CASE("projectors") {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = -1.0;
    const CMatrix p = positive_part_projector(HermitianOperator(a)).matrix();
    CHECK(std::abs(p(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(p(1, 1)) < 1e-15);

    CHECK(support_projector(diag(1.0), 1e-8).matrix().trace().real() == doctest::Approx(1.0));
    CHECK(support_projector(diag(0.5), 1e-8).matrix().trace().real() == doctest::Approx(2.0));
    CHECK_THROWS_AS(support_projector(diag(0.5), 0.0), ValidationError);
}

TEST_CASE("purity, entropy, expectation") {
    CHECK(purity(DensityMatrix::maximally_mixed(2)) == doctest::Approx(0.5));
    CHECK(purity(diag(1.0)) == doctest::Approx(1.0));
    CHECK(von_neumann_entropy(diag(1.0)) == 0.0);
    CHECK(von_neumann_entropy(diag(0.9)) == doctest::Approx(0.325082973391448).epsilon(1e-13));
    CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed(4)) == doctest::Approx(std::log(4.0)));

    const PureState plus(ket(kInvSqrt2, kInvSqrt2));
    CHECK(expectation(diag(0.9), plus) == doctest::Approx(0.5));
    CHECK(expectation(diag(0.9), PureState::basis(2, 0)) == doctest::Approx(0.9));
}

TEST_CASE("eigh sorts ascending; psd_sqrt squares back") {
    CMatrix m(2, 2);
    m << 0.7, cplx(0.1, 0.2), cplx(0.1, -0.2), 0.3;
    const HermitianEigen e = eigh(m);
    CHECK(e.values(0) <= e.values(1));
    const CMatrix s = psd_sqrt(m);
    CHECK(max_abs_diff(s * s, m) < 1e-14);
    CHECK(operator_norm(HermitianOperator::pauli_x().matrix()) == doctest::Approx(1.0));
}
