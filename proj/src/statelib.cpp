#include "qclock/statelib.hpp"

#include <algorithm>
#include <cmath>

namespace qclock {

namespace {

void require_square(const CMatrix& m, const char* what) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw ValidationError(std::string(what) + ": matrix must be square and nonempty");
    }
}

void require_same_dim(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) {
        throw ValidationError("dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                              std::to_string(b.dim()));
    }
}

CMatrix hermitize(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

CMatrix projector_from(const HermitianEigen& e, auto keep) {
    const int d = static_cast<int>(e.values.size());
    CMatrix p = CMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        if (keep(e.values(i))) {
            p.noalias() += e.vectors.col(i) * e.vectors.col(i).adjoint();
        }
    }
    return p;
}

}  // namespace

HermitianOperator::HermitianOperator(CMatrix entries) : m_(std::move(entries)) {
    require_square(m_, "HermitianOperator");
    if (hermiticity_defect(m_) > kHermitianTol) {
        throw ValidationError("HermitianOperator: matrix is not Hermitian");
    }
    m_ = hermitize(m_);
}

HermitianOperator HermitianOperator::zero(int dim) { return HermitianOperator(CMatrix::Zero(dim, dim)); }

HermitianOperator HermitianOperator::identity(int dim) {
    return HermitianOperator(CMatrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::pauli_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return HermitianOperator(m);
}

HermitianOperator HermitianOperator::pauli_y() {
    CMatrix m(2, 2);
    m << 0, cplx(0, -1), cplx(0, 1), 0;
    return HermitianOperator(m);
}

HermitianOperator HermitianOperator::pauli_z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return HermitianOperator(m);
}

PureState::PureState(CVector amplitudes) : v_(std::move(amplitudes)) {
    if (v_.size() == 0) throw ValidationError("PureState: empty amplitude vector");
    if (std::abs(v_.norm() - 1.0) > kNormTol) {
        throw ValidationError("PureState: amplitudes are not normalized (norm " +
                              std::to_string(v_.norm()) + ")");
    }
}

PureState PureState::basis(int dim, int index) {
    if (index < 0 || index >= dim) throw ValidationError("PureState::basis: index out of range");
    CVector v = CVector::Zero(dim);
    v(index) = 1.0;
    return PureState(v);
}

DensityMatrix::DensityMatrix(CMatrix entries) : m_(std::move(entries)) {
    require_square(m_, "DensityMatrix");
    if (hermiticity_defect(m_) > kHermitianTol) {
        throw ValidationError("DensityMatrix: matrix is not Hermitian");
    }
    m_ = hermitize(m_);
    if (std::abs(m_.trace().real() - 1.0) > kTraceTol) {
        throw ValidationError("DensityMatrix: trace " + std::to_string(m_.trace().real()) + " != 1");
    }
    const double lo = eigh(m_).values.minCoeff();
    if (lo < -kPsdTol) {
        throw ValidationError("DensityMatrix: negative eigenvalue " + std::to_string(lo));
    }
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
    return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

HermitianEigen eigh(const CMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(a));
    if (es.info() != Eigen::Success) throw std::runtime_error("eigh: decomposition failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

double hermiticity_defect(const CMatrix& a) {
    if (a.rows() != a.cols()) return INFINITY;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

CMatrix psd_sqrt(const CMatrix& a) {
    auto e = eigh(a);
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
        double& l = e.values(i);
        if (l < -kPsdTol) throw ValidationError("psd_sqrt: matrix is not positive semidefinite");
        l = std::sqrt(std::max(l, 0.0));
    }
    return e.vectors * e.values.asDiagonal() * e.vectors.adjoint();
}

double operator_norm(const CMatrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(a);
    return svd.singularValues()(0);
}

DensityMatrix density_from_pure(const PureState& psi) {
    const CVector& v = psi.amplitudes();
    return DensityMatrix(v * v.adjoint());
}

double fidelity(const DensityMatrix& rho0, const DensityMatrix& rho1) {
    require_same_dim(rho0, rho1);
    // Trace norm of sqrt(rho0) sqrt(rho1): the round-off square roots in null
    // directions only enter at second order, unlike tr sqrt(s rho1 s).
    const CMatrix prod = psd_sqrt(rho0.matrix()) * psd_sqrt(rho1.matrix());
    Eigen::JacobiSVD<CMatrix> svd(prod);
    return std::clamp(svd.singularValues().sum(), 0.0, 1.0);
}

double trace_distance(const DensityMatrix& rho0, const DensityMatrix& rho1) {
    require_same_dim(rho0, rho1);
    return eigh(rho0.matrix() - rho1.matrix()).values.cwiseAbs().sum();
}

bool fuchs_van_de_graaf_check(const DensityMatrix& rho0, const DensityMatrix& rho1) {
    const double f = fidelity(rho0, rho1);
    const double d = trace_distance(rho0, rho1);
    return d <= 2.0 * std::sqrt(std::max(0.0, 1.0 - f * f)) + 1e-9;
}

HermitianOperator positive_part_projector(const HermitianOperator& a) {
    return HermitianOperator(projector_from(eigh(a.matrix()), [](double l) { return l >= 0.0; }));
}

HermitianOperator support_projector(const DensityMatrix& rho, double eps) {
    if (!(eps > 0.0)) throw ValidationError("support_projector: eps must be positive");
    return HermitianOperator(projector_from(eigh(rho.matrix()), [eps](double l) { return l > eps; }));
}

double purity(const DensityMatrix& rho) {
    // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return rho.matrix().squaredNorm();
}

double von_neumann_entropy(const DensityMatrix& rho) {
    const auto e = eigh(rho.matrix());
    double s = 0.0;
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
        const double l = e.values(i);
        if (l > 1e-14) s -= l * std::log(l);
    }
    return s;
}

double expectation(const DensityMatrix& rho, const PureState& xi) {
    if (xi.dim() != rho.dim()) throw ValidationError("expectation: dimension mismatch");
    return (xi.amplitudes().adjoint() * rho.matrix() * xi.amplitudes())(0, 0).real();
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace qclock
