#pragma once

// Finite-dimensional state algebra for the controlled system: density
// matrices, fidelity, trace distance and spectral projectors.

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qclock {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Raised when an input violates a documented precondition.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-12;
inline constexpr double kNormTol = 1e-12;

/// Hermitian matrix (energy or dimensionless, depending on role).
class HermitianOperator {
public:
    explicit HermitianOperator(CMatrix entries);

    static HermitianOperator zero(int dim);
    static HermitianOperator identity(int dim);
    static HermitianOperator pauli_x();
    static HermitianOperator pauli_y();
    static HermitianOperator pauli_z();

    int dim() const { return static_cast<int>(m_.rows()); }
    const CMatrix& matrix() const { return m_; }

private:
    CMatrix m_;
};

/// Unit-norm vector of system amplitudes.
class PureState {
public:
    explicit PureState(CVector amplitudes);

    static PureState basis(int dim, int index);

    int dim() const { return static_cast<int>(v_.size()); }
    const CVector& amplitudes() const { return v_; }

private:
    CVector v_;
};

/// Hermitian, positive semidefinite, unit-trace matrix.
class DensityMatrix {
public:
    explicit DensityMatrix(CMatrix entries);

    static DensityMatrix maximally_mixed(int dim);

    int dim() const { return static_cast<int>(m_.rows()); }
    const CMatrix& matrix() const { return m_; }
    cplx operator()(int r, int c) const { return m_(r, c); }

private:
    CMatrix m_;
};

/// Eigenvalues ascending, eigenvectors as columns.
struct HermitianEigen {
    RVector values;
    CMatrix vectors;
};

HermitianEigen eigh(const CMatrix& a);

/// Entrywise max |A - A^dagger|.
double hermiticity_defect(const CMatrix& a);

/// Principal square root of a PSD matrix; eigenvalues in [-kPsdTol, 0) are clipped.
CMatrix psd_sqrt(const CMatrix& a);

/// Largest singular value.
double operator_norm(const CMatrix& a);

DensityMatrix density_from_pure(const PureState& psi);

double fidelity(const DensityMatrix& rho0, const DensityMatrix& rho1);

/// tr|rho0 - rho1|, range [0, 2].
double trace_distance(const DensityMatrix& rho0, const DensityMatrix& rho1);

/// D <= 2 sqrt(1 - F^2) + 1e-9.
bool fuchs_van_de_graaf_check(const DensityMatrix& rho0, const DensityMatrix& rho1);

/// Projector onto the eigenvectors of `a` with eigenvalue >= 0 (zero eigenspace included).
HermitianOperator positive_part_projector(const HermitianOperator& a);

/// Projector onto the eigenvectors of `rho` with eigenvalue > eps.
HermitianOperator support_projector(const DensityMatrix& rho, double eps);

double purity(const DensityMatrix& rho);

/// Entropy in nats; eigenvalues <= 1e-14 are dropped.
double von_neumann_entropy(const DensityMatrix& rho);

/// <xi|rho|xi>, real part.
double expectation(const DensityMatrix& rho, const PureState& xi);

/// max |a - b| entrywise.
double max_abs_diff(const CMatrix& a, const CMatrix& b);

}  // namespace qclock
