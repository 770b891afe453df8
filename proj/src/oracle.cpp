#include "qclock/oracle.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "qclock/propagator.hpp"
#include "qclock/spectral.hpp"

namespace qclock {

std::string_view to_string(BranchSign sign) {
    return sign == BranchSign::Schroedinger ? "schroedinger" : "flipped";
}

RVector cumulative_coupling(const CouplingProfile& profile) {
    const Grid& grid = profile.grid;
    const int n = grid.size();
    RVector out = RVector::Zero(n);
    if (profile.degenerate) return out;

    // Antiderivative of the trigonometric interpolant I(x) = sum_m c_m e^{i k_m (x - x_min)}.
    // The Nyquist term integrates to a function vanishing on every node and is dropped.
    std::vector<cplx> coeff(profile.values.data(), profile.values.data() + n);
    Fft fft(n);
    fft.forward(coeff);
    const double mean = coeff[0].real() / n;
    cplx at_origin = 0.0;
    for (int m = 0; m < n; ++m) {
        if (m == 0 || m == n / 2) {
            coeff[m] = 0.0;
            continue;
        }
        const double k = grid.wavenumber(m);
        coeff[m] /= cplx(0.0, k) * static_cast<double>(n);
        at_origin += coeff[m] * std::polar(1.0, -k * grid.x_min());
    }
    // Back-transform without the 1/n factor: S_j = sum_m coeff_m e^{2 pi i mj/n}.
    fft.inverse(coeff);
    for (int j = 0; j < n; ++j) {
        const double x = grid.position(j);
        if (x <= 0.0) {
            out(j) = 0.0;
        } else if (x >= profile.width) {
            out(j) = profile.integral;
        } else {
            out(j) = mean * x + (coeff[j] * static_cast<double>(n) - at_origin).real();
        }
    }
    return out;
}

ClockWaveFunction analytic_branch_state(const ClockWaveFunction& phi_free, const RVector& cumulative,
                                        double branch_eigenvalue, double hbar, BranchSign sign) {
    if (cumulative.size() != phi_free.grid().size()) {
        throw ValidationError("analytic branch state: cumulative coupling does not match grid");
    }
    const double c = static_cast<int>(sign) * branch_eigenvalue / hbar;
    CVector out = phi_free.amplitudes();
    for (Eigen::Index j = 0; j < out.size(); ++j) {
        if (cumulative(j) != 0.0) out(j) *= std::polar(1.0, c * cumulative(j));
    }
    return ClockWaveFunction(phi_free.grid(), std::move(out));
}

cplx overlap_kernel(const ClockWaveFunction& phi_free, const RVector& cumulative, double hbar,
                    BranchSign sign) {
    if (cumulative.size() != phi_free.grid().size()) {
        throw ValidationError("overlap kernel: cumulative coupling does not match grid");
    }
    const double c = 2.0 * static_cast<int>(sign) / hbar;
    cplx acc = 0.0;
    for (Eigen::Index j = 0; j < cumulative.size(); ++j) {
        const double w = std::norm(phi_free[static_cast<int>(j)]);
        if (w == 0.0) continue;
        acc += w * (cumulative(j) == 0.0 ? cplx(1.0) : std::polar(1.0, c * cumulative(j)));
    }
    return phi_free.grid().spacing() * acc;
}

DensityMatrix analytic_reduced_state(cplx c0, cplx c1, cplx overlap) {
    if (std::abs(std::norm(c0) + std::norm(c1) - 1.0) > 1e-12) {
        throw ValidationError("analytic reduced state: |c0|^2 + |c1|^2 != 1");
    }
    CMatrix rho(2, 2);
    rho(0, 0) = std::norm(c0);
    rho(1, 1) = std::norm(c1);
    rho(0, 1) = c0 * std::conj(c1) * overlap;
    rho(1, 0) = std::conj(rho(0, 1));
    return DensityMatrix(rho);
}

BranchSign resolve_branch_sign() {
    ModelConfig config;
    config.grid = Grid(-2.0, 4.0, 128);
    config.coupling_integral = std::numbers::pi / 4.0;
    config.coupling_operator = HermitianOperator::pauli_z();
    config.system_hamiltonian = HermitianOperator::zero(2);
    const double t = config.packet_width + config.coupling_width + 0.5;

    const ClockWaveFunction phi0 = initial_packet(config);
    const cplx c = 1.0 / std::sqrt(2.0);
    CVector omega(2);
    omega << c, c;
    const CompositeState theta = dense_oracle_evolve(CompositeState::product(phi0, PureState(omega)), config, t);
    const CMatrix rho = reduced_states(theta).system.matrix();

    const ClockWaveFunction phi_t = free_clock_evolve(phi0, t);
    const RVector cumulative = cumulative_coupling(build_interaction(config).profile);
    double best = INFINITY;
    BranchSign chosen = BranchSign::Schroedinger;
    for (BranchSign sign : {BranchSign::Schroedinger, BranchSign::Flipped}) {
        const DensityMatrix candidate = analytic_reduced_state(c, c, overlap_kernel(phi_t, cumulative, 1.0, sign));
        const double dev = max_abs_diff(candidate.matrix(), rho);
        if (dev < best) {
            best = dev;
            chosen = sign;
        }
    }
    if (best > 1e-2) throw std::runtime_error("resolve_branch_sign: neither convention matches the dense oracle");
    return chosen;
}

}  // namespace qclock
