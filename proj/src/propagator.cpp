#include "qclock/propagator.hpp"

#include <cmath>
#include <numbers>
#include <span>

namespace qclock {

namespace {

std::span<cplx> column_span(CMatrix& m, Eigen::Index c) {
    return {m.col(c).data(), static_cast<size_t>(m.rows())};
}

// Number of full steps of size dt that fit in duration, and the remainder.
std::pair<long, double> split_duration(double duration, double dt) {
    long steps = static_cast<long>(std::floor(duration / dt * (1.0 + 1e-12)));
    double rest = duration - steps * dt;
    if (rest < 1e-12 * dt) rest = 0.0;
    return {steps, rest};
}

CMatrix unitary_from(const HermitianEigen& e, double scale) {
    // e^{-i scale A}
    CVector phases(e.values.size());
    for (Eigen::Index i = 0; i < e.values.size(); ++i) phases(i) = std::polar(1.0, -scale * e.values(i));
    return e.vectors * phases.asDiagonal() * e.vectors.adjoint();
}

}  // namespace

CompositeState::CompositeState(Grid grid, CMatrix amplitudes) : grid_(grid), amps_(std::move(amplitudes)) {
    if (amps_.rows() != grid_.size() || amps_.cols() < 1) {
        throw ValidationError("composite state: amplitude shape does not match grid");
    }
    if (std::abs(norm() - 1.0) > 1e-9) {
        throw ValidationError("composite state: not normalized (norm " + std::to_string(norm()) + ")");
    }
}

CompositeState CompositeState::product(const ClockWaveFunction& clock, const PureState& system) {
    CMatrix amps = clock.amplitudes() * system.amplitudes().transpose();
    return CompositeState(clock.grid(), std::move(amps));
}

double CompositeState::norm() const { return std::sqrt(grid_.spacing() * amps_.squaredNorm()); }

double l2_distance(const CompositeState& a, const CompositeState& b) {
    if (!(a.grid() == b.grid()) || a.system_dim() != b.system_dim()) {
        throw ValidationError("l2_distance: incompatible states");
    }
    return std::sqrt(a.grid().spacing() * (a.amplitudes() - b.amplitudes()).squaredNorm());
}

ClockWaveFunction free_clock_evolve(const ClockWaveFunction& phi, double t) {
    const Grid& grid = phi.grid();
    const int n = grid.size();
    if (t == 0.0) return phi;

    const double shift = t / grid.spacing();
    const double rounded = std::round(shift);
    if (std::abs(shift - rounded) <= 1e-9 * std::max(1.0, std::abs(shift))) {
        const long m = static_cast<long>(rounded) % n;
        CVector out(n);
        for (int j = 0; j < n; ++j) out((j + m + n) % n) = phi[j];
        return ClockWaveFunction(grid, std::move(out));
    }

    CVector out = phi.amplitudes();
    Fft fft(n);
    std::span<cplx> data(out.data(), static_cast<size_t>(n));
    fft.forward(data);
    for (int j = 0; j < n; ++j) out(j) *= std::polar(1.0, -grid.wavenumber(j) * t);
    fft.inverse(data);
    return ClockWaveFunction(grid, std::move(out));
}

DensityMatrix free_system_evolve(const DensityMatrix& rho, const HermitianOperator& h_s, double t,
                                 double hbar) {
    if (rho.dim() != h_s.dim()) throw ValidationError("free_system_evolve: dimension mismatch");
    if (t == 0.0) return rho;
    const CMatrix u = unitary_from(eigh(h_s.matrix()), t / hbar);
    return DensityMatrix(u * rho.matrix() * u.adjoint());
}

PureState free_system_evolve(const PureState& psi, const HermitianOperator& h_s, double t, double hbar) {
    if (psi.dim() != h_s.dim()) throw ValidationError("free_system_evolve: dimension mismatch");
    if (t == 0.0) return psi;
    const CMatrix u = unitary_from(eigh(h_s.matrix()), t / hbar);
    CVector v = u * psi.amplitudes();
    v.normalize();
    return PureState(v);
}

StrangPropagator::StrangPropagator(const ModelConfig& config)
    : config_(config),
      b_eigen_(eigh(config.coupling_operator.matrix())),
      has_h_s_(config.system_hamiltonian.matrix().cwiseAbs().maxCoeff() != 0.0),
      fft_(config.grid.size()) {
    config_.validate();
    g_ = build_interaction(config_).profile.values;
    for (int j = 0; j < g_.size(); ++j) {
        if (g_(j) != 0.0) coupled_.push_back(j);
    }
    h_s_eigenbasis_ = b_eigen_.vectors.adjoint() * config_.system_hamiltonian.matrix() * b_eigen_.vectors;
}

void StrangPropagator::to_eigenbasis(CMatrix& amps) const { amps = amps * b_eigen_.vectors.conjugate(); }

void StrangPropagator::from_eigenbasis(CMatrix& amps) const { amps = amps * b_eigen_.vectors.transpose(); }

void StrangPropagator::apply_coupling(CMatrix& amps, double tau) const {
    const double scale = tau / config_.hbar;
    for (Eigen::Index b = 0; b < amps.cols(); ++b) {
        const double beta = b_eigen_.values(b);
        if (beta == 0.0) continue;
        for (int j : coupled_) amps(j, b) *= std::polar(1.0, -scale * g_(j) * beta);
    }
}

StrangPropagator::FreeFactors StrangPropagator::free_factors(double tau) const {
    const Grid& grid = config_.grid;
    FreeFactors f;
    f.kinetic.resize(grid.size());
    for (int j = 0; j < grid.size(); ++j) f.kinetic(j) = std::polar(1.0, -grid.wavenumber(j) * tau);
    if (has_h_s_) f.system = unitary_from(eigh(h_s_eigenbasis_), tau / config_.hbar).transpose();
    return f;
}

void StrangPropagator::apply_free(CMatrix& amps, const FreeFactors& f) const {
    for (Eigen::Index c = 0; c < amps.cols(); ++c) {
        auto col = column_span(amps, c);
        fft_.forward(col);
        amps.col(c).array() *= f.kinetic.array();
        fft_.inverse(col);
    }
    if (has_h_s_) amps = amps * f.system;
}

void StrangPropagator::advance(CompositeState& state, double duration, double dt) const {
    if (!(dt > 0.0)) throw ValidationError("strang: dt must be positive");
    if (duration < 0.0) throw ValidationError("strang: negative duration");
    if (!(state.grid() == config_.grid) || state.system_dim() != config_.system_dim()) {
        throw ValidationError("strang: state does not match the model");
    }
    const auto [steps, rest] = split_duration(duration, dt);
    if (steps == 0 && rest == 0.0) return;

    CMatrix& amps = state.mutable_amplitudes();
    to_eigenbasis(amps);
    if (steps > 0) {
        const FreeFactors f = free_factors(dt);
        // Consecutive coupling half-steps are merged into full steps.
        apply_coupling(amps, 0.5 * dt);
        for (long s = 0; s < steps; ++s) {
            apply_free(amps, f);
            apply_coupling(amps, s + 1 < steps ? dt : 0.5 * dt);
        }
    }
    if (rest > 0.0) {
        apply_coupling(amps, 0.5 * rest);
        apply_free(amps, free_factors(rest));
        apply_coupling(amps, 0.5 * rest);
    }
    from_eigenbasis(amps);
}

EvolutionResult strang_evolve(const CompositeState& initial, const ModelConfig& config, double t, double dt) {
    if (t < 0.0) throw ValidationError("strang_evolve: t must be nonnegative");
    if (!(dt > 0.0)) throw ValidationError("strang_evolve: dt must be positive");
    if (t == 0.0) return {initial, 0.0, dt, 0.0};
    if (dt > t) throw ValidationError("strang_evolve: dt exceeds t");
    validate_no_wrap(config, t);

    const StrangPropagator prop(config);
    CompositeState coarse = initial;
    prop.advance(coarse, t, dt);
    CompositeState fine = initial;
    prop.advance(fine, t, 0.5 * dt);
    const double err = l2_distance(coarse, fine);
    return {std::move(coarse), t, dt, err};
}

CMatrix dense_momentum_matrix(const Grid& grid, double hbar) {
    const int n = grid.size();
    // P depends only on (j - l) mod n
    CVector kernel(n);
    for (int r = 0; r < n; ++r) {
        cplx acc = 0.0;
        for (int m = 0; m < n; ++m) {
            const int signed_m = m < n / 2 ? m : m - n;
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(signed_m) * r / n;
            acc += grid.wavenumber(m) * std::polar(1.0, angle);
        }
        kernel(r) = hbar * acc / static_cast<double>(n);
    }
    CMatrix p(n, n);
    for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n; ++l) p(j, l) = kernel(((j - l) % n + n) % n);
    }
    return p;
}

CompositeState dense_oracle_evolve(const CompositeState& initial, const ModelConfig& config, double t) {
    config.validate();
    const Grid& grid = config.grid;
    const int n = grid.size();
    const int d = config.system_dim();
    const int dim = n * d;
    if (dim > kDenseOracleMaxDim) {
        throw ValidationError("dense oracle: n * d_s = " + std::to_string(dim) + " exceeds " +
                              std::to_string(kDenseOracleMaxDim));
    }
    if (!(initial.grid() == grid) || initial.system_dim() != d) {
        throw ValidationError("dense oracle: state does not match the model");
    }
    if (t == 0.0) return initial;

    const CMatrix p = dense_momentum_matrix(grid, config.hbar);
    const RVector g = build_interaction(config).profile.values;
    const CMatrix& hs = config.system_hamiltonian.matrix();
    const CMatrix& b = config.coupling_operator.matrix();

    // Composite index j * d + a.
    CMatrix h = CMatrix::Zero(dim, dim);
    for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n; ++l) {
            for (int a = 0; a < d; ++a) h(j * d + a, l * d + a) += p(j, l);
        }
        for (int a = 0; a < d; ++a) {
            for (int c = 0; c < d; ++c) h(j * d + a, j * d + c) += hs(a, c) + g(j) * b(a, c);
        }
    }
    const HermitianEigen e = eigh(h);

    CVector psi(dim);
    for (int j = 0; j < n; ++j) {
        for (int a = 0; a < d; ++a) psi(j * d + a) = initial.amplitudes()(j, a);
    }
    CVector coeff = e.vectors.adjoint() * psi;
    for (int i = 0; i < dim; ++i) coeff(i) *= std::polar(1.0, -e.values(i) * t / config.hbar);
    psi = e.vectors * coeff;

    CMatrix out(n, d);
    for (int j = 0; j < n; ++j) {
        for (int a = 0; a < d; ++a) out(j, a) = psi(j * d + a);
    }
    return CompositeState(grid, std::move(out));
}

double autocorrelation(const ClockWaveFunction& phi0, double t) {
    return std::abs(free_clock_evolve(phi0, t).inner(phi0));
}

ReducedStates reduced_states(const CompositeState& state) {
    const double h = state.grid().spacing();
    const CMatrix& amps = state.amplitudes();
    CMatrix rho = h * (amps.transpose() * amps.conjugate());
    CMatrix gram = h * (amps.adjoint() * amps);
    // Strang round-off moves the norm at the 1e-13 level; reduced states are
    // reported with unit trace.
    const double tr = rho.trace().real();
    rho /= tr;
    gram /= tr;

    const RVector spectrum = eigh(gram).values;
    double entropy = 0.0;
    for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
        if (spectrum(i) > 1e-14) entropy -= spectrum(i) * std::log(spectrum(i));
    }
    std::optional<CMatrix> dense;
    if (state.grid().size() <= kDenseOracleMaxDim) dense = (h / tr) * (amps * amps.adjoint());
    return ReducedStates{DensityMatrix(std::move(rho)), spectrum, gram.squaredNorm(), entropy,
                         std::move(dense)};
}

double interaction_norm(const CompositeState& state, const Interaction& v) {
    if (!(state.grid() == v.profile.grid) || state.system_dim() != v.coupling_operator.dim()) {
        throw ValidationError("interaction_norm: incompatible state");
    }
    const CMatrix& amps = state.amplitudes();
    const CMatrix bt = v.coupling_operator.matrix().transpose();
    double acc = 0.0;
    for (int j = 0; j < amps.rows(); ++j) {
        const double gj = v.profile.values(j);
        if (gj == 0.0) continue;
        acc += gj * gj * (amps.row(j) * bt).squaredNorm();
    }
    return std::sqrt(state.grid().spacing() * acc);
}

}  // namespace qclock
