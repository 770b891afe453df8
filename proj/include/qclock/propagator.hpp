#pragma once

// Time evolution of the clock, the system and the composite pure state under
// H = p (x) 1 + 1 (x) H_s + g(x) (x) B.

#include <optional>

#include "qclock/model.hpp"
#include "qclock/spectral.hpp"
#include "qclock/statelib.hpp"

namespace qclock {

/// Joint pure state stored as an (n x d_s) matrix: column a is the clock
/// vector conditional on system basis state a.  Normalized h sum |.|^2 = 1.
class CompositeState {
public:
    CompositeState(Grid grid, CMatrix amplitudes);

    static CompositeState product(const ClockWaveFunction& clock, const PureState& system);

    const Grid& grid() const { return grid_; }
    int system_dim() const { return static_cast<int>(amps_.cols()); }
    const CMatrix& amplitudes() const { return amps_; }
    CMatrix& mutable_amplitudes() { return amps_; }
    double norm() const;

private:
    Grid grid_;
    CMatrix amps_;
};

/// sqrt(h sum |a - b|^2).
double l2_distance(const CompositeState& a, const CompositeState& b);

struct EvolutionResult {
    CompositeState state;
    double t;
    double dt_used;
    double step_halving_error; // L2 distance between the dt and dt/2 runs
};

/// Exact translation phi(x) -> phi(x - t).  Shifts that are integer multiples
/// of h are applied as a cyclic index roll; all others through the Fourier
/// shift theorem.  Callers are responsible for wrap validation.
ClockWaveFunction free_clock_evolve(const ClockWaveFunction& phi, double t);

/// e^{-i H_s t/hbar} rho e^{i H_s t/hbar}.
DensityMatrix free_system_evolve(const DensityMatrix& rho, const HermitianOperator& h_s, double t,
                                 double hbar);
PureState free_system_evolve(const PureState& psi, const HermitianOperator& h_s, double t, double hbar);

/// Strang splitting e^{-iV dt/2} (e^{-ip dt} (x) e^{-iH_s dt}) e^{-iV dt/2},
/// with V applied in the eigenbasis of B so that every factor is exact.
class StrangPropagator {
public:
    explicit StrangPropagator(const ModelConfig& config);

    /// Advances `state` by `duration` using floor(duration/dt) full steps
    /// plus one partial step for any remainder.
    void advance(CompositeState& state, double duration, double dt) const;

    const ModelConfig& config() const { return config_; }

private:
    void to_eigenbasis(CMatrix& amps) const;
    void from_eigenbasis(CMatrix& amps) const;
    void apply_coupling(CMatrix& amps, double tau) const;
    struct FreeFactors {
        CVector kinetic;
        CMatrix system; // transposed e^{-i H_s tau/hbar} in the B eigenbasis
    };
    FreeFactors free_factors(double tau) const;
    void apply_free(CMatrix& amps, const FreeFactors& f) const;

    ModelConfig config_;
    RVector g_;
    std::vector<int> coupled_; // grid indices with g != 0
    HermitianEigen b_eigen_;
    CMatrix h_s_eigenbasis_;
    bool has_h_s_;
    Fft fft_;
};

/// Single Strang trajectory from t = 0 plus a dt/2 rerun for the error estimate.
EvolutionResult strang_evolve(const CompositeState& initial, const ModelConfig& config, double t,
                              double dt);

inline constexpr int kDenseOracleMaxDim = 512;

/// Dense spectral momentum matrix P_{jl} = (hbar/n) sum_m k_m e^{i k_m (x_j - x_l)}.
CMatrix dense_momentum_matrix(const Grid& grid, double hbar);

/// Brute-force propagator: full Hamiltonian matrix and its eigendecomposition.
CompositeState dense_oracle_evolve(const CompositeState& initial, const ModelConfig& config, double t);

/// |(phi(t), phi(0))| under free clock evolution.
double autocorrelation(const ClockWaveFunction& phi0, double t);

struct ReducedStates {
    DensityMatrix system;
    RVector clock_spectrum; // nonzero spectrum of the clock state (Gram eigenvalues)
    double clock_purity;
    double clock_entropy;
    std::optional<CMatrix> clock_dense; // only for n <= kDenseOracleMaxDim
};

ReducedStates reduced_states(const CompositeState& state);

/// ||V Theta|| for V = g (x) B.
double interaction_norm(const CompositeState& state, const Interaction& v);

}  // namespace qclock
