#pragma once

// Time-energy inequalities for the controlled system, evaluated on simulated
// states.  Every check reports a margin (satisfied side minus required side);
// a check passes when margin >= -tolerance.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qclock/model.hpp"
#include "qclock/propagator.hpp"
#include "qclock/statelib.hpp"

namespace qclock {

/// pi hbar / (2 Delta H_c); infinite when the spread vanishes.
double speed_limit_window(double energy_spread, double hbar);

/// 0 <= t <= pi hbar / (2 Delta H_c).
bool in_speed_limit_window(double t, double energy_spread, double hbar);

// Each check returns nullopt outside the applicability window.

/// F - cos(Delta H_c t / hbar).
std::optional<double> fidelity_bound_check(double t, double energy_spread, double fidelity, double hbar);

/// t Delta H_c - (pi hbar / 2)(1 - F).
std::optional<double> corollary_check(double t, double energy_spread, double fidelity, double hbar);

/// (1 - D/2) - cos^2(Delta H_c t / hbar).
std::optional<double> trace_bound_check(double t, double energy_spread, double trace_dist, double hbar);

/// (1 - D^2/4) - cos^2(Delta H_c t / hbar).
std::optional<double> weak_trace_bound_check(double t, double energy_spread, double trace_dist, double hbar);

/// <xi|rho_pert|xi> - cos^2(Delta H_c t / hbar) <xi|rho_free|xi>.
std::optional<double> vector_inequality_check(const PureState& xi, const DensityMatrix& rho_free,
                                              const DensityMatrix& rho_pert, double t, double energy_spread,
                                              double hbar);

/// Uniform random states: normalized standard-normal real and imaginary parts.
std::vector<PureState> random_pure_states(int dim, int count, std::uint64_t seed);

/// Minimum vector-inequality margin over the eigenvectors of rho_free - rho_pert
/// (a family containing one that sums to E+) and the supplied probe states.
std::optional<double> vector_inequality_family(const DensityMatrix& rho_free, const DensityMatrix& rho_pert,
                                               std::span<const PureState> probes, double t,
                                               double energy_spread, double hbar);

/// |(phi(t), phi(0))| - cos(Delta H_c t / hbar) for free clock evolution.
/// Every sample must lie in the applicability window.
std::vector<double> mandelstam_tamm_check(const ClockWaveFunction& phi0, double energy_spread,
                                          std::span<const double> t_samples, double hbar);

struct SupportReport {
    double t;
    int rank_free;
    int rank_perturbed;
    double inclusion_defect; // ||(1 - P_pert) P_free||
    bool pass;               // defect <= sqrt(eps)
};

SupportReport support_inclusion_check(double t, const DensityMatrix& rho_free, const DensityMatrix& rho_pert,
                                      double eps = 1e-8);

struct CheckOutcome {
    double margin;
    bool pass;
};

struct BoundReport {
    double t;
    double fidelity;
    double trace_dist;
    double energy_spread;
    double bound_fidelity; // cos(Delta H_c t / hbar)
    double bound_trace;    // 1 - cos^2, the cap on D/2
    double tolerance;      // fixed slack plus propagation error
    bool applicable;
    CheckOutcome fidelity_check;
    CheckOutcome corollary;
    CheckOutcome trace_check;
    CheckOutcome weak_trace_check;
    CheckOutcome vector_check;
    bool fuchs_van_de_graaf;
};

struct BoundInputs {
    double t;
    double energy_spread;
    double hbar;
    double tolerance;
    std::span<const PureState> probes;
};

/// Evaluates every system-level inequality at one time sample.  Margins are
/// always computed; `applicable` says whether they count toward a verdict.
BoundReport evaluate_bounds(const DensityMatrix& rho_free, const DensityMatrix& rho_pert, const BoundInputs& in);

/// First sampled t with F <= threshold, or nullopt if never reached.
std::optional<double> minimal_full_deviation_time(std::span<const BoundReport> series, double threshold = 1e-3);

struct BackActionReport {
    double clock_purity;
    double clock_fidelity_to_free; // sqrt(<phi_free| rho_clock |phi_free>)
};

BackActionReport back_action_report(const CompositeState& state, const ClockWaveFunction& phi_free);

/// Keeps the d_trunc momentum modes with signed index in [-d_trunc/2, d_trunc/2)
/// and renormalizes.  d_trunc >= n returns the packet untouched.
ClockWaveFunction truncate_momentum(const ClockWaveFunction& phi, int d_trunc);

/// max over t <= 0 of ||V(phi_trunc(t) (x) Omega)|| for the worst-case Omega.
double truncated_clock_residual(int d_trunc, const ModelConfig& config, std::span<const double> t_samples);

}  // namespace qclock
