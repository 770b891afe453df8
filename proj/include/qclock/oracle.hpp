#pragma once

// Closed-form solution of the momentum clock coupled through g(x) (x) B with
// H_s = 0 and diagonal B.  On a branch where B has eigenvalue s, the clock
// picks up the position-dependent phase e^{i c s G(x)/hbar} with
// G(x) = int_0^x g, and c = +1 or -1 depending on the sign convention.

#include "qclock/model.hpp"
#include "qclock/statelib.hpp"

namespace qclock {

/// Sign c in e^{i c s G(x)/hbar}.  Schroedinger evolution under +g B gives
/// c = -1; the opposite assignment is kept for comparison.
enum class BranchSign : int { Schroedinger = -1, Flipped = +1 };

inline constexpr BranchSign kBranchSign = BranchSign::Schroedinger;

std::string_view to_string(BranchSign sign);

/// Cumulative integral G(x_j) = int_0^{x_j} g of the band-limited interpolant
/// of the profile.  Exactly 0 for x <= 0 and exactly profile.integral for x >= Delta.
RVector cumulative_coupling(const CouplingProfile& profile);

/// phi_free(x) e^{i c s G(x)/hbar}.
ClockWaveFunction analytic_branch_state(const ClockWaveFunction& phi_free, const RVector& cumulative,
                                        double branch_eigenvalue, double hbar,
                                        BranchSign sign = kBranchSign);

/// (phi^1, phi^0) for B = sigma_z: h sum e^{2 i c G/hbar} |phi_free|^2.
cplx overlap_kernel(const ClockWaveFunction& phi_free, const RVector& cumulative, double hbar,
                    BranchSign sign = kBranchSign);

/// [[|c0|^2, c0 c1* w], [c0* c1 w*, |c1|^2]].
DensityMatrix analytic_reduced_state(cplx c0, cplx c1, cplx overlap);

/// Decides the branch sign by comparing the analytic reduced state with the
/// dense brute-force propagator on a small reference problem.
BranchSign resolve_branch_sign();

}  // namespace qclock
