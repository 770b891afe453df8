#include "qclock/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace qclock {

namespace {

double clock_angle(double t, double energy_spread, double hbar) { return energy_spread * t / hbar; }

double cos_squared(double t, double energy_spread, double hbar) {
    const double c = std::cos(clock_angle(t, energy_spread, hbar));
    return c * c;
}

CheckOutcome outcome(double margin, double tol) { return {margin, margin >= -tol}; }

}  // namespace

double speed_limit_window(double energy_spread, double hbar) {
    if (energy_spread <= 0.0) return std::numeric_limits<double>::infinity();
    return std::numbers::pi * hbar / (2.0 * energy_spread);
}

bool in_speed_limit_window(double t, double energy_spread, double hbar) {
    return t >= 0.0 && t <= speed_limit_window(energy_spread, hbar);
}

std::optional<double> fidelity_bound_check(double t, double energy_spread, double fidelity, double hbar) {
    if (!in_speed_limit_window(t, energy_spread, hbar)) return std::nullopt;
    return fidelity - std::cos(clock_angle(t, energy_spread, hbar));
}

std::optional<double> corollary_check(double t, double energy_spread, double fidelity, double hbar) {
    if (!in_speed_limit_window(t, energy_spread, hbar)) return std::nullopt;
    return t * energy_spread - 0.5 * std::numbers::pi * hbar * (1.0 - fidelity);
}

std::optional<double> trace_bound_check(double t, double energy_spread, double trace_dist, double hbar) {
    if (!in_speed_limit_window(t, energy_spread, hbar)) return std::nullopt;
    return (1.0 - 0.5 * trace_dist) - cos_squared(t, energy_spread, hbar);
}

std::optional<double> weak_trace_bound_check(double t, double energy_spread, double trace_dist, double hbar) {
    if (!in_speed_limit_window(t, energy_spread, hbar)) return std::nullopt;
    return (1.0 - 0.25 * trace_dist * trace_dist) - cos_squared(t, energy_spread, hbar);
}

std::optional<double> vector_inequality_check(const PureState& xi, const DensityMatrix& rho_free,
                                              const DensityMatrix& rho_pert, double t, double energy_spread,
                                              double hbar) {
    if (!in_speed_limit_window(t, energy_spread, hbar)) return std::nullopt;
    return expectation(rho_pert, xi) - cos_squared(t, energy_spread, hbar) * expectation(rho_free, xi);
}

std::vector<PureState> random_pure_states(int dim, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<PureState> out;
    out.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        CVector v(dim);
        for (int a = 0; a < dim; ++a) {
            const double re = normal(rng);
            const double im = normal(rng);
            v(a) = cplx(re, im);
        }
        v.normalize();
        out.emplace_back(std::move(v));
    }
    return out;
}

std::optional<double> vector_inequality_family(const DensityMatrix& rho_free, const DensityMatrix& rho_pert,
                                               std::span<const PureState> probes, double t,
                                               double energy_spread, double hbar) {
    if (!in_speed_limit_window(t, energy_spread, hbar)) return std::nullopt;
    const HermitianEigen e = eigh(rho_free.matrix() - rho_pert.matrix());
    double worst = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < e.vectors.cols(); ++i) {
        CVector v = e.vectors.col(i);
        v.normalize();
        worst = std::min(worst, *vector_inequality_check(PureState(v), rho_free, rho_pert, t, energy_spread, hbar));
    }
    for (const PureState& xi : probes) {
        worst = std::min(worst, *vector_inequality_check(xi, rho_free, rho_pert, t, energy_spread, hbar));
    }
    return worst;
}

std::vector<double> mandelstam_tamm_check(const ClockWaveFunction& phi0, double energy_spread,
                                          std::span<const double> t_samples, double hbar) {
    std::vector<double> margins;
    margins.reserve(t_samples.size());
    for (double t : t_samples) {
        if (!in_speed_limit_window(t, energy_spread, hbar)) {
            throw ValidationError("mandelstam_tamm_check: t = " + std::to_string(t) +
                                  " lies outside the applicability window");
        }
        margins.push_back(autocorrelation(phi0, t) - std::cos(clock_angle(t, energy_spread, hbar)));
    }
    return margins;
}

SupportReport support_inclusion_check(double t, const DensityMatrix& rho_free, const DensityMatrix& rho_pert,
                                      double eps) {
    const CMatrix p_free = support_projector(rho_free, eps).matrix();
    const CMatrix p_pert = support_projector(rho_pert, eps).matrix();
    const int d = rho_free.dim();
    const double defect = operator_norm((CMatrix::Identity(d, d) - p_pert) * p_free);
    const int rank_free = static_cast<int>(std::lround(p_free.trace().real()));
    const int rank_pert = static_cast<int>(std::lround(p_pert.trace().real()));
    return {t, rank_free, rank_pert, defect, defect <= std::sqrt(eps)};
}

BoundReport evaluate_bounds(const DensityMatrix& rho_free, const DensityMatrix& rho_pert, const BoundInputs& in) {
    BoundReport r{};
    r.t = in.t;
    r.fidelity = fidelity(rho_pert, rho_free);
    r.trace_dist = trace_distance(rho_pert, rho_free);
    r.energy_spread = in.energy_spread;
    r.bound_fidelity = std::cos(clock_angle(in.t, in.energy_spread, in.hbar));
    const double c2 = r.bound_fidelity * r.bound_fidelity;
    r.bound_trace = 1.0 - c2;
    r.tolerance = in.tolerance;
    r.applicable = in_speed_limit_window(in.t, in.energy_spread, in.hbar);

    // Margins use the same algebra inside and outside the window.
    r.fidelity_check = outcome(r.fidelity - r.bound_fidelity, in.tolerance);
    r.corollary = outcome(in.t * in.energy_spread - 0.5 * std::numbers::pi * in.hbar * (1.0 - r.fidelity),
                          in.tolerance);
    r.trace_check = outcome((1.0 - 0.5 * r.trace_dist) - c2, in.tolerance);
    r.weak_trace_check = outcome((1.0 - 0.25 * r.trace_dist * r.trace_dist) - c2, in.tolerance);

    const HermitianEigen e = eigh(rho_free.matrix() - rho_pert.matrix());
    double worst = std::numeric_limits<double>::infinity();
    auto probe = [&](const CVector& v) {
        const double lhs = (v.adjoint() * rho_pert.matrix() * v)(0, 0).real();
        const double rhs = c2 * (v.adjoint() * rho_free.matrix() * v)(0, 0).real();
        worst = std::min(worst, lhs - rhs);
    };
    for (Eigen::Index i = 0; i < e.vectors.cols(); ++i) probe(e.vectors.col(i));
    for (const PureState& xi : in.probes) probe(xi.amplitudes());
    r.vector_check = outcome(worst, in.tolerance);

    r.fuchs_van_de_graaf = r.trace_dist <= 2.0 * std::sqrt(std::max(0.0, 1.0 - r.fidelity * r.fidelity)) + 1e-9;
    return r;
}

std::optional<double> minimal_full_deviation_time(std::span<const BoundReport> series, double threshold) {
    for (size_t i = 1; i < series.size(); ++i) {
        if (series[i].t < series[i - 1].t) {
            throw ValidationError("minimal_full_deviation_time: samples are not monotone in t");
        }
    }
    for (const BoundReport& r : series) {
        if (r.fidelity <= threshold) return r.t;
    }
    return std::nullopt;
}

BackActionReport back_action_report(const CompositeState& state, const ClockWaveFunction& phi_free) {
    if (!(state.grid() == phi_free.grid())) throw ValidationError("back_action_report: grid mismatch");
    const ReducedStates reduced = reduced_states(state);
    double overlap = 0.0;
    for (int a = 0; a < state.system_dim(); ++a) {
        overlap += std::norm(grid_inner(state.grid(), phi_free.amplitudes(), state.amplitudes().col(a)));
    }
    return {reduced.clock_purity, std::sqrt(std::min(1.0, overlap))};
}

ClockWaveFunction truncate_momentum(const ClockWaveFunction& phi, int d_trunc) {
    const Grid& grid = phi.grid();
    const int n = grid.size();
    if (d_trunc < 1) throw ValidationError("truncate_momentum: d_trunc must be positive");
    if (d_trunc >= n) return phi;

    std::vector<cplx> spec(phi.amplitudes().data(), phi.amplitudes().data() + n);
    Fft fft(n);
    fft.forward(spec);
    const int lo = -d_trunc / 2;
    const int hi = d_trunc - d_trunc / 2; // exclusive
    for (int m = 0; m < n; ++m) {
        const int signed_m = m < n / 2 ? m : m - n;
        if (signed_m < lo || signed_m >= hi) spec[m] = 0.0;
    }
    fft.inverse(spec);
    CVector out = Eigen::Map<CVector>(spec.data(), n);
    out /= std::sqrt(grid.spacing() * out.squaredNorm());
    return ClockWaveFunction(grid, std::move(out));
}

double truncated_clock_residual(int d_trunc, const ModelConfig& config, std::span<const double> t_samples) {
    config.validate();
    const ClockWaveFunction phi = truncate_momentum(initial_packet(config), d_trunc);
    const Interaction v = build_interaction(config);

    // Worst-case Omega: eigenvector of B with the largest |eigenvalue|.
    const HermitianEigen be = eigh(config.coupling_operator.matrix());
    Eigen::Index top = 0;
    be.values.cwiseAbs().maxCoeff(&top);
    CVector omega = be.vectors.col(top);
    omega.normalize();
    const PureState worst_omega(omega);

    double worst = 0.0;
    for (double t : t_samples) {
        if (t > 0.0) throw ValidationError("truncated_clock_residual: samples must satisfy t <= 0");
        worst = std::max(worst, condition1_residual(free_clock_evolve(phi, t), worst_omega, v));
    }
    return worst;
}

}  // namespace qclock
