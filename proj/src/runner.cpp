#include "qclock/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>

namespace qclock {

namespace {

constexpr double kUnitarityTol = 1e-9;
constexpr double kPurePurity = 1e-12;       // rho_free counts as pure above 1 - this
constexpr double kMixedPurityGap = 1e-8;    // perturbed purity must fall below 1 - this
constexpr double kDeviationFloor = 1e-6;    // F below 1 - this counts as deviating
constexpr double kBackActionTol = 1e-6;
constexpr double kMidTransitPurityGap = 1e-3;
constexpr double kProductFormTol = 1e-10;

// Running worst margin for one check.
class CheckAccumulator {
public:
    CheckAccumulator(std::string name, double tol) : name_(std::move(name)), tol_(tol) {}

    CheckAccumulator& required(bool r) { required_ = r; return *this; }
    CheckAccumulator& strict(bool s) { strict_ = s; return *this; }
    CheckAccumulator& informational(bool i) { informational_ = i; return *this; }

    void add(double t, double margin) {
        ++count_;
        if (!(margin >= worst_)) {
            worst_ = margin;
            worst_t_ = t;
        }
    }

    CheckSummary finish() const {
        CheckSummary s{name_, worst_, worst_t_, tol_, count_, true, required_, strict_, informational_};
        if (count_ == 0) {
            s.worst_margin = std::numeric_limits<double>::quiet_NaN();
            s.worst_t = std::numeric_limits<double>::quiet_NaN();
        } else {
            s.passed = strict_ ? worst_ > 0.0 : worst_ >= -tol_;
        }
        return s;
    }

private:
    std::string name_;
    double tol_;
    bool required_ = true;
    bool strict_ = false;
    bool informational_ = false;
    double worst_ = std::numeric_limits<double>::infinity();
    double worst_t_ = std::numeric_limits<double>::quiet_NaN();
    int count_ = 0;
};

bool is_zero(const HermitianOperator& op) { return op.matrix().cwiseAbs().maxCoeff() == 0.0; }

bool closed_form_applies(const ModelConfig& m) {
    return m.system_dim() == 2 && is_zero(m.system_hamiltonian) &&
           max_abs_diff(m.coupling_operator.matrix(), HermitianOperator::pauli_z().matrix()) == 0.0;
}

// Per-sample state that the bound evaluation needs once the run-wide
// propagation error is known.
struct Sample {
    double t;
    DensityMatrix rho_free;
    DensityMatrix rho_pert;
};

// Pure system state reached from c0|0> + c1|1> under sigma_z dephasing
// with cumulative phase 2 * integral / hbar.
CVector predicted_gate_output(const CVector& c, double integral, double hbar, BranchSign sign) {
    CVector out = c;
    out(1) *= std::polar(1.0, -2.0 * static_cast<int>(sign) * integral / hbar);
    return out;
}

double pure_fidelity(const DensityMatrix& rho, const CVector& psi) {
    return std::sqrt(std::max(0.0, (psi.adjoint() * rho.matrix() * psi)(0, 0).real()));
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

const std::vector<std::string>& time_series_columns() {
    static const std::vector<std::string> cols = {
        "t",           "fidelity",          "trace_dist",        "purity_system",         "purity_clock",
        "clock_fidelity_to_free", "autocorrelation", "margin_fidelity", "margin_corollary", "margin_trace",
        "margin_weak_trace", "margin_vector", "margin_mandelstam_tamm", "margin_support", "applicable"};
    return cols;
}

Trajectory run_trajectory(const ExperimentConfig& config, std::span<const double> times, double integral,
                          const std::string& label, BranchSign sign) {
    if (times.empty()) throw ValidationError("run_trajectory: no sample times");
    ModelConfig model = config.model;
    model.coupling_integral = integral;
    model.validate();
    validate_no_wrap(model, times.back(), std::min(0.0, times.front()));

    const double hbar = model.hbar;
    const ClockWaveFunction phi0 = initial_packet(model);
    const double spread = clock_energy_stats(phi0, hbar).spread;
    const PureState omega0 = config.initial_pure_state();
    const DensityMatrix rho0 = density_from_pure(omega0);
    const auto probes = random_pure_states(model.system_dim(), config.random_states, config.seed);

    const bool oracle_on = closed_form_applies(model);
    RVector cumulative;
    if (oracle_on) cumulative = cumulative_coupling(build_interaction(model).profile);

    // Start from the free product state at the first sample; the clock is
    // still left of the coupling region when t <= 0.
    const double t0 = std::min(0.0, times.front());
    const CompositeState start = CompositeState::product(
        free_clock_evolve(phi0, t0), free_system_evolve(omega0, model.system_hamiltonian, t0, hbar));
    CompositeState coarse = start;
    CompositeState fine = start;
    const StrangPropagator prop(model);

    Trajectory traj;
    traj.label = label;
    traj.coupling_integral = integral;
    traj.records.reserve(times.size());

    std::vector<Sample> samples;
    samples.reserve(times.size());
    double prev = t0;
    double oracle_dev = 0.0;
    for (double t : times) {
        if (t < prev) throw ValidationError("run_trajectory: sample times must be monotone");
        prop.advance(coarse, t - prev, config.dt);
        prop.advance(fine, t - prev, 0.5 * config.dt);
        prev = t;
        traj.propagation_error = std::max(traj.propagation_error, l2_distance(coarse, fine));
        traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(coarse.norm() - 1.0));

        const ReducedStates reduced = reduced_states(coarse);
        const DensityMatrix rho_free = free_system_evolve(rho0, model.system_hamiltonian, t, hbar);
        const ClockWaveFunction phi_free = free_clock_evolve(phi0, t);
        const BackActionReport back = back_action_report(coarse, phi_free);
        const double ac = std::abs(phi_free.inner(phi0));

        TimeSeriesRecord rec{};
        rec.t = t;
        rec.purity_system = purity(reduced.system);
        rec.purity_clock = back.clock_purity;
        rec.clock_fidelity_to_free = back.clock_fidelity_to_free;
        rec.autocorrelation = ac;
        rec.margin_mandelstam_tamm = ac - std::cos(spread * t / hbar);
        traj.records.push_back(rec);

        if (oracle_on) {
            const CVector& c = omega0.amplitudes();
            const DensityMatrix analytic =
                analytic_reduced_state(c(0), c(1), overlap_kernel(phi_free, cumulative, hbar, sign));
            oracle_dev = std::max(oracle_dev, max_abs_diff(analytic.matrix(), reduced.system.matrix()));
        }
        samples.push_back({t, rho_free, reduced.system});
    }
    if (oracle_on) traj.oracle_deviation = oracle_dev;
    traj.final_system = samples.back().rho_pert;

    const double tol = config.tolerances.bound + traj.propagation_error;
    for (size_t i = 0; i < samples.size(); ++i) {
        const Sample& s = samples[i];
        const BoundReport rep = evaluate_bounds(s.rho_free, s.rho_pert, {s.t, spread, hbar, tol, probes});
        const SupportReport sup = support_inclusion_check(s.t, s.rho_free, s.rho_pert, config.tolerances.support_eps);
        TimeSeriesRecord& rec = traj.records[i];
        rec.fidelity = rep.fidelity;
        rec.trace_dist = rep.trace_dist;
        rec.margin_fidelity = rep.fidelity_check.margin;
        rec.margin_corollary = rep.corollary.margin;
        rec.margin_trace = rep.trace_check.margin;
        rec.margin_weak_trace = rep.weak_trace_check.margin;
        rec.margin_vector = rep.vector_check.margin;
        rec.margin_support = std::sqrt(config.tolerances.support_eps) - sup.inclusion_defect;
        rec.applicable = rep.applicable;
        traj.reports.push_back(rep);
        traj.supports.push_back(sup);
    }
    return traj;
}

namespace {

void add_common_checks(const ExperimentConfig& config, const std::vector<Trajectory>& trajs,
                       std::vector<CheckSummary>& out) {
    const double tol_bound = config.tolerances.bound;
    double prop_err = 0.0;
    for (const Trajectory& tr : trajs) prop_err = std::max(prop_err, tr.propagation_error);
    const double tol = tol_bound + prop_err;

    CheckAccumulator fid("fidelity_bound", tol), cor("corollary", tol), tr_("trace_bound", tol),
        weak("weak_trace_bound", tol), vec("vector_inequality", tol),
        dom("trace_dominance", 1e-12), fvdg("fuchs_van_de_graaf", 0.0),
        mt("mandelstam_tamm", config.tolerances.mandelstam_tamm), sup("support_inclusion", 0.0),
        mixed("pure_to_mixed", 0.0), unit("unitarity", kUnitarityTol);
    mixed.required(false);

    for (const Trajectory& traj : trajs) {
        for (size_t i = 0; i < traj.records.size(); ++i) {
            const TimeSeriesRecord& r = traj.records[i];
            const BoundReport& b = traj.reports[i];
            fvdg.add(r.t, 2.0 * std::sqrt(std::max(0.0, 1.0 - r.fidelity * r.fidelity)) + 1e-9 - r.trace_dist);
            if (!r.applicable) continue;
            fid.add(r.t, r.margin_fidelity);
            cor.add(r.t, r.margin_corollary);
            tr_.add(r.t, r.margin_trace);
            weak.add(r.t, r.margin_weak_trace);
            vec.add(r.t, r.margin_vector);
            dom.add(r.t, r.margin_weak_trace - r.margin_trace);
            mt.add(r.t, r.margin_mandelstam_tamm);
            sup.add(r.t, r.margin_support);
            const double free_purity =
                purity(free_system_evolve(density_from_pure(config.initial_pure_state()),
                                          config.model.system_hamiltonian, r.t, config.model.hbar));
            if (b.fidelity < 1.0 - kDeviationFloor && free_purity > 1.0 - kPurePurity) {
                mixed.add(r.t, (1.0 - kMixedPurityGap) - r.purity_system);
            }
        }
        unit.add(traj.records.back().t, kUnitarityTol - traj.max_norm_drift);
    }
    mixed.strict(true);
    for (const CheckAccumulator* c : {&fid, &cor, &tr_, &weak, &vec, &dom, &fvdg, &mt, &sup, &mixed}) {
        out.push_back(c->finish());
    }
    CheckSummary u = unit.finish();
    u.tolerance = 0.0;
    u.passed = u.worst_margin >= 0.0;
    out.push_back(u);

    CheckAccumulator oracle("oracle_equivalence", 0.0);
    oracle.required(false);
    for (const Trajectory& traj : trajs) {
        if (traj.oracle_deviation) oracle.add(traj.records.back().t, config.tolerances.oracle - *traj.oracle_deviation);
    }
    out.push_back(oracle.finish());
}

void photon_box_checks(const ExperimentConfig& config, const Trajectory& traj, double spread,
                       std::span<const double> times, ScenarioResult& result) {
    const double hbar = config.model.hbar;
    const double spacing = times.size() > 1 ? (times.back() - times.front()) / double(times.size() - 1) : 0.0;
    CheckAccumulator pb("photon_box", 0.0);
    const auto t_star = minimal_full_deviation_time(traj.reports, config.tolerances.deviation_threshold);
    if (t_star) {
        pb.add(*t_star, *t_star * spread - (0.5 * std::numbers::pi * hbar - spacing * spread));
        result.notes.push_back("photon-box: first full deviation at t* = " + fmt(*t_star) +
                               ", t* dH_c = " + fmt(*t_star * spread) + ", pi hbar/2 = " +
                               fmt(0.5 * std::numbers::pi * hbar));
    } else {
        result.notes.push_back("photon-box: fidelity never fell to the deviation threshold");
    }
    result.checks.push_back(pb.finish());
}

void phase_gate_checks(const ExperimentConfig& config, const Trajectory& traj, BranchSign sign,
                       ScenarioResult& result) {
    const ModelConfig& m = config.model;
    const double exit_t = m.packet_width + m.coupling_width;
    CheckAccumulator late("back_action_late", 0.0), mid("back_action_mid_transit", 0.0);
    mid.strict(true);
    double min_purity = std::numeric_limits<double>::infinity();
    double min_t = 0.0;
    for (const TimeSeriesRecord& r : traj.records) {
        if (r.t >= exit_t) late.add(r.t, r.clock_fidelity_to_free - (1.0 - kBackActionTol));
        if (r.t > 0.0 && r.t < exit_t && r.purity_clock < min_purity) {
            min_purity = r.purity_clock;
            min_t = r.t;
        }
    }
    if (std::isfinite(min_purity)) mid.add(min_t, (1.0 - kMidTransitPurityGap) - min_purity);
    result.checks.push_back(late.finish());
    result.checks.push_back(mid.finish());

    if (!closed_form_applies(m) || traj.records.back().t < exit_t) return;
    const double hbar = m.hbar;
    const double integral = traj.coupling_integral;
    const CVector& c = config.initial_state;
    const double t_end = traj.records.back().t;

    // Relative branch phase accumulated by a full transit.
    CheckAccumulator gate("gate_relative_phase", 0.0);
    const CVector predicted = predicted_gate_output(c, integral, hbar, sign);
    gate.add(t_end, pure_fidelity(*traj.final_system, predicted) - (1.0 - kBackActionTol));
    result.checks.push_back(gate.finish());

    CVector flipped = c;
    flipped(1) = -flipped(1);
    CheckAccumulator flip("sigma_z_flip", 0.0);
    flip.informational(true);
    const double f_flip = pure_fidelity(*traj.final_system, flipped);
    flip.add(t_end, f_flip - (1.0 - kBackActionTol));
    result.checks.push_back(flip.finish());

    const double phase = 2.0 * integral / hbar;
    const double wrapped = std::remainder(phase, 2.0 * std::numbers::pi);
    result.notes.push_back(
        "phase-gate: relative branch phase 2*integral/hbar = " + fmt(phase) + " rad (" + fmt(wrapped) +
        " mod 2pi); fidelity of the final system state to c0|0> - c1|1> is " + fmt(f_flip) +
        ". The sigma_z flip needs integral = pi*hbar/2; integral = pi*hbar restores c0|0> + c1|1>.");
}

void condition1_checks(const ExperimentConfig& config, const Trajectory& traj, std::span<const double> times,
                       ScenarioResult& result) {
    const ModelConfig& m = config.model;
    const ClockWaveFunction phi0 = initial_packet(m);
    const Interaction v = build_interaction(m);

    CheckAccumulator resid("condition1_residual", 0.0);
    for (double t : times) {
        if (t > 0.0) continue;
        const ClockWaveFunction phi = free_clock_evolve(phi0, t);
        double worst = 0.0;
        for (int a = 0; a < m.system_dim(); ++a) {
            worst = std::max(worst, condition1_residual(phi, PureState::basis(m.system_dim(), a), v));
        }
        resid.add(t, -worst);
    }
    CheckAccumulator pur("product_form_clock_purity", kProductFormTol), sys("product_form_free_system", kProductFormTol);
    for (const TimeSeriesRecord& r : traj.records) {
        if (r.t > 0.0) continue;
        pur.add(r.t, r.purity_clock - 1.0);
        sys.add(r.t, -r.trace_dist);
    }
    result.checks.push_back(resid.finish());
    result.checks.push_back(pur.finish());
    result.checks.push_back(sys.finish());

    const double t_probe = m.packet_width + 0.5 * m.coupling_width;
    CheckAccumulator c2("condition2_witness", 0.0);
    c2.strict(true);
    c2.add(t_probe, condition2_witness(m, t_probe, config.dt) ? 1.0 : -1.0);
    result.checks.push_back(c2.finish());
}

void truncation_checks(const ExperimentConfig& config, std::span<const double> times, ScenarioResult& result) {
    std::vector<int> dims = config.truncation_dims;
    std::sort(dims.begin(), dims.end());
    dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
    const int n = config.model.grid.size();

    std::vector<double> negative;
    for (double t : times) {
        if (t <= 0.0) negative.push_back(t);
    }
    CheckAccumulator pos("truncated_residual_positive", 0.0), mono("truncated_residual_monotone", 0.0);
    pos.strict(true);
    mono.required(dims.size() > 1);
    for (int d : dims) {
        const double r = truncated_clock_residual(d, config.model, negative);
        result.truncation.push_back({d, r});
        if (d < n) pos.add(negative.empty() ? 0.0 : negative.front(), r);
    }
    for (size_t i = 1; i < result.truncation.size(); ++i) {
        mono.add(double(result.truncation[i].d_trunc),
                 result.truncation[i - 1].residual - result.truncation[i].residual);
    }
    const double full = truncated_clock_residual(n, config.model, negative);
    CheckAccumulator untr("untruncated_residual_zero", 0.0);
    untr.add(double(n), -full);
    result.truncation.push_back({n, full});
    result.checks.push_back(pos.finish());
    result.checks.push_back(mono.finish());
    result.checks.push_back(untr.finish());
}

}  // namespace

ScenarioResult run_scenario(const ExperimentConfig& config, const RunHooks& hooks) {
    if (!is_known_scenario(config.scenario)) throw ConfigError("unknown scenario '" + config.scenario + "'");
    const auto started = std::chrono::steady_clock::now();
    const std::vector<double> times = sample_times(config);
    if (times.empty()) throw ConfigError("no sample times");

    const ModelConfig& m = config.model;
    const double spread = clock_energy_stats(initial_packet(m), m.hbar).spread;
    const BranchSign sign = resolve_branch_sign();

    ScenarioResult result;
    RunManifest& man = result.manifest;
    man.config_echo = config.echo;
    man.sign_convention = std::string(to_string(sign));
    man.energy_spread = spread;
    man.window_end = speed_limit_window(spread, m.hbar);
    man.versions = backend_versions();
    if (hooks.on_manifest) hooks.on_manifest(man);

    if (config.scenario == "bound-sweep") {
        std::vector<std::future<Trajectory>> jobs;
        for (size_t i = 0; i < config.sweep_integrals.size(); ++i) {
            const double g = config.sweep_integrals[i];
            jobs.push_back(std::async(std::launch::async, [&, g, i] {
                return run_trajectory(config, times, g, "integral_" + std::to_string(i), sign);
            }));
        }
        for (auto& j : jobs) result.trajectories.push_back(j.get());
    } else {
        result.trajectories.push_back(run_trajectory(config, times, m.coupling_integral, "main", sign));
    }

    add_common_checks(config, result.trajectories, result.checks);
    const Trajectory& main = result.trajectories.front();
    if (config.scenario == "photon-box") photon_box_checks(config, main, spread, times, result);
    if (config.scenario == "phase-gate") phase_gate_checks(config, main, sign, result);
    if (config.scenario == "condition1") condition1_checks(config, main, times, result);
    if (config.scenario == "truncated-clock") truncation_checks(config, times, result);

    for (const Trajectory& tr : result.trajectories) {
        man.propagation_error = std::max(man.propagation_error, tr.propagation_error);
    }
    man.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    man.complete = true;
    return result;
}

VerifyOutcome verify(std::span<const CheckSummary> checks) {
    VerifyOutcome out{ExitStatus::Pass, {}, {}};
    for (const CheckSummary& c : checks) {
        if (c.informational) continue;
        if (c.applicable_samples == 0) {
            if (c.required) out.inconclusive.push_back(c.name);
        } else if (!c.passed) {
            out.failed.push_back(c.name);
        }
    }
    if (!out.failed.empty()) {
        out.status = ExitStatus::Violation;
    } else if (!out.inconclusive.empty()) {
        out.status = ExitStatus::Inconclusive;
    }
    return out;
}

}  // namespace qclock
