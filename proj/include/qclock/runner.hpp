#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qclock/bounds.hpp"
#include "qclock/config.hpp"
#include "qclock/oracle.hpp"

namespace qclock {

inline constexpr const char* kVersion = "1.0.0";

struct RunManifest {
    nlohmann::json config_echo;
    std::string sign_convention;
    double energy_spread = 0.0;
    double window_end = 0.0;
    double propagation_error = 0.0; // max step-halving L2 error over the run
    std::string versions;
    double wall_seconds = 0.0;
    bool complete = false;
};

/// One CSV row.  Field order is the column order.
struct TimeSeriesRecord {
    double t;
    double fidelity;
    double trace_dist;
    double purity_system;
    double purity_clock;
    double clock_fidelity_to_free;
    double autocorrelation;
    double margin_fidelity;
    double margin_corollary;
    double margin_trace;
    double margin_weak_trace;
    double margin_vector;
    double margin_mandelstam_tamm;
    double margin_support;
    bool applicable;
};

/// Column names in field order.
const std::vector<std::string>& time_series_columns();

struct Trajectory {
    std::string label;
    double coupling_integral;
    std::vector<TimeSeriesRecord> records;
    std::vector<BoundReport> reports;
    std::vector<SupportReport> supports;
    double propagation_error = 0.0;
    double max_norm_drift = 0.0;
    std::optional<double> oracle_deviation; // max entrywise, when the closed form applies
    std::optional<DensityMatrix> final_system; // reduced system state at the last sample
};

/// Aggregated check: worst margin over the samples it applies to.
struct CheckSummary {
    std::string name;
    double worst_margin;
    double worst_t;
    double tolerance;
    int applicable_samples;
    bool passed;
    bool required = true;       // zero applicable samples makes the run inconclusive
    bool strict = false;        // pass requires margin > 0 rather than >= -tolerance
    bool informational = false; // never affects the exit status
};

struct TruncationRow {
    int d_trunc;
    double residual;
};

struct ScenarioResult {
    RunManifest manifest;
    std::vector<Trajectory> trajectories;
    std::vector<CheckSummary> checks;
    std::vector<TruncationRow> truncation;
    std::vector<std::string> notes;
};

struct RunHooks {
    /// Invoked with the provisional manifest before any time stepping.
    std::function<void(const RunManifest&)> on_manifest;
};

ScenarioResult run_scenario(const ExperimentConfig& config, const RunHooks& hooks = {});

/// Simulates one trajectory of the composite system over `times`.
/// `integral` overrides the coupling integral of the configuration.
Trajectory run_trajectory(const ExperimentConfig& config, std::span<const double> times, double integral,
                          const std::string& label, BranchSign sign = kBranchSign);

enum class ExitStatus : int { Pass = 0, Violation = 1, Inconclusive = 2, OperationalError = 3 };

struct VerifyOutcome {
    ExitStatus status;
    std::vector<std::string> failed; // names of failing checks
    std::vector<std::string> inconclusive;
};

/// Pass iff every non-informational check passes; checks with no applicable
/// samples make an otherwise passing run inconclusive.
VerifyOutcome verify(std::span<const CheckSummary> checks);

/// Files written: manifest.json, timeseries*.csv, verdict.json, optional
/// truncation.csv and plot.gp.  Returns the paths written.
std::vector<std::filesystem::path> write_outputs(const ScenarioResult& result, const std::filesystem::path& dir,
                                                 bool emit_plot);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir);

std::string time_series_csv(std::span<const TimeSeriesRecord> records);
nlohmann::json manifest_json(const RunManifest& manifest);
nlohmann::json verdict_json(const ScenarioResult& result);

/// Re-evaluates a verdict document or a time-series CSV.
VerifyOutcome verify_file(const std::filesystem::path& path, std::optional<double> tolerance = std::nullopt);

std::string backend_versions();

}  // namespace qclock
