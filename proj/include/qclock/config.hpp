#pragma once

// Experiment configuration: a JSON document with a strict schema.  Values
// resolve with precedence command line > file > scenario defaults.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qclock/model.hpp"
#include "qclock/statelib.hpp"

namespace qclock {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScenarioInfo {
    std::string name;
    std::string description;
};

const std::vector<ScenarioInfo>& scenario_catalog();
bool is_known_scenario(const std::string& name);

struct ToleranceOptions {
    double bound = 1e-6;             // fixed slack for the system-level inequalities
    double mandelstam_tamm = 1e-9;
    double support_eps = 1e-8;       // rank threshold for support projectors
    double deviation_threshold = 1e-3; // F level that counts as full deviation
    double oracle = 1e-6;            // max entrywise |rho_sim - rho_analytic|
};

struct OutputOptions {
    std::filesystem::path dir = "qclock-out";
    bool emit_plot = false;
};

struct ExperimentConfig {
    std::string scenario;
    ModelConfig model;
    CVector initial_state;       // system state at t = 0
    double t_min = 0.0;
    double t_max = 4.0;
    double dt = 1e-3;
    int sample_count = 200;
    std::vector<double> sweep_integrals;
    std::vector<int> truncation_dims;
    std::uint64_t seed = 20090612;
    int random_states = 100;
    ToleranceOptions tolerances;
    OutputOptions output;
    nlohmann::json echo;         // fully resolved document

    PureState initial_pure_state() const { return PureState(initial_state); }
};

/// Command-line overrides; unset fields leave the file value in place.
struct ConfigOverrides {
    std::optional<std::string> scenario;
    std::optional<double> dt;
    std::optional<int> n;
    std::optional<double> t_max;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out_dir;
    std::optional<bool> emit_plot;
};

/// Default document for a scenario (null entries are derived at resolution).
nlohmann::json default_config_document(const std::string& scenario);

/// Parses text, reporting line/column on syntax errors.
nlohmann::json parse_config_text(const std::string& text, const std::string& source = "<config>");

/// Merges `doc` over the scenario defaults, applies overrides, validates the
/// schema and the physical constraints.
ExperimentConfig resolve_config(const nlohmann::json& doc, const ConfigOverrides& overrides = {});

ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

/// Uniform samples over [t_min, t_max].  When t_max <= 0 the samples are
/// snapped to multiples of the grid spacing.
std::vector<double> sample_times(const ExperimentConfig& config);

}  // namespace qclock
