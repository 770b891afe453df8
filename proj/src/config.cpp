#include "qclock/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qclock/bounds.hpp"

namespace qclock {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

bool negative_time_scenario(const std::string& s) { return s == "truncated-clock" || s == "condition1"; }

// Coupling integral in units of hbar for the single-trajectory scenarios.
double default_integral_factor(const std::string& s) {
    if (s == "photon-box") return kPi / 2.0;
    if (s == "phase-gate") return kPi;
    return kPi / 4.0;
}

void merge_strict(json& base, const json& overlay, const std::string& path) {
    if (!overlay.is_object()) throw ConfigError("expected an object at '" + (path.empty() ? "/" : path) + "'");
    for (auto it = overlay.begin(); it != overlay.end(); ++it) {
        const std::string key_path = path + "/" + it.key();
        if (!base.contains(it.key())) throw ConfigError("unknown key '" + it.key() + "' at '" + key_path + "'");
        json& target = base[it.key()];
        if (target.is_object()) {
            merge_strict(target, it.value(), key_path);
        } else {
            target = it.value();
        }
    }
}

template <typename T>
T get_as(const json& doc, const json::json_pointer& ptr) {
    const json& v = doc.at(ptr);
    try {
        if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) throw ConfigError("");
        } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
            if (!v.is_number_integer()) throw ConfigError("");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError("");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError("");
        }
        return v.get<T>();
    } catch (const std::exception&) {
        throw ConfigError("key '" + ptr.to_string() + "' has the wrong type (got " + std::string(v.type_name()) + ")");
    }
}

CMatrix parse_matrix(const json& v, const std::string& where) {
    if (!v.is_object() || !v.contains("re")) {
        throw ConfigError("'" + where + "' must be an operator name or {\"re\": [[..]], \"im\": [[..]]}");
    }
    for (auto it = v.begin(); it != v.end(); ++it) {
        if (it.key() != "re" && it.key() != "im") throw ConfigError("unknown key '" + it.key() + "' at '" + where + "'");
    }
    const auto re = v.at("re").get<std::vector<std::vector<double>>>();
    const auto im = v.contains("im") ? v.at("im").get<std::vector<std::vector<double>>>()
                                     : std::vector<std::vector<double>>(re.size(), std::vector<double>(re.size(), 0.0));
    const auto d = static_cast<Eigen::Index>(re.size());
    if (d == 0 || static_cast<Eigen::Index>(im.size()) != d) throw ConfigError("'" + where + "': bad matrix shape");
    CMatrix m(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        if (static_cast<Eigen::Index>(re[r].size()) != d || static_cast<Eigen::Index>(im[r].size()) != d) {
            throw ConfigError("'" + where + "': matrix must be square");
        }
        for (Eigen::Index c = 0; c < d; ++c) m(r, c) = cplx(re[r][c], im[r][c]);
    }
    return m;
}

HermitianOperator named_operator(const std::string& name, int dim, const std::string& where) {
    if (name == "zero") return HermitianOperator::zero(dim);
    if (name == "identity") return HermitianOperator::identity(dim);
    if (dim != 2) throw ConfigError("'" + where + "': Pauli operators require a two-level system");
    if (name == "sigma_x") return HermitianOperator::pauli_x();
    if (name == "sigma_y") return HermitianOperator::pauli_y();
    if (name == "sigma_z") return HermitianOperator::pauli_z();
    throw ConfigError("'" + where + "': unknown operator '" + name + "'");
}

HermitianOperator parse_operator(const json& v, int dim, const std::string& where) {
    if (v.is_string()) return named_operator(v.get<std::string>(), dim, where);
    try {
        return HermitianOperator(parse_matrix(v, where));
    } catch (const ValidationError& e) {
        throw ConfigError("'" + where + "': " + e.what());
    }
}

CVector parse_state(const json& v, int dim) {
    const double s = 1.0 / std::sqrt(2.0);
    CVector out(dim);
    if (v.is_string()) {
        const std::string name = v.get<std::string>();
        if (name == "0" || name == "1") return PureState::basis(dim, name == "1" ? 1 : 0).amplitudes();
        if (dim != 2) throw ConfigError("'/system/initial_state': named superpositions require a two-level system");
        if (name == "+") out << s, s;
        else if (name == "-") out << s, -s;
        else if (name == "+i") out << s, cplx(0, s);
        else if (name == "-i") out << s, cplx(0, -s);
        else throw ConfigError("'/system/initial_state': unknown state '" + name + "'");
        return out;
    }
    if (!v.is_object() || !v.contains("re")) {
        throw ConfigError("'/system/initial_state' must be a state name or {\"re\": [..], \"im\": [..]}");
    }
    const auto re = v.at("re").get<std::vector<double>>();
    const auto im = v.contains("im") ? v.at("im").get<std::vector<double>>() : std::vector<double>(re.size(), 0.0);
    if (static_cast<int>(re.size()) != dim || static_cast<int>(im.size()) != dim) {
        throw ConfigError("'/system/initial_state' must have " + std::to_string(dim) + " components");
    }
    for (int a = 0; a < dim; ++a) out(a) = cplx(re[a], im[a]);
    if (std::abs(out.norm() - 1.0) > 1e-9) throw ConfigError("'/system/initial_state' is not normalized");
    out.normalize();
    return out;
}

int operator_dim(const json& v) {
    if (v.is_object() && v.contains("re") && v.at("re").is_array()) return static_cast<int>(v.at("re").size());
    return 0;
}

}  // namespace

const std::vector<ScenarioInfo>& scenario_catalog() {
    static const std::vector<ScenarioInfo> catalog = {
        {"example1-dephasing", "momentum clock coupled to a qubit through sigma_z; simulation vs closed form"},
        {"mandelstam-tamm", "free clock autocorrelation against cos(Delta H_c t / hbar) over the speed-limit window"},
        {"photon-box", "sigma_x coupling that orthogonalizes the system; first time of full deviation"},
        {"phase-gate", "branch phases acting as a phase gate; back action on the clock"},
        {"truncated-clock", "momentum-truncated clocks leak into the coupling region before t = 0"},
        {"bound-sweep", "fidelity and trace-distance bounds across a list of coupling strengths"},
        {"condition1", "negative-time evolution: interaction off, product form, free system dynamics"},
    };
    return catalog;
}

bool is_known_scenario(const std::string& name) {
    const auto& c = scenario_catalog();
    return std::any_of(c.begin(), c.end(), [&](const ScenarioInfo& s) { return s.name == name; });
}

json default_config_document(const std::string& scenario) {
    const bool negative = negative_time_scenario(scenario);
    json doc = {
        {"scenario", scenario},
        {"hbar", 1.0},
        {"grid", {{"x_min", -4.0}, {"x_max", 12.0}, {"n", 4096}}},
        {"clock", {{"width", 1.0}, {"carrier", 0.0}}},
        {"coupling", {{"width", 1.0}, {"integral", nullptr}, {"shape", "bump"}, {"operator", "sigma_z"}}},
        {"system", {{"hamiltonian", "zero"}, {"initial_state", "+"}}},
        {"time", {{"t_min", negative ? -2.0 : 0.0}, {"t_max", negative ? json(0.0) : json(nullptr)}, {"dt", 1e-3}, {"samples", 200}}},
        {"sweep", {{"integrals", nullptr}}},
        {"truncation", {{"dims", nullptr}}},
        {"random", {{"seed", 20090612}, {"states", 100}}},
        {"tolerances",
         {{"bound", 1e-6}, {"mandelstam_tamm", 1e-9}, {"support_eps", 1e-8}, {"deviation_threshold", 1e-3}, {"oracle", 1e-6}}},
        {"output", {{"dir", "qclock-out"}, {"emit_plot", false}}},
    };
    if (scenario == "photon-box") {
        doc["coupling"]["operator"] = "sigma_x";
        doc["system"]["initial_state"] = "0";
    }
    return doc;
}

json parse_config_text(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        size_t line = 1;
        size_t col = 1;
        const size_t stop = std::min<size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream msg;
        msg << source << ":" << line << ":" << col << ": parse error: " << e.what();
        throw ConfigError(msg.str());
    }
}

ExperimentConfig resolve_config(const json& input, const ConfigOverrides& overrides) {
    if (!input.is_object()) throw ConfigError("configuration must be a JSON object");
    std::string scenario = overrides.scenario.value_or("");
    if (scenario.empty()) {
        if (!input.contains("scenario")) throw ConfigError("missing required key 'scenario'");
        scenario = get_as<std::string>(input, json::json_pointer("/scenario"));
    }
    if (!is_known_scenario(scenario)) throw ConfigError("unknown scenario '" + scenario + "'");

    json doc = default_config_document(scenario);
    merge_strict(doc, input, "");
    doc["scenario"] = scenario;
    if (overrides.dt) doc["time"]["dt"] = *overrides.dt;
    if (overrides.n) doc["grid"]["n"] = *overrides.n;
    if (overrides.t_max) doc["time"]["t_max"] = *overrides.t_max;
    if (overrides.seed) doc["random"]["seed"] = *overrides.seed;
    if (overrides.out_dir) doc["output"]["dir"] = overrides.out_dir->string();
    if (overrides.emit_plot) doc["output"]["emit_plot"] = *overrides.emit_plot;

    using P = json::json_pointer;
    ExperimentConfig cfg;
    cfg.scenario = scenario;
    ModelConfig& m = cfg.model;
    m.hbar = get_as<double>(doc, P("/hbar"));
    try {
        m.grid = Grid(get_as<double>(doc, P("/grid/x_min")), get_as<double>(doc, P("/grid/x_max")),
                      get_as<int>(doc, P("/grid/n")));
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("'/grid': ") + e.what());
    }
    m.packet_width = get_as<double>(doc, P("/clock/width"));
    m.carrier = get_as<double>(doc, P("/clock/carrier"));
    m.coupling_width = get_as<double>(doc, P("/coupling/width"));
    try {
        m.coupling_shape = coupling_shape_from_string(get_as<std::string>(doc, P("/coupling/shape")));
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("'/coupling/shape': ") + e.what());
    }

    const json& b_doc = doc.at(P("/coupling/operator"));
    const json& hs_doc = doc.at(P("/system/hamiltonian"));
    int dim = std::max(operator_dim(b_doc), operator_dim(hs_doc));
    if (dim == 0) dim = 2;
    m.coupling_operator = parse_operator(b_doc, dim, "/coupling/operator");
    m.system_hamiltonian = parse_operator(hs_doc, dim, "/system/hamiltonian");
    if (m.coupling_operator.dim() != m.system_hamiltonian.dim()) {
        throw ConfigError("'/coupling/operator' and '/system/hamiltonian' have different dimensions");
    }
    cfg.initial_state = parse_state(doc.at(P("/system/initial_state")), dim);

    if (doc.at(P("/sweep/integrals")).is_null()) {
        json list = json::array();
        for (double f : {0.1, 0.5, 1.0, kPi / 2.0, kPi}) list.push_back(f * m.hbar);
        doc["sweep"]["integrals"] = list;
    }
    try {
        cfg.sweep_integrals = doc.at(P("/sweep/integrals")).get<std::vector<double>>();
    } catch (const json::exception&) {
        throw ConfigError("'/sweep/integrals' must be a list of numbers");
    }
    if (cfg.sweep_integrals.empty()) throw ConfigError("'/sweep/integrals' must not be empty");

    if (doc.at(P("/coupling/integral")).is_null()) {
        doc["coupling"]["integral"] =
            scenario == "bound-sweep" ? cfg.sweep_integrals.front() : default_integral_factor(scenario) * m.hbar;
    }
    m.coupling_integral = get_as<double>(doc, P("/coupling/integral"));

    if (doc.at(P("/truncation/dims")).is_null()) {
        doc["truncation"]["dims"] = json::array({m.grid.size() / 8, m.grid.size() / 4});
    }
    try {
        cfg.truncation_dims = doc.at(P("/truncation/dims")).get<std::vector<int>>();
    } catch (const json::exception&) {
        throw ConfigError("'/truncation/dims' must be a list of integers");
    }

    try {
        m.validate();
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }

    cfg.t_min = get_as<double>(doc, P("/time/t_min"));
    if (doc.at(P("/time/t_max")).is_null()) {
        if (scenario == "mandelstam-tamm") {
            const double spread = clock_energy_stats(initial_packet(m), m.hbar).spread;
            doc["time"]["t_max"] = speed_limit_window(spread, m.hbar);
        } else {
            doc["time"]["t_max"] = m.packet_width + m.coupling_width + 2.0;
        }
    }
    cfg.t_max = get_as<double>(doc, P("/time/t_max"));
    cfg.dt = get_as<double>(doc, P("/time/dt"));
    cfg.sample_count = get_as<int>(doc, P("/time/samples"));
    if (!(cfg.dt > 0.0)) throw ConfigError("'/time/dt' must be positive");
    if (cfg.sample_count < 2) throw ConfigError("'/time/samples' must be at least 2");
    if (!(cfg.t_max > cfg.t_min)) throw ConfigError("'/time/t_max' must exceed '/time/t_min'");
    if (negative_time_scenario(scenario) && cfg.t_max > 0.0) {
        throw ConfigError("scenario '" + scenario + "' samples t <= 0 only; '/time/t_max' must be <= 0");
    }

    cfg.seed = get_as<std::uint64_t>(doc, P("/random/seed"));
    cfg.random_states = get_as<int>(doc, P("/random/states"));
    if (cfg.random_states < 0) throw ConfigError("'/random/states' must be nonnegative");

    ToleranceOptions& tol = cfg.tolerances;
    tol.bound = get_as<double>(doc, P("/tolerances/bound"));
    tol.mandelstam_tamm = get_as<double>(doc, P("/tolerances/mandelstam_tamm"));
    tol.support_eps = get_as<double>(doc, P("/tolerances/support_eps"));
    tol.deviation_threshold = get_as<double>(doc, P("/tolerances/deviation_threshold"));
    tol.oracle = get_as<double>(doc, P("/tolerances/oracle"));
    if (!(tol.support_eps > 0.0)) throw ConfigError("'/tolerances/support_eps' must be positive");

    cfg.output.dir = get_as<std::string>(doc, P("/output/dir"));
    cfg.output.emit_plot = get_as<bool>(doc, P("/output/emit_plot"));

    // Wrap check over the whole run, including every sweep trajectory.
    validate_no_wrap(m, cfg.t_max, cfg.t_min);
    cfg.echo = std::move(doc);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return resolve_config(parse_config_text(buf.str(), path.string()), overrides);
}

std::vector<double> sample_times(const ExperimentConfig& config) {
    const int count = config.sample_count;
    std::vector<double> out;
    out.reserve(static_cast<size_t>(count));
    const double span = config.t_max - config.t_min;
    const double h = config.model.grid.spacing();
    for (int i = 0; i < count; ++i) {
        double t = i + 1 == count ? config.t_max : config.t_min + span * i / (count - 1);
        if (config.t_max <= 0.0) t = std::round(t / h) * h;
        if (out.empty() || t > out.back()) out.push_back(t);
    }
    return out;
}

}  // namespace qclock
