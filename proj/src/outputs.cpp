#include <fftw3.h>

#include <Eigen/Core>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qclock/runner.hpp"

namespace qclock {

namespace fs = std::filesystem;

namespace {

// Shortest round-trip representation, locale independent.
void append_number(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    f << text;
    f.close();
    if (!f) throw std::runtime_error("failed writing '" + path.string() + "'");
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::string csv_name(const Trajectory& tr, size_t count) {
    return count == 1 ? "timeseries.csv" : "timeseries_" + tr.label + ".csv";
}

std::string plot_script(const std::vector<std::string>& csvs) {
    std::string s;
    s += "# gnuplot script over the time-series CSV files\n";
    s += "set datafile separator ','\n";
    s += "set key autotitle columnhead\n";
    s += "set xlabel 't'\n";
    s += "set terminal pngcairo size 1000,700\n";
    s += "set output 'fidelity.png'\n";
    s += "set ylabel 'F'\n";
    s += "plot ";
    for (size_t i = 0; i < csvs.size(); ++i) {
        if (i) s += ", ";
        s += "'" + csvs[i] + "' using 1:2 with lines title '" + csvs[i] + "'";
    }
    s += "\nset output 'margins.png'\n";
    s += "set ylabel 'margin'\n";
    s += "plot '" + csvs.front() + "' using 1:8 with lines, '' using 1:9 with lines, '' using 1:10 with lines, "
         "'' using 1:12 with lines, '' using 1:13 with lines\n";
    s += "set output 'purity.png'\n";
    s += "set ylabel 'purity'\n";
    s += "plot '" + csvs.front() + "' using 1:4 with lines, '' using 1:5 with lines, '' using 1:6 with lines\n";
    return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw std::runtime_error("malformed number '" + s + "'");
    }
    return v;
}

VerifyOutcome verify_verdict(const nlohmann::json& doc, std::optional<double> tolerance) {
    if (!doc.contains("checks") || !doc["checks"].is_array()) throw std::runtime_error("verdict has no 'checks' array");
    std::vector<CheckSummary> checks;
    for (const auto& c : doc["checks"]) {
        CheckSummary s{};
        s.name = c.at("name").get<std::string>();
        s.applicable_samples = c.at("applicable_samples").get<int>();
        s.tolerance = tolerance.value_or(c.at("tolerance").get<double>());
        s.required = c.value("required", true);
        s.strict = c.value("strict", false);
        s.informational = c.value("informational", false);
        const auto& m = c.at("worst_margin");
        s.worst_margin = m.is_null() ? std::nan("") : m.get<double>();
        s.passed = s.applicable_samples == 0 ||
                   (s.strict ? s.worst_margin > 0.0 : s.worst_margin >= -s.tolerance);
        checks.push_back(s);
    }
    return verify(checks);
}

// Tolerances for a bare CSV come from a sibling manifest when present.
struct CsvTolerances {
    double bound = 1e-6;
    double mandelstam_tamm = 1e-9;
};

CsvTolerances csv_tolerances(const fs::path& csv) {
    CsvTolerances tol;
    const fs::path manifest = csv.parent_path() / "manifest.json";
    if (!fs::exists(manifest)) return tol;
    std::ifstream f(manifest);
    const nlohmann::json m = nlohmann::json::parse(f);
    const auto& t = m.at("config").at("tolerances");
    tol.bound = t.at("bound").get<double>() + m.value("propagation_error", 0.0);
    tol.mandelstam_tamm = t.at("mandelstam_tamm").get<double>();
    return tol;
}

VerifyOutcome verify_csv(const fs::path& path, std::optional<double> tolerance) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("'" + path.string() + "' is empty");
    const std::vector<std::string> header = split(line, ',');
    const CsvTolerances defaults = csv_tolerances(path);

    int applicable_col = -1;
    struct Col {
        int index;
        CheckSummary summary;
        bool always;
    };
    std::vector<Col> cols;
    for (size_t i = 0; i < header.size(); ++i) {
        const std::string& h = header[i];
        if (h == "applicable") applicable_col = static_cast<int>(i);
        if (h.rfind("margin_", 0) != 0) continue;
        CheckSummary s{};
        s.name = h.substr(7);
        s.worst_margin = std::numeric_limits<double>::infinity();
        s.worst_t = std::nan("");
        s.tolerance = s.name == "mandelstam_tamm" ? defaults.mandelstam_tamm
                      : s.name == "support"       ? 0.0
                                                  : defaults.bound;
        if (tolerance) s.tolerance = *tolerance;
        s.passed = true;
        cols.push_back({static_cast<int>(i), s, false});
    }
    if (applicable_col < 0 || cols.empty()) throw std::runtime_error("'" + path.string() + "' is not a time series");

    int line_no = 1;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split(line, ',');
        if (fields.size() != header.size()) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": wrong field count");
        }
        if (fields[static_cast<size_t>(applicable_col)] != "1") continue;
        const double t = parse_double(fields[0]);
        for (Col& c : cols) {
            const double m = parse_double(fields[static_cast<size_t>(c.index)]);
            ++c.summary.applicable_samples;
            if (!(m >= c.summary.worst_margin)) {
                c.summary.worst_margin = m;
                c.summary.worst_t = t;
            }
        }
    }
    std::vector<CheckSummary> checks;
    for (Col& c : cols) {
        c.summary.passed = c.summary.applicable_samples == 0 || c.summary.worst_margin >= -c.summary.tolerance;
        checks.push_back(c.summary);
    }
    return verify(checks);
}

}  // namespace

std::string backend_versions() {
    return std::string("qclock ") + kVersion + "; " + fftw_version + "; Eigen " + std::to_string(EIGEN_WORLD_VERSION) +
           "." + std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION);
}

std::string time_series_csv(std::span<const TimeSeriesRecord> records) {
    std::string out;
    const auto& cols = time_series_columns();
    for (size_t i = 0; i < cols.size(); ++i) {
        if (i) out += ',';
        out += cols[i];
    }
    out += '\n';
    for (const TimeSeriesRecord& r : records) {
        for (double v : {r.t, r.fidelity, r.trace_dist, r.purity_system, r.purity_clock, r.clock_fidelity_to_free,
                         r.autocorrelation, r.margin_fidelity, r.margin_corollary, r.margin_trace,
                         r.margin_weak_trace, r.margin_vector, r.margin_mandelstam_tamm, r.margin_support}) {
            append_number(out, v);
            out += ',';
        }
        out += r.applicable ? '1' : '0';
        out += '\n';
    }
    return out;
}

nlohmann::json manifest_json(const RunManifest& m) {
    return {{"config", m.config_echo},
            {"sign_convention", m.sign_convention},
            {"energy_spread", m.energy_spread},
            {"window_end", number_or_null(m.window_end)},
            {"propagation_error", m.propagation_error},
            {"versions", m.versions},
            {"wall_seconds", m.wall_seconds},
            {"complete", m.complete}};
}

nlohmann::json verdict_json(const ScenarioResult& result) {
    const VerifyOutcome v = verify(result.checks);
    nlohmann::json checks = nlohmann::json::array();
    for (const CheckSummary& c : result.checks) {
        checks.push_back({{"name", c.name},
                          {"worst_margin", number_or_null(c.worst_margin)},
                          {"worst_t", number_or_null(c.worst_t)},
                          {"tolerance", c.tolerance},
                          {"applicable_samples", c.applicable_samples},
                          {"passed", c.passed},
                          {"required", c.required},
                          {"strict", c.strict},
                          {"informational", c.informational}});
    }
    nlohmann::json trajs = nlohmann::json::array();
    for (const Trajectory& tr : result.trajectories) {
        trajs.push_back({{"label", tr.label},
                         {"coupling_integral", tr.coupling_integral},
                         {"samples", tr.records.size()},
                         {"propagation_error", tr.propagation_error},
                         {"max_norm_drift", tr.max_norm_drift},
                         {"oracle_deviation", tr.oracle_deviation ? nlohmann::json(*tr.oracle_deviation)
                                                                  : nlohmann::json(nullptr)}});
    }
    nlohmann::json trunc = nlohmann::json::array();
    for (const TruncationRow& r : result.truncation) trunc.push_back({{"d_trunc", r.d_trunc}, {"residual", r.residual}});

    const char* status = v.status == ExitStatus::Pass ? "pass" : v.status == ExitStatus::Violation ? "violation"
                                                                                                   : "inconclusive";
    nlohmann::json doc = {{"scenario", result.manifest.config_echo.value("scenario", "")},
                          {"status", status},
                          {"exit_code", static_cast<int>(v.status)},
                          {"failed", v.failed},
                          {"inconclusive", v.inconclusive},
                          {"checks", checks},
                          {"trajectories", trajs},
                          {"notes", result.notes}};
    if (!trunc.empty()) doc["truncation"] = trunc;
    return doc;
}

void write_manifest(const RunManifest& manifest, const fs::path& dir) {
    fs::create_directories(dir);
    write_text(dir / "manifest.json", manifest_json(manifest).dump(2) + "\n");
}

std::vector<fs::path> write_outputs(const ScenarioResult& result, const fs::path& dir, bool emit_plot) {
    if (result.trajectories.empty()) throw ValidationError("write_outputs: no trajectories");
    for (const Trajectory& tr : result.trajectories) {
        if (tr.records.empty()) throw ValidationError("write_outputs: empty record list for '" + tr.label + "'");
    }
    fs::create_directories(dir);
    std::vector<fs::path> written;

    write_manifest(result.manifest, dir);
    written.push_back(dir / "manifest.json");

    std::vector<std::string> csvs;
    for (const Trajectory& tr : result.trajectories) {
        const std::string name = csv_name(tr, result.trajectories.size());
        write_text(dir / name, time_series_csv(tr.records));
        written.push_back(dir / name);
        csvs.push_back(name);
    }
    if (!result.truncation.empty()) {
        std::string t = "d_trunc,residual\n";
        for (const TruncationRow& r : result.truncation) {
            t += std::to_string(r.d_trunc);
            t += ',';
            append_number(t, r.residual);
            t += '\n';
        }
        write_text(dir / "truncation.csv", t);
        written.push_back(dir / "truncation.csv");
    }
    write_text(dir / "verdict.json", verdict_json(result).dump(2) + "\n");
    written.push_back(dir / "verdict.json");
    if (emit_plot) {
        write_text(dir / "plot.gp", plot_script(csvs));
        written.push_back(dir / "plot.gp");
    }
    return written;
}

VerifyOutcome verify_file(const fs::path& path, std::optional<double> tolerance) {
    if (path.extension() == ".json") {
        std::ifstream f(path);
        if (!f) throw std::runtime_error("cannot open '" + path.string() + "'");
        return verify_verdict(nlohmann::json::parse(f), tolerance);
    }
    if (path.extension() == ".csv") return verify_csv(path, tolerance);
    throw std::runtime_error("verify: expected a .json verdict or a .csv time series, got '" + path.string() + "'");
}

}  // namespace qclock
