// Acceptance suite: one PASS/FAIL line per criterion.  Exit status is the
// number of failed criteria (capped at 1).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <string>

#include "qclock/runner.hpp"

using namespace qclock;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
    std::printf("criterion %2d: %s  %s  [%s]\n", id, ok ? "PASS" : "FAIL", what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

const CheckSummary* find(const ScenarioResult& r, const std::string& name) {
    for (const CheckSummary& c : r.checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

// Passed with at least one applicable sample.
bool held(const ScenarioResult& r, const std::string& name) {
    const CheckSummary* c = find(r, name);
    return c && c->applicable_samples > 0 && c->passed;
}

double worst(const ScenarioResult& r, const std::string& name) {
    const CheckSummary* c = find(r, name);
    return c ? c->worst_margin : std::nan("");
}

struct SuiteRun {
    ScenarioResult result;
    double seconds;
};

}  // namespace

int main() {
    try {
        const auto suite_start = Clock::now();
        std::map<std::string, SuiteRun> suite;
        for (const ScenarioInfo& s : scenario_catalog()) {
            const auto t0 = Clock::now();
            ScenarioResult r = run_scenario(resolve_config(nlohmann::json{{"scenario", s.name}}));
            suite.emplace(s.name, SuiteRun{std::move(r), seconds_since(t0)});
        }
        const double suite_seconds = seconds_since(suite_start);

        // 1. oracle equivalence at defaults
        const ExperimentConfig ex1 = resolve_config(nlohmann::json{{"scenario", "example1-dephasing"}});
        const SuiteRun& e1 = suite.at("example1-dephasing");
        const Trajectory& tr1 = e1.result.trajectories.front();
        const double dev1 = tr1.oracle_deviation.value_or(std::nan(""));
        const bool span_ok = tr1.records.size() == 200 && tr1.records.front().t == 0.0 &&
                             tr1.records.back().t == ex1.model.packet_width + ex1.model.coupling_width + 2.0;
        report(1, span_ok && dev1 <= 1e-6 && e1.seconds < 60.0, "oracle equivalence, dephasing defaults",
               "max dev " + num(dev1) + " <= 1e-6, " + std::to_string(tr1.records.size()) + " samples, " +
                   num(e1.seconds) + " s < 60 s");

        // 2. second-order convergence
        {
            ExperimentConfig half = ex1;
            half.dt = 0.5 * ex1.dt;
            const std::vector<double> ts = sample_times(half);
            const double dev2 =
                run_trajectory(half, ts, half.model.coupling_integral, "half").oracle_deviation.value_or(std::nan(""));
            const double ratio = dev1 / dev2;
            report(2, ratio >= 3.5 && ratio <= 4.5, "halving dt reduces the oracle deviation",
                   "ratio " + num(ratio) + " in [3.5, 4.5] (" + num(dev1) + " -> " + num(dev2) + ")");
        }

        // 3. dense brute-force cross-check
        {
            const auto t0 = Clock::now();
            ModelConfig m;
            m.grid = Grid(-2.0, 4.0, 128);
            m.coupling_integral = std::numbers::pi / 4.0;
            CVector plus(2);
            plus << 1.0, 1.0;
            const CompositeState start =
                CompositeState::product(initial_packet(m), PureState(plus / std::numbers::sqrt2));
            const double t = m.packet_width + m.coupling_width;
            const CompositeState dense = dense_oracle_evolve(start, m, t);
            CompositeState split = start;
            StrangPropagator(m).advance(split, t, 1e-4);
            const double d = l2_distance(split, dense);
            const double secs = seconds_since(t0);
            report(3, d <= 1e-8 && secs < 30.0, "split-operator vs dense propagator, n=128",
                   "L2 " + num(d) + " <= 1e-8, " + num(secs) + " s < 30 s");
        }

        // 4. support condition and product form before entry
        {
            const ScenarioResult& r = suite.at("condition1").result;
            const bool ok = held(r, "condition1_residual") && worst(r, "condition1_residual") == 0.0 &&
                            held(r, "product_form_clock_purity") && held(r, "product_form_free_system");
            report(4, ok, "condition 1 residual and product form for t <= 0",
                   "residual " + num(-worst(r, "condition1_residual")) + " == 0, purity defect " +
                       num(-worst(r, "product_form_clock_purity")) + " <= 1e-10");
        }

        // 5. Mandelstam-Tamm under free evolution
        {
            const ScenarioResult& r = suite.at("mandelstam-tamm").result;
            const CheckSummary* c = find(r, "mandelstam_tamm");
            report(5, held(r, "mandelstam_tamm") && c->tolerance == 1e-9, "free-clock Mandelstam-Tamm over the window",
                   "worst margin " + num(c->worst_margin) + " >= -1e-9 over " +
                       std::to_string(c->applicable_samples) + " samples");
        }

        // 6-8, 10: every scenario of the default suite
        bool fid = true, trace = true, vec = true, mixed = true, support = true;
        bool vec_probe_count = true;
        int mixed_samples = 0;
        double w_fid = INFINITY, w_cor = INFINITY, w_tr = INFINITY, w_dom = INFINITY, w_vec = INFINITY,
               w_sup = INFINITY;
        for (const auto& [name, run] : suite) {
            const ScenarioResult& r = run.result;
            fid = fid && held(r, "fidelity_bound") && held(r, "corollary");
            trace = trace && held(r, "trace_bound") && held(r, "trace_dominance") && held(r, "weak_trace_bound");
            vec = vec && held(r, "vector_inequality");
            support = support && held(r, "support_inclusion");
            const CheckSummary* m = find(r, "pure_to_mixed");
            mixed = mixed && m && m->passed;
            mixed_samples += m ? m->applicable_samples : 0;
            vec_probe_count = vec_probe_count && r.manifest.config_echo["random"]["states"] == 100;
            w_fid = std::min(w_fid, worst(r, "fidelity_bound"));
            w_cor = std::min(w_cor, worst(r, "corollary"));
            w_tr = std::min(w_tr, worst(r, "trace_bound"));
            w_dom = std::min(w_dom, worst(r, "trace_dominance"));
            w_vec = std::min(w_vec, worst(r, "vector_inequality"));
            w_sup = std::min(w_sup, worst(r, "support_inclusion"));
        }
        const size_t sweep_size = suite.at("bound-sweep").result.trajectories.size();
        report(6, fid && sweep_size == 5, "fidelity theorem and corollary, default suite incl. 5-point sweep",
               "worst F margin " + num(w_fid) + ", corollary " + num(w_cor) + ", tol 1e-6 + propagation error");
        report(7, trace, "trace-distance theorem and dominance over the weak form",
               "worst margin " + num(w_tr) + ", dominance " + num(w_dom));
        report(8, vec && vec_probe_count, "per-vector inequality on eigenbasis family + 100 random states",
               "worst margin " + num(w_vec) + " >= -1e-6");

        // 9. photon box
        {
            const ScenarioResult& r = suite.at("photon-box").result;
            report(9, held(r, "photon_box"), "photon box: t* dH_c >= pi hbar / 2 (one-sample slack)",
                   "margin " + num(worst(r, "photon_box")));
        }

        report(10, mixed && mixed_samples > 0 && support, "pure -> mixed inside the window, support inclusion",
               std::to_string(mixed_samples) + " deviating samples, support margin " + num(w_sup) +
                   " (defect <= 1e-4)");

        // 11. phase gate / back-action
        {
            const ScenarioResult& r = suite.at("phase-gate").result;
            bool noted = false;
            for (const std::string& n : r.notes) noted = noted || n.find("relative branch phase") != std::string::npos;
            const CheckSummary* flip = find(r, "sigma_z_flip");
            const bool ok = held(r, "back_action_late") && held(r, "back_action_mid_transit") &&
                            held(r, "gate_relative_phase") && noted && flip && flip->informational &&
                            verify(r.checks).status == ExitStatus::Pass;
            report(11, ok, "phase gate: no late back-action, mid-transit mixing, phase note recorded",
                   "late margin " + num(worst(r, "back_action_late")) + ", mid-transit margin " +
                       num(worst(r, "back_action_mid_transit")));
        }

        // 12. truncated clock
        {
            const ScenarioResult& r = suite.at("truncated-clock").result;
            std::string rows;
            for (const TruncationRow& t : r.truncation) rows += std::to_string(t.d_trunc) + ":" + num(t.residual) + " ";
            const bool dims = r.truncation.size() >= 2 && r.truncation[0].d_trunc == 512 && r.truncation[1].d_trunc == 1024;
            report(12, dims && held(r, "truncated_residual_positive") && held(r, "truncated_residual_monotone"),
                   "truncated clock violates condition 1, residual non-increasing in d_trunc", rows);
        }

        std::printf("suite runtime %.1f s (limit 300 s): %s\n", suite_seconds, suite_seconds < 300.0 ? "PASS" : "FAIL");
        if (suite_seconds >= 300.0) ++failures;
        std::printf("%d failure(s)\n", failures);
        return failures == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::printf("error: %s\n", e.what());
        return 3;
    }
}
