#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "caet/algorithm.hpp"
#include "caet/sim.hpp"
#include "caet/task.hpp"

namespace caet {

struct ExperimentSpec {
    Instance instance;
    PairwiseTask task;
    Config algo;  // delta is overridden per grid point
    std::vector<double> delta_grid = {1e-2, 1e-3, 1e-4, 1e-6, 1e-8};
    int runs_per_delta = 200;
    std::uint64_t seed = 1;
    std::vector<std::int64_t> horizons = {10'000, 100'000};  // regret mode
    int runs_per_horizon = 200;
    std::string out_path;  // default report destination; CLI --out overrides

    void validate() const;
};

struct TrialRow {
    double delta = 0.0;
    int runs = 0;
    double mean_cost = 0.0;
    double std_cost = 0.0;
    double mean_tau = 0.0;
    double error_rate = 0.0;
    double err_ci_low = 0.0;
    double err_ci_high = 0.0;
    double t_star = 0.0;
    double lower_bound = 0.0;   // T* log(1/(2.4 delta))
    double upper_band = 0.0;    // theta T* log(1/delta)
    int capped_runs = 0;
    double lower_bound_kl = 0.0;  // T* kl(delta, 1-delta); JSON output only
};

struct TrialSummary {
    std::vector<TrialRow> rows;
    double t_star = 0.0;
    Proportion u_star;
};

struct RegretRow {
    std::int64_t horizon = 0;
    int runs = 0;
    double mean_regret = 0.0;
    double std_regret = 0.0;
    double mean_commit_time = 0.0;  // over runs that committed within the horizon
    double commit_fraction = 0.0;   // runs stopping before the horizon
    double correct_fraction = 0.0;  // runs committing to the true best arm
    double bound = 0.0;             // theta T*(Delta, mu) log(T)
};

struct RegretSummary {
    std::vector<RegretRow> rows;
    double t_star_gap = 0.0;
};

// T*(c, mu) and u* for an instance, via the closed form when it applies
// (3-arm unit-Gaussian ranking under gap costs) and the solver otherwise.
std::pair<double, Proportion> characteristic_time(const Instance& instance,
                                                  const PairwiseTask& task);

// Wilson score interval for k successes out of n at the given two-sided
// confidence (default 95%).
std::pair<double, double> wilson_interval(std::int64_t successes, std::int64_t n,
                                          double confidence = 0.95);

// Seeded Monte-Carlo sweep over the delta grid. Deterministic given the spec,
// regardless of the worker count.
TrialSummary run_trials(const ExperimentSpec& spec, int jobs = 1);

// Explore-then-commit at delta = 1/T: run the identification loop, then pull
// the decided arm for the remaining rounds. Regret is accounted against the
// true gaps; committed pulls need no sampling.
RegretSummary run_etc_regret(const ExperimentSpec& spec, int jobs = 1);

enum class ReportFormat { Csv, Json };

std::string render_report(const TrialSummary& summary, ReportFormat format);
std::string render_report(const RegretSummary& summary, ReportFormat format);
void emit_report(const TrialSummary& summary, const std::string& path, ReportFormat format);
void emit_report(const RegretSummary& summary, const std::string& path, ReportFormat format);

// Parses the CSV produced by render_report; round-trips byte-identically.
TrialSummary parse_trial_csv(const std::string& text);

// Config file loading (JSON with top-level keys instance/task/algorithm/
// experiment; see docs/config_schema.md).
ExperimentSpec load_spec(const std::string& path);
ExperimentSpec parse_spec_json(const std::string& text);

// Runs fn(0..n-1) on `jobs` threads; work is indexed so results are
// position-stable no matter the pool size.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

}  // namespace caet
