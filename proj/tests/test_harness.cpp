#include <cmath>
#include <string>

#include <doctest.h>

#include "caet/errors.hpp"
#include "caet/harness.hpp"

using namespace caet;

namespace {

ExperimentSpec small_spec() {
    ExperimentSpec spec;
    spec.instance.mu = {1.4, 0.8, 0.3};
    spec.instance.family = RewardFamily::gaussian(1.0);
    spec.instance.cost = CostModel::gap_estimate();
    spec.task = make_task(TaskKind::Ranking, 3);
    spec.algo.r = 0.4;
    spec.algo.theta = 1.2;
    spec.algo.gamma0 = 0.1;
    spec.algo.r_prime = 0.1;
    spec.delta_grid = {0.2, 0.1};
    spec.runs_per_delta = 8;
    spec.seed = 11;
    return spec;
}

}  // namespace

TEST_CASE("wilson interval brackets the point estimate") {
    for (std::int64_t k : {0, 1, 5, 50, 100}) {
        const auto [lo, hi] = wilson_interval(k, 100);
        const double p = k / 100.0;
        CHECK(lo <= p + 1e-12);
        CHECK(hi >= p - 1e-12);
        CHECK(lo >= 0.0);
        CHECK(hi <= 1.0);
    }
    // spot value: k=5, n=100 at 95%, z = 1.959963984540054 substituted into
    // the score interval by hand
    const auto [lo, hi] = wilson_interval(5, 100);
    CHECK(lo == doctest::Approx(0.02154367915436796).epsilon(1e-9));
    CHECK(hi == doctest::Approx(0.11175046923191913).epsilon(1e-9));
}

TEST_CASE("characteristic_time picks the closed form for the gap-cost ranking instance") {
    ExperimentSpec spec = small_spec();
    auto [t_closed, u_closed] = characteristic_time(spec.instance, spec.task);
    auto [u_direct, t_inv] = three_arm_closed_form(1.4 - 0.8, 1.4 - 0.3);
    CHECK(t_closed == doctest::Approx(1.0 / t_inv).epsilon(1e-12));
    CHECK(u_closed[1] == doctest::Approx(u_direct[1]).epsilon(1e-12));

    // solver path agrees where the closed form applies
    spec.instance.cost = CostModel::deterministic({0.0, 1.4 - 0.8, 1.4 - 0.3});
    spec.instance.cost.c[1] += 1e-6;  // no longer exactly the gap vector
    auto [t_solver, u_solver] = characteristic_time(spec.instance, spec.task);
    CHECK(t_solver == doctest::Approx(t_closed).epsilon(1e-3));
    (void)u_solver;
}

TEST_CASE("run_trials: report shape, bounds, determinism across worker counts") {
    const ExperimentSpec spec = small_spec();
    const TrialSummary s1 = run_trials(spec, 1);
    const TrialSummary s2 = run_trials(spec, 2);

    REQUIRE(s1.rows.size() == 2);
    for (const TrialRow& row : s1.rows) {
        CHECK(row.runs == 8);
        CHECK(row.err_ci_low <= row.error_rate);
        CHECK(row.error_rate <= row.err_ci_high);
        CHECK(row.lower_bound < row.upper_band);
        CHECK(row.mean_cost > 0.0);
        CHECK(row.capped_runs == 0);
    }
    CHECK(render_report(s1, ReportFormat::Csv) == render_report(s2, ReportFormat::Csv));
    CHECK(render_report(s1, ReportFormat::Json) == render_report(s2, ReportFormat::Json));
}

TEST_CASE("easy-regime sanity: delta = 0.5 on a well-separated instance") {
    ExperimentSpec spec = small_spec();
    spec.instance.mu = {2.0, 0.0};
    spec.instance.cost = CostModel::deterministic({1.0, 1.0});
    spec.task = make_task(TaskKind::BestArm, 2);
    spec.delta_grid = {0.5};
    spec.runs_per_delta = 40;
    const TrialSummary s = run_trials(spec, 2);
    CHECK(s.rows[0].error_rate < 0.25);
}

TEST_CASE("csv rendering and round trip") {
    const ExperimentSpec spec = small_spec();
    const TrialSummary summary = run_trials(spec, 2);
    const std::string csv = render_report(summary, ReportFormat::Csv);

    std::int64_t lines = 0;
    for (char ch : csv) lines += ch == '\n';
    CHECK(lines == 1 + 2);  // header + one line per delta
    CHECK(csv.rfind("delta,runs,mean_cost,std_cost,mean_tau,error_rate,err_ci_low,"
                    "err_ci_high,t_star,lower_bound,upper_band,capped_runs\n", 0) == 0);
    CHECK(csv.find("\r") == std::string::npos);

    const TrialSummary reparsed = parse_trial_csv(csv);
    CHECK(render_report(reparsed, ReportFormat::Csv) == csv);

    const std::string json = render_report(summary, ReportFormat::Json);
    CHECK(json.find("\"rows\":[") != std::string::npos);
    CHECK(json.find("\"lower_bound_kl\":") != std::string::npos);
}

TEST_CASE("spec parsing from JSON") {
    const std::string text = R"({
      "instance": {"family": "gaussian", "sigma": 1.0, "mu": [1.4, 0.8, 0.3],
                   "cost_model": {"type": "gap_estimate"}},
      "task": {"kind": "ranking", "K": 3},
      "algorithm": {"r": 0.4, "theta": 1.2, "C": 1.0, "gamma0": 0.1, "r_prime": 0.1,
                    "threshold": "deviational", "sampler": "caet"},
      "experiment": {"delta_grid": [1e-2, 1e-3], "runs_per_delta": 5, "seed": 3,
                     "horizons": [10000], "runs_per_horizon": 7}
    })";
    const ExperimentSpec spec = parse_spec_json(text);
    CHECK(spec.task.kind == TaskKind::Ranking);
    CHECK(spec.instance.mu.size() == 3);
    CHECK(spec.instance.cost.kind == CostModel::Kind::GapEstimate);
    CHECK(spec.algo.theta == 1.2);
    CHECK(spec.delta_grid == std::vector<double>{1e-2, 1e-3});
    CHECK(spec.runs_per_delta == 5);
    CHECK(spec.seed == 3);
    CHECK(spec.horizons == std::vector<std::int64_t>{10000});
    CHECK(spec.runs_per_horizon == 7);

    CHECK_THROWS(parse_spec_json(R"({"instance": {"family": "poisson", "mu": [1, 2],
      "cost_model": {"type": "gap_estimate"}}, "task": {"kind": "ranking", "K": 2}})"));
}

TEST_CASE("increasing delta grids are rejected") {
    ExperimentSpec spec = small_spec();
    spec.delta_grid = {0.1, 0.2};
    CHECK_THROWS(spec.validate());
}

TEST_CASE("oracle-infeasible instances are rejected before any run") {
    ExperimentSpec spec = small_spec();
    // two adjacent zero-cost arms make the ranking pair (1, 2) unresolvable
    spec.instance.cost = CostModel::deterministic({1.0, 0.0, 0.0});
    CHECK_THROWS_AS(run_trials(spec, 1), InfeasibleTaskError);
}

TEST_CASE("mean cost sits inside the coarse sanity window for delta < 0.1") {
    ExperimentSpec spec = small_spec();
    spec.delta_grid = {0.05};
    spec.runs_per_delta = 30;
    const TrialSummary summary = run_trials(spec, 2);
    const TrialRow& row = summary.rows[0];
    CHECK(row.lower_bound < row.upper_band);
    CHECK(row.mean_cost >= 0.2 * row.lower_bound);
    CHECK(row.mean_cost <= 5.0 * row.upper_band);
}

TEST_CASE("commitment time grows like the log^(1+r) law across horizons") {
    ExperimentSpec spec;
    spec.instance.mu = {1.0, 0.5, 0.0};
    spec.instance.family = RewardFamily::gaussian(1.0);
    spec.instance.cost = CostModel::gap_estimate();
    spec.task = make_task(TaskKind::BestArm, 3);
    spec.algo.r = 0.4;
    spec.algo.theta = 1.2;
    spec.horizons = {10'000, 100'000, 1'000'000};
    spec.runs_per_horizon = 60;
    spec.seed = 5;
    const RegretSummary summary = run_etc_regret(spec, 2);
    REQUIRE(summary.rows.size() == 3);
    for (std::size_t i = 1; i < summary.rows.size(); ++i) {
        const double measured =
            summary.rows[i].mean_commit_time / summary.rows[i - 1].mean_commit_time;
        const double law = std::pow(std::log(static_cast<double>(summary.rows[i].horizon)) /
                                        std::log(static_cast<double>(summary.rows[i - 1].horizon)),
                                    1.0 + spec.algo.r);
        CHECK(measured / law > 0.75);
        CHECK(measured / law < 1.25);
    }
}

TEST_CASE("regret experiment: accounting and bounds on a tiny sweep") {
    ExperimentSpec spec = small_spec();
    spec.instance.mu = {1.0, 0.0};
    spec.instance.cost = CostModel::gap_estimate();
    spec.task = make_task(TaskKind::BestArm, 2);
    spec.horizons = {2000};
    spec.runs_per_horizon = 10;
    const RegretSummary summary = run_etc_regret(spec, 2);
    REQUIRE(summary.rows.size() == 1);
    CHECK(summary.t_star_gap == doctest::Approx(2.0).epsilon(1e-12));
    const RegretRow& row = summary.rows[0];
    CHECK(row.commit_fraction == 1.0);
    CHECK(row.correct_fraction >= 0.9);
    CHECK(row.mean_regret > 0.0);
    CHECK(row.mean_regret < 200.0);  // far below pulling the bad arm throughout
    CHECK(row.mean_commit_time < 2000.0);

    const RegretSummary again = run_etc_regret(spec, 1);
    CHECK(render_report(summary, ReportFormat::Csv) == render_report(again, ReportFormat::Csv));
}

TEST_CASE("bernoulli instance with the informational threshold stays delta-sound") {
    ExperimentSpec spec;
    spec.instance.mu = {0.75, 0.45};
    spec.instance.family = RewardFamily::bernoulli();
    spec.instance.cost = CostModel::deterministic({1.0, 1.0});
    spec.task = make_task(TaskKind::BestArm, 2);
    spec.algo.threshold = ThresholdKind::Informational;
    spec.delta_grid = {0.1};
    spec.runs_per_delta = 300;
    spec.seed = 19;
    const TrialSummary summary = run_trials(spec, 2);
    const TrialRow& row = summary.rows[0];
    const auto errors = static_cast<std::int64_t>(std::lround(row.error_rate * row.runs));
    CHECK(wilson_interval(errors, row.runs).first <= 0.1);
    CHECK(row.capped_runs == 0);
}

TEST_CASE("horizons shorter than the exploration phase never commit") {
    ExperimentSpec spec = small_spec();
    spec.instance.mu = {0.55, 0.45};  // close means: identification needs far more than 40 pulls
    spec.instance.cost = CostModel::gap_estimate();
    spec.task = make_task(TaskKind::BestArm, 2);
    spec.horizons = {40};
    spec.runs_per_horizon = 10;
    const RegretSummary summary = run_etc_regret(spec, 1);
    const RegretRow& row = summary.rows[0];
    CHECK(row.commit_fraction == 0.0);
    CHECK(row.correct_fraction == 0.0);
    CHECK(row.mean_commit_time == 0.0);
    // all regret is exploration regret: at most max-gap per pull
    CHECK(row.mean_regret <= 40.0 * 0.1 + 1e-12);
    CHECK(row.mean_regret > 0.0);
}
