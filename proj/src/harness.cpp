#include "caet/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "caet/errors.hpp"
#include "caet/exp_family.hpp"

namespace caet {

namespace {

std::string fmt9(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    return buf;
}

constexpr const char* kTrialHeader =
    "delta,runs,mean_cost,std_cost,mean_tau,error_rate,err_ci_low,err_ci_high,"
    "t_star,lower_bound,upper_band,capped_runs";

double sample_std(const std::vector<double>& values, double mean) {
    if (values.size() < 2) return 0.0;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double band_theta(const Config& cfg) {
    return cfg.threshold == ThresholdKind::Deviational ? cfg.theta : 1.0;
}

}  // namespace

void ExperimentSpec::validate() const {
    instance.validate();
    if (instance.num_arms() != task.num_arms)
        throw std::invalid_argument("instance arm count does not match task");
    if (delta_grid.empty()) throw std::invalid_argument("delta grid is empty");
    for (std::size_t i = 0; i < delta_grid.size(); ++i) {
        if (!(delta_grid[i] > 0.0 && delta_grid[i] < 1.0))
            throw std::invalid_argument("delta grid entries must be in (0, 1)");
        if (i > 0 && !(delta_grid[i] < delta_grid[i - 1]))
            throw std::invalid_argument("delta grid must be strictly decreasing");
    }
    if (runs_per_delta < 1) throw std::invalid_argument("runs_per_delta must be >= 1");
    if (runs_per_horizon < 1) throw std::invalid_argument("runs_per_horizon must be >= 1");
    for (std::int64_t t : horizons)
        if (t < task.num_arms) throw std::invalid_argument("horizon shorter than one pass over the arms");
}

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&] {
            while (!failed.load(std::memory_order_relaxed)) {
                const int i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed.store(true);
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

namespace {

// Upper quantile of the standard normal via bisection on erfc.
double normal_quantile(double p) {
    double lo = 0.0, hi = 10.0;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
        (cdf < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::pair<double, double> wilson_interval(std::int64_t successes, std::int64_t n,
                                          double confidence) {
    if (n < 1) throw std::invalid_argument("wilson interval needs n >= 1");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw std::invalid_argument("confidence must be in (0, 1)");
    const double z = normal_quantile(0.5 + confidence / 2.0);
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::pair<double, Proportion> characteristic_time(const Instance& instance,
                                                  const PairwiseTask& task) {
    const std::vector<double> costs = true_expected_costs(instance);

    // Closed form: 3-arm unit-Gaussian ranking whose costs are the gap vector.
    if (task.kind == TaskKind::Ranking && task.num_arms == 3 && instance.family.is_gaussian() &&
        instance.family.sigma == 1.0) {
        bool gap_costs = true;
        std::vector<double> gaps;
        try {
            gaps = true_gap_costs(instance);
        } catch (const TieError&) {
            gap_costs = false;
        }
        if (gap_costs) {
            for (int a = 0; a < 3; ++a)
                if (std::abs(costs[a] - gaps[a]) > 1e-12) gap_costs = false;
        }
        if (gap_costs) {
            const PartitionId order = classify(task, instance.mu);
            const double d2 = instance.mu[order.arms[0]] - instance.mu[order.arms[1]];
            const double d3 = instance.mu[order.arms[0]] - instance.mu[order.arms[2]];
            auto [u_sorted, t_inv] = three_arm_closed_form(d2, d3);
            std::vector<double> u(3, 0.0);
            for (int rank = 0; rank < 3; ++rank) u[order.arms[rank]] = u_sorted[rank];
            return {1.0 / t_inv, Proportion(std::move(u))};
        }
    }

    try {
        OracleResult solved = solve_optimal(task, instance.family, costs, instance.mu);
        return {solved.t_star, solved.u_star};
    } catch (const SolverFailure& failure) {
        return {failure.best.t_star, failure.best.u_star};
    }
}

TrialSummary run_trials(const ExperimentSpec& spec, int jobs) {
    spec.validate();
    auto [t_star, u_star] = characteristic_time(spec.instance, spec.task);

    TrialSummary summary;
    summary.t_star = t_star;
    summary.u_star = u_star;

    for (std::size_t di = 0; di < spec.delta_grid.size(); ++di) {
        const double delta = spec.delta_grid[di];
        Config cfg = spec.algo;
        cfg.delta = delta;
        cfg.validate();

        const int n = spec.runs_per_delta;
        std::vector<RunResult> results(n);
        parallel_for(n, jobs, [&](int i) {
            const std::uint64_t tag = (static_cast<std::uint64_t>(di) << 32) |
                                      static_cast<std::uint64_t>(i);
            results[i] = run(spec.instance, spec.task, cfg, spec.seed, tag);
        });

        std::vector<double> costs(n), taus(n);
        std::int64_t errors = 0, capped = 0;
        for (int i = 0; i < n; ++i) {
            costs[i] = results[i].expected_cost;
            taus[i] = static_cast<double>(results[i].tau);
            if (!results[i].correct) ++errors;
            if (results[i].capped) ++capped;
        }
        TrialRow row;
        row.delta = delta;
        row.runs = n;
        row.mean_cost = std::accumulate(costs.begin(), costs.end(), 0.0) / n;
        row.std_cost = sample_std(costs, row.mean_cost);
        row.mean_tau = std::accumulate(taus.begin(), taus.end(), 0.0) / n;
        row.error_rate = static_cast<double>(errors) / n;
        std::tie(row.err_ci_low, row.err_ci_high) = wilson_interval(errors, n);
        row.t_star = t_star;
        row.lower_bound = t_star * std::log(1.0 / (2.4 * delta));
        row.upper_band = band_theta(cfg) * t_star * std::log(1.0 / delta);
        row.capped_runs = static_cast<int>(capped);
        row.lower_bound_kl = t_star * binary_kl(delta, 1.0 - delta);
        summary.rows.push_back(row);
    }
    return summary;
}

RegretSummary run_etc_regret(const ExperimentSpec& spec, int jobs) {
    spec.validate();
    if (spec.task.kind != TaskKind::BestArm)
        throw std::invalid_argument("regret mode runs the best-arm task");

    const std::vector<double> gaps = true_gap_costs(spec.instance);
    int true_best = 0;
    for (int a = 1; a < spec.instance.num_arms(); ++a)
        if (spec.instance.mu[a] > spec.instance.mu[true_best]) true_best = a;

    RegretSummary summary;
    summary.t_star_gap = bai_gap_characteristic(spec.instance.family, spec.instance.mu);

    for (std::size_t hi = 0; hi < spec.horizons.size(); ++hi) {
        const std::int64_t horizon = spec.horizons[hi];
        Config cfg = spec.algo;
        cfg.delta = 1.0 / static_cast<double>(horizon);
        cfg.max_steps = std::min(cfg.max_steps, horizon);
        cfg.validate();

        const int n = spec.runs_per_horizon;
        std::vector<double> regrets(n), commit_times(n, 0.0);
        std::vector<char> committed(n, 0), correct(n, 0);
        parallel_for(n, jobs, [&](int i) {
            const std::uint64_t tag = (static_cast<std::uint64_t>(hi + 0x100) << 32) |
                                      static_cast<std::uint64_t>(i);
            const RunResult res = run(spec.instance, spec.task, cfg, spec.seed, tag);
            double regret = 0.0;
            for (int a = 0; a < spec.instance.num_arms(); ++a)
                regret += gaps[a] * static_cast<double>(res.pulls[a]);
            if (!res.capped) {
                committed[i] = 1;
                commit_times[i] = static_cast<double>(res.tau);
                const int chosen = res.decision.arms[0];
                regret += static_cast<double>(horizon - res.tau) * gaps[chosen];
                correct[i] = chosen == true_best ? 1 : 0;
            }
            regrets[i] = regret;
        });

        RegretRow row;
        row.horizon = horizon;
        row.runs = n;
        row.mean_regret = std::accumulate(regrets.begin(), regrets.end(), 0.0) / n;
        row.std_regret = sample_std(regrets, row.mean_regret);
        const int n_committed = std::accumulate(committed.begin(), committed.end(), 0);
        row.commit_fraction = static_cast<double>(n_committed) / n;
        row.correct_fraction =
            static_cast<double>(std::accumulate(correct.begin(), correct.end(), 0)) / n;
        row.mean_commit_time =
            n_committed > 0
                ? std::accumulate(commit_times.begin(), commit_times.end(), 0.0) / n_committed
                : 0.0;
        row.bound = band_theta(cfg) * summary.t_star_gap * std::log(static_cast<double>(horizon));
        summary.rows.push_back(row);
    }
    return summary;
}

std::string render_report(const TrialSummary& summary, ReportFormat format) {
    std::string out;
    if (format == ReportFormat::Csv) {
        out += kTrialHeader;
        out += '\n';
        for (const TrialRow& r : summary.rows) {
            out += fmt9(r.delta) + ',' + std::to_string(r.runs) + ',' + fmt9(r.mean_cost) + ',' +
                   fmt9(r.std_cost) + ',' + fmt9(r.mean_tau) + ',' + fmt9(r.error_rate) + ',' +
                   fmt9(r.err_ci_low) + ',' + fmt9(r.err_ci_high) + ',' + fmt9(r.t_star) + ',' +
                   fmt9(r.lower_bound) + ',' + fmt9(r.upper_band) + ',' +
                   std::to_string(r.capped_runs) + '\n';
        }
        return out;
    }
    out += "{\"rows\":[";
    for (std::size_t i = 0; i < summary.rows.size(); ++i) {
        const TrialRow& r = summary.rows[i];
        if (i) out += ',';
        out += "{\"delta\":" + fmt9(r.delta) + ",\"runs\":" + std::to_string(r.runs) +
               ",\"mean_cost\":" + fmt9(r.mean_cost) + ",\"std_cost\":" + fmt9(r.std_cost) +
               ",\"mean_tau\":" + fmt9(r.mean_tau) + ",\"error_rate\":" + fmt9(r.error_rate) +
               ",\"err_ci_low\":" + fmt9(r.err_ci_low) + ",\"err_ci_high\":" + fmt9(r.err_ci_high) +
               ",\"t_star\":" + fmt9(r.t_star) + ",\"lower_bound\":" + fmt9(r.lower_bound) +
               ",\"upper_band\":" + fmt9(r.upper_band) +
               ",\"capped_runs\":" + std::to_string(r.capped_runs) +
               ",\"lower_bound_kl\":" + fmt9(r.lower_bound_kl) + "}";
    }
    out += "]}\n";
    return out;
}

std::string render_report(const RegretSummary& summary, ReportFormat format) {
    std::string out;
    if (format == ReportFormat::Csv) {
        out +=
            "horizon,runs,mean_regret,std_regret,mean_commit_time,commit_fraction,"
            "correct_fraction,bound\n";
        for (const RegretRow& r : summary.rows) {
            out += std::to_string(r.horizon) + ',' + std::to_string(r.runs) + ',' +
                   fmt9(r.mean_regret) + ',' + fmt9(r.std_regret) + ',' +
                   fmt9(r.mean_commit_time) + ',' + fmt9(r.commit_fraction) + ',' +
                   fmt9(r.correct_fraction) + ',' + fmt9(r.bound) + '\n';
        }
        return out;
    }
    out += "{\"t_star_gap\":" + fmt9(summary.t_star_gap) + ",\"rows\":[";
    for (std::size_t i = 0; i < summary.rows.size(); ++i) {
        const RegretRow& r = summary.rows[i];
        if (i) out += ',';
        out += "{\"horizon\":" + std::to_string(r.horizon) + ",\"runs\":" + std::to_string(r.runs) +
               ",\"mean_regret\":" + fmt9(r.mean_regret) + ",\"std_regret\":" + fmt9(r.std_regret) +
               ",\"mean_commit_time\":" + fmt9(r.mean_commit_time) +
               ",\"commit_fraction\":" + fmt9(r.commit_fraction) +
               ",\"correct_fraction\":" + fmt9(r.correct_fraction) + ",\"bound\":" + fmt9(r.bound) +
               "}";
    }
    out += "]}\n";
    return out;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

void emit_report(const TrialSummary& summary, const std::string& path, ReportFormat format) {
    write_file(path, render_report(summary, format));
}

void emit_report(const RegretSummary& summary, const std::string& path, ReportFormat format) {
    write_file(path, render_report(summary, format));
}

TrialSummary parse_trial_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty report");
    if (line != kTrialHeader) throw std::runtime_error("unexpected report header");
    TrialSummary summary;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row_in(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(row_in, field, ',')) fields.push_back(field);
        if (fields.size() != 12) throw std::runtime_error("malformed report row");
        TrialRow r;
        r.delta = std::stod(fields[0]);
        r.runs = std::stoi(fields[1]);
        r.mean_cost = std::stod(fields[2]);
        r.std_cost = std::stod(fields[3]);
        r.mean_tau = std::stod(fields[4]);
        r.error_rate = std::stod(fields[5]);
        r.err_ci_low = std::stod(fields[6]);
        r.err_ci_high = std::stod(fields[7]);
        r.t_star = std::stod(fields[8]);
        r.lower_bound = std::stod(fields[9]);
        r.upper_band = std::stod(fields[10]);
        r.capped_runs = std::stoi(fields[11]);
        summary.rows.push_back(r);
    }
    if (!summary.rows.empty()) summary.t_star = summary.rows.front().t_star;
    return summary;
}

namespace {

using nlohmann::json;

RewardFamily parse_family(const json& j) {
    const std::string name = j.at("family").get<std::string>();
    if (name == "gaussian") return RewardFamily::gaussian(j.value("sigma", 1.0));
    if (name == "bernoulli") return RewardFamily::bernoulli();
    throw std::invalid_argument("unknown reward family: " + name);
}

CostModel parse_cost_model(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "gap_estimate") return CostModel::gap_estimate();
    std::vector<double> c = j.at("c").get<std::vector<double>>();
    if (type == "deterministic") return CostModel::deterministic(std::move(c));
    if (type == "bernoulli") return CostModel::bernoulli(std::move(c));
    if (type == "gaussian") return CostModel::gaussian(std::move(c), j.at("sigma_c").get<double>());
    throw std::invalid_argument("unknown cost model: " + type);
}

PairwiseTask parse_task(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const int k = j.at("K").get<int>();
    if (kind == "ranking") return make_task(TaskKind::Ranking, k);
    if (kind == "best_arm") return make_task(TaskKind::BestArm, k);
    if (kind == "best_m") return make_task(TaskKind::BestM, k, j.at("m").get<int>());
    throw std::invalid_argument("unknown task kind: " + kind);
}

Config parse_algorithm(const json& j) {
    Config cfg;
    cfg.delta = j.value("delta", cfg.delta);
    cfg.r = j.value("r", cfg.r);
    cfg.r_prime = j.value("r_prime", cfg.r_prime);
    cfg.gamma0 = j.value("gamma0", cfg.gamma0);
    if (j.contains("threshold")) {
        const std::string t = j.at("threshold").get<std::string>();
        if (t == "informational") cfg.threshold = ThresholdKind::Informational;
        else if (t == "deviational") cfg.threshold = ThresholdKind::Deviational;
        else throw std::invalid_argument("unknown threshold kind: " + t);
    }
    cfg.theta = j.value("theta", cfg.theta);
    cfg.threshold_scale = j.value("C", cfg.threshold_scale);
    if (j.contains("sampler")) {
        const std::string s = j.at("sampler").get<std::string>();
        if (s == "caet") cfg.sampler = SamplerKind::CAET;
        else if (s == "uniform") cfg.sampler = SamplerKind::Uniform;
        else if (s == "cost_unaware") cfg.sampler = SamplerKind::CostUnaware;
        else throw std::invalid_argument("unknown sampler: " + s);
    }
    cfg.max_steps = j.value("max_steps", cfg.max_steps);
    cfg.resolve_every = j.value("resolve_every", cfg.resolve_every);
    cfg.oracle_tol = j.value("oracle_tol", cfg.oracle_tol);
    cfg.check_invariants = j.value("check_invariants", cfg.check_invariants);
    return cfg;
}

}  // namespace

ExperimentSpec parse_spec_json(const std::string& text) {
    const json j = json::parse(text);
    ExperimentSpec spec;
    const json& inst = j.at("instance");
    spec.instance.family = parse_family(inst);
    spec.instance.mu = inst.at("mu").get<std::vector<double>>();
    spec.instance.cost = parse_cost_model(inst.at("cost_model"));
    spec.task = parse_task(j.at("task"));
    if (j.contains("algorithm")) spec.algo = parse_algorithm(j.at("algorithm"));
    if (j.contains("experiment")) {
        const json& e = j.at("experiment");
        spec.delta_grid = e.value("delta_grid", spec.delta_grid);
        spec.runs_per_delta = e.value("runs_per_delta", spec.runs_per_delta);
        spec.seed = e.value("seed", spec.seed);
        if (e.contains("horizons")) spec.horizons = e.at("horizons").get<std::vector<std::int64_t>>();
        spec.runs_per_horizon = e.value("runs_per_horizon", spec.runs_per_horizon);
        spec.out_path = e.value("out", spec.out_path);
    }
    spec.validate();
    return spec;
}

ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_spec_json(buffer.str());
}

}  // namespace caet
