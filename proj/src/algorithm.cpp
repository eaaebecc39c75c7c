#include "caet/algorithm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "caet/errors.hpp"

namespace caet {

double Config::alpha() const {
    // For delta >= 1/e the schedule's raw value leaves (0, 1); clamp so that
    // easy-regime sweeps (e.g. delta = 0.5) stay well defined.
    return std::clamp(1.0 - std::pow(std::log(1.0 / delta), -r), 0.0, 1.0);
}

void Config::validate() const {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0, 1)");
    if (!(r > 0.0 && r < 0.5)) throw std::invalid_argument("r must be in (0, 1/2)");
    if (!(r_prime > 0.0 && r_prime < 0.125)) throw std::invalid_argument("r' must be in (0, 1/8)");
    if (!(gamma0 > 0.0)) throw std::invalid_argument("gamma0 must be positive");
    if (threshold == ThresholdKind::Deviational) {
        if (!(theta >= 1.0 && theta <= std::exp(1.0) / 2.0))
            throw std::invalid_argument("theta must be in [1, e/2]");
        if (!(threshold_scale > 0.0)) throw std::invalid_argument("threshold scale must be positive");
    }
    if (max_steps < 1) throw std::invalid_argument("max_steps must be positive");
    if (resolve_every < 1) throw std::invalid_argument("resolve_every must be >= 1");
    if (!(oracle_tol > 0.0)) throw std::invalid_argument("oracle tolerance must be positive");
}

AlgState::AlgState(int num_arms)
    : pulls(num_arms, 0),
      reward_sum(num_arms, 0.0),
      cost_sum(num_arms, 0.0),
      mean_hat(num_arms, 0.0),
      cost_hat(num_arms, 0.0),
      target_sum(num_arms, 0.0) {
    if (num_arms < 2) throw std::invalid_argument("need at least two arms");
}

int AlgState::empirical_best() const {
    int best = -1;
    for (int a = 0; a < num_arms(); ++a) {
        if (pulls[a] == 0) continue;
        if (best < 0 || mean_hat[a] > mean_hat[best]) best = a;
    }
    return best;
}

std::vector<double> truncate_costs(const std::vector<double>& c_hat, double delta, double gamma0,
                                   double r_prime) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0, 1)");
    const double threshold = gamma0 * std::pow(std::log(1.0 / delta), -r_prime);
    std::vector<double> out(c_hat.size());
    for (std::size_t i = 0; i < c_hat.size(); ++i) out[i] = c_hat[i] > threshold ? c_hat[i] : 0.0;
    return out;
}

Proportion project_linf(const Proportion& u, double eps) {
    const int k = u.size();
    if (!(eps > 0.0) || eps * k > 1.0 + 1e-12)
        throw std::invalid_argument("project_linf needs 0 < eps <= 1/K");

    bool inside = true;
    for (int a = 0; a < k; ++a)
        if (u[a] < eps) inside = false;
    if (inside) return u;

    // Smallest uniform decrease r with sum_a max(eps, u_a - r) = 1: a
    // waterline over d_a = u_a - eps with budget 1 - K eps.
    const double budget = 1.0 - eps * k;
    std::vector<double> d(k);
    for (int a = 0; a < k; ++a) d[a] = u[a] - eps;
    std::sort(d.begin(), d.end(), std::greater<>());
    double r = d[0];  // fallback: budget == 0
    double cum = 0.0;
    for (int j = 0; j < k; ++j) {
        cum += d[j];
        const double candidate = (cum - budget) / (j + 1);
        if (candidate <= d[j] && (j + 1 == k || candidate >= d[j + 1]) && candidate >= 0.0) {
            r = candidate;
            break;
        }
    }
    std::vector<double> v(k);
    for (int a = 0; a < k; ++a) v[a] = std::max(eps, u[a] - r);
    return Proportion(std::move(v));
}

double glr(const AlgState& state, const RewardFamily& family, int a, int b) {
    if (a == b || a < 0 || b < 0 || a >= state.num_arms() || b >= state.num_arms())
        throw std::invalid_argument("glr needs two distinct arms in range");
    if (state.pulls[a] < 1 || state.pulls[b] < 1)
        throw InsufficientDataError("glr needs at least one pull of each arm");
    if (state.mean_hat[a] < state.mean_hat[b]) return -glr(state, family, b, a);

    const double na = static_cast<double>(state.pulls[a]);
    const double nb = static_cast<double>(state.pulls[b]);
    const double pooled = (na * state.mean_hat[a] + nb * state.mean_hat[b]) / (na + nb);
    return na * divergence(family, state.mean_hat[a], pooled) +
           nb * divergence(family, state.mean_hat[b], pooled);
}

double stopping_threshold(ThresholdKind kind, std::int64_t t, double delta, int num_arms,
                          double theta, double scale) {
    if (t < 1) throw std::invalid_argument("threshold needs t >= 1");
    const double td = static_cast<double>(t);
    if (kind == ThresholdKind::Informational)
        return std::log(2.0 * td * num_arms * (num_arms - 1) / delta);
    return std::log(scale) + theta * std::log(td) - std::log(delta);
}

PartitionId candidate_partition(const AlgState& state, const PairwiseTask& task) {
    for (int a = 0; a < state.num_arms(); ++a)
        if (state.pulls[a] < 1)
            throw InsufficientDataError("candidate partition needs every arm pulled once");
    return classify(task, state.mean_hat, /*tie_break_lowest_index=*/true);
}

// Only the partition consistent with the empirical order can pass all its
// pair tests (thresholds are positive and Z_{a,b} > 0 forces the empirical
// order), so scanning the candidate alone is equivalent to scanning all M
// partitions and avoids the K! enumeration for ranking.
std::optional<PartitionId> check_stop(const AlgState& state, const PairwiseTask& task,
                                      const Config& config, const RewardFamily& family) {
    PartitionId candidate = candidate_partition(state, task);
    const double beta = stopping_threshold(config.threshold, state.t, config.delta,
                                           task.num_arms, config.theta, config.threshold_scale);
    for (const OrderedPair& p : pairs_of(task, candidate)) {
        if (!(glr(state, family, p.better, p.worse) > beta)) return std::nullopt;
    }
    return candidate;
}

namespace {

std::vector<double> compute_u_alpha(const AlgState& state, const PairwiseTask& task,
                                    const Config& config, const RewardFamily& family,
                                    AlgState& diag) {
    const int k = state.num_arms();
    std::vector<double> costs;
    if (config.sampler == SamplerKind::CostUnaware) {
        costs.assign(k, 1.0);
    } else {
        costs = truncate_costs(state.cost_hat, config.delta, config.gamma0, config.r_prime);
    }

    const PartitionId pid = candidate_partition(state, task);
    std::vector<int> zero_support;
    for (int a : support(task, pid))
        if (!(costs[a] > 0.0)) zero_support.push_back(a);

    Proportion u_star;
    try {
        OracleResult solved = solve_optimal(task, family, costs, state.mean_hat, pid,
                                            config.oracle_tol);
        u_star = std::move(solved.u_star);
    } catch (const SolverFailure& failure) {
        ++diag.solver_failures;
        u_star = failure.best.u_star;
    } catch (const InfeasibleTaskError&) {
        // No rule is defined for an infeasible empirical instance (e.g. every
        // truncated cost is zero); take a uniform step and move on.
        ++diag.oracle_fallbacks;
        return std::vector<double>(k, 1.0 / k);
    }
    return mix_alpha(config.alpha(), u_star, zero_support).w;
}

}  // namespace

int next_arm(AlgState& state, const PairwiseTask& task, const Config& config,
             const RewardFamily& family) {
    const int k = state.num_arms();
    const double eps = 0.5 / std::sqrt(static_cast<double>(k) * k + static_cast<double>(state.t));
    state.last_eps = eps;

    // Round-robin initialization: empirical means are undefined until every
    // arm has one pull. Targets accumulate the uniform vector (already inside
    // the eps-simplex) so that sum_a target_a stays equal to t.
    if (state.t < k || config.sampler == SamplerKind::Uniform) {
        for (int a = 0; a < k; ++a) state.target_sum[a] += 1.0 / k;
        state.cached_u_alpha.assign(k, 1.0 / k);
        return static_cast<int>(state.t % k);
    }

    if (state.last_solve_step < 0 || state.t - state.last_solve_step >= config.resolve_every) {
        state.cached_u_alpha = compute_u_alpha(state, task, config, family, state);
        state.last_solve_step = state.t;
    }
    const Proportion projected = project_linf(Proportion(state.cached_u_alpha), eps);

    int arm = 0;
    double best_lag = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < k; ++a) {
        state.target_sum[a] += projected[a];
        const double lag = state.target_sum[a] - static_cast<double>(state.pulls[a]);
        if (lag > best_lag) {
            best_lag = lag;
            arm = a;
        }
    }
    return arm;
}

void update(AlgState& state, int arm, double reward, double cost) {
    if (arm < 0 || arm >= state.num_arms()) throw std::invalid_argument("arm out of range");
    if (!std::isfinite(reward) || !std::isfinite(cost))
        throw InvalidObservationError("non-finite observation");
    state.t += 1;
    state.pulls[arm] += 1;
    state.reward_sum[arm] += reward;
    state.cost_sum[arm] += cost;
    state.mean_hat[arm] = state.reward_sum[arm] / static_cast<double>(state.pulls[arm]);
    state.cost_hat[arm] = state.cost_sum[arm] / static_cast<double>(state.pulls[arm]);
}

void assert_tracking_invariants(const AlgState& state) {
    const int k = state.num_arms();
    const double t = static_cast<double>(state.t);
    const double floor = std::sqrt(t + static_cast<double>(k) * k) - 2.0 * k;
    const double deviation_cap = k * (1.0 + std::sqrt(t)) + 1e-9;

    std::int64_t pull_total = 0;
    double target_total = 0.0;
    for (int a = 0; a < k; ++a) {
        pull_total += state.pulls[a];
        target_total += state.target_sum[a];
        if (state.t >= k && state.pulls[a] < 1)
            throw std::logic_error("arm unpulled after the initialization pass");
        if (static_cast<double>(state.pulls[a]) < floor - 1e-9) {
            std::ostringstream msg;
            msg << "tracking floor violated: N_" << a << "(" << state.t << ") = " << state.pulls[a]
                << " < " << floor;
            throw std::logic_error(msg.str());
        }
        const double dev = std::abs(static_cast<double>(state.pulls[a]) - state.target_sum[a]);
        if (dev > deviation_cap) {
            std::ostringstream msg;
            msg << "tracking deviation violated: arm " << a << " at t = " << state.t << ": " << dev
                << " > " << deviation_cap;
            throw std::logic_error(msg.str());
        }
    }
    if (pull_total != state.t) throw std::logic_error("pull counts do not sum to t");
    if (std::abs(target_total - t) > 1e-9 * std::max(1.0, t))
        throw std::logic_error("tracking targets do not sum to t");
}

namespace {

void emit_trace(std::ostream& out, const AlgState& state, const PairwiseTask& task,
                const Config& config, const RewardFamily& family, int arm) {
    out << "{\"t\":" << state.t << ",\"arm\":" << arm << ",\"eps\":" << state.last_eps
        << ",\"u_alpha\":[";
    for (int a = 0; a < state.num_arms(); ++a) {
        if (a) out << ',';
        out << (state.cached_u_alpha.empty() ? 1.0 / state.num_arms() : state.cached_u_alpha[a]);
    }
    out << "]";
    bool all_pulled = true;
    for (int a = 0; a < state.num_arms(); ++a)
        if (state.pulls[a] < 1) all_pulled = false;
    if (all_pulled) {
        const double beta = stopping_threshold(config.threshold, state.t, config.delta,
                                               task.num_arms, config.theta, config.threshold_scale);
        out << ",\"beta\":" << beta << ",\"z\":[";
        bool first = true;
        for (const OrderedPair& p : pairs_of(task, candidate_partition(state, task))) {
            if (!first) out << ',';
            first = false;
            out << "{\"a\":" << p.better << ",\"b\":" << p.worse
                << ",\"z\":" << glr(state, family, p.better, p.worse) << "}";
        }
        out << "]";
    }
    out << "}\n";
}

}  // namespace

RunResult run(const Instance& instance, const PairwiseTask& task, const Config& config,
              std::uint64_t seed, std::uint64_t run_tag, std::ostream* trace) {
    config.validate();
    instance.validate();
    if (instance.num_arms() != task.num_arms)
        throw std::invalid_argument("instance arm count does not match task");
    if (config.max_steps < task.num_arms)
        throw std::invalid_argument("max_steps must cover the initialization pass");
    if (config.threshold == ThresholdKind::Informational && instance.family.is_gaussian()) {
        static bool warned = false;
        if (!warned) {
            warned = true;
            std::cerr << "warning: informational threshold is only proven for Bernoulli rewards; "
                         "the deviational threshold is the default for Gaussian instances\n";
        }
    }

    const std::vector<double> expected_costs = true_expected_costs(instance);
    const PartitionId truth = classify(task, instance.mu);

    RngStream rng(seed, run_tag);
    AlgState state(task.num_arms);
    RunResult result;

    while (true) {
        if (state.t >= task.num_arms) {
            if (auto decision = check_stop(state, task, config, instance.family)) {
                result.decision = std::move(*decision);
                break;
            }
        }
        if (state.t >= config.max_steps) {
            result.capped = true;
            result.decision = candidate_partition(state, task);
            break;
        }

        const int arm = next_arm(state, task, config, instance.family);
        ObserverState observer{&state.mean_hat, &state.pulls, state.empirical_best()};
        const auto [reward, cost] = sample(instance, arm, rng, &observer);
        update(state, arm, reward, cost);
        if (config.check_invariants) assert_tracking_invariants(state);
        if (trace != nullptr) emit_trace(*trace, state, task, config, instance.family, arm);
    }

    result.tau = state.t;
    result.pulls = state.pulls;
    for (int a = 0; a < task.num_arms; ++a) {
        result.expected_cost += expected_costs[a] * static_cast<double>(state.pulls[a]);
        result.realized_cost += state.cost_sum[a];
    }
    result.correct = result.decision == truth;
    result.oracle_fallbacks = state.oracle_fallbacks;
    result.solver_failures = state.solver_failures;
    return result;
}

}  // namespace caet
