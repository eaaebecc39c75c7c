#pragma once
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "caet/oracle.hpp"
#include "caet/sim.hpp"
#include "caet/task.hpp"

namespace caet {

enum class ThresholdKind { Informational, Deviational };
enum class SamplerKind { CAET, Uniform, CostUnaware };

struct Config {
    double delta = 0.1;
    double r = 0.4;         // alpha schedule exponent, in (0, 1/2)
    double r_prime = 0.1;   // truncation exponent, in (0, 1/8)
    double gamma0 = 0.1;    // truncation scale
    ThresholdKind threshold = ThresholdKind::Deviational;
    double theta = 1.2;            // deviational exponent, in [1, e/2]
    double threshold_scale = 1.0;  // the constant C in log(C t^theta / delta)
    SamplerKind sampler = SamplerKind::CAET;
    std::int64_t max_steps = 50'000'000;
    int resolve_every = 1;  // oracle re-solve cadence; 1 = every step
    double oracle_tol = 1e-8;
    bool check_invariants = false;

    // alpha = 1 - log(1/delta)^-r: share of pulls forced onto zero-cost arms.
    double alpha() const;
    void validate() const;
};

// Per-run mutable statistics. target_sum accumulates the projected tracking
// targets sum_s u_alpha^{eps_s}(s); the sampling rule pulls the arm whose
// count lags its target the most.
struct AlgState {
    std::int64_t t = 0;
    std::vector<std::int64_t> pulls;
    std::vector<double> reward_sum;
    std::vector<double> cost_sum;
    std::vector<double> mean_hat;
    std::vector<double> cost_hat;
    std::vector<double> target_sum;

    // cache for resolve_every > 1
    std::vector<double> cached_u_alpha;
    std::int64_t last_solve_step = -1;

    // diagnostics
    std::int64_t oracle_fallbacks = 0;  // infeasible empirical instance -> uniform step
    std::int64_t solver_failures = 0;   // iteration cap hit -> best iterate used
    double last_eps = 0.0;

    explicit AlgState(int num_arms);
    int num_arms() const { return static_cast<int>(pulls.size()); }
    int empirical_best() const;  // argmax mean over pulled arms, -1 if none
};

struct RunResult {
    std::int64_t tau = 0;
    double expected_cost = 0.0;  // sum_a c_a N_a(tau) under true expected costs
    double realized_cost = 0.0;  // sum of observed cost samples
    PartitionId decision;
    bool correct = false;
    bool capped = false;
    std::vector<std::int64_t> pulls;
    std::int64_t oracle_fallbacks = 0;
    std::int64_t solver_failures = 0;
};

// D_delta: zero every entry at or below gamma0 * log(1/delta)^-r'. Negative
// empirical costs fall below the (positive) threshold and are zeroed too.
std::vector<double> truncate_costs(const std::vector<double>& c_hat, double delta, double gamma0,
                                   double r_prime);

// L-infinity projection onto {w in [eps, 1]^K : sum w = 1}.
Proportion project_linf(const Proportion& u, double eps);

// Signed generalized likelihood ratio for "mu_a > mu_b": nonnegative iff
// mean_hat[a] >= mean_hat[b], antisymmetric in (a, b).
double glr(const AlgState& state, const RewardFamily& family, int a, int b);

double stopping_threshold(ThresholdKind kind, std::int64_t t, double delta, int num_arms,
                          double theta = 1.0, double scale = 1.0);

// classify on the empirical means with exact ties broken toward the lower
// arm index. Requires every arm pulled at least once.
PartitionId candidate_partition(const AlgState& state, const PairwiseTask& task);

// The candidate partition if all of its defining pairs clear the threshold.
std::optional<PartitionId> check_stop(const AlgState& state, const PairwiseTask& task,
                                      const Config& config, const RewardFamily& family);

// C-tracking rule: round-robin over the first K steps, then argmax of
// target minus count with lowest-index tie-break. Mutates the tracking
// targets. Uniform sampler round-robins forever; CostUnaware feeds the
// oracle an all-ones cost vector.
int next_arm(AlgState& state, const PairwiseTask& task, const Config& config,
             const RewardFamily& family);

void update(AlgState& state, int arm, double reward, double cost);

// Throws std::logic_error when a tracking invariant fails; used by
// check_invariants runs and tests.
void assert_tracking_invariants(const AlgState& state);

// Full sequential loop: sample -> update -> stop-check until the GLR rule
// fires or max_steps is hit. Deterministic given (config, instance, seed,
// run_tag).
RunResult run(const Instance& instance, const PairwiseTask& task, const Config& config,
              std::uint64_t seed, std::uint64_t run_tag = 0, std::ostream* trace = nullptr);

}  // namespace caet
