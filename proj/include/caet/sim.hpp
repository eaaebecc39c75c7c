#pragma once
#include <utility>
#include <vector>

#include "caet/exp_family.hpp"
#include "caet/rng.hpp"

namespace caet {

struct CostModel {
    enum class Kind { Deterministic, BernoulliCost, GaussianCost, GapEstimate };

    Kind kind = Kind::Deterministic;
    std::vector<double> c;  // expected costs; unused for GapEstimate
    double sigma_c = 0.0;   // GaussianCost only

    static CostModel deterministic(std::vector<double> c);
    static CostModel bernoulli(std::vector<double> c);
    static CostModel gaussian(std::vector<double> c, double sigma_c);
    static CostModel gap_estimate();
};

// Ground truth for a simulated bandit: true means, reward family, cost model.
struct Instance {
    std::vector<double> mu;
    RewardFamily family;
    CostModel cost;

    int num_arms() const { return static_cast<int>(mu.size()); }
    void validate() const;
};

// What the gap-estimate cost scheme sees at sampling time: the caller's
// current empirical means and its empirical-best arm (-1 before any pull).
struct ObserverState {
    const std::vector<double>* mean_hat = nullptr;
    const std::vector<long>* pulls = nullptr;
    int best = -1;
};

// Draws one (reward, cost) observation for a pull of `arm`. GapEstimate
// requires observer state and charges max(0, mu_hat_best - mu_hat_arm).
std::pair<double, double> sample(const Instance& instance, int arm, RngStream& rng,
                                 const ObserverState* observer = nullptr);

// Gap vector (0 at the unique best arm, mu_best - mu_a elsewhere).
std::vector<double> true_gap_costs(const Instance& instance);

// Expected cost per pull in the long run: the model's c, or the true gaps
// for the gap-estimate scheme.
std::vector<double> true_expected_costs(const Instance& instance);

}  // namespace caet
