#include "caet/sim.hpp"

#include <algorithm>
#include <stdexcept>

#include "caet/errors.hpp"

namespace caet {

CostModel CostModel::deterministic(std::vector<double> c) {
    return CostModel{Kind::Deterministic, std::move(c), 0.0};
}
CostModel CostModel::bernoulli(std::vector<double> c) {
    return CostModel{Kind::BernoulliCost, std::move(c), 0.0};
}
CostModel CostModel::gaussian(std::vector<double> c, double sigma_c) {
    if (!(sigma_c > 0.0)) throw std::invalid_argument("gaussian cost noise must be positive");
    return CostModel{Kind::GaussianCost, std::move(c), sigma_c};
}
CostModel CostModel::gap_estimate() { return CostModel{Kind::GapEstimate, {}, 0.0}; }

void Instance::validate() const {
    if (mu.size() < 2) throw std::invalid_argument("instance needs at least two arms");
    if (family.kind == RewardFamily::Kind::Bernoulli) {
        for (double m : mu)
            if (!(m > 0.0 && m < 1.0))
                throw std::invalid_argument("bernoulli means must lie in (0, 1)");
    }
    if (cost.kind != CostModel::Kind::GapEstimate) {
        if (cost.c.size() != mu.size())
            throw std::invalid_argument("cost vector length does not match means");
        for (double c : cost.c)
            if (c < 0.0) throw std::invalid_argument("expected costs must be nonnegative");
        if (cost.kind == CostModel::Kind::BernoulliCost) {
            for (double c : cost.c)
                if (c > 1.0) throw std::invalid_argument("bernoulli cost means must lie in [0, 1]");
        }
    }
}

std::pair<double, double> sample(const Instance& instance, int arm, RngStream& rng,
                                 const ObserverState* observer) {
    if (arm < 0 || arm >= instance.num_arms()) throw std::invalid_argument("arm out of range");

    double reward;
    if (instance.family.kind == RewardFamily::Kind::Gaussian) {
        reward = rng.gaussian(instance.mu[arm], instance.family.sigma);
    } else {
        reward = rng.bernoulli(instance.mu[arm]) ? 1.0 : 0.0;
    }

    double cost = 0.0;
    switch (instance.cost.kind) {
        case CostModel::Kind::Deterministic:
            cost = instance.cost.c[arm];
            break;
        case CostModel::Kind::BernoulliCost:
            cost = rng.bernoulli(instance.cost.c[arm]) ? 1.0 : 0.0;
            break;
        case CostModel::Kind::GaussianCost:
            cost = rng.gaussian(instance.cost.c[arm], instance.cost.sigma_c);
            break;
        case CostModel::Kind::GapEstimate: {
            if (observer == nullptr || observer->mean_hat == nullptr || observer->pulls == nullptr)
                throw std::invalid_argument("gap-estimate costs need observer state");
            // Gap to the empirical best, floored at zero. Until both ends of
            // the gap have been pulled there is no estimate; charge zero.
            const int best = observer->best;
            if (best < 0 || (*observer->pulls)[arm] == 0) {
                cost = 0.0;
            } else if (arm == best) {
                cost = 0.0;
            } else {
                cost = std::max(0.0, (*observer->mean_hat)[best] - (*observer->mean_hat)[arm]);
            }
            break;
        }
    }
    return {reward, cost};
}

std::vector<double> true_gap_costs(const Instance& instance) {
    int best = 0;
    for (int a = 1; a < instance.num_arms(); ++a)
        if (instance.mu[a] > instance.mu[best]) best = a;
    for (int a = 0; a < instance.num_arms(); ++a)
        if (a != best && instance.mu[a] == instance.mu[best])
            throw TieError("tied best arm: gap costs undefined");
    std::vector<double> gaps(instance.num_arms());
    for (int a = 0; a < instance.num_arms(); ++a) gaps[a] = instance.mu[best] - instance.mu[a];
    return gaps;
}

std::vector<double> true_expected_costs(const Instance& instance) {
    if (instance.cost.kind == CostModel::Kind::GapEstimate) return true_gap_costs(instance);
    return instance.cost.c;
}

}  // namespace caet
