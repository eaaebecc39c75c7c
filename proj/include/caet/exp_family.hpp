#pragma once
#include <string>

namespace caet {

// Reward families are parameterized by their mean. Only the two concrete
// families used throughout are supported: Gaussian with known scale sigma,
// and Bernoulli.
struct RewardFamily {
    enum class Kind { Gaussian, Bernoulli };

    Kind kind = Kind::Gaussian;
    double sigma = 1.0;  // Gaussian only

    static RewardFamily gaussian(double sigma = 1.0);
    static RewardFamily bernoulli();

    bool is_gaussian() const { return kind == Kind::Gaussian; }
    std::string name() const;
};

// Empirical Bernoulli means are clamped into [kMeanClamp, 1 - kMeanClamp]
// before divergence evaluation so that early all-zero / all-one samples do
// not produce infinities. The perturbation is below any test tolerance.
inline constexpr double kMeanClamp = 1e-9;

// KL divergence between the two family members with means x and y.
// Gaussian: (x - y)^2 / (2 sigma^2). Bernoulli: kl(x, y).
double divergence(const RewardFamily& family, double x, double y);

// I_alpha(x, y) = alpha d(x, m) + (1 - alpha) d(y, m) with m the weighted
// mean alpha x + (1 - alpha) y, which is the minimizer of the weighted
// divergence over m.
double rate_I(const RewardFamily& family, double alpha, double x, double y);

// Binary relative entropy p log(p/q) + (1-p) log((1-p)/(1-q)), natural log,
// with the convention 0 log 0 = 0. Requires q strictly inside (0, 1).
double binary_kl(double p, double q);

}  // namespace caet
