#include "caet/exp_family.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace caet {

RewardFamily RewardFamily::gaussian(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian sigma must be positive");
    return RewardFamily{Kind::Gaussian, sigma};
}

RewardFamily RewardFamily::bernoulli() { return RewardFamily{Kind::Bernoulli, 0.0}; }

std::string RewardFamily::name() const {
    return kind == Kind::Gaussian ? "gaussian" : "bernoulli";
}

namespace {

double bernoulli_kl(double x, double y) {
    if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0)
        throw std::invalid_argument("bernoulli mean outside [0, 1]");
    x = std::clamp(x, kMeanClamp, 1.0 - kMeanClamp);
    y = std::clamp(y, kMeanClamp, 1.0 - kMeanClamp);
    return x * std::log(x / y) + (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
}

}  // namespace

double divergence(const RewardFamily& family, double x, double y) {
    if (family.kind == RewardFamily::Kind::Gaussian) {
        const double diff = x - y;
        return diff * diff / (2.0 * family.sigma * family.sigma);
    }
    return bernoulli_kl(x, y);
}

double rate_I(const RewardFamily& family, double alpha, double x, double y) {
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("rate_I: alpha outside [0, 1]");
    if (alpha == 0.0 || alpha == 1.0) return 0.0;
    const double m = alpha * x + (1.0 - alpha) * y;
    return alpha * divergence(family, x, m) + (1.0 - alpha) * divergence(family, y, m);
}

double binary_kl(double p, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("binary_kl: q must be in (0, 1)");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("binary_kl: p must be in [0, 1]");
    double value = 0.0;
    if (p > 0.0) value += p * std::log(p / q);
    if (p < 1.0) value += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
    return value;
}

}  // namespace caet
