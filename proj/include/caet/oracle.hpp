#pragma once
#include <stdexcept>
#include <utility>
#include <vector>

#include "caet/exp_family.hpp"
#include "caet/task.hpp"

namespace caet {

// A point on the K-simplex. Entries are nonnegative and sum to 1 within
// 1e-12 (checked on construction).
struct Proportion {
    std::vector<double> w;

    Proportion() = default;
    explicit Proportion(std::vector<double> weights);

    static Proportion uniform(int k);
    static Proportion indicator(int k, int arm);

    int size() const { return static_cast<int>(w.size()); }
    double operator[](int a) const { return w[a]; }
};

struct OracleResult {
    Proportion omega_star;  // maximizer of the inner infimum over the support face
    Proportion u_star;      // G_c(omega_star): the actual pulling proportion
    double t_star = 0.0;    // characteristic time, 1 / inner_value
    double inner_value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Raised when the iteration cap is reached before the convergence window is
// satisfied; `best` carries the best iterate found.
struct SolverFailure : std::runtime_error {
    OracleResult best;
    SolverFailure(const std::string& what, OracleResult result)
        : std::runtime_error(what), best(std::move(result)) {}
};

// inf over Alt(c, mu) of sum_a w_a d(mu_a, lambda_a) / c_a, evaluated via the
// pair decomposition: a minimum over the defining pairs of the partition of
// mu, with the case formula picked by which side of the pair carries cost.
// Throws InfeasibleTaskError when a defining pair has both arms at zero cost.
double inner_inf(const PairwiseTask& task, const RewardFamily& family,
                 const std::vector<double>& costs, const std::vector<double>& mu,
                 const Proportion& w);

// Same with an explicit partition id (skips classification; used online where
// empirical means may tie and the caller already broke the tie).
double inner_inf(const PairwiseTask& task, const RewardFamily& family,
                 const std::vector<double>& costs, const std::vector<double>& mu,
                 const PartitionId& pid, const Proportion& w);

// Maximizes inner_inf over the simplex face supported on the positive-cost
// support arms. Degenerate faces take exact paths (single point / 1-D golden
// section); otherwise projected subgradient ascent.
OracleResult solve_optimal(const PairwiseTask& task, const RewardFamily& family,
                           const std::vector<double>& costs, const std::vector<double>& mu,
                           double tol = 1e-8);
OracleResult solve_optimal(const PairwiseTask& task, const RewardFamily& family,
                           const std::vector<double>& costs, const std::vector<double>& mu,
                           const PartitionId& pid, double tol);

// G_c: rescale omega by 1/c on the positive support and renormalize;
// zero off the support.
Proportion transform_gc(const std::vector<double>& costs, const Proportion& omega,
                        const std::vector<int>& support_positive);

// u_alpha: mass alpha spread uniformly over the zero-cost support arms plus
// (1 - alpha) u_star on the rest. With no zero-cost arms, u_star unchanged.
Proportion mix_alpha(double alpha, const Proportion& u_star,
                     const std::vector<int>& zero_support);

// Brute-force validator: the best grid point of the support face at the given
// spacing. Supports faces of dimension <= 4.
std::pair<Proportion, double> grid_oracle(const PairwiseTask& task, const RewardFamily& family,
                                          const std::vector<double>& costs,
                                          const std::vector<double>& mu, double resolution);

// Closed form for the 3-arm unit-Gaussian ranking task with gap costs
// (0, delta2, delta3), 0 < delta2 < delta3. Returns (u_star, 1 / T*).
std::pair<Proportion, double> three_arm_closed_form(double delta2, double delta3);

// T*(Delta, mu) = sum over suboptimal arms of Delta_a / d(mu_a, mu_best) for
// the best-arm task under gap costs. Throws TieError on a tied maximum and
// domain_error when a positive gap is below 1e-9 (the sum diverges).
double bai_gap_characteristic(const RewardFamily& family, const std::vector<double>& mu);

}  // namespace caet
