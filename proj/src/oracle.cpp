#include "caet/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "caet/errors.hpp"

namespace caet {

namespace {
constexpr double kSumTol = 1e-12;
constexpr int kMaxIterations = 50000;
constexpr int kStallWindow = 500;
constexpr double kStepScale = 0.5;
}  // namespace

Proportion::Proportion(std::vector<double> weights) : w(std::move(weights)) {
    double sum = 0.0;
    for (double& x : w) {
        if (x < 0.0) {
            if (x < -1e-12) throw std::invalid_argument("proportion entry is negative");
            x = 0.0;
        }
        sum += x;
    }
    if (std::abs(sum - 1.0) > kSumTol) throw std::invalid_argument("proportion does not sum to 1");
}

Proportion Proportion::uniform(int k) {
    std::vector<double> w(k, 1.0 / k);
    w[0] += 1.0 - std::accumulate(w.begin(), w.end(), 0.0);
    return Proportion(std::move(w));
}

Proportion Proportion::indicator(int k, int arm) {
    std::vector<double> w(k, 0.0);
    w.at(arm) = 1.0;
    return Proportion(std::move(w));
}

namespace {

// One defining pair with its cost case resolved. `better`/`worse` follow the
// pair order; for one-sided cases `paid` is the positive-cost arm and
// `d_fixed` the divergence d(mu_paid, mu_other), which no longer depends on w.
struct PairTerm {
    enum class Case { BothPaid, BetterPaid, WorsePaid };
    Case kind;
    int better, worse;
    double mu_better, mu_worse;
    double inv_c_better = 0.0, inv_c_worse = 0.0;
    double d_fixed = 0.0;

    double value(double w_better, double w_worse, const RewardFamily& family) const {
        switch (kind) {
            case Case::BetterPaid:
                return w_better * inv_c_better * d_fixed;
            case Case::WorsePaid:
                return w_worse * inv_c_worse * d_fixed;
            case Case::BothPaid: {
                const double sa = w_better * inv_c_better;
                const double sb = w_worse * inv_c_worse;
                const double total = sa + sb;
                if (total <= 0.0) return 0.0;
                const double m = (sa * mu_better + sb * mu_worse) / total;
                return sa * divergence(family, mu_better, m) +
                       sb * divergence(family, mu_worse, m);
            }
        }
        return 0.0;
    }
};

struct FaceProblem {
    const RewardFamily* family;
    std::vector<int> face;  // positive-cost support arms, ascending
    std::vector<PairTerm> terms;

    int dim() const { return static_cast<int>(face.size()); }

    // w is indexed by global arm; only face coordinates matter.
    double value(const std::vector<double>& w) const {
        double best = std::numeric_limits<double>::infinity();
        for (const PairTerm& t : terms)
            best = std::min(best, t.value(w[t.better], w[t.worse], *family));
        return best;
    }

    // Gradient (w.r.t. global coordinates) of the lowest-index minimizing
    // pair term; a valid supergradient of the min of concave terms.
    void min_term_gradient(const std::vector<double>& w, std::vector<double>& grad) const {
        std::fill(grad.begin(), grad.end(), 0.0);
        double best = std::numeric_limits<double>::infinity();
        const PairTerm* arg = nullptr;
        for (const PairTerm& t : terms) {
            const double v = t.value(w[t.better], w[t.worse], *family);
            if (v < best) {
                best = v;
                arg = &t;
            }
        }
        if (arg == nullptr) return;
        const PairTerm& t = *arg;
        switch (t.kind) {
            case PairTerm::Case::BetterPaid:
                grad[t.better] = t.inv_c_better * t.d_fixed;
                break;
            case PairTerm::Case::WorsePaid:
                grad[t.worse] = t.inv_c_worse * t.d_fixed;
                break;
            case PairTerm::Case::BothPaid: {
                const double sa = w[t.better] * t.inv_c_better;
                const double sb = w[t.worse] * t.inv_c_worse;
                const double total = sa + sb;
                const double m = total > 0.0 ? (sa * t.mu_better + sb * t.mu_worse) / total
                                             : 0.5 * (t.mu_better + t.mu_worse);
                grad[t.better] = t.inv_c_better * divergence(*family, t.mu_better, m);
                grad[t.worse] = t.inv_c_worse * divergence(*family, t.mu_worse, m);
                break;
            }
        }
    }
};

FaceProblem build_face_problem(const PairwiseTask& task, const RewardFamily& family,
                               const std::vector<double>& costs, const std::vector<double>& mu,
                               const PartitionId& pid) {
    if (costs.size() != mu.size() || static_cast<int>(mu.size()) != task.num_arms)
        throw std::invalid_argument("cost/mean vector length does not match task");
    for (double c : costs)
        if (c < 0.0) throw std::invalid_argument("costs must be nonnegative");

    FaceProblem fp;
    fp.family = &family;
    for (int a : support(task, pid))
        if (costs[a] > 0.0) fp.face.push_back(a);

    for (const OrderedPair& p : pairs_of(task, pid)) {
        const bool better_paid = costs[p.better] > 0.0;
        const bool worse_paid = costs[p.worse] > 0.0;
        PairTerm t;
        t.better = p.better;
        t.worse = p.worse;
        t.mu_better = mu[p.better];
        t.mu_worse = mu[p.worse];
        if (better_paid && worse_paid) {
            t.kind = PairTerm::Case::BothPaid;
            t.inv_c_better = 1.0 / costs[p.better];
            t.inv_c_worse = 1.0 / costs[p.worse];
        } else if (better_paid) {
            t.kind = PairTerm::Case::BetterPaid;
            t.inv_c_better = 1.0 / costs[p.better];
            t.d_fixed = divergence(family, mu[p.better], mu[p.worse]);
        } else if (worse_paid) {
            t.kind = PairTerm::Case::WorsePaid;
            t.inv_c_worse = 1.0 / costs[p.worse];
            t.d_fixed = divergence(family, mu[p.worse], mu[p.better]);
        } else {
            throw InfeasibleTaskError(
                "defining pair with both arms at zero cost cannot be resolved by sampling paid arms");
        }
        fp.terms.push_back(t);
    }
    if (fp.face.empty())
        throw InfeasibleTaskError("no positive-cost arm in the task support");
    return fp;
}

// Euclidean projection of the face coordinates of w onto the simplex.
void project_simplex_face(std::vector<double>& w, const std::vector<int>& face) {
    const int d = static_cast<int>(face.size());
    std::vector<double> u(d);
    for (int i = 0; i < d; ++i) u[i] = w[face[i]];
    std::vector<double> sorted = u;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cum = 0.0, theta = 0.0;
    for (int j = 0; j < d; ++j) {
        cum += sorted[j];
        const double candidate = (cum - 1.0) / (j + 1);
        if (sorted[j] - candidate > 0.0) theta = candidate;
    }
    for (int i = 0; i < d; ++i) w[face[i]] = std::max(u[i] - theta, 0.0);
}

OracleResult finish_result(const FaceProblem& fp, const std::vector<double>& costs,
                           std::vector<double> w, int iterations, bool converged) {
    // Tidy float dust so the Proportion invariant holds exactly.
    double sum = 0.0;
    for (int a : fp.face) sum += w[a];
    for (int a : fp.face) w[a] /= sum;

    OracleResult res;
    res.inner_value = fp.value(w);
    res.t_star = res.inner_value > 0.0 ? 1.0 / res.inner_value
                                       : std::numeric_limits<double>::infinity();
    res.iterations = iterations;
    res.converged = converged;
    res.omega_star = Proportion(std::move(w));
    res.u_star = transform_gc(costs, res.omega_star, fp.face);
    return res;
}

OracleResult solve_face_1d(const FaceProblem& fp, const std::vector<double>& costs, int k) {
    std::vector<double> w(k, 0.0);
    w[fp.face[0]] = 1.0;
    return finish_result(fp, costs, std::move(w), 0, true);
}

// Golden-section maximization over the segment between the two face vertices.
// The objective is concave along the face, hence unimodal.
OracleResult solve_face_golden(const FaceProblem& fp, const std::vector<double>& costs, int k) {
    const int a0 = fp.face[0], a1 = fp.face[1];
    std::vector<double> w(k, 0.0);
    auto eval = [&](double x) {
        w[a0] = x;
        w[a1] = 1.0 - x;
        return fp.value(w);
    };
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0, hi = 1.0;
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    double f1 = eval(x1), f2 = eval(x2);
    int evals = 2;
    while (hi - lo > 1e-12) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = eval(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = eval(x1);
        }
        ++evals;
    }
    const double x = 0.5 * (lo + hi);
    w[a0] = x;
    w[a1] = 1.0 - x;
    return finish_result(fp, costs, std::move(w), evals, true);
}

OracleResult solve_face_subgradient(const FaceProblem& fp, const std::vector<double>& costs,
                                    int k, double tol) {
    const int d = fp.dim();
    std::vector<double> w(k, 0.0), grad(k, 0.0);
    for (int a : fp.face) w[a] = 1.0 / d;

    std::vector<double> best_w = w;
    double best_v = fp.value(w);
    double window_best = best_v;
    bool converged = false;
    int iter = 0;
    while (iter < kMaxIterations) {
        ++iter;
        fp.min_term_gradient(w, grad);
        const double step = kStepScale / std::sqrt(static_cast<double>(iter));
        for (int a : fp.face) w[a] += step * grad[a];
        project_simplex_face(w, fp.face);
        const double v = fp.value(w);
        if (v > best_v) {
            best_v = v;
            best_w = w;
        }
        if (iter % kStallWindow == 0) {
            if (best_v - window_best < tol) {
                converged = true;
                break;
            }
            window_best = best_v;
        }
    }
    OracleResult res = finish_result(fp, costs, std::move(best_w), iter, converged);
    if (!converged) throw SolverFailure("subgradient ascent hit the iteration cap", res);
    return res;
}

}  // namespace

double inner_inf(const PairwiseTask& task, const RewardFamily& family,
                 const std::vector<double>& costs, const std::vector<double>& mu,
                 const PartitionId& pid, const Proportion& w) {
    const FaceProblem fp = build_face_problem(task, family, costs, mu, pid);
    if (w.size() != task.num_arms) throw std::invalid_argument("proportion length does not match task");
    return fp.value(w.w);
}

double inner_inf(const PairwiseTask& task, const RewardFamily& family,
                 const std::vector<double>& costs, const std::vector<double>& mu,
                 const Proportion& w) {
    return inner_inf(task, family, costs, mu, classify(task, mu), w);
}

OracleResult solve_optimal(const PairwiseTask& task, const RewardFamily& family,
                           const std::vector<double>& costs, const std::vector<double>& mu,
                           const PartitionId& pid, double tol) {
    const FaceProblem fp = build_face_problem(task, family, costs, mu, pid);
    const int k = task.num_arms;
    switch (fp.dim()) {
        case 1:
            return solve_face_1d(fp, costs, k);
        case 2:
            return solve_face_golden(fp, costs, k);
        default:
            return solve_face_subgradient(fp, costs, k, tol);
    }
}

OracleResult solve_optimal(const PairwiseTask& task, const RewardFamily& family,
                           const std::vector<double>& costs, const std::vector<double>& mu,
                           double tol) {
    return solve_optimal(task, family, costs, mu, classify(task, mu), tol);
}

Proportion transform_gc(const std::vector<double>& costs, const Proportion& omega,
                        const std::vector<int>& support_positive) {
    std::vector<double> out(omega.size(), 0.0);
    double z = 0.0;
    for (int a : support_positive) {
        if (a < 0 || a >= omega.size()) throw std::invalid_argument("support arm out of range");
        if (!(costs[a] > 0.0)) throw std::invalid_argument("transform_gc: zero cost on the positive support");
        out[a] = omega[a] / costs[a];
        z += out[a];
    }
    if (z <= 0.0) throw std::invalid_argument("transform_gc: omega vanishes on the support");
    for (int a : support_positive) out[a] /= z;
    return Proportion(std::move(out));
}

Proportion mix_alpha(double alpha, const Proportion& u_star, const std::vector<int>& zero_support) {
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("mix_alpha: alpha outside [0, 1]");
    if (zero_support.empty()) return u_star;
    std::vector<bool> is_zero(u_star.size(), false);
    for (int a : zero_support) {
        if (a < 0 || a >= u_star.size()) throw std::invalid_argument("zero-support arm out of range");
        if (u_star[a] > 1e-12) throw std::invalid_argument("u_star has mass on a zero-cost arm");
        is_zero[a] = true;
    }
    std::vector<double> out(u_star.size());
    const double uniform_mass = alpha / static_cast<double>(zero_support.size());
    for (int a = 0; a < u_star.size(); ++a)
        out[a] = is_zero[a] ? uniform_mass : (1.0 - alpha) * u_star[a];
    return Proportion(std::move(out));
}

std::pair<Proportion, double> grid_oracle(const PairwiseTask& task, const RewardFamily& family,
                                          const std::vector<double>& costs,
                                          const std::vector<double>& mu, double resolution) {
    if (!(resolution > 0.0 && resolution <= 1.0))
        throw std::invalid_argument("grid resolution must be in (0, 1]");
    const FaceProblem fp = build_face_problem(task, family, costs, mu, classify(task, mu));
    const int d = fp.dim();
    const int k = task.num_arms;
    if (d > 4) throw std::invalid_argument("grid_oracle supports faces of dimension <= 4");

    if (d == 1) {
        std::vector<double> w(k, 0.0);
        w[fp.face[0]] = 1.0;
        const double v = fp.value(w);
        return {Proportion(std::move(w)), v};
    }

    const int steps = std::max(1, static_cast<int>(std::lround(1.0 / resolution)));
    std::vector<int> local(k, -1);
    for (int i = 0; i < d; ++i) local[fp.face[i]] = i;
    const double inv_steps = 1.0 / steps;

    double best_v = -1.0;
    std::array<int, 4> best_k{0, 0, 0, 0};
    std::array<int, 4> kk{0, 0, 0, 0};

    if (d == 2) {
        // Every point of the segment is visited once; evaluate directly.
        std::vector<double> w(k, 0.0);
        for (kk[0] = 0; kk[0] <= steps; ++kk[0]) {
            kk[1] = steps - kk[0];
            w[fp.face[0]] = kk[0] * inv_steps;
            w[fp.face[1]] = kk[1] * inv_steps;
            const double v = fp.value(w);
            if (v > best_v) {
                best_v = v;
                best_k = kk;
            }
        }
        std::vector<double> out(k, 0.0);
        for (int i = 0; i < d; ++i) out[fp.face[i]] = best_k[i] * inv_steps;
        return {Proportion(std::move(out)), best_v};
    }

    // Higher-dimensional faces revisit each pair's coordinates many times;
    // tabulating the terms turns the interior loop into lookups.
    struct Table {
        int ia = -1, ib = -1;  // local face coordinates (ib < 0: 1-D table)
        std::vector<double> v;
    };
    std::vector<Table> tables;
    tables.reserve(fp.terms.size());
    for (const PairTerm& t : fp.terms) {
        Table tab;
        if (t.kind == PairTerm::Case::BothPaid) {
            tab.ia = local[t.better];
            tab.ib = local[t.worse];
            tab.v.resize(static_cast<std::size_t>(steps + 1) * (steps + 1));
            for (int i = 0; i <= steps; ++i)
                for (int j = 0; j <= steps; ++j)
                    tab.v[static_cast<std::size_t>(i) * (steps + 1) + j] =
                        t.value(i * inv_steps, j * inv_steps, family);
        } else {
            const int paid = t.kind == PairTerm::Case::BetterPaid ? t.better : t.worse;
            tab.ia = local[paid];
            tab.v.resize(steps + 1);
            for (int i = 0; i <= steps; ++i)
                tab.v[i] = t.value(i * inv_steps, i * inv_steps, family);
        }
        tables.push_back(std::move(tab));
    }

    auto eval = [&]() {
        double v = std::numeric_limits<double>::infinity();
        for (const Table& tab : tables) {
            const double tv = tab.ib >= 0
                                  ? tab.v[static_cast<std::size_t>(kk[tab.ia]) * (steps + 1) + kk[tab.ib]]
                                  : tab.v[kk[tab.ia]];
            if (tv < v) v = tv;
        }
        if (v > best_v) {
            best_v = v;
            best_k = kk;
        }
    };

    if (d == 3) {
        for (kk[0] = 0; kk[0] <= steps; ++kk[0])
            for (kk[1] = 0; kk[1] <= steps - kk[0]; ++kk[1]) {
                kk[2] = steps - kk[0] - kk[1];
                eval();
            }
    } else {
        for (kk[0] = 0; kk[0] <= steps; ++kk[0])
            for (kk[1] = 0; kk[1] <= steps - kk[0]; ++kk[1])
                for (kk[2] = 0; kk[2] <= steps - kk[0] - kk[1]; ++kk[2]) {
                    kk[3] = steps - kk[0] - kk[1] - kk[2];
                    eval();
                }
    }

    std::vector<double> w(k, 0.0);
    for (int i = 0; i < d; ++i) w[fp.face[i]] = best_k[i] * inv_steps;
    return {Proportion(std::move(w)), best_v};
}

std::pair<Proportion, double> three_arm_closed_form(double delta2, double delta3) {
    if (!(delta2 > 0.0) || !(delta3 > delta2))
        throw std::invalid_argument("three_arm_closed_form requires 0 < delta2 < delta3");
    const double split = 0.5 * (3.0 + std::sqrt(5.0)) * delta2;
    std::vector<double> u(3, 0.0);
    double t_inv;
    if (delta3 <= split) {
        const double s2 = std::sqrt(delta2), s3 = std::sqrt(delta3);
        u[1] = s3 / (s2 + s3);
        u[2] = s2 / (s2 + s3);
        t_inv = (s2 - s3) * (s2 - s3) / 2.0;
    } else {
        const double gap = delta3 - delta2;
        u[1] = (delta3 * delta3 - 2.0 * delta2 * delta3) / (gap * gap);
        u[2] = delta2 * delta2 / (gap * gap);
        t_inv = 0.5 * delta2 * (delta3 - 2.0 * delta2) / gap;
    }
    return {Proportion(std::move(u)), t_inv};
}

double bai_gap_characteristic(const RewardFamily& family, const std::vector<double>& mu) {
    if (mu.size() < 2) throw std::invalid_argument("need at least two arms");
    int best = 0;
    for (int a = 1; a < static_cast<int>(mu.size()); ++a)
        if (mu[a] > mu[best]) best = a;
    double total = 0.0;
    for (int a = 0; a < static_cast<int>(mu.size()); ++a) {
        if (a == best) continue;
        const double gap = mu[best] - mu[a];
        if (gap == 0.0) throw TieError("tied maximum mean");
        if (gap < 1e-9)
            throw std::domain_error("suboptimality gap below 1e-9: characteristic time diverges");
        total += gap / divergence(family, mu[a], mu[best]);
    }
    return total;
}

}  // namespace caet
