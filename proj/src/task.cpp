#include "caet/task.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "caet/errors.hpp"

namespace caet {

PairwiseTask make_task(TaskKind kind, int num_arms, int subset_size) {
    if (num_arms < 2) throw std::invalid_argument("task needs at least 2 arms");
    if (kind == TaskKind::BestM) {
        if (subset_size < 1 || subset_size >= num_arms)
            throw std::invalid_argument("best-m requires 1 <= m < K");
    } else if (subset_size != 0) {
        throw std::invalid_argument("subset size is only meaningful for best-m");
    }
    return PairwiseTask{kind, num_arms, subset_size};
}

std::uint64_t partition_count(const PairwiseTask& task) {
    const int k = task.num_arms;
    switch (task.kind) {
        case TaskKind::BestArm:
            return static_cast<std::uint64_t>(k);
        case TaskKind::Ranking: {
            std::uint64_t f = 1;
            for (int i = 2; i <= k; ++i) f *= static_cast<std::uint64_t>(i);
            return f;
        }
        case TaskKind::BestM: {
            std::uint64_t num = 1, den = 1;
            const int m = std::min(task.subset_size, k - task.subset_size);
            for (int i = 0; i < m; ++i) {
                num *= static_cast<std::uint64_t>(k - i);
                den *= static_cast<std::uint64_t>(i + 1);
            }
            return num / den;
        }
    }
    return 0;
}

namespace {

void check_mu_size(const PairwiseTask& task, const std::vector<double>& mu) {
    if (static_cast<int>(mu.size()) != task.num_arms)
        throw std::invalid_argument("mean vector length does not match task");
}

// Arms sorted by descending mean, ties by lower index first.
std::vector<int> descending_order(const std::vector<double>& mu) {
    std::vector<int> order(mu.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return mu[a] > mu[b]; });
    return order;
}

void validate_pid(const PairwiseTask& task, const PartitionId& pid) {
    const int k = task.num_arms;
    auto in_range = [&](int a) { return a >= 0 && a < k; };
    switch (task.kind) {
        case TaskKind::Ranking: {
            if (static_cast<int>(pid.arms.size()) != k)
                throw std::invalid_argument("ranking id must list all arms");
            std::vector<bool> seen(k, false);
            for (int a : pid.arms) {
                if (!in_range(a) || seen[a]) throw std::invalid_argument("ranking id is not a permutation");
                seen[a] = true;
            }
            break;
        }
        case TaskKind::BestArm:
            if (pid.arms.size() != 1 || !in_range(pid.arms[0]))
                throw std::invalid_argument("best-arm id must be a single arm in range");
            break;
        case TaskKind::BestM: {
            if (static_cast<int>(pid.arms.size()) != task.subset_size)
                throw std::invalid_argument("best-m id has wrong size");
            std::set<int> uniq(pid.arms.begin(), pid.arms.end());
            if (static_cast<int>(uniq.size()) != task.subset_size)
                throw std::invalid_argument("best-m id has duplicate arms");
            for (int a : pid.arms)
                if (!in_range(a)) throw std::invalid_argument("best-m id arm out of range");
            break;
        }
    }
}

}  // namespace

PartitionId classify(const PairwiseTask& task, const std::vector<double>& mu,
                     bool tie_break_lowest_index) {
    check_mu_size(task, mu);
    const int k = task.num_arms;
    const std::vector<int> order = descending_order(mu);

    if (!tie_break_lowest_index) {
        // A tie matters whenever it crosses a defining boundary; rejecting any
        // adjacent tie in the sorted order covers all three task kinds.
        for (int i = 0; i + 1 < k; ++i) {
            if (mu[order[i]] == mu[order[i + 1]])
                throw TieError("mean vector has ties; partition is ambiguous");
        }
    }

    switch (task.kind) {
        case TaskKind::Ranking:
            return PartitionId{order};
        case TaskKind::BestArm:
            return PartitionId{{order[0]}};
        case TaskKind::BestM: {
            std::vector<int> top(order.begin(), order.begin() + task.subset_size);
            std::sort(top.begin(), top.end());
            return PartitionId{top};
        }
    }
    throw std::logic_error("unreachable");
}

std::vector<OrderedPair> pairs_of(const PairwiseTask& task, const PartitionId& pid) {
    validate_pid(task, pid);
    const int k = task.num_arms;
    std::vector<OrderedPair> pairs;
    switch (task.kind) {
        case TaskKind::Ranking:
            pairs.reserve(k - 1);
            for (int i = 0; i + 1 < k; ++i) pairs.push_back({pid.arms[i], pid.arms[i + 1]});
            break;
        case TaskKind::BestArm: {
            const int best = pid.arms[0];
            pairs.reserve(k - 1);
            for (int j = 0; j < k; ++j)
                if (j != best) pairs.push_back({best, j});
            break;
        }
        case TaskKind::BestM: {
            std::vector<bool> in_set(k, false);
            for (int a : pid.arms) in_set[a] = true;
            pairs.reserve(static_cast<std::size_t>(task.subset_size) * (k - task.subset_size));
            for (int i : pid.arms)
                for (int j = 0; j < k; ++j)
                    if (!in_set[j]) pairs.push_back({i, j});
            break;
        }
    }
    return pairs;
}

std::vector<int> support(const PairwiseTask& task, const PartitionId& pid) {
    std::set<int> arms;
    for (const OrderedPair& p : pairs_of(task, pid)) {
        arms.insert(p.better);
        arms.insert(p.worse);
    }
    return {arms.begin(), arms.end()};
}

bool is_alternative(const PairwiseTask& task, const std::vector<double>& mu,
                    const std::vector<double>& lambda, const std::vector<int>& positive_set) {
    check_mu_size(task, mu);
    check_mu_size(task, lambda);
    std::vector<bool> free_coord(task.num_arms, false);
    for (int a : positive_set) {
        if (a < 0 || a >= task.num_arms) throw std::invalid_argument("positive_set arm out of range");
        free_coord[a] = true;
    }
    for (int a = 0; a < task.num_arms; ++a)
        if (!free_coord[a] && lambda[a] != mu[a]) return false;

    const PartitionId pid = classify(task, mu);
    for (const OrderedPair& p : pairs_of(task, pid)) {
        if ((lambda[p.better] - lambda[p.worse]) * (mu[p.better] - mu[p.worse]) < 0.0) return true;
    }
    return false;
}

}  // namespace caet
