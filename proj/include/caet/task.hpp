#pragma once
#include <cstdint>
#include <vector>

namespace caet {

// Ordered pair (better, worse): "arm `better` has a strictly larger mean
// than arm `worse`". Arm indices are 0-based throughout.
struct OrderedPair {
    int better = 0;
    int worse = 0;
    friend bool operator==(const OrderedPair&, const OrderedPair&) = default;
};

enum class TaskKind { Ranking, BestArm, BestM };

// A pairwise exploration task over K arms. Partitions are kept implicit:
// for ranking there are K! of them, so the task only ever exposes
// classification, the defining pair set of one partition, and its support.
struct PairwiseTask {
    TaskKind kind = TaskKind::BestArm;
    int num_arms = 0;     // K
    int subset_size = 0;  // m, BestM only
};

// One answer to the task.
//   Ranking -> arms listed best-to-worst (a full permutation of 0..K-1)
//   BestArm -> a single arm
//   BestM   -> the top-m arms, sorted ascending
struct PartitionId {
    std::vector<int> arms;
    friend bool operator==(const PartitionId&, const PartitionId&) = default;
};

PairwiseTask make_task(TaskKind kind, int num_arms, int subset_size = 0);

// Number of partitions M (K! / K / C(K, m)).
std::uint64_t partition_count(const PairwiseTask& task);

// Maps a tie-free mean vector to its partition. Throws TieError when two
// relevant means are exactly equal. With tie_break_lowest_index, exact ties
// are resolved in favor of the lower arm index instead.
PartitionId classify(const PairwiseTask& task, const std::vector<double>& mu,
                     bool tie_break_lowest_index = false);

// The defining pair set I_m of a partition: adjacent pairs for ranking,
// (best, other) for best-arm, (in-set, out-set) for best-m.
std::vector<OrderedPair> pairs_of(const PairwiseTask& task, const PartitionId& pid);

// Arms appearing in some defining pair, sorted ascending. For the three
// canonical tasks this is always all of 0..K-1.
std::vector<int> support(const PairwiseTask& task, const PartitionId& pid);

// Membership in Alt(c, mu): lambda differs from mu's partition while agreeing
// with mu on every coordinate outside positive_set. Uses the pair
// decomposition, so the full partition list is never needed.
bool is_alternative(const PairwiseTask& task, const std::vector<double>& mu,
                    const std::vector<double>& lambda, const std::vector<int>& positive_set);

}  // namespace caet
