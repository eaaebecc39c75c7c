#include <cmath>
#include <sstream>
#include <stdexcept>

#include <doctest.h>

#include "caet/algorithm.hpp"
#include "caet/errors.hpp"
#include "caet/rng.hpp"
#include "test_support.hpp"

using namespace caet;

namespace {

const RewardFamily kUnitGaussian = RewardFamily::gaussian(1.0);

Config reference_config(double delta) {
    Config cfg;
    cfg.delta = delta;
    cfg.r = 0.4;
    cfg.r_prime = 0.1;
    cfg.gamma0 = 0.1;
    cfg.threshold = ThresholdKind::Deviational;
    cfg.theta = 1.2;
    cfg.threshold_scale = 1.0;
    return cfg;
}

Instance gap_ranking_instance() {
    Instance inst;
    inst.mu = {1.4, 0.8, 0.3};
    inst.family = kUnitGaussian;
    inst.cost = CostModel::gap_estimate();
    return inst;
}

}  // namespace

TEST_CASE("truncate_costs") {
    // threshold at gamma0 = 0.1, r' = 0.1, delta = e^-10 is 0.1 * 10^-0.1
    const double delta = std::exp(-10.0);
    const std::vector<double> out = truncate_costs({0.05, 0.5}, delta, 0.1, 0.1);
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 0.5);
    const double threshold = 0.1 * std::pow(10.0, -0.1);
    CHECK(threshold == doctest::Approx(0.07943282347242815).epsilon(1e-12));

    const std::vector<double> identity = truncate_costs({0.2, 0.9}, delta, 0.1, 0.1);
    CHECK(identity == std::vector<double>{0.2, 0.9});

    const std::vector<double> negatives = truncate_costs({-0.3, 0.5}, 0.05, 0.1, 0.1);
    CHECK(negatives[0] == 0.0);
}

TEST_CASE("project_linf worked cases") {
    const Proportion a = project_linf(Proportion({1.0, 0.0}), 0.25);
    CHECK(a[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(a[1] == doctest::Approx(0.25).epsilon(1e-12));

    const Proportion inside = project_linf(Proportion({0.6, 0.4}), 0.25);
    CHECK(inside[0] == 0.6);

    const Proportion b = project_linf(Proportion({1.0, 0.0, 0.0}), 0.1);
    CHECK(b[0] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(b[1] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(b[2] == doctest::Approx(0.1).epsilon(1e-12));

    CHECK_THROWS_AS(project_linf(Proportion({0.5, 0.5}), 0.6), std::invalid_argument);
}

TEST_CASE("project_linf achieves the brute-force optimal distance and stays feasible") {
    RngStream rng(59, 0);
    for (int k = 2; k <= 3; ++k) {
        for (int trial = 0; trial < 25; ++trial) {
            const Proportion u = testing::random_proportion(rng, k);
            const double eps = (0.02 + 0.8 * rng.uniform01()) / k;
            const Proportion v = project_linf(u, eps);
            double sum = 0.0, dist = 0.0;
            for (int a = 0; a < k; ++a) {
                CHECK(v[a] >= eps - 1e-12);
                sum += v[a];
                dist = std::max(dist, std::abs(v[a] - u[a]));
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
            const double brute = testing::linf_projection_distance_bruteforce(u, eps, 800);
            CHECK(dist <= brute + 2e-3);
        }
    }
}

TEST_CASE("glr worked cases and antisymmetry") {
    AlgState st(2);
    update(st, 0, 1.0, 0.0);
    update(st, 1, 0.0, 0.0);
    CHECK(glr(st, kUnitGaussian, 0, 1) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(glr(st, kUnitGaussian, 1, 0) == doctest::Approx(-0.25).epsilon(1e-12));

    AlgState tied(2);
    update(tied, 0, 0.4, 0.0);
    update(tied, 1, 0.4, 0.0);
    CHECK(glr(tied, kUnitGaussian, 0, 1) == 0.0);

    AlgState empty(2);
    update(empty, 0, 1.0, 0.0);
    CHECK_THROWS_AS(glr(empty, kUnitGaussian, 0, 1), InsufficientDataError);

    RngStream rng(61, 0);
    for (int trial = 0; trial < 200; ++trial) {
        AlgState s(3);
        for (int i = 0; i < 30; ++i)
            update(s, static_cast<int>(rng.uniform01() * 3.0), rng.gaussian(0.0, 1.0), 0.0);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                if (a == b || s.pulls[a] == 0 || s.pulls[b] == 0) continue;
                const double z = glr(s, kUnitGaussian, a, b);
                CHECK(z == doctest::Approx(-glr(s, kUnitGaussian, b, a)).epsilon(1e-12));
                CHECK((z >= 0.0) == (s.mean_hat[a] >= s.mean_hat[b]));
            }
    }
}

TEST_CASE("stopping_threshold") {
    CHECK(stopping_threshold(ThresholdKind::Informational, 1, 0.1, 2) ==
          doctest::Approx(3.6888794541139363).epsilon(1e-12));
    CHECK(stopping_threshold(ThresholdKind::Deviational, 10, 0.01, 2, 1.2, 1.0) ==
          doctest::Approx(7.368272297580948).epsilon(1e-12));
    // algebraic identity: log of 1 (delta deliberately out of range)
    CHECK(stopping_threshold(ThresholdKind::Informational, 5, 2.0 * 5 * 2 * 1, 2) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("candidate_partition") {
    const PairwiseTask best3 = make_task(TaskKind::BestArm, 3);
    AlgState st(3);
    update(st, 0, 0.2, 0.0);
    update(st, 1, 0.9, 0.0);
    update(st, 2, 0.5, 0.0);
    CHECK(candidate_partition(st, best3) == PartitionId{{1}});

    const PairwiseTask rank2 = make_task(TaskKind::Ranking, 2);
    AlgState tied(2);
    update(tied, 0, 0.5, 0.0);
    update(tied, 1, 0.5, 0.0);
    CHECK(candidate_partition(tied, rank2) == PartitionId{{0, 1}});

    AlgState partial(2);
    update(partial, 0, 0.5, 0.0);
    CHECK_THROWS_AS(candidate_partition(partial, rank2), InsufficientDataError);
}

TEST_CASE("check_stop follows the GLR-vs-threshold comparison") {
    const PairwiseTask rank2 = make_task(TaskKind::Ranking, 2);
    Config cfg = reference_config(0.1);
    cfg.threshold = ThresholdKind::Informational;  // beta(1, 0.1) = log 40

    AlgState weak(2);
    update(weak, 0, 1.0, 0.0);
    update(weak, 1, 0.0, 0.0);  // Z = 0.25 << log 40
    CHECK_FALSE(check_stop(weak, rank2, cfg, kUnitGaussian).has_value());

    AlgState strong(2);
    for (int i = 0; i < 30; ++i) {
        update(strong, 0, 2.0, 0.0);
        update(strong, 1, 0.0, 0.0);
    }
    // Z = 60 * d(1, ...) is far above beta
    const auto decision = check_stop(strong, rank2, cfg, kUnitGaussian);
    REQUIRE(decision.has_value());
    CHECK(*decision == PartitionId{{0, 1}});

    // conjunction over pairs: one weak pair blocks the stop
    const PairwiseTask rank3 = make_task(TaskKind::Ranking, 3);
    AlgState mixed(3);
    for (int i = 0; i < 30; ++i) {
        update(mixed, 0, 2.0, 0.0);
        update(mixed, 1, 0.0, 0.0);
    }
    update(mixed, 2, -0.01, 0.0);  // pair (1, 2) nearly tied
    CHECK_FALSE(check_stop(mixed, rank3, cfg, kUnitGaussian).has_value());
}

TEST_CASE("update bookkeeping") {
    AlgState st(2);
    update(st, 0, 0.7, 0.2);
    CHECK(st.pulls[0] == 1);
    CHECK(st.mean_hat[0] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(st.cost_hat[0] == doctest::Approx(0.2).epsilon(1e-15));
    update(st, 0, 1.0, 0.0);
    update(st, 0, 0.0, 0.0);
    CHECK(st.mean_hat[0] == doctest::Approx(1.7 / 3.0).epsilon(1e-12));
    CHECK(st.pulls[0] + st.pulls[1] == st.t);
    CHECK_THROWS_AS(update(st, 0, std::nan(""), 0.0), InvalidObservationError);
    CHECK_THROWS_AS(update(st, 5, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("next_arm starts round-robin and breaks ties low") {
    const PairwiseTask best2 = make_task(TaskKind::BestArm, 2);
    Config cfg = reference_config(0.1);
    AlgState st(2);
    CHECK(next_arm(st, best2, cfg, kUnitGaussian) == 0);
    update(st, 0, 1.0, 1.0);
    CHECK(next_arm(st, best2, cfg, kUnitGaussian) == 1);
    update(st, 1, 0.0, 1.0);

    // pin the tracked vector so the two lags tie exactly: lowest index wins
    cfg.resolve_every = 1 << 20;
    st.cached_u_alpha = {0.5, 0.5};
    st.last_solve_step = st.t;
    st.target_sum = {1.0, 1.0};
    CHECK(next_arm(st, best2, cfg, kUnitGaussian) == 0);
}

TEST_CASE("tracking drives the unit-cost two-arm pulls to the half-half optimum") {
    Instance inst;
    inst.mu = {1.0, 0.0};
    inst.family = kUnitGaussian;
    inst.cost = CostModel::deterministic({1.0, 1.0});
    const PairwiseTask best2 = make_task(TaskKind::BestArm, 2);
    Config cfg = reference_config(0.1);
    cfg.max_steps = 4000;
    cfg.threshold_scale = 1e308;  // push the threshold out of reach of this horizon
    cfg.theta = 1.0;
    const RunResult res = run(inst, best2, cfg, 99, 0);
    REQUIRE(res.capped);
    CHECK(std::abs(static_cast<double>(res.pulls[0]) / res.tau - 0.5) < 0.05);
    CHECK(std::abs(static_cast<double>(res.pulls[1]) / res.tau - 0.5) < 0.05);
}

TEST_CASE("run: stops, is delta-sound at a coarse level, and is deterministic") {
    Instance inst;
    inst.mu = {1.0, 0.0};
    inst.family = kUnitGaussian;
    inst.cost = CostModel::deterministic({1.0, 1.0});
    const PairwiseTask best2 = make_task(TaskKind::BestArm, 2);
    const Config cfg = reference_config(0.1);

    int errors = 0;
    for (int i = 0; i < 50; ++i) {
        const RunResult res = run(inst, best2, cfg, 7, i);
        CHECK_FALSE(res.capped);
        CHECK(res.tau >= 2);
        if (!res.correct) ++errors;
    }
    CHECK(errors <= 3);

    const RunResult a = run(inst, best2, cfg, 1234, 5);
    const RunResult b = run(inst, best2, cfg, 1234, 5);
    CHECK(a.tau == b.tau);
    CHECK(a.pulls == b.pulls);
    CHECK(a.expected_cost == b.expected_cost);
    CHECK(a.realized_cost == b.realized_cost);
    CHECK(a.decision == b.decision);
}

TEST_CASE("run caps out under an unreachable threshold") {
    Instance inst;
    inst.mu = {1.0, 0.0};
    inst.family = kUnitGaussian;
    inst.cost = CostModel::deterministic({1.0, 1.0});
    const PairwiseTask best2 = make_task(TaskKind::BestArm, 2);
    Config cfg = reference_config(1e-9);
    cfg.max_steps = 10;
    const RunResult res = run(inst, best2, cfg, 3, 0);
    CHECK(res.capped);
    CHECK(res.tau == 10);
    CHECK(res.decision.arms.size() == 1);
}

TEST_CASE("uniform and cost-unaware samplers also stop") {
    Instance inst = gap_ranking_instance();
    const PairwiseTask rank3 = make_task(TaskKind::Ranking, 3);
    for (SamplerKind sampler : {SamplerKind::Uniform, SamplerKind::CostUnaware}) {
        Config cfg = reference_config(0.1);
        cfg.sampler = sampler;
        cfg.max_steps = 2'000'000;
        const RunResult res = run(inst, rank3, cfg, 17, static_cast<int>(sampler));
        CHECK_FALSE(res.capped);
        CHECK(res.decision.arms.size() == 3);
    }
}

TEST_CASE("bernoulli rewards with the informational threshold") {
    Instance inst;
    inst.mu = {0.8, 0.4};
    inst.family = RewardFamily::bernoulli();
    inst.cost = CostModel::bernoulli({0.5, 0.5});
    const PairwiseTask best2 = make_task(TaskKind::BestArm, 2);
    Config cfg = reference_config(0.1);
    cfg.threshold = ThresholdKind::Informational;
    int errors = 0;
    for (int i = 0; i < 30; ++i) {
        const RunResult res = run(inst, best2, cfg, 57, i);
        CHECK_FALSE(res.capped);
        errors += !res.correct;
    }
    CHECK(errors <= 3);
}

TEST_CASE("oracle re-solve cadence knob keeps runs sound") {
    Instance inst = gap_ranking_instance();
    const PairwiseTask rank3 = make_task(TaskKind::Ranking, 3);
    Config cfg = reference_config(0.05);
    cfg.resolve_every = 10;
    cfg.check_invariants = true;
    int errors = 0;
    for (int i = 0; i < 20; ++i) {
        const RunResult res = run(inst, rank3, cfg, 71, i);
        CHECK_FALSE(res.capped);
        errors += !res.correct;
    }
    CHECK(errors <= 2);
}

TEST_CASE("tracking invariants hold along full runs") {
    Instance inst = gap_ranking_instance();
    const PairwiseTask rank3 = make_task(TaskKind::Ranking, 3);
    Config cfg = reference_config(0.01);
    cfg.check_invariants = true;
    for (int i = 0; i < 5; ++i) {
        CHECK_NOTHROW(run(inst, rank3, cfg, 23, i));
    }
}

TEST_CASE("trace emits one JSON line per step") {
    Instance inst = gap_ranking_instance();
    const PairwiseTask rank3 = make_task(TaskKind::Ranking, 3);
    const Config cfg = reference_config(0.2);
    std::ostringstream trace;
    const RunResult res = run(inst, rank3, cfg, 29, 0, &trace);
    const std::string text = trace.str();
    std::int64_t lines = 0;
    for (char ch : text) lines += ch == '\n';
    CHECK(lines == res.tau);
    CHECK(text.find("\"beta\":") != std::string::npos);
}

TEST_CASE("config validation") {
    Config cfg = reference_config(0.1);
    CHECK_NOTHROW(cfg.validate());
    cfg.r = 0.6;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = reference_config(0.1);
    cfg.r_prime = 0.2;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = reference_config(0.1);
    cfg.theta = 2.0;  // above e/2
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = reference_config(1.5);
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
