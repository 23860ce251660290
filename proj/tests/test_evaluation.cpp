#include "support.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace xofm;

namespace {

// Independent loop implementations.
double count_accuracy(const std::vector<int>& p, const std::vector<int>& t) {
    int hit = 0;
    for (std::size_t i = 0; i < p.size(); ++i) hit += p[i] == t[i] ? 1 : 0;
    return static_cast<double>(hit) / static_cast<double>(p.size());
}

double count_mae(const std::vector<int>& p, const std::vector<int>& t) {
    int dev = 0;
    for (std::size_t i = 0; i < p.size(); ++i) dev += p[i] > t[i] ? p[i] - t[i] : t[i] - p[i];
    return static_cast<double>(dev) / static_cast<double>(p.size());
}

hyperparams small_hp() {
    hyperparams hp;
    hp.iters = 10;
    hp.k = 2;
    return hp;
}

}  // namespace

TEST(Metrics, HandExamples) {
    const std::vector<int> truth{1, 2, 3};
    EXPECT_EQ(accuracy(truth, truth), 1.0);
    EXPECT_EQ(mae(truth, truth), 0.0);
    EXPECT_DOUBLE_EQ(accuracy(std::vector<int>{1, 3, 3}, truth), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(mae(std::vector<int>{1, 3, 3}, truth), 1.0 / 3.0);
    EXPECT_EQ(accuracy(std::vector<int>{2, 3, 2}, truth), 0.0);
    EXPECT_EQ(mae(std::vector<int>{2, 3, 2}, truth), 1.0);
}

TEST(Metrics, Errors) {
    EXPECT_THROW(accuracy(std::vector<int>{1}, std::vector<int>{1, 2}), data_error);
    EXPECT_THROW(mae(std::vector<int>{}, std::vector<int>{}), data_error);
}

TEST(Metrics, MatchLoopsAndRanges) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> y(1, 5);
    for (int t = 0; t < 200; ++t) {
        std::vector<int> p(13), q(13);
        for (auto& v : p) v = y(rng);
        for (auto& v : q) v = y(rng);
        const auto m = score_labels(p, q);
        EXPECT_DOUBLE_EQ(m.acc, count_accuracy(p, q));
        EXPECT_DOUBLE_EQ(m.mae, count_mae(p, q));
        EXPECT_GE(m.acc, 0.0);
        EXPECT_LE(m.acc, 1.0);
        EXPECT_GE(m.mae, 0.0);
        EXPECT_LE(m.mae, 4.0);
        EXPECT_EQ(m.acc == 1.0, m.mae == 0.0);
    }
}

TEST(CrossValidate, SingletonGrid) {
    const auto ds = xofm::test::random_dataset(20, 2, 3, 3);
    const auto res = cross_validate(ds, {small_hp()}, 5, 1);
    EXPECT_EQ(res.best_index, 0u);
    EXPECT_TRUE(res.best == small_hp());
    EXPECT_THROW(cross_validate(ds, {}, 5, 1), data_error);
}

TEST(CrossValidate, DominantPointWins) {
    const auto ds = xofm::test::random_dataset(10, 1, 2, 4);
    std::vector<hyperparams> grid(3, small_hp());
    grid[0].tau = 0.1;
    grid[1].tau = 0.2;
    grid[2].tau = 0.3;
    const auto res = cross_validate(ds, grid, 5, 0, [](const dataset&, const dataset&, const hyperparams& hp) {
        return metrics{hp.tau == 0.2 ? 0.9 : 0.4, 0.5, 2};
    });
    EXPECT_EQ(res.best_index, 1u);
    EXPECT_EQ(res.best.tau, 0.2);
    EXPECT_DOUBLE_EQ(res.points[1].mean_acc, 0.9);
}

TEST(CrossValidate, AccuracyTieGoesToLowerMae) {
    const auto ds = xofm::test::random_dataset(10, 1, 2, 5);
    std::vector<hyperparams> grid(3, small_hp());
    grid[0].tau = 0.1;
    grid[1].tau = 0.2;
    grid[2].tau = 0.3;
    const auto res = cross_validate(ds, grid, 5, 0, [](const dataset&, const dataset&, const hyperparams& hp) {
        return metrics{0.5, hp.tau == 0.3 ? 0.25 : 0.75, 2};
    });
    EXPECT_EQ(res.best_index, 2u);
    const auto full_tie = cross_validate(ds, grid, 5, 0, [](const dataset&, const dataset&, const hyperparams&) {
        return metrics{0.5, 0.5, 2};
    });
    EXPECT_EQ(full_tie.best_index, 0u);
}

TEST(CrossValidate, FoldSeedsDependOnFoldOnly) {
    const auto ds = xofm::test::random_dataset(10, 1, 2, 6);
    std::vector<std::uint64_t> seen_a, seen_b;
    auto grid = default_cv_grid(small_hp());
    EXPECT_EQ(grid.size(), 9u);
    cross_validate(ds, {grid[0]}, 5, 9, [&](const dataset&, const dataset&, const hyperparams& hp) {
        seen_a.push_back(hp.seed);
        return metrics{0, 0, 1};
    });
    cross_validate(ds, {grid[4]}, 5, 9, [&](const dataset&, const dataset&, const hyperparams& hp) {
        seen_b.push_back(hp.seed);
        return metrics{0, 0, 1};
    });
    EXPECT_EQ(seen_a, seen_b);
}

TEST(RunTrials, SingleTrialHasZeroSpread) {
    const auto ds = xofm::test::random_dataset(30, 2, 3, 7);
    split_spec spec;
    spec.n_trials = 1;
    const auto s = run_trials(ds, small_hp(), spec);
    ASSERT_EQ(s.trials.size(), 1u);
    EXPECT_EQ(s.mean_acc, s.trials[0].acc);
    EXPECT_EQ(s.mean_mae, s.trials[0].mae);
    EXPECT_EQ(s.std_acc, 0.0);
    EXPECT_EQ(s.std_mae, 0.0);
}

TEST(RunTrials, DeterministicAndThreadIndependent) {
    const auto ds = xofm::test::random_dataset(40, 2, 3, 8);
    split_spec spec;
    spec.n_trials = 6;
    spec.seed = 17;
    const auto a = run_trials(ds, small_hp(), spec, 1);
    const auto b = run_trials(ds, small_hp(), spec, 1);
    const auto c = run_trials(ds, small_hp(), spec, 4);
    std::ostringstream sa, sb, sc;
    write_trials_csv(sa, a);
    write_trials_csv(sb, b);
    write_trials_csv(sc, c);
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_EQ(sa.str(), sc.str());
    EXPECT_EQ(a.trials.size(), 6u);
}

TEST(RunTrials, SampleStandardDeviation) {
    const auto s = summarize({{1.0, 0.0, 5}, {0.5, 1.0, 5}, {0.0, 2.0, 5}});
    EXPECT_DOUBLE_EQ(s.mean_acc, 0.5);
    EXPECT_DOUBLE_EQ(s.std_acc, 0.5);
    EXPECT_DOUBLE_EQ(s.mean_mae, 1.0);
    EXPECT_DOUBLE_EQ(s.std_mae, 1.0);
}

TEST(TrialsCsv, Layout) {
    const auto s = summarize({{1.0, 0.0, 5}, {0.5, 1.0, 5}});
    std::ostringstream out;
    write_trials_csv(out, s);
    EXPECT_EQ(out.str(), "trial,acc,mae\n1,1,0\n2,0.5,1\nmean,0.75,0.5\nstd,0.3535533905932738,0.7071067811865476\n");
}
