#pragma once

#include "xofm/dataset.hpp"
#include "xofm/error.hpp"
#include "xofm/format.hpp"
#include "xofm/inference.hpp"
#include "xofm/random.hpp"
#include "xofm/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <future>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace xofm {

struct metrics {
    double acc{0.0};
    double mae{0.0};
    std::size_t n{0};

    friend bool operator==(const metrics&, const metrics&) = default;
};

namespace detail {

inline void check_label_lengths(std::span<const int> pred, std::span<const int> truth) {
    if (pred.size() != truth.size()) {
        throw data_error("prediction and truth lengths differ (" + std::to_string(pred.size()) + " vs " +
                         std::to_string(truth.size()) + ")");
    }
    if (pred.empty()) {
        throw data_error("no labels to score");
    }
}

}  // namespace detail

/// Fraction of exact label matches.
inline double accuracy(std::span<const int> pred, std::span<const int> truth) {
    detail::check_label_lengths(pred, truth);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        hits += pred[i] == truth[i] ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

/// Mean absolute label distance.
inline double mae(std::span<const int> pred, std::span<const int> truth) {
    detail::check_label_lengths(pred, truth);
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        total += std::abs(pred[i] - truth[i]);
    }
    return total / static_cast<double>(pred.size());
}

inline metrics score_labels(std::span<const int> pred, std::span<const int> truth) {
    return {accuracy(pred, truth), mae(pred, truth), pred.size()};
}

/// Train on `train`, predict `test`, score.
inline metrics evaluate_split(const dataset& train, const dataset& test, const hyperparams& hp) {
    const auto model = xofm::train(train, hp);
    const auto preds = predict_all(test, model);
    std::vector<int> labels;
    labels.reserve(preds.size());
    for (const auto& p : preds) labels.push_back(p.label);
    return score_labels(labels, test.labels());
}

/// Mean validation metrics of one grid point.
struct cv_point {
    hyperparams hp;
    double mean_acc{0.0};
    double mean_mae{0.0};
};

struct cv_result {
    std::size_t best_index{0};
    hyperparams best;
    std::vector<cv_point> points;
};

/**
 * k-fold cross validation over `grid`. The winner has the highest mean validation
 * accuracy; ties go to the lower mean MAE, then to the earlier grid point.
 *
 * `fold_scorer(train, validation, hp) -> metrics` is evaluate_split by default.
 * The training seed for fold f is derived from (seed, f).
 */
template <typename FoldScorer>
cv_result cross_validate(const dataset& ds, const std::vector<hyperparams>& grid, int n_folds, std::uint64_t seed,
                         FoldScorer&& fold_scorer) {
    if (grid.empty()) {
        throw data_error("cross validation needs a non-empty hyperparameter grid");
    }
    const auto folds = kfold(ds, n_folds, seed);
    cv_result res;
    for (const auto& hp : grid) {
        cv_point pt{hp, 0.0, 0.0};
        for (std::size_t f = 0; f < folds.size(); ++f) {
            hyperparams fold_hp = hp;
            fold_hp.seed = derive_seed(seed, {0x6376ULL, f});
            const metrics m = fold_scorer(folds[f].first, folds[f].second, fold_hp);
            pt.mean_acc += m.acc;
            pt.mean_mae += m.mae;
        }
        pt.mean_acc /= static_cast<double>(folds.size());
        pt.mean_mae /= static_cast<double>(folds.size());
        res.points.push_back(std::move(pt));
    }
    for (std::size_t i = 1; i < res.points.size(); ++i) {
        const auto& cur = res.points[i];
        const auto& best = res.points[res.best_index];
        if (cur.mean_acc > best.mean_acc || (cur.mean_acc == best.mean_acc && cur.mean_mae < best.mean_mae)) {
            res.best_index = i;
        }
    }
    res.best = res.points[res.best_index].hp;
    return res;
}

inline cv_result cross_validate(const dataset& ds, const std::vector<hyperparams>& grid, int n_folds = 5,
                                std::uint64_t seed = 0) {
    return cross_validate(ds, grid, n_folds, seed, [](const dataset& tr, const dataset& va, const hyperparams& hp) {
        return evaluate_split(tr, va, hp);
    });
}

/// gamma in {2, 4, 6} x tau in {0.05, 0.1, 0.5}, everything else from `base`.
inline std::vector<hyperparams> default_cv_grid(const hyperparams& base = {}) {
    std::vector<hyperparams> grid;
    for (const int g : {2, 4, 6}) {
        for (const double t : {0.05, 0.1, 0.5}) {
            hyperparams hp = base;
            hp.gammas = {g};
            hp.tau = t;
            grid.push_back(hp);
        }
    }
    return grid;
}

struct trial_summary {
    std::vector<metrics> trials;
    double mean_acc{0.0};
    double std_acc{0.0};
    double mean_mae{0.0};
    double std_mae{0.0};
};

namespace detail {

inline void mean_and_sample_std(const std::vector<double>& xs, double& mean, double& sd) {
    mean = 0.0;
    for (const double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    sd = 0.0;
    if (xs.size() < 2) return;
    for (const double x : xs) sd += (x - mean) * (x - mean);
    sd = std::sqrt(sd / static_cast<double>(xs.size() - 1));
}

}  // namespace detail

inline trial_summary summarize(std::vector<metrics> trials) {
    trial_summary s;
    std::vector<double> accs, maes;
    for (const auto& m : trials) {
        accs.push_back(m.acc);
        maes.push_back(m.mae);
    }
    if (!trials.empty()) {
        detail::mean_and_sample_std(accs, s.mean_acc, s.std_acc);
        detail::mean_and_sample_std(maes, s.mean_mae, s.std_mae);
    }
    s.trials = std::move(trials);
    return s;
}

/// Seed used to train in trial `t`.
inline std::uint64_t trial_training_seed(std::uint64_t seed, int t) {
    return derive_seed(seed, {0x7472ULL, static_cast<std::uint64_t>(t)});
}

/**
 * Repeated random 80/20 evaluation. Each trial draws its split and its training
 * seed from (spec.seed, trial) only, so trials run on up to `threads` workers
 * (0 = hardware concurrency) and the result does not depend on the thread count.
 */
inline trial_summary run_trials(const dataset& ds, const hyperparams& hp, const split_spec& spec, unsigned threads = 1) {
    if (spec.n_trials < 1) {
        throw data_error("need at least one trial");
    }
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    auto one = [&](int t) {
        const auto [train, test] = random_split(ds, spec, t);
        hyperparams trial_hp = hp;
        trial_hp.seed = trial_training_seed(spec.seed, t);
        return evaluate_split(train, test, trial_hp);
    };
    std::vector<metrics> results(static_cast<std::size_t>(spec.n_trials));
    for (int start = 0; start < spec.n_trials; start += static_cast<int>(threads)) {
        const int stop = std::min(spec.n_trials, start + static_cast<int>(threads));
        std::vector<std::future<metrics>> batch;
        for (int t = start; t < stop; ++t) {
            batch.push_back(std::async(threads == 1 ? std::launch::deferred : std::launch::async, one, t));
        }
        for (int t = start; t < stop; ++t) {
            results[static_cast<std::size_t>(t)] = batch[static_cast<std::size_t>(t - start)].get();
        }
    }
    return summarize(std::move(results));
}

/// trial,acc,mae rows (trials numbered from 1) followed by `mean` and `std` rows.
inline void write_trials_csv(std::ostream& out, const trial_summary& s) {
    out << "trial,acc,mae\n";
    for (std::size_t t = 0; t < s.trials.size(); ++t) {
        out << (t + 1) << ',' << format_real(s.trials[t].acc) << ',' << format_real(s.trials[t].mae) << '\n';
    }
    out << "mean," << format_real(s.mean_acc) << ',' << format_real(s.mean_mae) << '\n';
    out << "std," << format_real(s.std_acc) << ',' << format_real(s.std_mae) << '\n';
}

}  // namespace xofm
