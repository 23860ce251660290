// Train on a small synthetic ordinal problem, classify a few objects and print
// the learned score functions.

#include "xofm/xofm.hpp"

#include <iostream>
#include <random>

int main() {
    // Two attributes in [0, 1]; the class grows with x1 + 2 * x2.
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const std::size_t n = 90;
    xofm::matrix objects(n, 2);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        objects(i, 0) = u01(rng);
        objects(i, 1) = u01(rng);
        const double utility = objects(i, 0) + 2.0 * objects(i, 1);
        labels[i] = utility < 1.0 ? 1 : (utility < 2.0 ? 2 : 3);
    }
    const xofm::dataset ds(objects, labels, {"x1", "x2"}, 3);

    xofm::split_spec spec;
    spec.seed = 3;
    const auto [train, test] = xofm::random_split(ds, spec, 0);

    xofm::hyperparams hp;
    hp.iters = 200;
    const auto model = xofm::train(train, hp);
    std::cout << "training loss " << xofm::training_loss(model, train, hp) << '\n';

    std::vector<int> predicted;
    for (std::size_t i = 0; i < test.size(); ++i) {
        const auto p = xofm::predict(test.row(i), model);
        predicted.push_back(p.label);
        if (i < 5) {
            std::cout << "object " << i << ": interval [" << p.interval.L << ',' << p.interval.R << "] -> class "
                      << p.label << " (truth " << test.label(i) << ")\n";
        }
    }
    const auto m = xofm::score_labels(predicted, test.labels());
    std::cout << "test accuracy " << m.acc << ", mae " << m.mae << '\n';

    for (std::size_t j = 0; j < 2; ++j) {
        const auto t = xofm::score_function(model, j);
        std::cout << t.attribute << " (importance " << t.importance << "):";
        for (std::size_t q = 0; q < t.scores.size(); ++q) {
            std::cout << ' ' << t.breakpoints[q] << "->" << t.scores[q];
        }
        std::cout << '\n';
    }
}
