#pragma once

#include "xofm/dataset.hpp"
#include "xofm/encoding.hpp"
#include "xofm/error.hpp"
#include "xofm/matrix.hpp"
#include "xofm/model.hpp"
#include "xofm/random.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iostream>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace xofm {

struct hyperparams {
    double tau{0.1};
    double eta{0.01};
    int iters{100};
    double lambda1{0.0};
    double lambda2{0.0};
    int k{5};
    double sigma{0.1};
    std::uint64_t seed{0};
    /// Sub-interval counts: one value for every attribute, or one per attribute.
    std::vector<int> gammas{4};
    /// Per-attribute monotonicity flags; empty means no attribute is constrained.
    std::vector<bool> monotone;

    friend bool operator==(const hyperparams&, const hyperparams&) = default;
};

inline void validate(const hyperparams& hp) {
    if (!(hp.tau > 0.0)) throw training_error("tau must be positive");
    if (!(hp.eta > 0.0)) throw training_error("learning rate must be positive");
    if (hp.iters < 0) throw training_error("iteration count must be non-negative");
    if (hp.lambda1 < 0.0 || hp.lambda2 < 0.0) throw training_error("regularization weights must be non-negative");
    if (hp.k < 1) throw training_error("factor size k must be >= 1");
    if (!(hp.sigma > 0.0)) throw training_error("initialization scale sigma must be positive");
    if (hp.gammas.empty()) throw training_error("no sub-interval counts given");
    for (const int g : hp.gammas) {
        if (g < 1) throw training_error("sub-interval counts must be >= 1");
    }
}

/// Ordered index pairs (i, j) with y_i > y_j.
using pair_set = std::vector<std::pair<std::size_t, std::size_t>>;

inline pair_set make_pairs(std::span<const int> labels) {
    pair_set pairs;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        for (std::size_t j = 0; j < labels.size(); ++j) {
            if (labels[i] > labels[j]) {
                pairs.emplace_back(i, j);
            }
        }
    }
    return pairs;
}

/// Gradient with respect to (u, V), shaped like the parameters.
struct gradient {
    std::vector<double> du;
    matrix dV;

    gradient() = default;
    gradient(std::size_t g, std::size_t k) : du(g, 0.0), dV(g, k) {}
};

/**
 * Half the summed squared hinge over `pairs` plus lambda1 |u|^2 + lambda2 |V|_F^2.
 *
 * A pair (i, j) costs max(0, U(x_j) - U(x_i) + tau)^2. An empty pair set prints a
 * warning and leaves only the penalty.
 */
inline double pairwise_loss(const model_params& p, const pair_set& pairs, const matrix& encoded, const hyperparams& hp) {
    if (pairs.empty()) {
        std::cerr << "warning: pairwise_loss called with an empty pair set\n";
    }
    std::vector<double> scores(encoded.rows());
    for (std::size_t i = 0; i < encoded.rows(); ++i) {
        scores[i] = link_score_fast(encoded.row(i), p);
    }
    double loss = 0.0;
    for (const auto& [i, j] : pairs) {
        const double r = scores[j] - scores[i] + hp.tau;
        if (r > 0.0) {
            loss += r * r;
        }
    }
    loss *= 0.5;
    double nu = 0.0;
    for (const double x : p.u) nu += x * x;
    double nv = 0.0;
    for (const double x : p.V.data()) nv += x * x;
    return loss + hp.lambda1 * nu + hp.lambda2 * nv;
}

namespace detail {

// s[f] = sum_n v_nf phi_n
inline void factor_sums(std::span<const double> phi, const matrix& V, std::span<double> s) {
    std::fill(s.begin(), s.end(), 0.0);
    for (std::size_t n = 0; n < phi.size(); ++n) {
        if (phi[n] == 0.0) continue;
        for (std::size_t f = 0; f < V.cols(); ++f) {
            s[f] += V(n, f) * phi[n];
        }
    }
}

inline double score_from_sums(std::span<const double> phi, const model_params& p, std::span<const double> s) {
    double lin = 0.0;
    double sq = 0.0;
    for (std::size_t n = 0; n < phi.size(); ++n) {
        lin += p.u[n] * phi[n];
        for (std::size_t f = 0; f < p.k(); ++f) {
            const double t = p.V(n, f) * phi[n];
            sq += t * t;
        }
    }
    double ss = 0.0;
    for (const double x : s) ss += x * x;
    return lin + 0.5 * (ss - sq);
}

}  // namespace detail

/**
 * Derivative of one pair's squared hinge, max(0, U(x_j) - U(x_i) + tau)^2, with
 * respect to u and V. Exactly zero when U(x_i) - U(x_j) - tau >= 0.
 *
 * dU(x)/du_n = phi_n and dU(x)/dv_nf = phi_n sum_l v_lf phi_l - v_nf phi_n^2.
 */
inline gradient pair_gradient(const model_params& p, std::size_t i, std::size_t j, const matrix& encoded,
                              const hyperparams& hp) {
    const std::size_t g = p.gamma();
    const std::size_t k = p.k();
    gradient grad(g, k);
    const auto phi_i = encoded.row(i);
    const auto phi_j = encoded.row(j);
    std::vector<double> s_i(k), s_j(k);
    detail::factor_sums(phi_i, p.V, s_i);
    detail::factor_sums(phi_j, p.V, s_j);
    const double u_i = detail::score_from_sums(phi_i, p, s_i);
    const double u_j = detail::score_from_sums(phi_j, p, s_j);
    if (u_i - u_j - hp.tau >= 0.0) {
        return grad;
    }
    const double c = 2.0 * (u_j - u_i + hp.tau);
    for (std::size_t n = 0; n < g; ++n) {
        grad.du[n] = c * (phi_j[n] - phi_i[n]);
        for (std::size_t f = 0; f < k; ++f) {
            const double v = p.V(n, f);
            const double dj = phi_j[n] * s_j[f] - v * phi_j[n] * phi_j[n];
            const double di = phi_i[n] * s_i[f] - v * phi_i[n] * phi_i[n];
            grad.dV(n, f) = c * (dj - di);
        }
    }
    return grad;
}

/// Full-batch gradient of pairwise_loss: half the summed pair gradients plus the penalty terms.
inline gradient loss_gradient(const model_params& p, const pair_set& pairs, const matrix& encoded, const hyperparams& hp) {
    gradient total(p.gamma(), p.k());
    for (const auto& [i, j] : pairs) {
        const auto g = pair_gradient(p, i, j, encoded, hp);
        for (std::size_t n = 0; n < total.du.size(); ++n) total.du[n] += 0.5 * g.du[n];
        for (std::size_t q = 0; q < total.dV.data().size(); ++q) total.dV.data()[q] += 0.5 * g.dV.data()[q];
    }
    for (std::size_t n = 0; n < total.du.size(); ++n) total.du[n] += 2.0 * hp.lambda1 * p.u[n];
    for (std::size_t q = 0; q < total.dV.data().size(); ++q) total.dV.data()[q] += 2.0 * hp.lambda2 * p.V.data()[q];
    return total;
}

/// Euclidean projection onto the non-negative orthant.
inline double project_nonneg(double v) noexcept { return v <= 0.0 ? 0.0 : v; }

/// Scores of every row of `encoded`, paired with `labels`.
inline std::vector<scored_label> score_rows(const model_params& p, const matrix& encoded, std::span<const int> labels) {
    std::vector<scored_label> out;
    out.reserve(encoded.rows());
    for (std::size_t i = 0; i < encoded.rows(); ++i) {
        out.push_back({link_score_fast(encoded.row(i), p), labels[i]});
    }
    return out;
}

namespace detail {

inline constexpr double monotone_init = 0.01;

inline model_params run_sgd(const dataset& train, const hyperparams& hp, const std::vector<bool>& monotone_attr) {
    validate(hp);
    if (train.distinct_labels() < 2) {
        throw training_error("training set has a single class; no ordered pairs to learn from");
    }
    const std::size_t m = train.n_attributes();
    if (!monotone_attr.empty() && monotone_attr.size() != m) {
        throw training_error("monotone flags given for " + std::to_string(monotone_attr.size()) +
                             " attributes, data has " + std::to_string(m));
    }

    model_params p;
    p.disc = build_discretization(train, hp.gammas);
    p.tau = hp.tau;
    p.n_classes = train.n_classes();
    p.attr_names = train.attr_names();

    const std::size_t g = p.disc.gamma_total;
    const auto k = static_cast<std::size_t>(hp.k);
    const matrix encoded = encode_dataset(train, p.disc);
    pair_set pairs = make_pairs(train.labels());

    std::vector<bool> frozen(g, false);
    std::vector<bool> mono(g, false);
    for (std::size_t j = 0; j < m; ++j) {
        for (int q = 0; q < p.disc.gammas[j]; ++q) {
            const std::size_t n = p.disc.offsets[j] + static_cast<std::size_t>(q);
            frozen[n] = p.disc.is_constant(j);
            mono[n] = !monotone_attr.empty() && monotone_attr[j];
        }
    }

    rng_type rng(hp.seed);
    std::normal_distribution<double> init(0.0, hp.sigma);
    p.u.assign(g, 0.0);
    p.V = matrix(g, k);
    for (double& v : p.V.data()) {
        v = init(rng);
    }
    // u for monotone blocks is parameterized as w^2; w is tracked in `w`.
    std::vector<double> w(g, 0.0);
    for (std::size_t n = 0; n < g; ++n) {
        if (frozen[n]) {
            for (std::size_t f = 0; f < k; ++f) p.V(n, f) = 0.0;
            continue;
        }
        if (mono[n]) {
            w[n] = monotone_init;
            p.u[n] = w[n] * w[n];
            for (std::size_t f = 0; f < k; ++f) p.V(n, f) = project_nonneg(p.V(n, f));
        }
    }

    std::vector<double> s_i(k), s_j(k);
    for (int epoch = 0; epoch < hp.iters; ++epoch) {
        std::shuffle(pairs.begin(), pairs.end(), rng);
        for (const auto& [i, j] : pairs) {
            const auto phi_i = encoded.row(i);
            const auto phi_j = encoded.row(j);
            factor_sums(phi_i, p.V, s_i);
            factor_sums(phi_j, p.V, s_j);
            const double r = score_from_sums(phi_j, p, s_j) - score_from_sums(phi_i, p, s_i) + hp.tau;
            const double c = r > 0.0 ? 2.0 * r : 0.0;
            for (std::size_t n = 0; n < g; ++n) {
                if (frozen[n]) continue;
                const double gu = c * (phi_j[n] - phi_i[n]);
                if (mono[n]) {
                    w[n] -= hp.eta * (2.0 * w[n] * (gu + 2.0 * hp.lambda1 * p.u[n]));
                    p.u[n] = w[n] * w[n];
                } else {
                    p.u[n] -= hp.eta * (gu + 2.0 * hp.lambda1 * p.u[n]);
                }
                for (std::size_t f = 0; f < k; ++f) {
                    double& v = p.V(n, f);
                    double gv = 0.0;
                    if (c != 0.0) {
                        const double dj = phi_j[n] * s_j[f] - v * phi_j[n] * phi_j[n];
                        const double di = phi_i[n] * s_i[f] - v * phi_i[n] * phi_i[n];
                        gv = c * (dj - di);
                    }
                    v -= hp.eta * (gv + 2.0 * hp.lambda2 * v);
                    if (mono[n]) v = project_nonneg(v);
                }
            }
        }
    }
    p.train_scores = score_rows(p, encoded, train.labels());
    return p;
}

}  // namespace detail

/// Plain SGD over all ordered pairs; monotonicity flags in `hp` are ignored.
inline model_params train_sgd(const dataset& train, const hyperparams& hp) {
    return detail::run_sgd(train, hp, {});
}

/**
 * SGD with monotonicity constraints on the attributes flagged in hp.monotone:
 * their increments are learned as squares (so u >= 0) and their factor rows are
 * projected onto v >= 0 after every update.
 */
inline model_params train_monotone(const dataset& train, const hyperparams& hp) {
    return detail::run_sgd(train, hp, hp.monotone);
}

/// Dispatches to train_monotone when any attribute is flagged.
inline model_params train(const dataset& train_set, const hyperparams& hp) {
    const bool any = std::find(hp.monotone.begin(), hp.monotone.end(), true) != hp.monotone.end();
    return any ? train_monotone(train_set, hp) : train_sgd(train_set, hp);
}

/// pairwise_loss of `p` over all ordered pairs of `ds`.
inline double training_loss(const model_params& p, const dataset& ds, const hyperparams& hp) {
    const auto encoded = encode_dataset(ds, p.disc);
    return pairwise_loss(p, make_pairs(ds.labels()), encoded, hp);
}

}  // namespace xofm
