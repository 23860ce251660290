#pragma once

#include "xofm/dataset.hpp"
#include "xofm/encoding.hpp"
#include "xofm/error.hpp"
#include "xofm/format.hpp"
#include "xofm/model.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace xofm {

/// Candidate label range [L, R]. `fallback` marks an interval that came out empty (L > R) and was swapped.
struct class_range {
    int L{1};
    int R{1};
    bool fallback{false};

    [[nodiscard]] bool singleton() const noexcept { return L == R; }
    [[nodiscard]] bool contains(int h) const noexcept { return L <= h && h <= R; }
    friend bool operator==(const class_range&, const class_range&) = default;
};

struct prediction {
    int label{0};
    double score{0.0};
    class_range interval;
    /// κ for each class in the interval; empty for singleton intervals.
    std::map<int, double> kappa_values;
};

/**
 * L = max({1} and labels of cached objects scoring <= score),
 * R = min({H} and labels of cached objects scoring >= score).
 * Ties belong to both sets. An empty cache gives [1, H].
 */
inline class_range class_interval(double score, std::span<const scored_label> cache, int n_classes) {
    int lo = 1;
    int hi = n_classes;
    for (const auto& s : cache) {
        if (s.score <= score) lo = std::max(lo, s.label);
        if (s.score >= score) hi = std::min(hi, s.label);
    }
    if (lo > hi) {
        return {hi, lo, true};
    }
    return {lo, hi, false};
}

inline class_range class_interval(double score, const model_params& p) {
    if (p.train_scores.empty()) {
        throw inference_error("model has no cached training scores");
    }
    return class_interval(score, p.train_scores, p.n_classes);
}

/**
 * κ(x -> C_h): training objects of lower classes that x beats by more than tau,
 * plus objects of higher classes that beat x by more than tau, divided by the
 * number of training objects outside class h.
 */
inline double kappa(double score, int h, std::span<const scored_label> cache, double tau) {
    std::size_t card = 0;
    std::size_t denom = 0;
    for (const auto& s : cache) {
        if (s.label == h) continue;
        ++denom;
        if (s.label < h && score - s.score > tau) ++card;
        if (s.label > h && s.score - score > tau) ++card;
    }
    if (denom == 0) {
        throw inference_error("kappa undefined for class " + std::to_string(h) +
                              ": every cached training object belongs to it");
    }
    return static_cast<double>(card) / static_cast<double>(denom);
}

inline double kappa(double score, int h, const model_params& p, double tau) {
    if (h < 1 || h > p.n_classes) {
        throw inference_error("class " + std::to_string(h) + " outside 1.." + std::to_string(p.n_classes));
    }
    return kappa(score, h, p.train_scores, tau);
}

/// Label for a known score: the singleton class, else the class with largest κ (smallest class on ties).
inline prediction predict_score(double score, const model_params& p) {
    prediction out;
    out.score = score;
    out.interval = class_interval(score, p);
    if (out.interval.singleton()) {
        out.label = out.interval.L;
        return out;
    }
    double best = -1.0;
    for (int h = out.interval.L; h <= out.interval.R; ++h) {
        const double kv = kappa(score, h, p, p.tau);
        out.kappa_values[h] = kv;
        if (kv > best) {
            best = kv;
            out.label = h;
        }
    }
    return out;
}

inline prediction predict(std::span<const double> x, const model_params& p) {
    return predict_score(link_score_fast(encode(x, p.disc), p), p);
}

inline std::vector<prediction> predict_all(const dataset& ds, const model_params& p) {
    if (ds.n_attributes() != p.disc.n_attributes()) {
        throw data_error("data has " + std::to_string(ds.n_attributes()) + " attributes, model expects " +
                         std::to_string(p.disc.n_attributes()));
    }
    std::vector<prediction> out;
    out.reserve(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out.push_back(predict(ds.row(i), p));
    }
    return out;
}

/// CSV: row_id, L, R, chosen_label, kappa_1..kappa_H; κ cells are blank where not computed.
inline void write_predictions_csv(std::ostream& out, std::span<const prediction> preds, int n_classes) {
    out << "row_id,L,R,chosen_label";
    for (int h = 1; h <= n_classes; ++h) out << ",kappa_" << h;
    out << '\n';
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const auto& p = preds[i];
        out << (i + 1) << ',' << p.interval.L << ',' << p.interval.R << ',' << p.label;
        for (int h = 1; h <= n_classes; ++h) {
            out << ',';
            if (const auto it = p.kappa_values.find(h); it != p.kappa_values.end()) {
                out << format_real(it->second);
            }
        }
        out << '\n';
    }
}

}  // namespace xofm
