#pragma once

#include "xofm/encoding.hpp"
#include "xofm/error.hpp"
#include "xofm/matrix.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace xofm {

/// Score of one training object together with its label.
struct scored_label {
    double score{0.0};
    int label{0};
    friend bool operator==(const scored_label&, const scored_label&) = default;
};

/**
 * Parameters of the factorized link function.
 *
 * `u` holds the per-sub-interval score increments (one per attribute-vector
 * component) and `V` (gamma_total x k) the factor vectors whose pairwise dot
 * products weight the interactions. `train_scores` is the score cache that
 * class intervals are derived from; it is filled by training.
 */
struct model_params {
    discretization disc;
    std::vector<double> u;
    matrix V;
    double tau{0.1};
    int n_classes{0};
    std::vector<std::string> attr_names;
    std::vector<scored_label> train_scores;

    [[nodiscard]] std::size_t gamma() const noexcept { return u.size(); }
    [[nodiscard]] std::size_t k() const noexcept { return V.cols(); }

    friend bool operator==(const model_params&, const model_params&) = default;
};

namespace detail {

inline void check_dims(std::span<const double> phi, const model_params& p) {
    if (phi.size() != p.u.size() || p.V.rows() != p.u.size()) {
        throw data_error("dimension mismatch: attribute vector has " + std::to_string(phi.size()) +
                         " components, model expects " + std::to_string(p.u.size()));
    }
}

}  // namespace detail

/// Link score by its definition: linear term plus every pairwise interaction, O(gamma^2 k).
inline double link_score(std::span<const double> phi, const model_params& p) {
    detail::check_dims(phi, p);
    const std::size_t g = phi.size();
    double s = 0.0;
    for (std::size_t n = 0; n < g; ++n) {
        s += p.u[n] * phi[n];
    }
    for (std::size_t a = 0; a < g; ++a) {
        if (phi[a] == 0.0) {
            continue;
        }
        for (std::size_t b = a + 1; b < g; ++b) {
            double dot = 0.0;
            for (std::size_t f = 0; f < p.k(); ++f) {
                dot += p.V(a, f) * p.V(b, f);
            }
            s += dot * phi[a] * phi[b];
        }
    }
    return s;
}

/// Same value as link_score in O(gamma k): 1/2 sum_f [(sum_n v_nf phi_n)^2 - sum_n v_nf^2 phi_n^2].
inline double link_score_fast(std::span<const double> phi, const model_params& p) {
    detail::check_dims(phi, p);
    double linear = 0.0;
    for (std::size_t n = 0; n < phi.size(); ++n) {
        linear += p.u[n] * phi[n];
    }
    double inter = 0.0;
    for (std::size_t f = 0; f < p.k(); ++f) {
        double sum = 0.0;
        double sq = 0.0;
        for (std::size_t n = 0; n < phi.size(); ++n) {
            const double t = p.V(n, f) * phi[n];
            sum += t;
            sq += t * t;
        }
        inter += sum * sum - sq;
    }
    return linear + 0.5 * inter;
}

inline constexpr const char* model_format_version = "1";

inline nlohmann::json model_to_json(const model_params& p) {
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& s : p.train_scores) {
        scores.push_back(s.score);
        labels.push_back(s.label);
    }
    nlohmann::json j;
    j["version"] = model_format_version;
    j["k"] = p.k();
    j["tau"] = p.tau;
    j["n_classes"] = p.n_classes;
    j["gammas"] = p.disc.gammas;
    j["alphas"] = p.disc.alphas;
    j["betas"] = p.disc.betas;
    j["u"] = p.u;
    j["V"] = p.V.data();
    j["train_scores"] = scores;
    j["train_labels"] = labels;
    j["attr_names"] = p.attr_names;
    return j;
}

namespace detail {

inline const nlohmann::json& require_key(const nlohmann::json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) {
        throw format_error(std::string{"model file: missing `"} + key + "` section");
    }
    return *it;
}

}  // namespace detail

inline model_params model_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw format_error("model file: top level must be an object");
    }
    const auto& ver = detail::require_key(j, "version");
    const std::string version = ver.is_string() ? ver.get<std::string>() : ver.dump();
    if (version != model_format_version) {
        throw format_error("model file: unsupported version '" + version + "' (supported: " + model_format_version + ")");
    }
    try {
        model_params p;
        const auto k = detail::require_key(j, "k").get<std::size_t>();
        p.tau = detail::require_key(j, "tau").get<double>();
        p.n_classes = detail::require_key(j, "n_classes").get<int>();
        p.disc = make_discretization(detail::require_key(j, "alphas").get<std::vector<double>>(),
                                     detail::require_key(j, "betas").get<std::vector<double>>(),
                                     detail::require_key(j, "gammas").get<std::vector<int>>());
        p.u = detail::require_key(j, "u").get<std::vector<double>>();
        auto v = detail::require_key(j, "V").get<std::vector<double>>();
        const auto scores = detail::require_key(j, "train_scores").get<std::vector<double>>();
        const auto labels = detail::require_key(j, "train_labels").get<std::vector<int>>();
        p.attr_names = detail::require_key(j, "attr_names").get<std::vector<std::string>>();

        if (k < 1) {
            throw format_error("model file: k must be >= 1");
        }
        if (!(p.tau > 0.0)) {
            throw format_error("model file: tau must be positive");
        }
        if (p.u.size() != p.disc.gamma_total) {
            throw format_error("model file: `u` has " + std::to_string(p.u.size()) + " entries, expected " +
                               std::to_string(p.disc.gamma_total));
        }
        if (v.size() != p.disc.gamma_total * k) {
            throw format_error("model file: `V` has " + std::to_string(v.size()) + " entries, expected " +
                               std::to_string(p.disc.gamma_total * k));
        }
        if (scores.size() != labels.size()) {
            throw format_error("model file: `train_scores` and `train_labels` differ in length");
        }
        if (p.attr_names.size() != p.disc.n_attributes()) {
            throw format_error("model file: `attr_names` length does not match attribute count");
        }
        p.V = matrix(p.disc.gamma_total, k, std::move(v));
        for (std::size_t i = 0; i < scores.size(); ++i) {
            p.train_scores.push_back({scores[i], labels[i]});
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw format_error(std::string{"model file: malformed document: "} + e.what());
    } catch (const data_error& e) {
        throw format_error(std::string{"model file: "} + e.what());
    }
}

inline void save_model(const model_params& p, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw error("cannot write model file '" + path.string() + "'");
    }
    out << model_to_json(p).dump(2) << '\n';
    if (!out) {
        throw error("failed writing model file '" + path.string() + "'");
    }
}

inline model_params load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw format_error("cannot open model file '" + path.string() + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw format_error(std::string{"model file: malformed document: "} + e.what());
    }
    return model_from_json(j);
}

}  // namespace xofm
