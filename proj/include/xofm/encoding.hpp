#pragma once

#include "xofm/dataset.hpp"
#include "xofm/error.hpp"
#include "xofm/matrix.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace xofm {

/**
 * Equal-width characteristic points for every attribute.
 *
 * Attribute j spans [alphas[j], betas[j]] on the training data and is cut into
 * gammas[j] sub-intervals; its block in the flattened attribute vector starts at
 * offsets[j]. A constant attribute (alpha == beta) always encodes to zeros.
 */
struct discretization {
    std::vector<double> alphas;
    std::vector<double> betas;
    std::vector<int> gammas;
    std::vector<std::vector<double>> points;
    std::vector<std::size_t> offsets;
    std::size_t gamma_total{0};

    [[nodiscard]] std::size_t n_attributes() const noexcept { return gammas.size(); }
    [[nodiscard]] bool is_constant(std::size_t j) const noexcept { return !(betas[j] > alphas[j]); }

    /// Attribute that owns component n of the attribute vector.
    [[nodiscard]] std::size_t attribute_of(std::size_t n) const noexcept {
        std::size_t j = 0;
        while (j + 1 < offsets.size() && offsets[j + 1] <= n) {
            ++j;
        }
        return j;
    }

    friend bool operator==(const discretization&, const discretization&) = default;
};

/// Encoded object: gamma_total components in [0, 1].
using attribute_vector = std::vector<double>;

/// Rebuild the grid from per-attribute ranges (used when loading a model).
inline discretization make_discretization(std::vector<double> alphas, std::vector<double> betas, std::vector<int> gammas) {
    if (alphas.size() != gammas.size() || betas.size() != gammas.size() || gammas.empty()) {
        throw data_error("discretization: alphas, betas and gammas must have the same non-zero length");
    }
    discretization d;
    d.offsets.reserve(gammas.size());
    d.points.reserve(gammas.size());
    for (std::size_t j = 0; j < gammas.size(); ++j) {
        const int g = gammas[j];
        if (g < 1) {
            throw data_error("sub-interval count for attribute " + std::to_string(j + 1) + " must be >= 1");
        }
        if (!std::isfinite(alphas[j]) || !std::isfinite(betas[j]) || betas[j] < alphas[j]) {
            throw data_error("invalid value range for attribute " + std::to_string(j + 1));
        }
        std::vector<double> pts(static_cast<std::size_t>(g) + 1);
        for (int k = 0; k <= g; ++k) {
            pts[static_cast<std::size_t>(k)] = alphas[j] + (static_cast<double>(k) / g) * (betas[j] - alphas[j]);
        }
        pts.front() = alphas[j];
        pts.back() = betas[j];
        d.offsets.push_back(d.gamma_total);
        d.gamma_total += static_cast<std::size_t>(g);
        d.points.push_back(std::move(pts));
    }
    d.alphas = std::move(alphas);
    d.betas = std::move(betas);
    d.gammas = std::move(gammas);
    return d;
}

/// Grid from the training data's per-attribute min/max. A single gamma is applied to every attribute.
inline discretization build_discretization(const dataset& train, std::span<const int> gammas) {
    const std::size_t m = train.n_attributes();
    std::vector<int> g;
    if (gammas.size() == 1) {
        g.assign(m, gammas[0]);
    } else if (gammas.size() == m) {
        g.assign(gammas.begin(), gammas.end());
    } else {
        throw data_error("expected 1 or " + std::to_string(m) + " sub-interval counts, got " +
                         std::to_string(gammas.size()));
    }
    std::vector<double> lo(m), hi(m);
    for (std::size_t j = 0; j < m; ++j) {
        lo[j] = hi[j] = train.value(0, j);
        for (std::size_t i = 1; i < train.size(); ++i) {
            lo[j] = std::min(lo[j], train.value(i, j));
            hi[j] = std::max(hi[j], train.value(i, j));
        }
    }
    return make_discretization(std::move(lo), std::move(hi), std::move(g));
}

inline discretization build_discretization(const dataset& train, int gamma) {
    const int g[1] = {gamma};
    return build_discretization(train, std::span<const int>(g));
}

/// Write the encoding of `x` into `out` (length gamma_total).
inline void encode_into(std::span<const double> x, const discretization& disc, std::span<double> out) {
    if (x.size() != disc.n_attributes()) {
        throw data_error("object has " + std::to_string(x.size()) + " attributes, discretization expects " +
                         std::to_string(disc.n_attributes()));
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double xj = x[j];
        if (std::isnan(xj)) {
            throw data_error("NaN value for attribute " + std::to_string(j + 1));
        }
        const auto& pts = disc.points[j];
        double* block = out.data() + disc.offsets[j];
        const auto g = static_cast<std::size_t>(disc.gammas[j]);
        if (disc.is_constant(j)) {
            std::fill(block, block + g, 0.0);
            continue;
        }
        for (std::size_t k = 1; k <= g; ++k) {
            if (xj > pts[k]) {
                block[k - 1] = 1.0;
            } else if (pts[k - 1] <= xj && xj <= pts[k]) {
                block[k - 1] = (xj - pts[k - 1]) / (pts[k] - pts[k - 1]);
            } else {
                block[k - 1] = 0.0;
            }
        }
    }
}

inline attribute_vector encode(std::span<const double> x, const discretization& disc) {
    attribute_vector phi(disc.gamma_total);
    encode_into(x, disc, phi);
    return phi;
}

/// N x gamma_total matrix whose row i is encode(row i).
inline matrix encode_dataset(const dataset& ds, const discretization& disc) {
    matrix out(ds.size(), disc.gamma_total);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        encode_into(ds.row(i), disc, out.row(i));
    }
    return out;
}

}  // namespace xofm
