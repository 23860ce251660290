#pragma once

// Shared helpers for the unit and acceptance suites: temp files, synthetic data
// and oracles that are deliberately independent of the library's code paths.

#include "xofm/xofm.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace xofm::test {

inline std::filesystem::path breast_csv_path() {
#ifdef XOFM_BREAST_CSV
    return XOFM_BREAST_CSV;
#else
    return "data/breast_tissue.csv";
#endif
}

inline bool have_breast() { return std::filesystem::exists(breast_csv_path()); }

/// Directory removed on destruction.
class temp_dir {
  public:
    temp_dir() {
        static int counter = 0;
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("xofm_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~temp_dir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    temp_dir(const temp_dir&) = delete;
    temp_dir& operator=(const temp_dir&) = delete;

    [[nodiscard]] std::filesystem::path file(const std::string& name) const { return path_ / name; }
    [[nodiscard]] const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_dataset_csv(const std::filesystem::path& p, const dataset& ds) {
    std::ofstream out(p, std::ios::binary);
    for (const auto& n : ds.attr_names()) out << n << ',';
    out << "label\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = 0; j < ds.n_attributes(); ++j) out << format_real(ds.value(i, j)) << ',';
        out << ds.label(i) << '\n';
    }
}

/// Uniform attributes in [0, 10) with labels 1..h drawn uniformly (every class present).
inline dataset random_dataset(std::size_t n, std::size_t m, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> x(0.0, 10.0);
    std::uniform_int_distribution<int> y(1, h);
    matrix obj(n, m);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) obj(i, j) = x(rng);
        labels[i] = i < static_cast<std::size_t>(h) ? static_cast<int>(i) + 1 : y(rng);
    }
    std::vector<std::string> names;
    for (std::size_t j = 0; j < m; ++j) names.push_back("a" + std::to_string(j + 1));
    return dataset(std::move(obj), std::move(labels), std::move(names), h);
}

/**
 * Two attributes in [0, 1], utility x1 + x2, three classes cut at 2/3 and 4/3.
 * Points whose utility lies within `gap` of a cut are rejected, so classes are
 * separated by a clear margin. Classes are drawn in rotation to keep them balanced.
 */
inline dataset separable_dataset(std::size_t n, std::uint64_t seed, double gap = 0.15) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> x(0.0, 1.0);
    matrix obj(n, 2);
    std::vector<int> labels(n);
    const double cuts[2] = {2.0 / 3.0, 4.0 / 3.0};
    for (std::size_t i = 0; i < n; ++i) {
        const int want = static_cast<int>(i % 3) + 1;
        while (true) {
            const double a = x(rng);
            const double b = x(rng);
            const double u = a + b;
            if (std::abs(u - cuts[0]) < gap || std::abs(u - cuts[1]) < gap) continue;
            const int cls = u < cuts[0] ? 1 : (u < cuts[1] ? 2 : 3);
            if (cls != want) continue;
            obj(i, 0) = a;
            obj(i, 1) = b;
            labels[i] = cls;
            break;
        }
    }
    return dataset(std::move(obj), std::move(labels), {"x1", "x2"}, 3);
}

/// Model with random u, V over an arbitrary discretization (scores cache left empty).
inline model_params random_model(const discretization& disc, std::size_t k, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, scale);
    model_params p;
    p.disc = disc;
    p.u.resize(disc.gamma_total);
    for (double& v : p.u) v = nd(rng);
    p.V = matrix(disc.gamma_total, k);
    for (double& v : p.V.data()) v = nd(rng);
    p.tau = 0.1;
    p.n_classes = 2;
    for (std::size_t j = 0; j < disc.n_attributes(); ++j) p.attr_names.push_back("a" + std::to_string(j + 1));
    return p;
}

/// Random attribute vector with the per-block 1..1 f 0..0 shape.
inline std::vector<double> random_phi(const discretization& disc, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<double> x(disc.n_attributes());
    for (std::size_t j = 0; j < x.size(); ++j) {
        x[j] = disc.alphas[j] + u01(rng) * (disc.betas[j] - disc.alphas[j]);
    }
    return encode(x, disc);
}

/// Eq.-by-definition link score in long double: sum_n u_n phi_n + sum_{a<b} <v_a, v_b> phi_a phi_b.
inline long double naive_score_ld(const std::vector<long double>& u, const std::vector<long double>& V, std::size_t k,
                                  std::span<const double> phi) {
    long double s = 0.0L;
    const std::size_t g = u.size();
    for (std::size_t n = 0; n < g; ++n) s += u[n] * phi[n];
    for (std::size_t a = 0; a < g; ++a) {
        for (std::size_t b = a + 1; b < g; ++b) {
            long double dot = 0.0L;
            for (std::size_t f = 0; f < k; ++f) dot += V[a * k + f] * V[b * k + f];
            s += dot * phi[a] * phi[b];
        }
    }
    return s;
}

/// Full regularized pairwise loss in long double, parameters flattened as (u, V row-major).
inline long double naive_loss_ld(const std::vector<long double>& theta, std::size_t g, std::size_t k,
                                 const matrix& encoded, const pair_set& pairs, double tau, double l1, double l2) {
    const std::vector<long double> u(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(g));
    const std::vector<long double> V(theta.begin() + static_cast<std::ptrdiff_t>(g), theta.end());
    long double loss = 0.0L;
    for (const auto& [i, j] : pairs) {
        const long double r = naive_score_ld(u, V, k, encoded.row(j)) - naive_score_ld(u, V, k, encoded.row(i)) + tau;
        if (r > 0.0L) loss += r * r;
    }
    loss *= 0.5L;
    long double nu = 0.0L, nv = 0.0L;
    for (const auto x : u) nu += x * x;
    for (const auto x : V) nv += x * x;
    return loss + l1 * nu + l2 * nv;
}

inline std::vector<long double> flatten_ld(const model_params& p) {
    std::vector<long double> theta(p.u.begin(), p.u.end());
    theta.insert(theta.end(), p.V.data().begin(), p.V.data().end());
    return theta;
}

/// Central differences of naive_loss_ld at step h for every coordinate.
inline std::vector<double> finite_difference_gradient(const model_params& p, const matrix& encoded, const pair_set& pairs,
                                                      double tau, double l1, double l2, double h = 1e-6) {
    auto theta = flatten_ld(p);
    std::vector<double> out(theta.size());
    for (std::size_t q = 0; q < theta.size(); ++q) {
        const long double saved = theta[q];
        theta[q] = saved + h;
        const long double up = naive_loss_ld(theta, p.gamma(), p.k(), encoded, pairs, tau, l1, l2);
        theta[q] = saved - h;
        const long double dn = naive_loss_ld(theta, p.gamma(), p.k(), encoded, pairs, tau, l1, l2);
        theta[q] = saved;
        out[q] = static_cast<double>((up - dn) / (2.0L * h));
    }
    return out;
}

inline std::vector<double> flatten(const gradient& g) {
    std::vector<double> out(g.du.begin(), g.du.end());
    out.insert(out.end(), g.dV.data().begin(), g.dV.data().end());
    return out;
}

inline double relative_error(double a, double b) {
    const double d = std::max(std::abs(a), std::abs(b));
    return d == 0.0 ? 0.0 : std::abs(a - b) / d;
}

}  // namespace xofm::test
