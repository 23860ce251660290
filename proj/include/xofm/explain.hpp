#pragma once

#include "xofm/error.hpp"
#include "xofm/format.hpp"
#include "xofm/matrix.hpp"
#include "xofm/model.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace xofm {

/// Piecewise-linear score function of one attribute, anchored at 0 on its lowest breakpoint.
struct score_function_table {
    std::string attribute;
    std::vector<double> breakpoints;
    std::vector<double> scores;
    /// max(scores) - min(scores)
    double importance{0.0};

    friend bool operator==(const score_function_table&, const score_function_table&) = default;
};

/// Cell (n1, n2) is the factor dot product between sub-interval n1 of attr1 and n2 of attr2.
struct interaction_matrix_t {
    std::size_t attr1{0};
    std::size_t attr2{0};
    std::string name1;
    std::string name2;
    matrix grid;

    friend bool operator==(const interaction_matrix_t&, const interaction_matrix_t&) = default;
};

struct explanation_report {
    std::vector<score_function_table> score_functions;
    std::vector<interaction_matrix_t> interactions;

    friend bool operator==(const explanation_report&, const explanation_report&) = default;
};

inline std::size_t attribute_index(const model_params& p, const std::string& name) {
    const auto it = std::find(p.attr_names.begin(), p.attr_names.end(), name);
    if (it == p.attr_names.end()) {
        throw data_error("unknown attribute '" + name + "'");
    }
    return static_cast<std::size_t>(it - p.attr_names.begin());
}

inline score_function_table score_function(const model_params& p, std::size_t j) {
    if (j >= p.disc.n_attributes()) {
        throw data_error("attribute index " + std::to_string(j) + " out of range");
    }
    score_function_table t;
    t.attribute = j < p.attr_names.size() ? p.attr_names[j] : std::to_string(j);
    t.breakpoints = p.disc.points[j];
    t.scores.reserve(t.breakpoints.size());
    double acc = 0.0;
    t.scores.push_back(acc);
    for (int q = 0; q < p.disc.gammas[j]; ++q) {
        acc += p.u[p.disc.offsets[j] + static_cast<std::size_t>(q)];
        t.scores.push_back(acc);
    }
    const auto [lo, hi] = std::minmax_element(t.scores.begin(), t.scores.end());
    t.importance = *hi - *lo;
    return t;
}

/// Linear interpolation of the table at x, constant beyond the end breakpoints.
inline double evaluate(const score_function_table& t, double x) {
    const auto& b = t.breakpoints;
    if (x <= b.front()) return t.scores.front();
    if (x >= b.back()) return t.scores.back();
    const auto it = std::upper_bound(b.begin(), b.end(), x);
    const auto k = static_cast<std::size_t>(it - b.begin());
    const double w = (x - b[k - 1]) / (b[k] - b[k - 1]);
    return t.scores[k - 1] + w * (t.scores[k] - t.scores[k - 1]);
}

inline interaction_matrix_t interaction_matrix(const model_params& p, std::size_t j1, std::size_t j2) {
    const std::size_t m = p.disc.n_attributes();
    if (j1 >= m || j2 >= m) {
        throw data_error("attribute index out of range");
    }
    if (j1 == j2) {
        throw data_error("interaction matrix needs two distinct attributes");
    }
    interaction_matrix_t out;
    out.attr1 = j1;
    out.attr2 = j2;
    out.name1 = p.attr_names.at(j1);
    out.name2 = p.attr_names.at(j2);
    const auto g1 = static_cast<std::size_t>(p.disc.gammas[j1]);
    const auto g2 = static_cast<std::size_t>(p.disc.gammas[j2]);
    out.grid = matrix(g1, g2);
    for (std::size_t a = 0; a < g1; ++a) {
        for (std::size_t b = 0; b < g2; ++b) {
            const std::size_t ra = p.disc.offsets[j1] + a;
            const std::size_t rb = p.disc.offsets[j2] + b;
            double dot = 0.0;
            for (std::size_t f = 0; f < p.k(); ++f) {
                dot += p.V(ra, f) * p.V(rb, f);
            }
            out.grid(a, b) = dot;
        }
    }
    return out;
}

inline explanation_report make_report(const model_params& p, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    explanation_report r;
    for (std::size_t j = 0; j < p.disc.n_attributes(); ++j) {
        r.score_functions.push_back(score_function(p, j));
    }
    for (const auto& [a, b] : pairs) {
        r.interactions.push_back(interaction_matrix(p, a, b));
    }
    return r;
}

inline nlohmann::json report_to_json(const explanation_report& r) {
    nlohmann::json j;
    j["score_functions"] = nlohmann::json::array();
    for (const auto& t : r.score_functions) {
        j["score_functions"].push_back(
            {{"attribute", t.attribute}, {"breakpoints", t.breakpoints}, {"scores", t.scores}, {"importance", t.importance}});
    }
    j["interactions"] = nlohmann::json::array();
    for (const auto& im : r.interactions) {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t a = 0; a < im.grid.rows(); ++a) {
            rows.push_back(std::vector<double>(im.grid.row(a).begin(), im.grid.row(a).end()));
        }
        j["interactions"].push_back({{"attr1", im.name1},
                                     {"attr2", im.name2},
                                     {"attr1_index", im.attr1},
                                     {"attr2_index", im.attr2},
                                     {"grid", rows}});
    }
    return j;
}

inline explanation_report report_from_json(const nlohmann::json& j) {
    try {
        explanation_report r;
        for (const auto& t : j.at("score_functions")) {
            r.score_functions.push_back({t.at("attribute").get<std::string>(), t.at("breakpoints").get<std::vector<double>>(),
                                         t.at("scores").get<std::vector<double>>(), t.at("importance").get<double>()});
        }
        for (const auto& im : j.at("interactions")) {
            interaction_matrix_t out;
            out.name1 = im.at("attr1").get<std::string>();
            out.name2 = im.at("attr2").get<std::string>();
            out.attr1 = im.at("attr1_index").get<std::size_t>();
            out.attr2 = im.at("attr2_index").get<std::size_t>();
            const auto rows = im.at("grid").get<std::vector<std::vector<double>>>();
            const std::size_t cols = rows.empty() ? 0 : rows.front().size();
            out.grid = matrix(rows.size(), cols);
            for (std::size_t a = 0; a < rows.size(); ++a) {
                if (rows[a].size() != cols) {
                    throw format_error("report: ragged interaction grid");
                }
                std::copy(rows[a].begin(), rows[a].end(), out.grid.row(a).begin());
            }
            r.interactions.push_back(std::move(out));
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw format_error(std::string{"report: malformed document: "} + e.what());
    }
}

/// Paths of the long-format tables written next to a report.
inline std::filesystem::path scores_csv_path(const std::filesystem::path& report) {
    auto p = report;
    p.replace_filename(report.stem().string() + "_scores.csv");
    return p;
}

inline std::filesystem::path interactions_csv_path(const std::filesystem::path& report) {
    auto p = report;
    p.replace_filename(report.stem().string() + "_interactions.csv");
    return p;
}

inline void write_scores_csv(std::ostream& out, const explanation_report& r) {
    out << "attribute,breakpoint,score\n";
    for (const auto& t : r.score_functions) {
        for (std::size_t q = 0; q < t.breakpoints.size(); ++q) {
            out << t.attribute << ',' << format_real(t.breakpoints[q]) << ',' << format_real(t.scores[q]) << '\n';
        }
    }
}

inline void write_interactions_csv(std::ostream& out, const explanation_report& r) {
    out << "attr1,attr2,interval1,interval2,strength\n";
    for (const auto& im : r.interactions) {
        for (std::size_t a = 0; a < im.grid.rows(); ++a) {
            for (std::size_t b = 0; b < im.grid.cols(); ++b) {
                out << im.name1 << ',' << im.name2 << ',' << (a + 1) << ',' << (b + 1) << ',' << format_real(im.grid(a, b))
                    << '\n';
            }
        }
    }
}

/**
 * Write the report as JSON at `path`, plus `<stem>_scores.csv` and, when
 * interaction pairs are requested, `<stem>_interactions.csv` in the same directory.
 */
inline void export_report(const model_params& p, const std::filesystem::path& path,
                          const std::vector<std::pair<std::size_t, std::size_t>>& pairs = {}) {
    const auto report = make_report(p, pairs);
    auto open = [](const std::filesystem::path& f) {
        std::ofstream out(f, std::ios::binary);
        if (!out) {
            throw error("cannot write '" + f.string() + "'");
        }
        return out;
    };
    {
        auto out = open(path);
        out << report_to_json(report).dump(2) << '\n';
    }
    {
        auto out = open(scores_csv_path(path));
        write_scores_csv(out, report);
    }
    if (!pairs.empty()) {
        auto out = open(interactions_csv_path(path));
        write_interactions_csv(out, report);
    }
}

inline explanation_report load_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw format_error("cannot open report '" + path.string() + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw format_error(std::string{"report: malformed document: "} + e.what());
    }
    return report_from_json(j);
}

}  // namespace xofm
