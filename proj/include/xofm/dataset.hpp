#pragma once

#include "xofm/error.hpp"
#include "xofm/matrix.hpp"
#include "xofm/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace xofm {

/**
 * Tabular ordinal data: N objects with m real attributes and labels in 1..H.
 *
 * A dataset produced by a split or fold keeps the class count of its parent and
 * remembers which parent rows it holds (source_rows), so it may contain a single
 * row; datasets built from scratch or loaded from disk need N >= 2.
 */
class dataset {
  public:
    dataset() = default;

    dataset(matrix objects, std::vector<int> labels, std::vector<std::string> attr_names, int n_classes)
        : dataset(std::move(objects), std::move(labels), std::move(attr_names), n_classes, {}) {
        if (size() < 2) {
            throw data_error("dataset needs at least 2 objects, got " + std::to_string(size()));
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return objects_.rows(); }
    [[nodiscard]] std::size_t n_attributes() const noexcept { return objects_.cols(); }
    [[nodiscard]] int n_classes() const noexcept { return n_classes_; }

    [[nodiscard]] const matrix& objects() const noexcept { return objects_; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept { return objects_.row(i); }
    [[nodiscard]] double value(std::size_t i, std::size_t j) const noexcept { return objects_(i, j); }
    [[nodiscard]] const std::vector<int>& labels() const noexcept { return labels_; }
    [[nodiscard]] int label(std::size_t i) const noexcept { return labels_[i]; }
    [[nodiscard]] const std::vector<std::string>& attr_names() const noexcept { return attr_names_; }
    /// Row indices into the dataset this one was drawn from (identity for loaded data).
    [[nodiscard]] const std::vector<std::size_t>& source_rows() const noexcept { return source_rows_; }

    [[nodiscard]] std::size_t distinct_labels() const {
        return std::set<int>(labels_.begin(), labels_.end()).size();
    }

    /// Rows `rows` of this dataset, in the given order.
    [[nodiscard]] dataset subset(std::span<const std::size_t> rows) const {
        matrix sub(rows.size(), n_attributes());
        std::vector<int> sub_labels;
        std::vector<std::size_t> src;
        sub_labels.reserve(rows.size());
        src.reserve(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const std::size_t i = rows[r];
            if (i >= size()) {
                throw data_error("subset row " + std::to_string(i) + " out of range");
            }
            std::copy(row(i).begin(), row(i).end(), sub.row(r).begin());
            sub_labels.push_back(labels_[i]);
            src.push_back(source_rows_[i]);
        }
        return dataset(std::move(sub), std::move(sub_labels), attr_names_, n_classes_, std::move(src));
    }

  private:
    dataset(matrix objects, std::vector<int> labels, std::vector<std::string> attr_names, int n_classes,
            std::vector<std::size_t> source_rows)
        : objects_{std::move(objects)},
          labels_{std::move(labels)},
          attr_names_{std::move(attr_names)},
          source_rows_{std::move(source_rows)},
          n_classes_{n_classes} {
        if (source_rows_.empty()) {
            source_rows_.resize(objects_.rows());
            std::iota(source_rows_.begin(), source_rows_.end(), std::size_t{0});
        }
        validate();
    }

    void validate() const {
        if (objects_.rows() == 0) {
            throw data_error("dataset has no objects");
        }
        if (objects_.cols() == 0) {
            throw data_error("dataset has no attributes");
        }
        if (n_classes_ < 2) {
            throw data_error("dataset needs at least 2 classes, got H=" + std::to_string(n_classes_));
        }
        if (labels_.size() != objects_.rows()) {
            throw data_error("label count does not match object count");
        }
        if (attr_names_.size() != objects_.cols()) {
            throw data_error("attribute name count does not match attribute count");
        }
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (labels_[i] < 1 || labels_[i] > n_classes_) {
                throw data_error("label " + std::to_string(labels_[i]) + " outside 1.." +
                                 std::to_string(n_classes_) + " at row " + std::to_string(i + 1));
            }
        }
        for (std::size_t i = 0; i < objects_.rows(); ++i) {
            for (std::size_t j = 0; j < objects_.cols(); ++j) {
                if (!std::isfinite(objects_(i, j))) {
                    throw data_error("non-finite attribute value at row " + std::to_string(i + 1) + ", column " +
                                     std::to_string(j + 1));
                }
            }
        }
    }

    matrix objects_;
    std::vector<int> labels_;
    std::vector<std::string> attr_names_;
    std::vector<std::size_t> source_rows_;
    int n_classes_{0};
};

/// 80/20 random split and k-fold settings.
struct split_spec {
    double train_fraction{0.8};
    std::uint64_t seed{0};
    int n_trials{30};
    int n_folds{5};
};

/// Selects the label column by header name or by 0-based index.
using column_selector = std::variant<std::string, std::size_t>;

namespace detail {

inline std::string_view trim(std::string_view s) noexcept {
    constexpr std::string_view ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return cells;
}

inline std::string strip_quotes(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return std::string{s};
}

inline bool parse_double(std::string_view cell, double& out) noexcept {
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);
    }
    if (cell.empty()) {
        return false;
    }
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return ec == std::errc{} && ptr == cell.data() + cell.size();
}

inline std::string location(std::size_t row, std::size_t col) {
    return "row " + std::to_string(row) + ", column " + std::to_string(col + 1);
}

}  // namespace detail

/// Header plus all-numeric body of a comma-separated file.
struct numeric_table {
    std::vector<std::string> header;
    matrix cells;

    [[nodiscard]] std::size_t column(const std::string& name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw data_error("column '" + name + "' not found in header");
        }
        return static_cast<std::size_t>(it - header.begin());
    }
};

/**
 * Read a comma-separated file whose first row is a header and whose cells are all
 * decimal reals. Rows are numbered from 1 (first data row) in error messages;
 * blank lines are skipped. Empty, non-numeric and non-finite cells are rejected.
 */
inline numeric_table read_numeric_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw data_error("cannot open data file '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw data_error("data file '" + path.string() + "' is empty");
    }
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
    }
    numeric_table t;
    for (const auto cell : detail::split_commas(line)) {
        t.header.push_back(detail::strip_quotes(cell));
    }
    std::vector<double> values;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) {
            continue;
        }
        ++row;
        const auto cells = detail::split_commas(line);
        if (cells.size() != t.header.size()) {
            throw data_error("expected " + std::to_string(t.header.size()) + " cells, found " +
                             std::to_string(cells.size()) + " at row " + std::to_string(row));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (cells[c].empty()) {
                throw data_error("missing value at " + detail::location(row, c));
            }
            double v = 0.0;
            if (!detail::parse_double(cells[c], v)) {
                throw data_error("non-numeric value '" + std::string{cells[c]} + "' at " + detail::location(row, c));
            }
            if (!std::isfinite(v)) {
                throw data_error("non-finite value at " + detail::location(row, c));
            }
            values.push_back(v);
        }
    }
    t.cells = matrix(row, t.header.size(), std::move(values));
    return t;
}

/// Columns `names` of `t`, in that order; a missing column is a data_error.
inline matrix select_columns(const numeric_table& t, const std::vector<std::string>& names) {
    std::vector<std::size_t> idx;
    idx.reserve(names.size());
    for (const auto& n : names) {
        idx.push_back(t.column(n));
    }
    matrix out(t.cells.rows(), names.size());
    for (std::size_t i = 0; i < out.rows(); ++i) {
        for (std::size_t c = 0; c < idx.size(); ++c) {
            out(i, c) = t.cells(i, idx[c]);
        }
    }
    return out;
}

/**
 * Load a labelled dataset. Every column other than the label column is an
 * attribute, kept in file order. Labels are used as given; H is the largest label.
 */
inline dataset load_csv(const std::filesystem::path& path, const column_selector& label_column = std::string{"label"}) {
    const auto t = read_numeric_csv(path);
    std::size_t label_idx = 0;
    if (const auto* name = std::get_if<std::string>(&label_column)) {
        const auto it = std::find(t.header.begin(), t.header.end(), *name);
        if (it == t.header.end()) {
            throw data_error("label column '" + *name + "' not found in header");
        }
        label_idx = static_cast<std::size_t>(it - t.header.begin());
    } else {
        label_idx = std::get<std::size_t>(label_column);
        if (label_idx >= t.header.size()) {
            throw data_error("label column index " + std::to_string(label_idx) + " out of range (" +
                             std::to_string(t.header.size()) + " columns)");
        }
    }
    std::vector<std::string> names;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        if (c != label_idx) {
            names.push_back(t.header[c]);
        }
    }
    if (names.empty()) {
        throw data_error("data file has no attribute columns");
    }
    const std::size_t n = t.cells.rows();
    std::vector<int> labels(n);
    matrix objects(n, names.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double v = t.cells(i, label_idx);
        if (v != std::floor(v) || std::abs(v) > 1e9) {
            throw data_error("non-integer label at row " + std::to_string(i + 1));
        }
        if (v < 1.0) {
            throw data_error("label below 1 at row " + std::to_string(i + 1));
        }
        labels[i] = static_cast<int>(v);
        std::size_t out = 0;
        for (std::size_t c = 0; c < t.header.size(); ++c) {
            if (c != label_idx) {
                objects(i, out++) = t.cells(i, c);
            }
        }
    }
    if (n < 2) {
        throw data_error("data file needs at least 2 rows, found " + std::to_string(n));
    }
    const int h = *std::max_element(labels.begin(), labels.end());
    return dataset(std::move(objects), std::move(labels), std::move(names), h);
}

/**
 * Uniform random train/test partition for one trial.
 *
 * The train part has round(train_fraction * N) rows (at least 1, at most N - 1).
 * When the train part ends up with a single class, the draw is repeated with the
 * next sub-seed, up to 10 attempts in total.
 */
inline std::pair<dataset, dataset> random_split(const dataset& ds, const split_spec& spec, int trial) {
    if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0) {
        throw data_error("train fraction must lie in (0, 1)");
    }
    if (trial < 0 || trial >= spec.n_trials) {
        throw data_error("trial index " + std::to_string(trial) + " outside 0.." + std::to_string(spec.n_trials - 1));
    }
    const std::size_t n = ds.size();
    if (n < 2) {
        throw data_error("cannot split fewer than 2 objects");
    }
    auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

    constexpr int max_attempts = 10;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        rng_type rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(attempt)}));
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::shuffle(idx.begin(), idx.end(), rng);
        std::vector<std::size_t> train_rows(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        std::vector<std::size_t> test_rows(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
        std::sort(train_rows.begin(), train_rows.end());
        std::sort(test_rows.begin(), test_rows.end());
        auto train = ds.subset(train_rows);
        if (train.distinct_labels() >= 2 || ds.distinct_labels() < 2) {
            return {std::move(train), ds.subset(test_rows)};
        }
    }
    throw training_error("no split with at least two classes in the training part after " +
                         std::to_string(max_attempts) + " attempts");
}

/// Row indices of each validation fold; the first N mod k folds get one extra row.
inline std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, int n_folds, std::uint64_t seed) {
    if (n_folds < 2) {
        throw data_error("need at least 2 folds");
    }
    if (static_cast<std::size_t>(n_folds) > n) {
        throw data_error("cannot make " + std::to_string(n_folds) + " folds from " + std::to_string(n) + " objects");
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    rng_type rng(derive_seed(seed, {0x6b666f6c64ULL}));
    std::shuffle(idx.begin(), idx.end(), rng);

    const auto k = static_cast<std::size_t>(n_folds);
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t len = n / k + (f < n % k ? 1 : 0);
        folds[f].assign(idx.begin() + static_cast<std::ptrdiff_t>(pos), idx.begin() + static_cast<std::ptrdiff_t>(pos + len));
        std::sort(folds[f].begin(), folds[f].end());
        pos += len;
    }
    return folds;
}

/// (train, validation) pairs for k-fold cross validation.
inline std::vector<std::pair<dataset, dataset>> kfold(const dataset& ds, int n_folds, std::uint64_t seed) {
    const auto folds = kfold_indices(ds.size(), n_folds, seed);
    std::vector<std::pair<dataset, dataset>> out;
    out.reserve(folds.size());
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<std::size_t> train_rows;
        for (std::size_t g = 0; g < folds.size(); ++g) {
            if (g != f) {
                train_rows.insert(train_rows.end(), folds[g].begin(), folds[g].end());
            }
        }
        std::sort(train_rows.begin(), train_rows.end());
        out.emplace_back(ds.subset(train_rows), ds.subset(folds[f]));
    }
    return out;
}

}  // namespace xofm
