#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hotelml/dataset.hpp"
#include "hotelml/linalg.hpp"

namespace hotelml {

/// How a learner should treat a feature. Numeric features take threshold
/// splits and Gaussian likelihoods; categorical features take equality splits
/// and smoothed frequency tables. Distance-based learners use the raw codes
/// either way.
enum class FeatureKind { Numeric, Categorical };

struct Standardization {
    std::vector<double> mean;
    std::vector<double> stddev;  // constant columns are guarded to 1
};

/// Model-ready matrix: n rows by d real-valued features, no missing values.
struct FeatureMatrix {
    Matrix values;
    std::vector<std::string> names;
    std::vector<FeatureKind> kinds;
    std::optional<Standardization> standardization;

    std::size_t row_count() const { return values.rows; }
    std::size_t dim() const { return values.cols; }
};

inline FeatureMatrix take_rows(const FeatureMatrix& fm, const std::vector<std::size_t>& rows) {
    FeatureMatrix out;
    out.names = fm.names;
    out.kinds = fm.kinds;
    out.standardization = fm.standardization;
    out.values = Matrix(rows.size(), fm.dim());
    for (std::size_t i = 0; i < rows.size(); ++i)
        std::copy_n(fm.values.row(rows[i]), fm.dim(), out.values.row(i));
    return out;
}

// ---------------------------------------------------------------------------
// Date discretization: every timestamp column <name> becomes two integer
// columns <name>_month in [1,12] and <name>_year.
// ---------------------------------------------------------------------------

inline Dataset discretize_dates(const Dataset& ds) {
    std::vector<Column> cols;
    for (std::size_t c = 0; c < ds.col_count(); ++c) {
        const Column& col = ds.col(c);
        if (col.type() != ColumnType::Timestamp) {
            Column copy(col.name(), col.type());
            for (std::size_t r = 0; r < ds.row_count(); ++r) copy.push_from(col, r);
            cols.push_back(std::move(copy));
            continue;
        }
        Column month(col.name() + "_month", ColumnType::Integer);
        Column year(col.name() + "_year", ColumnType::Integer);
        for (std::size_t r = 0; r < ds.row_count(); ++r) {
            if (col.is_missing(r)) {
                month.push_missing();
                year.push_missing();
                continue;
            }
            const Timestamp& t = col.ts_at(r);
            if (t.month < 1 || t.month > 12)
                throw RowError("discretize_dates: row " + std::to_string(r) + ", column '" +
                               col.name() + "': month " + std::to_string(t.month) +
                               " out of range [1,12]");
            month.push_int(t.month);
            year.push_int(t.year);
        }
        cols.push_back(std::move(month));
        cols.push_back(std::move(year));
    }
    return Dataset(std::move(cols));
}

// ---------------------------------------------------------------------------
// Missing-value imputation with column means (rounded for integer columns).
// Stats are computed on one dataset (training rows) and can be applied to
// another, so held-out data never contributes to the fill values.
// ---------------------------------------------------------------------------

struct ImputeStats {
    std::map<std::string, double> fill;
};

inline ImputeStats compute_impute_stats(const Dataset& ds) {
    ImputeStats stats;
    for (std::size_t c = 0; c < ds.col_count(); ++c) {
        const Column& col = ds.col(c);
        if (col.type() == ColumnType::Timestamp) continue;
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t r = 0; r < col.size(); ++r) {
            if (col.is_missing(r)) continue;
            sum += col.as_double(r);
            ++n;
        }
        stats.fill[col.name()] = n ? sum / static_cast<double>(n) : 0.0;
    }
    return stats;
}

inline Dataset apply_impute(const Dataset& ds, const ImputeStats& stats) {
    std::vector<Column> cols;
    for (std::size_t c = 0; c < ds.col_count(); ++c) {
        const Column& col = ds.col(c);
        if (!col.has_missing()) {
            Column copy(col.name(), col.type());
            for (std::size_t r = 0; r < ds.row_count(); ++r) copy.push_from(col, r);
            cols.push_back(std::move(copy));
            continue;
        }
        if (col.type() == ColumnType::Timestamp)
            throw SchemaError("apply_impute: timestamp column '" + col.name() +
                              "' has missing values; discretize dates first");
        auto it = stats.fill.find(col.name());
        if (it == stats.fill.end())
            throw SchemaError("apply_impute: no fill value for column '" + col.name() + "'");
        Column out(col.name(), col.type());
        for (std::size_t r = 0; r < ds.row_count(); ++r) {
            if (!col.is_missing(r)) {
                out.push_from(col, r);
            } else if (col.type() == ColumnType::Real) {
                out.push_real(it->second);
            } else {
                out.push_int(std::llround(it->second));
            }
        }
        cols.push_back(std::move(out));
    }
    return Dataset(std::move(cols));
}

// ---------------------------------------------------------------------------
// Feature extraction.
// ---------------------------------------------------------------------------

/// Columns that never become features: the user identifier, the row-selection
/// flag (constant after booking filtering) and the session-size column, which
/// reflects outcome structure rather than search context.
inline const std::vector<std::string>& excluded_feature_columns() {
    static const std::vector<std::string> kExcluded = {"user_id", "is_booking", "cnt"};
    return kExcluded;
}

namespace detail {

inline bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

/// Real columns and derived month/year/count columns are numeric; remaining
/// integer-coded columns are IDs and stay categorical.
inline FeatureKind kind_for_column(const Column& col) {
    if (col.type() == ColumnType::Real) return FeatureKind::Numeric;
    if (ends_with(col.name(), "_month") || ends_with(col.name(), "_year") ||
        ends_with(col.name(), "_cnt"))
        return FeatureKind::Numeric;
    return FeatureKind::Categorical;
}

}  // namespace detail

struct FeatureExtraction {
    FeatureMatrix features;
    std::vector<int> labels;
};

inline Standardization standardize_fit(const FeatureMatrix& fm);
inline FeatureMatrix standardize_apply(const FeatureMatrix& fm, const Standardization& s);

/// Turns a fully-imputed dataset into a real-valued feature matrix plus an
/// integer label vector. Timestamp columns must already be discretized and
/// `extra_exclude` lets callers drop column groups (e.g. destination latents).
inline FeatureExtraction build_feature_matrix(const Dataset& ds, std::string_view target,
                                              bool standardize,
                                              const std::vector<std::string>& extra_exclude = {}) {
    if (ds.row_count() == 0) throw ArgumentError("build_feature_matrix: dataset has no rows");
    const Column* target_col = ds.find(target);
    if (!target_col) throw SchemaError("build_feature_matrix: missing target column '" + std::string(target) + "'");
    if (target_col->type() != ColumnType::Integer && target_col->type() != ColumnType::Categorical)
        throw SchemaError("build_feature_matrix: target column '" + std::string(target) +
                          "' must be integer-typed");

    std::unordered_set<std::string> excluded(excluded_feature_columns().begin(),
                                             excluded_feature_columns().end());
    excluded.insert(std::string(target));
    for (const auto& name : extra_exclude) excluded.insert(name);

    std::vector<const Column*> feature_cols;
    for (std::size_t c = 0; c < ds.col_count(); ++c) {
        const Column& col = ds.col(c);
        if (excluded.count(col.name())) continue;
        if (col.type() == ColumnType::Timestamp)
            throw SchemaError("build_feature_matrix: timestamp column '" + col.name() +
                              "' must be discretized first");
        if (col.has_missing())
            throw SchemaError("build_feature_matrix: column '" + col.name() +
                              "' has missing values; impute first");
        feature_cols.push_back(&col);
    }

    FeatureExtraction out;
    out.features.values = Matrix(ds.row_count(), feature_cols.size());
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
        out.features.names.push_back(feature_cols[j]->name());
        out.features.kinds.push_back(detail::kind_for_column(*feature_cols[j]));
        for (std::size_t r = 0; r < ds.row_count(); ++r)
            out.features.values.at(r, j) = feature_cols[j]->as_double(r);
    }

    out.labels.reserve(ds.row_count());
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        if (target_col->is_missing(r))
            throw RowError("build_feature_matrix: target '" + std::string(target) + "' missing at row " +
                           std::to_string(r));
        out.labels.push_back(static_cast<int>(target_col->int_at(r)));
    }

    if (standardize) out.features = standardize_apply(out.features, standardize_fit(out.features));
    return out;
}

// ---------------------------------------------------------------------------
// Standardization (z-scoring with population standard deviation).
// ---------------------------------------------------------------------------

inline Standardization standardize_fit(const FeatureMatrix& fm) {
    if (fm.row_count() == 0) throw ArgumentError("standardize_fit: empty matrix");
    const std::size_t n = fm.row_count(), d = fm.dim();
    Standardization s;
    s.mean.assign(d, 0.0);
    s.stddev.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = fm.values.row(i);
        for (std::size_t j = 0; j < d; ++j) s.mean[j] += row[j];
    }
    for (std::size_t j = 0; j < d; ++j) s.mean[j] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = fm.values.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = row[j] - s.mean[j];
            s.stddev[j] += diff * diff;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        s.stddev[j] = std::sqrt(s.stddev[j] / static_cast<double>(n));
        if (s.stddev[j] == 0.0) s.stddev[j] = 1.0;  // constant column guard
    }
    return s;
}

inline FeatureMatrix standardize_apply(const FeatureMatrix& fm, const Standardization& s) {
    if (s.mean.size() != fm.dim()) throw ArgumentError("standardize_apply: dimension mismatch");
    FeatureMatrix out;
    out.names = fm.names;
    out.kinds = fm.kinds;
    out.standardization = s;
    out.values = Matrix(fm.row_count(), fm.dim());
    for (std::size_t i = 0; i < fm.row_count(); ++i) {
        const double* src = fm.values.row(i);
        double* dst = out.values.row(i);
        for (std::size_t j = 0; j < fm.dim(); ++j) dst[j] = (src[j] - s.mean[j]) / s.stddev[j];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exploratory statistics.
// ---------------------------------------------------------------------------

struct CorrelationMatrix {
    Matrix entries;  // d x d, symmetric, unit diagonal
    std::vector<std::string> names;
};

/// Pearson correlation for every feature pair. Constant columns correlate 0
/// with everything (1 with themselves).
inline CorrelationMatrix correlation_matrix(const FeatureMatrix& fm) {
    const std::size_t n = fm.row_count(), d = fm.dim();
    if (n < 2) throw ArgumentError("correlation_matrix: need at least 2 rows");

    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = fm.values.row(i);
        for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
    }
    for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(n);

    Matrix centered(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) centered.at(i, j) = fm.values.at(i, j) - mean[j];

    std::vector<double> norm(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = centered.row(i);
        for (std::size_t j = 0; j < d; ++j) norm[j] += row[j] * row[j];
    }

    CorrelationMatrix out;
    out.names = fm.names;
    out.entries = Matrix(d, d);
    for (std::size_t a = 0; a < d; ++a) {
        out.entries.at(a, a) = 1.0;
        for (std::size_t b = a + 1; b < d; ++b) {
            double r = 0.0;
            if (norm[a] > 0.0 && norm[b] > 0.0) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += centered.at(i, a) * centered.at(i, b);
                r = dot / std::sqrt(norm[a] * norm[b]);
                r = std::clamp(r, -1.0, 1.0);
            }
            out.entries.at(a, b) = r;
            out.entries.at(b, a) = r;
        }
    }
    return out;
}

using ClassHistogram = std::map<int, std::int64_t>;

inline ClassHistogram class_histogram(const std::vector<int>& labels) {
    if (labels.empty()) throw ArgumentError("class_histogram: empty label vector");
    ClassHistogram h;
    for (int v : labels) ++h[v];
    return h;
}

// ---------------------------------------------------------------------------
// Plot-data serialization.
// ---------------------------------------------------------------------------

inline void write_correlation_csv(const CorrelationMatrix& cm, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << "feature";
    for (const auto& name : cm.names) out << ',' << csv::quote_if_needed(name);
    out << '\n';
    for (std::size_t a = 0; a < cm.names.size(); ++a) {
        out << csv::quote_if_needed(cm.names[a]);
        for (std::size_t b = 0; b < cm.names.size(); ++b) out << ',' << csv::format_double(cm.entries.at(a, b));
        out << '\n';
    }
}

inline void write_histogram_csv(const ClassHistogram& h, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << "class,count\n";
    for (const auto& [cls, count] : h) out << cls << ',' << count << '\n';
}

}  // namespace hotelml
