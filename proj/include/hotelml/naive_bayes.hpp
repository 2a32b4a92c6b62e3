#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "hotelml/features.hpp"

namespace hotelml {

/// Hybrid Naive Bayes: Gaussian likelihoods for numeric features,
/// Laplace-smoothed frequency tables for categorical features.
struct NaiveBayesModel {
    std::vector<int> classes;  // sorted distinct labels; prediction indexes into this
    std::vector<double> log_priors;
    std::vector<double> class_counts;
    double alpha = 1.0;
    std::vector<FeatureKind> kinds;

    // Numeric features: per-class mean and variance (population convention,
    // floored at 1e-9). Entries for categorical features are unused.
    Matrix means;  // K x d
    Matrix vars;   // K x d

    // Categorical features: value -> per-class counts. The map also fixes V,
    // the number of distinct training values per feature.
    std::vector<std::map<double, std::vector<double>>> value_counts;
};

inline constexpr double kVarianceFloor = 1e-9;

inline NaiveBayesModel nb_fit(const FeatureMatrix& features, const std::vector<int>& labels,
                              double alpha = 1.0) {
    const std::size_t n = features.row_count(), d = features.dim();
    if (n == 0) throw ArgumentError("nb_fit: empty training set");
    if (labels.size() != n) throw ArgumentError("nb_fit: labels/features row mismatch");
    if (alpha <= 0.0) throw ArgumentError("nb_fit: alpha must be positive");

    NaiveBayesModel m;
    m.alpha = alpha;
    m.kinds = features.kinds;
    m.classes = labels;
    std::sort(m.classes.begin(), m.classes.end());
    m.classes.erase(std::unique(m.classes.begin(), m.classes.end()), m.classes.end());
    const std::size_t k = m.classes.size();

    std::map<int, std::size_t> class_index;
    for (std::size_t c = 0; c < k; ++c) class_index[m.classes[c]] = c;
    std::vector<std::size_t> yidx(n);
    for (std::size_t i = 0; i < n; ++i) yidx[i] = class_index[labels[i]];

    m.class_counts.assign(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) m.class_counts[yidx[i]] += 1.0;
    m.log_priors.resize(k);
    for (std::size_t c = 0; c < k; ++c)
        m.log_priors[c] = std::log(m.class_counts[c] / static_cast<double>(n));

    m.means = Matrix(k, d);
    m.vars = Matrix(k, d);
    m.value_counts.resize(d);

    for (std::size_t j = 0; j < d; ++j) {
        if (features.kinds[j] == FeatureKind::Numeric) {
            for (std::size_t i = 0; i < n; ++i) m.means.at(yidx[i], j) += features.values.at(i, j);
            for (std::size_t c = 0; c < k; ++c) m.means.at(c, j) /= m.class_counts[c];
            for (std::size_t i = 0; i < n; ++i) {
                const double diff = features.values.at(i, j) - m.means.at(yidx[i], j);
                m.vars.at(yidx[i], j) += diff * diff;
            }
            for (std::size_t c = 0; c < k; ++c) {
                m.vars.at(c, j) /= m.class_counts[c];
                if (m.vars.at(c, j) < kVarianceFloor) m.vars.at(c, j) = kVarianceFloor;
            }
        } else {
            auto& table = m.value_counts[j];
            for (std::size_t i = 0; i < n; ++i) {
                auto [it, inserted] = table.try_emplace(features.values.at(i, j));
                if (inserted) it->second.assign(k, 0.0);
                it->second[yidx[i]] += 1.0;
            }
        }
    }
    return m;
}

namespace detail {

inline void nb_check_dims(const NaiveBayesModel& m, const FeatureMatrix& features) {
    if (features.dim() != m.kinds.size())
        throw ArgumentError("naive bayes: feature dimension " + std::to_string(features.dim()) +
                            " does not match model dimension " + std::to_string(m.kinds.size()));
}

inline double nb_log_likelihood(const NaiveBayesModel& m, std::size_t cls, const double* x) {
    double ll = m.log_priors[cls];
    for (std::size_t j = 0; j < m.kinds.size(); ++j) {
        if (m.kinds[j] == FeatureKind::Numeric) {
            const double mean = m.means.at(cls, j);
            const double var = m.vars.at(cls, j);
            const double diff = x[j] - mean;
            ll += -0.5 * std::log(2.0 * 3.141592653589793238463 * var) - diff * diff / (2.0 * var);
        } else {
            const auto& table = m.value_counts[j];
            const double v_distinct = static_cast<double>(table.size());
            auto it = table.find(x[j]);
            const double count = it == table.end() ? 0.0 : it->second[cls];
            ll += std::log((count + m.alpha) / (m.class_counts[cls] + m.alpha * v_distinct));
        }
    }
    return ll;
}

}  // namespace detail

/// Posterior class probabilities via log-sum-exp normalization.
inline Matrix nb_predict_proba(const NaiveBayesModel& m, const FeatureMatrix& features) {
    detail::nb_check_dims(m, features);
    const std::size_t n = features.row_count(), k = m.classes.size();
    Matrix proba(n, k);
    std::vector<double> ll(k);
    for (std::size_t i = 0; i < n; ++i) {
        const double* x = features.values.row(i);
        double max_ll = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            ll[c] = detail::nb_log_likelihood(m, c, x);
            max_ll = std::max(max_ll, ll[c]);
        }
        double total = 0.0;
        for (std::size_t c = 0; c < k; ++c) total += std::exp(ll[c] - max_ll);
        const double log_total = max_ll + std::log(total);
        for (std::size_t c = 0; c < k; ++c) proba.at(i, c) = std::exp(ll[c] - log_total);
    }
    return proba;
}

/// Argmax of the posterior; ties resolve to the lowest class id.
inline std::vector<int> nb_predict(const NaiveBayesModel& m, const FeatureMatrix& features) {
    detail::nb_check_dims(m, features);
    std::vector<int> out(features.row_count());
    std::vector<double> ll(m.classes.size());
    for (std::size_t i = 0; i < features.row_count(); ++i) {
        const double* x = features.values.row(i);
        std::size_t best = 0;
        double best_ll = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < m.classes.size(); ++c) {
            ll[c] = detail::nb_log_likelihood(m, c, x);
            if (ll[c] > best_ll) {
                best_ll = ll[c];
                best = c;
            }
        }
        out[i] = m.classes[best];
    }
    return out;
}

}  // namespace hotelml
