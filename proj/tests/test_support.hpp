#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles here
// deliberately recompute everything from scratch (fresh counting, direct
// products, full sorts) so they exercise a different code path than the
// library implementations they check.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hotelml/features.hpp"
#include "hotelml/rng.hpp"

namespace test_support {

using hotelml::FeatureKind;
using hotelml::FeatureMatrix;
using hotelml::Matrix;

inline FeatureMatrix make_matrix(const std::vector<std::vector<double>>& rows,
                                 std::vector<FeatureKind> kinds = {}) {
    FeatureMatrix fm;
    const std::size_t d = rows.empty() ? 0 : rows[0].size();
    fm.values = Matrix(rows.size(), d);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < d; ++j) fm.values.at(i, j) = rows[i][j];
    if (kinds.empty()) kinds.assign(d, FeatureKind::Numeric);
    fm.kinds = std::move(kinds);
    for (std::size_t j = 0; j < d; ++j) fm.names.push_back("f" + std::to_string(j));
    return fm;
}

/// Unique scratch directory, removed on destruction.
struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static std::atomic<unsigned> counter{0};
        std::random_device rd;
        path = std::filesystem::temp_directory_path() /
               ("hotelml_test_" + std::to_string(rd()) + "_" + std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::filesystem::path file(const std::string& name) const { return path / name; }
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---------------------------------------------------------------------------
// Naive Bayes oracle: Bayes' rule with the same smoothed conditional-
// independence factorization, evaluated by direct enumeration of training
// counts for each query (plain products, no logs, no precomputed tables).
// ---------------------------------------------------------------------------

inline std::vector<double> nb_enumeration_posterior(const FeatureMatrix& train,
                                                    const std::vector<int>& labels,
                                                    const std::vector<double>& query, double alpha) {
    std::vector<int> classes = labels;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    const std::size_t n = train.row_count(), d = train.dim();

    std::vector<double> posterior;
    for (int cls : classes) {
        std::size_t n_c = 0;
        for (int y : labels)
            if (y == cls) ++n_c;
        double p = static_cast<double>(n_c) / static_cast<double>(n);
        for (std::size_t j = 0; j < d; ++j) {
            std::map<double, int> distinct;
            std::size_t matches = 0;
            for (std::size_t i = 0; i < n; ++i) {
                ++distinct[train.values.at(i, j)];
                if (labels[i] == cls && train.values.at(i, j) == query[j]) ++matches;
            }
            p *= (static_cast<double>(matches) + alpha) /
                 (static_cast<double>(n_c) + alpha * static_cast<double>(distinct.size()));
        }
        posterior.push_back(p);
    }
    double total = 0.0;
    for (double p : posterior) total += p;
    for (double& p : posterior) p /= total;
    return posterior;
}

// ---------------------------------------------------------------------------
// Exhaustive stump oracle: every (feature, threshold/value) split scored by
// weighted entropy gain with fresh recounts. Returns the best gain and the
// training accuracy of the best split (majority class per side; ties to the
// lowest class id).
// ---------------------------------------------------------------------------

struct StumpOracleResult {
    double best_gain = 0.0;
    double best_accuracy = 0.0;  // of the best-gain split (no-split baseline if no gain)
};

inline double oracle_entropy(const std::map<int, double>& counts, double total) {
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (const auto& [cls, c] : counts) {
        if (c <= 0.0) continue;
        const double p = c / total;
        h -= p * std::log(p);
    }
    return h;
}

inline StumpOracleResult stump_oracle(const FeatureMatrix& x, const std::vector<int>& y,
                                      const std::vector<double>* weights = nullptr,
                                      int min_leaf = 1) {
    const std::size_t n = x.row_count();
    auto w = [&](std::size_t i) { return weights ? (*weights)[i] : 1.0; };

    std::map<int, double> parent;
    double total_w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        parent[y[i]] += w(i);
        total_w += w(i);
    }
    const double parent_h = oracle_entropy(parent, total_w);

    auto majority_hits = [&](const std::vector<bool>& mask, bool side) {
        std::map<int, std::size_t> counts;
        for (std::size_t i = 0; i < n; ++i)
            if (mask[i] == side) ++counts[y[i]];
        std::size_t best = 0;
        for (const auto& [cls, c] : counts) best = std::max(best, c);
        return best;
    };

    StumpOracleResult result;
    result.best_accuracy =
        static_cast<double>(majority_hits(std::vector<bool>(n, false), false)) / static_cast<double>(n);

    for (std::size_t j = 0; j < x.dim(); ++j) {
        std::vector<double> values;
        for (std::size_t i = 0; i < n; ++i) values.push_back(x.values.at(i, j));
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());

        std::vector<double> candidates;
        if (x.kinds[j] == FeatureKind::Categorical) {
            candidates = values;
        } else {
            for (std::size_t v = 0; v + 1 < values.size(); ++v) {
                const double mid = values[v] + (values[v + 1] - values[v]) / 2.0;
                if (values[v] < mid && mid < values[v + 1]) candidates.push_back(mid);
            }
        }

        for (double threshold : candidates) {
            std::vector<bool> left(n, false);
            std::size_t left_n = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double v = x.values.at(i, j);
                left[i] = x.kinds[j] == FeatureKind::Categorical ? v == threshold : v <= threshold;
                if (left[i]) ++left_n;
            }
            if (left_n < static_cast<std::size_t>(min_leaf) ||
                n - left_n < static_cast<std::size_t>(min_leaf) || left_n == 0 || left_n == n)
                continue;

            std::map<int, double> lc, rc;
            double lw = 0.0, rw = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (left[i]) {
                    lc[y[i]] += w(i);
                    lw += w(i);
                } else {
                    rc[y[i]] += w(i);
                    rw += w(i);
                }
            }
            const double child = lw * oracle_entropy(lc, lw) + rw * oracle_entropy(rc, rw);
            const double gain = parent_h - child / total_w;
            // Same minimum-gain rule as the learner, so zero-gain fixtures
            // compare as leaves on both sides.
            if (gain > result.best_gain && gain > 1e-12) {
                result.best_gain = gain;
                const std::size_t hits = majority_hits(left, true) + majority_hits(left, false);
                result.best_accuracy = static_cast<double>(hits) / static_cast<double>(n);
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// k-NN oracle: full sort by (distance, index), then the library's vote rule
// applied by hand.
// ---------------------------------------------------------------------------

inline int knn_oracle_single(const FeatureMatrix& train, const std::vector<int>& labels, int k,
                             const std::vector<double>& query) {
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t i = 0; i < train.row_count(); ++i) {
        double dist = 0.0;
        for (std::size_t j = 0; j < train.dim(); ++j) {
            const double diff = query[j] - train.values.at(i, j);
            dist += diff * diff;
        }
        order.emplace_back(dist, i);
    }
    std::sort(order.begin(), order.end());
    std::map<int, int> votes;
    for (int i = 0; i < k; ++i) ++votes[labels[order[static_cast<std::size_t>(i)].second]];
    int top = 0;
    for (const auto& [cls, cnt] : votes) top = std::max(top, cnt);
    for (int i = 0; i < k; ++i) {
        const int cls = labels[order[static_cast<std::size_t>(i)].second];
        if (votes[cls] == top) return cls;
    }
    return -1;
}

// ---------------------------------------------------------------------------
// Random fixture generators (both kinds of features; labels with or without
// signal).
// ---------------------------------------------------------------------------

inline FeatureMatrix random_numeric_matrix(std::size_t n, std::size_t d, std::mt19937_64& rng,
                                           int distinct = 0) {
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    for (auto& row : rows)
        for (auto& v : row)
            v = distinct > 0
                    ? static_cast<double>(hotelml::uniform_index(rng, static_cast<std::uint64_t>(distinct)))
                    : hotelml::normal(rng);
    return make_matrix(rows);
}

inline std::vector<int> random_labels(std::size_t n, int num_classes, std::mt19937_64& rng) {
    std::vector<int> y(n);
    for (auto& v : y)
        v = static_cast<int>(hotelml::uniform_index(rng, static_cast<std::uint64_t>(num_classes)));
    return y;
}

}  // namespace test_support
