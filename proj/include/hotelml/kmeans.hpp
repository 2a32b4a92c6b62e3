#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>
#include <vector>

#include "hotelml/features.hpp"
#include "hotelml/linalg.hpp"
#include "hotelml/rng.hpp"

namespace hotelml {

enum class KMeansInit { PlusPlus, UniformRandom };

struct KMeansModel {
    Matrix centroids;  // k x d
    int k = 0;
    std::uint64_t seed = 0;
    double inertia = 0.0;
    int iterations_run = 0;
    std::vector<double> inertia_trace;  // inertia after each assignment pass
};

namespace detail {

inline std::size_t nearest_centroid(const Matrix& centroids, const double* point, double* best_dist) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows; ++c) {
        const double d = squared_distance(point, centroids.row(c), centroids.cols);
        if (d < bd) {  // strict: ties keep the lowest centroid index
            bd = d;
            best = c;
        }
    }
    if (best_dist) *best_dist = bd;
    return best;
}

inline Matrix init_plus_plus(const Matrix& x, int k, std::mt19937_64& rng) {
    const std::size_t n = x.rows, d = x.cols;
    Matrix centroids(static_cast<std::size_t>(k), d);
    std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
    std::vector<double> cumulative(n);

    std::size_t chosen = uniform_index(rng, n);
    std::copy_n(x.row(chosen), d, centroids.row(0));
    for (int c = 1; c < k; ++c) {
        const double* prev = centroids.row(static_cast<std::size_t>(c - 1));
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dist = squared_distance(x.row(i), prev, d);
            if (dist < min_dist[i]) min_dist[i] = dist;
            total += min_dist[i];
            cumulative[i] = total;
        }
        if (total > 0.0) {
            const double target = uniform_real(rng) * total;
            chosen = static_cast<std::size_t>(
                std::upper_bound(cumulative.begin(), cumulative.end(), target) - cumulative.begin());
            if (chosen >= n) chosen = n - 1;
        } else {
            chosen = uniform_index(rng, n);  // only duplicates left
        }
        std::copy_n(x.row(chosen), d, centroids.row(static_cast<std::size_t>(c)));
    }
    return centroids;
}

inline Matrix init_uniform(const Matrix& x, int k, std::mt19937_64& rng) {
    Matrix centroids(static_cast<std::size_t>(k), x.cols);
    auto rows = sample_without_replacement(x.rows, static_cast<std::size_t>(k), rng);
    for (std::size_t c = 0; c < rows.size(); ++c) std::copy_n(x.row(rows[c]), x.cols, centroids.row(c));
    return centroids;
}

}  // namespace detail

/// Lloyd's algorithm with k-means++ seeding (first centroid uniform over
/// points, each next sampled proportional to squared distance to the nearest
/// chosen centroid). Iterates until the assignment is stable, centroid
/// movement drops below tol, or max_iter passes. An empty cluster is reseeded
/// to the point farthest from its assigned centroid, which keeps the inertia
/// trace non-increasing.
inline KMeansModel kmeans_fit(const FeatureMatrix& features, int k, std::uint64_t seed,
                              int max_iter = 300, double tol = 1e-4,
                              KMeansInit init = KMeansInit::PlusPlus) {
    const Matrix& x = features.values;
    const std::size_t n = x.rows, d = x.cols;
    if (n == 0) throw ArgumentError("kmeans_fit: empty feature matrix");
    if (k < 1) throw ArgumentError("kmeans_fit: k must be >= 1");
    if (static_cast<std::size_t>(k) > n)
        throw ArgumentError("kmeans_fit: k=" + std::to_string(k) + " exceeds row count " + std::to_string(n));
    if (max_iter < 1) throw ArgumentError("kmeans_fit: max_iter must be >= 1");
    if (tol < 0.0) throw ArgumentError("kmeans_fit: tol must be >= 0");

    auto rng = substream(seed, init == KMeansInit::PlusPlus ? "kmeans++" : "kmeans-uniform");
    KMeansModel model;
    model.k = k;
    model.seed = seed;
    model.centroids = init == KMeansInit::PlusPlus ? detail::init_plus_plus(x, k, rng)
                                                   : detail::init_uniform(x, k, rng);

    const std::size_t kk = static_cast<std::size_t>(k);
    std::vector<std::size_t> assign(n, 0), prev_assign;
    std::vector<double> dist(n, 0.0);
    std::vector<std::size_t> count(kk, 0);
    Matrix sums(kk, d);

    for (int iter = 0; iter < max_iter; ++iter) {
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            assign[i] = detail::nearest_centroid(model.centroids, x.row(i), &dist[i]);
            inertia += dist[i];
        }
        model.inertia_trace.push_back(inertia);
        model.iterations_run = iter + 1;

        std::fill(count.begin(), count.end(), 0);
        for (std::size_t i = 0; i < n; ++i) ++count[assign[i]];

        // Reseed empty clusters to the point currently farthest from its
        // centroid; never steals the last point of a singleton cluster.
        for (std::size_t c = 0; c < kk; ++c) {
            if (count[c] > 0) continue;
            std::size_t far = n;
            double far_dist = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (count[assign[i]] <= 1) continue;
                if (dist[i] > far_dist) {
                    far_dist = dist[i];
                    far = i;
                }
            }
            if (far == n) continue;
            --count[assign[far]];
            std::copy_n(x.row(far), d, model.centroids.row(c));
            assign[far] = c;
            dist[far] = 0.0;
            count[c] = 1;
        }

        const bool stable = (assign == prev_assign);

        std::fill(sums.data.begin(), sums.data.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = x.row(i);
            double* sum = sums.row(assign[i]);
            for (std::size_t j = 0; j < d; ++j) sum[j] += row[j];
        }
        double max_move_sq = 0.0;
        for (std::size_t c = 0; c < kk; ++c) {
            if (count[c] == 0) continue;
            double move = 0.0;
            double* centroid = model.centroids.row(c);
            const double* sum = sums.row(c);
            for (std::size_t j = 0; j < d; ++j) {
                const double next = sum[j] / static_cast<double>(count[c]);
                const double delta = next - centroid[j];
                move += delta * delta;
                centroid[j] = next;
            }
            max_move_sq = std::max(max_move_sq, move);
        }

        if (stable || max_move_sq < tol * tol) break;
        prev_assign = assign;
    }

    // Final inertia under the converged centroids.
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double bd;
        detail::nearest_centroid(model.centroids, x.row(i), &bd);
        inertia += bd;
    }
    model.inertia_trace.push_back(inertia);
    model.inertia = inertia;
    return model;
}

/// Nearest-centroid assignment; ties resolve to the lowest centroid index.
inline std::vector<int> kmeans_assign(const KMeansModel& model, const FeatureMatrix& features) {
    if (features.dim() != model.centroids.cols)
        throw ArgumentError("kmeans_assign: feature dimension " + std::to_string(features.dim()) +
                            " does not match model dimension " + std::to_string(model.centroids.cols));
    std::vector<int> out(features.row_count());
    for (std::size_t i = 0; i < features.row_count(); ++i)
        out[i] = static_cast<int>(detail::nearest_centroid(model.centroids, features.values.row(i), nullptr));
    return out;
}

struct Coarsening {
    KMeansModel model;
    std::vector<int> labels;
};

/// Clusters the rows of a feature matrix and returns the assignment as the
/// new class label in [0, k).
inline Coarsening coarsen_labels(const FeatureMatrix& features, int k, std::uint64_t seed,
                                 int max_iter = 300, double tol = 1e-4) {
    Coarsening c;
    c.model = kmeans_fit(features, k, seed, max_iter, tol);
    c.labels = kmeans_assign(c.model, features);
    return c;
}

// ---------------------------------------------------------------------------
// Cross-tabulation of two labelings.
// ---------------------------------------------------------------------------

struct ContingencyTable {
    std::vector<int> row_labels;
    std::vector<int> col_labels;
    std::vector<std::vector<std::int64_t>> counts;  // row_labels x col_labels

    std::int64_t total() const {
        std::int64_t t = 0;
        for (const auto& row : counts)
            for (std::int64_t v : row) t += v;
        return t;
    }
};

inline ContingencyTable crosstab(const std::vector<int>& labels_a, const std::vector<int>& labels_b) {
    if (labels_a.size() != labels_b.size())
        throw ArgumentError("crosstab: label vectors differ in length (" + std::to_string(labels_a.size()) +
                            " vs " + std::to_string(labels_b.size()) + ")");
    if (labels_a.empty()) throw ArgumentError("crosstab: empty label vectors");

    ContingencyTable t;
    t.row_labels = labels_a;
    std::sort(t.row_labels.begin(), t.row_labels.end());
    t.row_labels.erase(std::unique(t.row_labels.begin(), t.row_labels.end()), t.row_labels.end());
    t.col_labels = labels_b;
    std::sort(t.col_labels.begin(), t.col_labels.end());
    t.col_labels.erase(std::unique(t.col_labels.begin(), t.col_labels.end()), t.col_labels.end());

    std::unordered_map<int, std::size_t> row_index, col_index;
    for (std::size_t i = 0; i < t.row_labels.size(); ++i) row_index[t.row_labels[i]] = i;
    for (std::size_t i = 0; i < t.col_labels.size(); ++i) col_index[t.col_labels[i]] = i;

    t.counts.assign(t.row_labels.size(), std::vector<std::int64_t>(t.col_labels.size(), 0));
    for (std::size_t i = 0; i < labels_a.size(); ++i)
        ++t.counts[row_index[labels_a[i]]][col_index[labels_b[i]]];
    return t;
}

/// Stack-bar plot data: one row per label of the first labeling, one column
/// per label of the second.
inline void write_crosstab_csv(const ContingencyTable& t, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << "label";
    for (int c : t.col_labels) out << ',' << c;
    out << '\n';
    for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
        out << t.row_labels[r];
        for (std::size_t c = 0; c < t.col_labels.size(); ++c) out << ',' << t.counts[r][c];
        out << '\n';
    }
}

}  // namespace hotelml
