#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "hotelml/features.hpp"

namespace hotelml {

/// Exact brute-force k-nearest-neighbors over the stored training matrix.
/// Callers are expected to hand it standardized features.
struct KnnModel {
    FeatureMatrix train;
    std::vector<int> labels;
    int k = 1;
};

inline KnnModel knn_fit(const FeatureMatrix& features, const std::vector<int>& labels, int k) {
    if (features.row_count() == 0) throw ArgumentError("knn_fit: empty training set");
    if (labels.size() != features.row_count()) throw ArgumentError("knn_fit: labels/features row mismatch");
    if (k < 1) throw ArgumentError("knn_fit: k must be >= 1");
    if (static_cast<std::size_t>(k) > features.row_count())
        throw ArgumentError("knn_fit: k=" + std::to_string(k) + " exceeds training rows " +
                            std::to_string(features.row_count()));
    return KnnModel{features, labels, k};
}

/// Majority vote among the k nearest training rows (Euclidean distance).
/// Distance ties at the k-th slot admit the lowest row index; vote ties go to
/// the tied class owning the single nearest neighbor.
inline std::vector<int> knn_predict(const KnnModel& model, const FeatureMatrix& features) {
    if (features.dim() != model.train.dim())
        throw ArgumentError("knn_predict: feature dimension " + std::to_string(features.dim()) +
                            " does not match model dimension " + std::to_string(model.train.dim()));
    const std::size_t n_train = model.train.row_count();
    const std::size_t k = static_cast<std::size_t>(model.k);

    std::vector<int> out(features.row_count());
    std::vector<std::pair<double, std::size_t>> dist(n_train);
    for (std::size_t q = 0; q < features.row_count(); ++q) {
        const double* query = features.values.row(q);
        for (std::size_t i = 0; i < n_train; ++i)
            dist[i] = {squared_distance(query, model.train.values.row(i), features.dim()), i};
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

        std::map<int, std::size_t> votes;
        for (std::size_t i = 0; i < k; ++i) ++votes[model.labels[dist[i].second]];
        std::size_t top = 0;
        for (const auto& [cls, cnt] : votes) top = std::max(top, cnt);

        // Walk neighbors nearest-first; the first one whose class holds the
        // top vote count decides.
        int winner = 0;
        for (std::size_t i = 0; i < k; ++i) {
            const int cls = model.labels[dist[i].second];
            if (votes[cls] == top) {
                winner = cls;
                break;
            }
        }
        out[q] = winner;
    }
    return out;
}

}  // namespace hotelml
