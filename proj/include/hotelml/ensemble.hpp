#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "hotelml/decision_tree.hpp"
#include "hotelml/rng.hpp"

namespace hotelml {

// ---------------------------------------------------------------------------
// Bagging: B trees on bootstrap resamples, plurality vote.
// ---------------------------------------------------------------------------

struct BaggingModel {
    std::vector<DecisionTreeModel> trees;
    int depth = 0;
    std::uint64_t seed = 0;
};

/// n draws with replacement from [0, n), one independent deterministic stream
/// per (seed, bag index) so bags can train concurrently.
inline std::vector<std::size_t> bootstrap_indices(std::size_t n, std::uint64_t seed,
                                                  std::uint64_t bag_index) {
    auto rng = substream(seed, "bootstrap", bag_index);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = uniform_index(rng, n);
    return idx;
}

inline BaggingModel bagging_fit(const FeatureMatrix& features, const std::vector<int>& labels,
                                int bags, int depth, std::uint64_t seed) {
    if (features.row_count() == 0) throw ArgumentError("bagging_fit: empty training set");
    if (labels.size() != features.row_count())
        throw ArgumentError("bagging_fit: labels/features row mismatch");
    if (bags < 1) throw ArgumentError("bagging_fit: bag count must be >= 1");

    BaggingModel model;
    model.depth = depth;
    model.seed = seed;
    model.trees.reserve(static_cast<std::size_t>(bags));
    for (int b = 0; b < bags; ++b) {
        const auto idx = bootstrap_indices(features.row_count(), seed, static_cast<std::uint64_t>(b));
        const FeatureMatrix bag_x = take_rows(features, idx);
        std::vector<int> bag_y(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) bag_y[i] = labels[idx[i]];
        model.trees.push_back(tree_fit(bag_x, bag_y, depth));
    }
    return model;
}

/// Plurality vote over the trees; ties resolve to the lowest class id.
inline std::vector<int> bagging_predict(const BaggingModel& model, const FeatureMatrix& features) {
    if (model.trees.empty()) throw ArgumentError("bagging_predict: model has no trees");
    std::vector<int> out(features.row_count());
    std::vector<std::vector<int>> votes;
    votes.reserve(model.trees.size());
    for (const auto& tree : model.trees) votes.push_back(tree_predict(tree, features));
    for (std::size_t i = 0; i < features.row_count(); ++i) {
        std::map<int, int> tally;
        for (const auto& v : votes) ++tally[v[i]];
        int winner = 0, best = 0;
        for (const auto& [cls, cnt] : tally) {
            if (cnt > best) {  // ascending map order keeps the lowest class on ties
                best = cnt;
                winner = cls;
            }
        }
        out[i] = winner;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Multiclass AdaBoost (SAMME) over weight-aware trees.
// ---------------------------------------------------------------------------

struct AdaBoostRound {
    DecisionTreeModel learner;
    double alpha = 0.0;
    double epsilon = 0.0;
};

struct AdaBoostModel {
    std::vector<AdaBoostRound> rounds;
    int num_classes = 0;
    int base_depth = 0;
};

/// Called after each accepted round with the post-renormalization weights;
/// lets tests assert the reweighting identities without exposing internals.
using AdaBoostObserver =
    std::function<void(int round, const DecisionTreeModel& learner, double epsilon, double alpha,
                       const std::vector<double>& weights_after)>;

/// A perfect round would get infinite vote weight; cap it and stop boosting.
inline double adaboost_alpha_cap(int num_classes) {
    return std::log(1e9) + std::log(static_cast<double>(num_classes - 1));
}

/// SAMME boosting: sample weights start uniform; each round trains a
/// weight-aware tree, weighs it by alpha = ln((1-eps)/eps) + ln(K-1) and
/// multiplies the weights of misclassified rows by exp(alpha) before
/// renormalizing. Rounds at or beyond chance error (1 - 1/K) are rejected and
/// stop boosting; a zero-error round is stored with capped alpha and stops.
/// The base learner consumes weights directly, so fitting is deterministic
/// and the seed is not drawn from.
inline AdaBoostModel adaboost_fit(const FeatureMatrix& features, const std::vector<int>& labels,
                                  int rounds, int depth, std::uint64_t seed = 0,
                                  const AdaBoostObserver& observer = nullptr) {
    (void)seed;
    const std::size_t n = features.row_count();
    if (n == 0) throw ArgumentError("adaboost_fit: empty training set");
    if (labels.size() != n) throw ArgumentError("adaboost_fit: labels/features row mismatch");
    if (rounds < 1) throw ArgumentError("adaboost_fit: round count must be >= 1");

    std::vector<int> classes = labels;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    const int k = static_cast<int>(classes.size());
    if (k < 2) throw ArgumentError("adaboost_fit: need at least 2 classes");

    AdaBoostModel model;
    model.num_classes = k;
    model.base_depth = depth;

    const double chance = 1.0 - 1.0 / static_cast<double>(k);
    std::vector<double> w(n, 1.0 / static_cast<double>(n));

    for (int t = 0; t < rounds; ++t) {
        DecisionTreeModel learner = tree_fit(features, labels, depth, 1, &w);
        const std::vector<int> pred = tree_predict(learner, features);

        double eps = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (pred[i] != labels[i]) eps += w[i];

        if (eps >= chance) {
            if (t == 0)
                throw UnboostableError("adaboost_fit: first-round weighted error " +
                                       std::to_string(eps) + " is not below chance level " +
                                       std::to_string(chance));
            break;
        }

        if (eps <= 0.0) {
            const double alpha = adaboost_alpha_cap(k);
            model.rounds.push_back({std::move(learner), alpha, 0.0});
            if (observer) observer(t, model.rounds.back().learner, 0.0, alpha, w);
            break;
        }

        const double alpha = std::log((1.0 - eps) / eps) + std::log(static_cast<double>(k - 1));
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (pred[i] != labels[i]) w[i] *= std::exp(alpha);
            total += w[i];
        }
        for (double& wi : w) wi /= total;

        model.rounds.push_back({std::move(learner), alpha, eps});
        if (observer) observer(t, model.rounds.back().learner, eps, alpha, w);
    }
    return model;
}

/// Argmax over classes of the alpha-weighted vote; ties resolve to the lowest
/// class id.
inline std::vector<int> adaboost_predict(const AdaBoostModel& model, const FeatureMatrix& features) {
    if (model.rounds.empty()) throw ArgumentError("adaboost_predict: model has no rounds");
    std::vector<std::vector<int>> preds;
    preds.reserve(model.rounds.size());
    for (const auto& round : model.rounds) preds.push_back(tree_predict(round.learner, features));

    std::vector<int> out(features.row_count());
    for (std::size_t i = 0; i < features.row_count(); ++i) {
        std::map<int, double> score;
        for (std::size_t t = 0; t < model.rounds.size(); ++t) score[preds[t][i]] += model.rounds[t].alpha;
        int winner = 0;
        double best = -1.0;
        for (const auto& [cls, s] : score) {
            if (s > best) {
                best = s;
                winner = cls;
            }
        }
        out[i] = winner;
    }
    return out;
}

}  // namespace hotelml
