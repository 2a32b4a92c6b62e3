#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "hotelml/features.hpp"

namespace hotelml {

enum class SplitCriterion { Entropy, Gini };

struct TreeNode {
    bool leaf = true;
    int pred = 0;                      // majority label (leaf)
    std::vector<double> class_counts;  // weighted counts per class index (leaf)
    int feature = -1;
    double threshold = 0.0;
    bool categorical = false;  // equality split (x == threshold) instead of x <= threshold
    int left = -1;
    int right = -1;
};

struct DecisionTreeModel {
    std::vector<int> classes;  // sorted distinct training labels
    std::vector<TreeNode> nodes;
    int max_depth = 0;
    SplitCriterion criterion = SplitCriterion::Entropy;
};

namespace tree_detail {

// A split never fires on gain below this; guards float noise so e.g. an
// uninformative XOR root stays a leaf.
inline constexpr double kMinGain = 1e-12;

inline double impurity(const std::vector<double>& counts, double total, SplitCriterion crit) {
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    if (crit == SplitCriterion::Entropy) {
        for (double c : counts) {
            if (c <= 0.0) continue;
            const double p = c / total;
            h -= p * std::log(p);
        }
    } else {
        double sq = 0.0;
        for (double c : counts) {
            const double p = c / total;
            sq += p * p;
        }
        h = 1.0 - sq;
    }
    return h;
}

struct BestSplit {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
    bool categorical = false;
};

struct Builder {
    const FeatureMatrix& x;
    const std::vector<std::size_t>& yidx;
    const std::vector<double>& w;
    std::size_t num_classes;
    int max_depth;
    int min_leaf;
    SplitCriterion crit;
    std::vector<TreeNode> nodes;

    int make_leaf(const std::vector<double>& counts) {
        TreeNode node;
        node.leaf = true;
        node.class_counts = counts;
        std::size_t best = 0;
        for (std::size_t c = 1; c < counts.size(); ++c)
            if (counts[c] > counts[best]) best = c;  // ties keep the lowest class
        node.pred = static_cast<int>(best);
        nodes.push_back(std::move(node));
        return static_cast<int>(nodes.size() - 1);
    }

    BestSplit find_best_split(const std::vector<std::size_t>& rows,
                              const std::vector<double>& parent_counts, double total_w) const {
        BestSplit best;
        const double parent_impurity = impurity(parent_counts, total_w, crit);
        std::vector<std::pair<double, std::size_t>> ordered;
        std::vector<double> left(num_classes);

        for (std::size_t j = 0; j < x.dim(); ++j) {
            if (x.kinds[j] == FeatureKind::Numeric) {
                ordered.clear();
                ordered.reserve(rows.size());
                for (std::size_t r : rows) ordered.emplace_back(x.values.at(r, j), r);
                std::sort(ordered.begin(), ordered.end());

                std::fill(left.begin(), left.end(), 0.0);
                double left_w = 0.0;
                std::size_t left_n = 0;
                for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
                    const auto [value, row] = ordered[i];
                    left[yidx[row]] += w[row];
                    left_w += w[row];
                    ++left_n;
                    const double next = ordered[i + 1].first;
                    if (next == value) continue;
                    if (left_n < static_cast<std::size_t>(min_leaf) ||
                        rows.size() - left_n < static_cast<std::size_t>(min_leaf))
                        continue;
                    const double mid = value + (next - value) / 2.0;
                    if (!(value < mid && mid < next)) continue;  // adjacent representable values
                    double child = left_w * impurity(left, left_w, crit);
                    std::vector<double> right(num_classes);
                    for (std::size_t c = 0; c < num_classes; ++c) right[c] = parent_counts[c] - left[c];
                    child += (total_w - left_w) * impurity(right, total_w - left_w, crit);
                    const double gain = parent_impurity - child / total_w;
                    if (gain > best.gain) {
                        best = {gain, static_cast<int>(j), mid, false};
                    }
                }
            } else {
                // One-value-vs-rest; the map iterates values in ascending order.
                std::map<double, std::pair<std::vector<double>, std::size_t>> groups;
                for (std::size_t r : rows) {
                    auto [it, inserted] = groups.try_emplace(x.values.at(r, j));
                    if (inserted) it->second.first.assign(num_classes, 0.0);
                    it->second.first[yidx[r]] += w[r];
                    ++it->second.second;
                }
                if (groups.size() < 2) continue;
                for (const auto& [value, group] : groups) {
                    const auto& [counts, rows_in] = group;
                    if (rows_in < static_cast<std::size_t>(min_leaf) ||
                        rows.size() - rows_in < static_cast<std::size_t>(min_leaf))
                        continue;
                    double group_w = 0.0;
                    for (double c : counts) group_w += c;
                    std::vector<double> right(num_classes);
                    for (std::size_t c = 0; c < num_classes; ++c) right[c] = parent_counts[c] - counts[c];
                    const double child = group_w * impurity(counts, group_w, crit) +
                                         (total_w - group_w) * impurity(right, total_w - group_w, crit);
                    const double gain = parent_impurity - child / total_w;
                    if (gain > best.gain) {
                        best = {gain, static_cast<int>(j), value, true};
                    }
                }
            }
        }
        return best;
    }

    int build(const std::vector<std::size_t>& rows, int depth) {
        std::vector<double> counts(num_classes, 0.0);
        double total_w = 0.0;
        for (std::size_t r : rows) {
            counts[yidx[r]] += w[r];
            total_w += w[r];
        }

        bool pure = true;
        for (std::size_t r : rows) {
            if (yidx[r] != yidx[rows[0]]) {
                pure = false;
                break;
            }
        }
        if (pure || depth >= max_depth || rows.size() < 2 * static_cast<std::size_t>(min_leaf) ||
            total_w <= 0.0)
            return make_leaf(counts);

        const BestSplit split = find_best_split(rows, counts, total_w);
        if (split.feature < 0 || split.gain <= kMinGain) return make_leaf(counts);

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows) {
            const double v = x.values.at(r, static_cast<std::size_t>(split.feature));
            const bool go_left = split.categorical ? v == split.threshold : v <= split.threshold;
            (go_left ? left_rows : right_rows).push_back(r);
        }

        TreeNode node;
        node.leaf = false;
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.categorical = split.categorical;
        nodes.push_back(std::move(node));
        const int self = static_cast<int>(nodes.size() - 1);
        const int left_child = build(left_rows, depth + 1);
        const int right_child = build(right_rows, depth + 1);
        nodes[self].left = left_child;
        nodes[self].right = right_child;
        return self;
    }
};

}  // namespace tree_detail

/// Greedy recursive partitioning maximizing weighted information gain.
/// Numeric features split at midpoints of consecutive distinct sorted values,
/// categorical features split one-value-vs-rest. Recursion stops at
/// max_depth, node purity, or min_leaf. Sample weights flow into the
/// impurity computation and the leaf counts.
inline DecisionTreeModel tree_fit(const FeatureMatrix& features, const std::vector<int>& labels,
                                  int max_depth, int min_leaf = 1,
                                  const std::vector<double>* sample_weights = nullptr,
                                  SplitCriterion criterion = SplitCriterion::Entropy) {
    const std::size_t n = features.row_count();
    if (n == 0) throw ArgumentError("tree_fit: empty training set");
    if (labels.size() != n) throw ArgumentError("tree_fit: labels/features row mismatch");
    if (max_depth < 1) throw ArgumentError("tree_fit: max_depth must be >= 1");
    if (min_leaf < 1) throw ArgumentError("tree_fit: min_leaf must be >= 1");
    if (sample_weights && sample_weights->size() != n)
        throw ArgumentError("tree_fit: sample_weights/features row mismatch");

    DecisionTreeModel model;
    model.max_depth = max_depth;
    model.criterion = criterion;
    model.classes = labels;
    std::sort(model.classes.begin(), model.classes.end());
    model.classes.erase(std::unique(model.classes.begin(), model.classes.end()), model.classes.end());

    std::map<int, std::size_t> class_index;
    for (std::size_t c = 0; c < model.classes.size(); ++c) class_index[model.classes[c]] = c;
    std::vector<std::size_t> yidx(n);
    for (std::size_t i = 0; i < n; ++i) yidx[i] = class_index[labels[i]];

    std::vector<double> weights;
    if (sample_weights) {
        weights = *sample_weights;
    } else {
        weights.assign(n, 1.0);
    }

    tree_detail::Builder builder{features, yidx, weights, model.classes.size(),
                                 max_depth,  min_leaf, criterion};
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    builder.build(all, 0);
    model.nodes = std::move(builder.nodes);

    // Leaf predictions are class indices while building; map them to labels.
    for (TreeNode& node : model.nodes)
        if (node.leaf) node.pred = model.classes[static_cast<std::size_t>(node.pred)];
    return model;
}

/// Routes each row to a leaf and emits that leaf's majority class.
inline std::vector<int> tree_predict(const DecisionTreeModel& model, const FeatureMatrix& features) {
    if (model.nodes.empty()) throw ArgumentError("tree_predict: model has no nodes");
    std::vector<int> out(features.row_count());
    for (std::size_t i = 0; i < features.row_count(); ++i) {
        const double* row = features.values.row(i);
        std::size_t node = 0;
        while (!model.nodes[node].leaf) {
            const TreeNode& nd = model.nodes[node];
            if (static_cast<std::size_t>(nd.feature) >= features.dim())
                throw ArgumentError("tree_predict: feature dimension mismatch");
            const double v = row[nd.feature];
            const bool go_left = nd.categorical ? v == nd.threshold : v <= nd.threshold;
            node = static_cast<std::size_t>(go_left ? nd.left : nd.right);
        }
        out[i] = model.nodes[node].pred;
    }
    return out;
}

}  // namespace hotelml
