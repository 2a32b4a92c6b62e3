#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "hotelml/model_io.hpp"

namespace hotelml {

// ---------------------------------------------------------------------------
// Fold plans and accuracy.
// ---------------------------------------------------------------------------

struct FoldPlan {
    int k = 0;
    std::vector<int> assignments;  // length n, values in [0, k)
    std::uint64_t seed = 0;
};

/// Deterministic shuffled partition of [0, n) into k folds whose sizes differ
/// by at most one.
inline FoldPlan make_folds(std::size_t n, int k, std::uint64_t seed) {
    if (k < 2) throw ArgumentError("make_folds: need at least 2 folds");
    if (static_cast<std::size_t>(k) > n)
        throw ArgumentError("make_folds: k=" + std::to_string(k) + " exceeds n=" + std::to_string(n));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    auto rng = substream(seed, "folds");
    shuffle(order, rng);

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(n, 0);
    for (std::size_t pos = 0; pos < n; ++pos)
        plan.assignments[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
    return plan;
}

inline double accuracy(const std::vector<int>& predicted, const std::vector<int>& actual) {
    if (predicted.empty()) throw ArgumentError("accuracy: empty vectors");
    if (predicted.size() != actual.size())
        throw ArgumentError("accuracy: length mismatch (" + std::to_string(predicted.size()) + " vs " +
                            std::to_string(actual.size()) + ")");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] == actual[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

/// Test-row indices of a per-class (stratified) holdout split. Every class
/// contributes round(share * test_fraction) rows, at least one when it has
/// two or more.
inline std::vector<std::size_t> stratified_holdout_test_indices(const std::vector<int>& labels,
                                                                double test_fraction,
                                                                std::uint64_t seed) {
    if (labels.empty()) throw ArgumentError("stratified_holdout: empty labels");
    if (test_fraction <= 0.0 || test_fraction >= 1.0)
        throw ArgumentError("stratified_holdout: test_fraction must be in (0,1)");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

    auto rng = substream(seed, "holdout");
    std::vector<std::size_t> test;
    for (auto& [cls, rows] : by_class) {
        shuffle(rows, rng);
        std::size_t take = static_cast<std::size_t>(
            std::llround(static_cast<double>(rows.size()) * test_fraction));
        if (take == 0 && rows.size() >= 2) take = 1;
        if (take >= rows.size()) take = rows.size() - 1;
        test.insert(test.end(), rows.begin(), rows.begin() + take);
    }
    std::sort(test.begin(), test.end());
    return test;
}

// ---------------------------------------------------------------------------
// Experiment grid.
// ---------------------------------------------------------------------------

enum class Algorithm { NaiveBayes, LogisticRegression, DecisionTree, Knn, Bagging, AdaBoost };

inline const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::NaiveBayes: return "naive_bayes";
        case Algorithm::LogisticRegression: return "logreg";
        case Algorithm::DecisionTree: return "tree";
        case Algorithm::Knn: return "knn";
        case Algorithm::Bagging: return "bagging";
        case Algorithm::AdaBoost: return "adaboost";
    }
    return "?";
}

enum class EvalMode { KFold, Holdout };

/// Passthrough sentinel: a cell with coarsen_k >= 100 keeps the original
/// labels instead of clustering them.
inline constexpr int kCoarsenPassthrough = 100;

/// One cell of the experiment matrix: algorithm, hyperparameters, label
/// coarsening, evaluation protocol, feature switches and the cell seed that
/// feeds every random substream (folds, k-means, bootstrap).
struct ExperimentConfig {
    Algorithm algorithm = Algorithm::NaiveBayes;
    int coarsen_k = kCoarsenPassthrough;
    EvalMode eval = EvalMode::Holdout;
    int folds = 5;
    double holdout_fraction = 0.2;
    bool use_destinations = false;
    bool standardize = true;
    std::optional<std::size_t> sample_n;  // subsample rows before evaluation
    std::uint64_t seed = 0;

    double nb_alpha = 1.0;
    int tree_depth = 5;
    int tree_min_leaf = 1;
    SplitCriterion tree_criterion = SplitCriterion::Entropy;
    int knn_k = 10;
    double lr_eta = 0.1;
    int lr_epochs = 500;
    double lr_lambda = 1e-4;
    int bags = 10;
    int boost_rounds = 10;
    int base_depth = 3;
    int kmeans_max_iter = 300;
    double kmeans_tol = 1e-4;
};

/// Short human-readable hyperparameter summary, also the tertiary sort key of
/// the report.
inline std::string hyperparameter_summary(const ExperimentConfig& c) {
    char buf[128];
    switch (c.algorithm) {
        case Algorithm::NaiveBayes:
            std::snprintf(buf, sizeof(buf), "alpha=%g", c.nb_alpha);
            break;
        case Algorithm::LogisticRegression:
            std::snprintf(buf, sizeof(buf), "eta=%g epochs=%d lambda=%g", c.lr_eta, c.lr_epochs,
                          c.lr_lambda);
            break;
        case Algorithm::DecisionTree:
            std::snprintf(buf, sizeof(buf), "depth=%d min_leaf=%d", c.tree_depth, c.tree_min_leaf);
            break;
        case Algorithm::Knn:
            std::snprintf(buf, sizeof(buf), "k=%d", c.knn_k);
            break;
        case Algorithm::Bagging:
            std::snprintf(buf, sizeof(buf), "depth=%d bags=%d", c.base_depth, c.bags);
            break;
        case Algorithm::AdaBoost:
            std::snprintf(buf, sizeof(buf), "depth=%d rounds=%d", c.base_depth, c.boost_rounds);
            break;
    }
    return buf;
}

struct CellResult {
    ExperimentConfig config;
    std::vector<double> fold_accuracies;
    double mean_accuracy = 0.0;
    double wall_seconds = 0.0;
    std::string error;  // empty on success
    std::optional<AnyModel> first_fold_model;

    bool failed() const { return !error.empty(); }
};

struct MetricsReport {
    std::vector<CellResult> rows;
};

// ---------------------------------------------------------------------------
// Cross-validation of one cell.
// ---------------------------------------------------------------------------

namespace eval_detail {

inline AnyModel fit_cell_model(const ExperimentConfig& c, const FeatureMatrix& x,
                               const std::vector<int>& y, std::uint64_t seed) {
    switch (c.algorithm) {
        case Algorithm::NaiveBayes: return nb_fit(x, y, c.nb_alpha);
        case Algorithm::LogisticRegression:
            return logreg_fit(x, y, c.lr_eta, c.lr_epochs, c.lr_lambda, seed);
        case Algorithm::DecisionTree:
            return tree_fit(x, y, c.tree_depth, c.tree_min_leaf, nullptr, c.tree_criterion);
        case Algorithm::Knn: return knn_fit(x, y, c.knn_k);
        case Algorithm::Bagging: return bagging_fit(x, y, c.bags, c.base_depth, seed);
        case Algorithm::AdaBoost: return adaboost_fit(x, y, c.boost_rounds, c.base_depth, seed);
    }
    throw ArgumentError("fit_cell_model: unknown algorithm");
}

struct FoldData {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
};

inline std::vector<FoldData> evaluation_splits(const ExperimentConfig& c, std::size_t n,
                                               const std::vector<int>& labels) {
    std::vector<FoldData> out;
    if (c.eval == EvalMode::KFold) {
        const FoldPlan plan = make_folds(n, c.folds, substream(c.seed, "fold-plan")());
        out.resize(static_cast<std::size_t>(c.folds));
        for (std::size_t i = 0; i < n; ++i) {
            const auto f = static_cast<std::size_t>(plan.assignments[i]);
            for (std::size_t g = 0; g < out.size(); ++g)
                (g == f ? out[g].test_rows : out[g].train_rows).push_back(i);
        }
    } else {
        FoldData fold;
        fold.test_rows = stratified_holdout_test_indices(labels, c.holdout_fraction,
                                                         substream(c.seed, "holdout-seed")());
        std::vector<bool> in_test(n, false);
        for (std::size_t i : fold.test_rows) in_test[i] = true;
        for (std::size_t i = 0; i < n; ++i)
            if (!in_test[i]) fold.train_rows.push_back(i);
        out.push_back(std::move(fold));
    }
    return out;
}

}  // namespace eval_detail

/// Evaluates one experiment cell. Standardization and k-means label
/// coarsening are fit on each fold's training rows only and applied to the
/// held-out rows, so nothing leaks across the split. Returns per-fold and
/// mean accuracy plus the model trained on the first fold. Fit/predict
/// errors propagate, annotated with the fold index.
inline CellResult cross_validate(const ExperimentConfig& config, const FeatureMatrix& features,
                                 const std::vector<int>& labels) {
    CellResult result;
    result.config = config;
    const auto started = std::chrono::steady_clock::now();
    if (features.row_count() == 0) throw ArgumentError("cross_validate: no rows");
    if (labels.size() != features.row_count())
        throw ArgumentError("cross_validate: labels/features row mismatch");

    const FeatureMatrix* x = &features;
    const std::vector<int>* y = &labels;
    FeatureMatrix sampled_x;
    std::vector<int> sampled_y;
    if (config.sample_n) {
        auto rng = substream(config.seed, "cell-sample");
        const auto rows = sample_without_replacement(features.row_count(), *config.sample_n, rng);
        sampled_x = take_rows(features, rows);
        sampled_y.reserve(rows.size());
        for (std::size_t r : rows) sampled_y.push_back(labels[r]);
        x = &sampled_x;
        y = &sampled_y;
    }

    const auto splits = eval_detail::evaluation_splits(config, x->row_count(), *y);
    for (std::size_t f = 0; f < splits.size(); ++f) {
        try {
            const auto& split = splits[f];
            if (split.train_rows.empty() || split.test_rows.empty())
                throw ArgumentError("empty train or test side");

            FeatureMatrix train_x = take_rows(*x, split.train_rows);
            FeatureMatrix test_x = take_rows(*x, split.test_rows);
            if (config.standardize) {
                const Standardization params = standardize_fit(train_x);
                train_x = standardize_apply(train_x, params);
                test_x = standardize_apply(test_x, params);
            }

            std::vector<int> train_y, test_y;
            if (config.coarsen_k < kCoarsenPassthrough) {
                const Coarsening coarse =
                    coarsen_labels(train_x, config.coarsen_k, substream(config.seed, "coarsen", f)(),
                                   config.kmeans_max_iter, config.kmeans_tol);
                train_y = coarse.labels;
                test_y = kmeans_assign(coarse.model, test_x);
            } else {
                train_y.reserve(split.train_rows.size());
                for (std::size_t r : split.train_rows) train_y.push_back((*y)[r]);
                test_y.reserve(split.test_rows.size());
                for (std::size_t r : split.test_rows) test_y.push_back((*y)[r]);
            }

            AnyModel model = eval_detail::fit_cell_model(config, train_x, train_y,
                                                         substream(config.seed, "model", f)());
            const std::vector<int> pred = model_predict(model, test_x);
            result.fold_accuracies.push_back(accuracy(pred, test_y));
            if (f == 0) result.first_fold_model = std::move(model);
        } catch (const Error& e) {
            throw Error("fold " + std::to_string(f) + ": " + e.what());
        }
    }

    double total = 0.0;
    for (double a : result.fold_accuracies) total += a;
    result.mean_accuracy = total / static_cast<double>(result.fold_accuracies.size());
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

// ---------------------------------------------------------------------------
// The experiment matrix.
// ---------------------------------------------------------------------------

/// Runs every cell independently (cells that throw become failed rows) on up
/// to `workers` threads and aggregates a report sorted by (algorithm,
/// coarsening k, hyperparameters). Results do not depend on scheduling order.
inline MetricsReport run_experiment_matrix(const std::vector<ExperimentConfig>& grid,
                                           const FeatureMatrix& features_with_destinations,
                                           const FeatureMatrix& features_without_destinations,
                                           const std::vector<int>& labels, int workers = 1) {
    if (grid.empty()) throw ArgumentError("run_experiment_matrix: empty grid");
    MetricsReport report;
    report.rows.resize(grid.size());

    std::atomic<std::size_t> next{0};
    auto run_cells = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            const FeatureMatrix& x =
                grid[i].use_destinations ? features_with_destinations : features_without_destinations;
            const auto started = std::chrono::steady_clock::now();
            try {
                report.rows[i] = cross_validate(grid[i], x, labels);
            } catch (const std::exception& e) {
                CellResult failed;
                failed.config = grid[i];
                failed.error = e.what();
                failed.wall_seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
                report.rows[i] = std::move(failed);
            }
        }
    };

    const int thread_count = std::max(1, std::min<int>(workers, static_cast<int>(grid.size())));
    if (thread_count == 1) {
        run_cells();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(thread_count));
        for (int t = 0; t < thread_count; ++t) pool.emplace_back(run_cells);
        for (auto& t : pool) t.join();
    }

    std::stable_sort(report.rows.begin(), report.rows.end(),
                     [](const CellResult& a, const CellResult& b) {
                         const auto key = [](const CellResult& r) {
                             return std::make_tuple(static_cast<int>(r.config.algorithm),
                                                    r.config.coarsen_k,
                                                    hyperparameter_summary(r.config),
                                                    r.config.folds);
                         };
                         return key(a) < key(b);
                     });
    return report;
}

// ---------------------------------------------------------------------------
// Report serialization. The CSV and text outputs are deterministic functions
// of the grid and seed; wall-clock timings go to their own file so report
// bytes can be compared across runs.
// ---------------------------------------------------------------------------

inline std::string eval_summary(const ExperimentConfig& c) {
    if (c.eval == EvalMode::KFold) return "cv" + std::to_string(c.folds);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "holdout%g", c.holdout_fraction);
    return buf;
}

inline void write_report_csv(const MetricsReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << "algorithm,cluster_k,hyperparameters,evaluation,fold_accuracies,mean_accuracy,error\n";
    for (const CellResult& row : report.rows) {
        out << algorithm_name(row.config.algorithm) << ',' << row.config.coarsen_k << ','
            << csv::quote_if_needed(hyperparameter_summary(row.config)) << ','
            << eval_summary(row.config) << ',';
        std::string folds;
        for (std::size_t i = 0; i < row.fold_accuracies.size(); ++i) {
            if (i) folds += '|';
            folds += csv::format_double(row.fold_accuracies[i]);
        }
        out << csv::quote_if_needed(folds) << ',' << csv::format_double(row.mean_accuracy) << ','
            << csv::quote_if_needed(row.error) << '\n';
    }
}

inline void write_timings_csv(const MetricsReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << "algorithm,cluster_k,hyperparameters,evaluation,wall_seconds\n";
    for (const CellResult& row : report.rows) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", row.wall_seconds);
        out << algorithm_name(row.config.algorithm) << ',' << row.config.coarsen_k << ','
            << csv::quote_if_needed(hyperparameter_summary(row.config)) << ','
            << eval_summary(row.config) << ',' << buf << '\n';
    }
}

/// Aligned per-algorithm summary tables (accuracy as a percentage).
inline void write_report_text(const MetricsReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    const char* header[] = {"Naive Bayes",   "Multinomial Logistic Regression",
                            "Decision Tree", "k-Nearest Neighbors",
                            "Bagging",       "AdaBoost"};
    for (int a = 0; a < 6; ++a) {
        bool any = false;
        for (const CellResult& row : report.rows) {
            if (static_cast<int>(row.config.algorithm) != a) continue;
            if (!any) {
                out << "== " << header[a] << " ==\n";
                out << "Cluster Size  Configuration                 Eval        Accuracy\n";
                any = true;
            }
            char acc[32];
            if (row.failed()) {
                std::snprintf(acc, sizeof(acc), "FAILED");
            } else {
                std::snprintf(acc, sizeof(acc), "%.2f%%", 100.0 * row.mean_accuracy);
            }
            char line[192];
            std::snprintf(line, sizeof(line), "%-13d %-29s %-11s %s\n", row.config.coarsen_k,
                          hyperparameter_summary(row.config).c_str(), eval_summary(row.config).c_str(),
                          acc);
            out << line;
            if (row.failed()) out << "    error: " << row.error << '\n';
        }
        if (any) out << '\n';
    }
}

}  // namespace hotelml
