#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hotelml/evaluation.hpp"
#include "hotelml/pipeline.hpp"
#include "hotelml/synthetic.hpp"

namespace hotelml {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;  // config rejected before any write
inline constexpr int kExitPipeline = 3;    // a pipeline stage failed

struct InputPaths {
    std::string events;
    std::string destinations;  // optional when destinations are not merged
};

struct SyntheticSpec {
    std::size_t n = 0;
    int hotel_clusters = 100;
    double separation = 1.0;
    double booking_rate = 0.4;
};

struct AnalysisSpec {
    std::vector<int> coarsen_ks = {5, 10};
    bool use_destinations = false;
};

/// Full run configuration. Parsed from a JSON file; --seed/--out/--workers
/// flags override the scalar fields.
struct RunConfig {
    std::optional<InputPaths> input;
    std::optional<SyntheticSpec> synthetic;
    PipelineOptions pipeline;
    bool standardize = true;
    AnalysisSpec analysis;
    std::vector<ExperimentConfig> experiments;
    std::string out_dir = "out";
    std::uint64_t seed = 42;
    int workers = 1;
};

// ---------------------------------------------------------------------------
// JSON parsing. Structural problems are collected as violation strings, so a
// bad config reports every problem at once instead of failing field by field.
// ---------------------------------------------------------------------------

namespace cli_detail {

using nlohmann::json;

struct Violations {
    std::vector<std::string>& list;
    void add(const std::string& field, const std::string& what) { list.push_back(field + ": " + what); }
};

inline bool want_number(const json& j, const char* key, double& out, Violations& v,
                        const std::string& scope) {
    if (!j.contains(key)) return false;
    if (!j[key].is_number()) {
        v.add(scope + key, "expected a number");
        return false;
    }
    out = j[key].get<double>();
    return true;
}

inline bool want_int(const json& j, const char* key, std::int64_t& out, Violations& v,
                     const std::string& scope) {
    if (!j.contains(key)) return false;
    if (!j[key].is_number_integer()) {
        v.add(scope + key, "expected an integer");
        return false;
    }
    out = j[key].get<std::int64_t>();
    return true;
}

inline bool want_bool(const json& j, const char* key, bool& out, Violations& v,
                      const std::string& scope) {
    if (!j.contains(key)) return false;
    if (!j[key].is_boolean()) {
        v.add(scope + key, "expected a boolean");
        return false;
    }
    out = j[key].get<bool>();
    return true;
}

inline bool want_string(const json& j, const char* key, std::string& out, Violations& v,
                        const std::string& scope) {
    if (!j.contains(key)) return false;
    if (!j[key].is_string()) {
        v.add(scope + key, "expected a string");
        return false;
    }
    out = j[key].get<std::string>();
    return true;
}

inline std::optional<Algorithm> algorithm_from_name(const std::string& name) {
    if (name == "naive_bayes") return Algorithm::NaiveBayes;
    if (name == "logreg") return Algorithm::LogisticRegression;
    if (name == "tree") return Algorithm::DecisionTree;
    if (name == "knn") return Algorithm::Knn;
    if (name == "bagging") return Algorithm::Bagging;
    if (name == "adaboost") return Algorithm::AdaBoost;
    return std::nullopt;
}

inline ExperimentConfig parse_cell(const json& cell, std::size_t index, bool default_standardize,
                                   Violations& v) {
    const std::string scope = "experiments[" + std::to_string(index) + "].";
    ExperimentConfig c;
    c.standardize = default_standardize;

    std::string algo;
    if (!want_string(cell, "algorithm", algo, v, scope)) {
        v.add(scope + "algorithm", "required");
    } else if (auto a = algorithm_from_name(algo)) {
        c.algorithm = *a;
    } else {
        v.add(scope + "algorithm", "unknown algorithm '" + algo + "'");
    }

    std::int64_t iv;
    double dv;
    bool bv;
    if (want_int(cell, "cluster_k", iv, v, scope)) c.coarsen_k = static_cast<int>(iv);
    if (want_int(cell, "folds", iv, v, scope)) c.folds = static_cast<int>(iv);
    std::string eval;
    if (want_string(cell, "eval", eval, v, scope)) {
        if (eval == "cv") c.eval = EvalMode::KFold;
        else if (eval == "holdout") c.eval = EvalMode::Holdout;
        else v.add(scope + "eval", "expected 'cv' or 'holdout'");
    } else if (cell.contains("folds")) {
        c.eval = EvalMode::KFold;
    }
    if (want_number(cell, "holdout_fraction", dv, v, scope)) c.holdout_fraction = dv;
    if (want_bool(cell, "use_destinations", bv, v, scope)) c.use_destinations = bv;
    if (want_bool(cell, "standardize", bv, v, scope)) c.standardize = bv;
    if (want_int(cell, "sample_n", iv, v, scope)) c.sample_n = static_cast<std::size_t>(iv);
    if (want_int(cell, "seed", iv, v, scope)) c.seed = static_cast<std::uint64_t>(iv);

    if (want_number(cell, "alpha", dv, v, scope)) c.nb_alpha = dv;
    if (want_int(cell, "min_leaf", iv, v, scope)) c.tree_min_leaf = static_cast<int>(iv);
    if (want_number(cell, "eta", dv, v, scope)) c.lr_eta = dv;
    if (want_int(cell, "epochs", iv, v, scope)) c.lr_epochs = static_cast<int>(iv);
    if (want_number(cell, "lambda", dv, v, scope)) c.lr_lambda = dv;
    if (want_int(cell, "k", iv, v, scope)) c.knn_k = static_cast<int>(iv);
    if (want_int(cell, "bags", iv, v, scope)) c.bags = static_cast<int>(iv);
    if (want_int(cell, "rounds", iv, v, scope)) c.boost_rounds = static_cast<int>(iv);
    if (want_int(cell, "depth", iv, v, scope)) {
        c.tree_depth = static_cast<int>(iv);
        c.base_depth = static_cast<int>(iv);
    }
    std::string crit;
    if (want_string(cell, "criterion", crit, v, scope)) {
        if (crit == "entropy") c.tree_criterion = SplitCriterion::Entropy;
        else if (crit == "gini") c.tree_criterion = SplitCriterion::Gini;
        else v.add(scope + "criterion", "expected 'entropy' or 'gini'");
    }

    // Domain checks mirror each learner's preconditions.
    if (c.coarsen_k < 1 || c.coarsen_k > 100) v.add(scope + "cluster_k", "must be in [1,100]");
    if (c.eval == EvalMode::KFold && c.folds < 2) v.add(scope + "folds", "must be >= 2");
    if (c.holdout_fraction <= 0.0 || c.holdout_fraction >= 1.0)
        v.add(scope + "holdout_fraction", "must be in (0,1)");
    if (c.nb_alpha <= 0.0) v.add(scope + "alpha", "must be positive");
    if (c.tree_depth < 1) v.add(scope + "depth", "must be >= 1");
    if (c.tree_min_leaf < 1) v.add(scope + "min_leaf", "must be >= 1");
    if (c.knn_k < 1) v.add(scope + "k", "must be >= 1");
    if (c.lr_eta <= 0.0) v.add(scope + "eta", "must be positive");
    if (c.lr_epochs < 1) v.add(scope + "epochs", "must be >= 1");
    if (c.lr_lambda < 0.0) v.add(scope + "lambda", "must be >= 0");
    if (c.bags < 1) v.add(scope + "bags", "must be >= 1");
    if (c.boost_rounds < 1) v.add(scope + "rounds", "must be >= 1");
    return c;
}

}  // namespace cli_detail

/// Parses a JSON config; structural and domain problems append to
/// `violations` instead of throwing.
inline RunConfig parse_run_config(const nlohmann::json& j, std::vector<std::string>& violations) {
    using cli_detail::json;
    cli_detail::Violations v{violations};
    RunConfig cfg;

    if (!j.is_object()) {
        v.add("config", "top level must be a JSON object");
        return cfg;
    }

    std::int64_t iv;
    bool bv;
    if (cli_detail::want_int(j, "seed", iv, v, "")) cfg.seed = static_cast<std::uint64_t>(iv);
    if (cli_detail::want_int(j, "workers", iv, v, "")) cfg.workers = static_cast<int>(iv);
    cli_detail::want_string(j, "out_dir", cfg.out_dir, v, "");

    if (j.contains("input")) {
        if (!j["input"].is_object()) {
            v.add("input", "expected an object");
        } else {
            InputPaths paths;
            cli_detail::want_string(j["input"], "events", paths.events, v, "input.");
            cli_detail::want_string(j["input"], "destinations", paths.destinations, v, "input.");
            cfg.input = paths;
        }
    }
    if (j.contains("synthetic")) {
        if (!j["synthetic"].is_object()) {
            v.add("synthetic", "expected an object");
        } else {
            SyntheticSpec spec;
            double dv;
            if (cli_detail::want_int(j["synthetic"], "n", iv, v, "synthetic."))
                spec.n = iv > 0 ? static_cast<std::size_t>(iv) : 0;
            if (cli_detail::want_int(j["synthetic"], "hotel_clusters", iv, v, "synthetic."))
                spec.hotel_clusters = static_cast<int>(iv);
            if (cli_detail::want_number(j["synthetic"], "separation", dv, v, "synthetic."))
                spec.separation = dv;
            if (cli_detail::want_number(j["synthetic"], "booking_rate", dv, v, "synthetic."))
                spec.booking_rate = dv;
            cfg.synthetic = spec;
        }
    }

    if (j.contains("pipeline")) {
        if (!j["pipeline"].is_object()) {
            v.add("pipeline", "expected an object");
        } else {
            const json& p = j["pipeline"];
            if (cli_detail::want_bool(p, "filter_bookings", bv, v, "pipeline."))
                cfg.pipeline.filter_bookings = bv;
            if (cli_detail::want_bool(p, "merge_destinations", bv, v, "pipeline."))
                cfg.pipeline.merge_destinations = bv;
            if (cli_detail::want_bool(p, "discretize_dates", bv, v, "pipeline."))
                cfg.pipeline.discretize_dates = bv;
            if (cli_detail::want_bool(p, "standardize", bv, v, "pipeline.")) cfg.standardize = bv;
        }
    }

    if (j.contains("analysis")) {
        if (!j["analysis"].is_object()) {
            v.add("analysis", "expected an object");
        } else {
            const json& a = j["analysis"];
            if (a.contains("coarsen_ks")) {
                if (!a["coarsen_ks"].is_array()) {
                    v.add("analysis.coarsen_ks", "expected an array of integers");
                } else {
                    cfg.analysis.coarsen_ks.clear();
                    for (const auto& item : a["coarsen_ks"]) {
                        if (!item.is_number_integer()) {
                            v.add("analysis.coarsen_ks", "expected an array of integers");
                            break;
                        }
                        cfg.analysis.coarsen_ks.push_back(item.get<int>());
                    }
                }
            }
            if (cli_detail::want_bool(a, "use_destinations", bv, v, "analysis."))
                cfg.analysis.use_destinations = bv;
        }
    }

    if (j.contains("experiments")) {
        if (!j["experiments"].is_array()) {
            v.add("experiments", "expected an array");
        } else {
            std::size_t index = 0;
            for (const auto& cell : j["experiments"]) {
                if (!cell.is_object()) {
                    v.add("experiments[" + std::to_string(index) + "]", "expected an object");
                } else {
                    cfg.experiments.push_back(cli_detail::parse_cell(cell, index, cfg.standardize, v));
                }
                ++index;
            }
        }
    }
    return cfg;
}

enum class Command { Analyze, Experiment, Synthesize };

/// Full config validation; returns every violation. No file is written before
/// this passes.
inline std::vector<std::string> validate_run_config(const RunConfig& cfg, Command command) {
    std::vector<std::string> out;
    cli_detail::Violations v{out};

    const bool has_input = cfg.input.has_value();
    const bool has_synth = cfg.synthetic.has_value();
    if (has_input == has_synth)
        v.add("input/synthetic", "exactly one of 'input' and 'synthetic' must be present");

    if (has_input) {
        if (cfg.input->events.empty()) {
            v.add("input.events", "required");
        } else if (!std::filesystem::exists(cfg.input->events)) {
            v.add("input.events", "file does not exist: " + cfg.input->events);
        }
        if (cfg.pipeline.merge_destinations) {
            if (cfg.input->destinations.empty()) {
                v.add("input.destinations", "required when pipeline.merge_destinations is true");
            } else if (!std::filesystem::exists(cfg.input->destinations)) {
                v.add("input.destinations", "file does not exist: " + cfg.input->destinations);
            }
        }
    }
    if (has_synth) {
        if (cfg.synthetic->n < 1) v.add("synthetic.n", "must be >= 1");
        if (cfg.synthetic->hotel_clusters < 1 || cfg.synthetic->hotel_clusters > 100)
            v.add("synthetic.hotel_clusters", "must be in [1,100]");
        if (cfg.synthetic->separation < 0.0) v.add("synthetic.separation", "must be >= 0");
        if (cfg.synthetic->booking_rate <= 0.0 || cfg.synthetic->booking_rate > 1.0)
            v.add("synthetic.booking_rate", "must be in (0,1]");
    }

    if (cfg.out_dir.empty()) v.add("out_dir", "must not be empty");
    if (cfg.workers < 1) v.add("workers", "must be >= 1");

    if (command == Command::Synthesize && !has_synth)
        v.add("synthetic", "the synthesize command requires a synthetic block");
    if (command == Command::Experiment && cfg.experiments.empty())
        v.add("experiments", "the experiment command requires a non-empty grid");
    if (command == Command::Analyze) {
        if (cfg.analysis.coarsen_ks.empty()) v.add("analysis.coarsen_ks", "must not be empty");
        for (int k : cfg.analysis.coarsen_ks)
            if (k < 1 || k > 99) v.add("analysis.coarsen_ks", "entries must be in [1,99]");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Commands. Each assumes validate_run_config passed.
// ---------------------------------------------------------------------------

namespace cli_detail {

struct LoadedData {
    Dataset events;
    std::optional<Dataset> destinations;
};

inline LoadedData acquire_data(const RunConfig& cfg) {
    LoadedData data;
    if (cfg.synthetic) {
        auto [events, destinations] =
            synthesize_dataset(cfg.synthetic->n, cfg.synthetic->hotel_clusters, cfg.seed,
                               cfg.synthetic->separation, cfg.synthetic->booking_rate);
        data.events = std::move(events);
        data.destinations = std::move(destinations);
    } else {
        data.events = pipeline_stage("load_events", [&] { return load_events(cfg.input->events); });
        if (cfg.pipeline.merge_destinations)
            data.destinations = pipeline_stage(
                "load_destinations", [&] { return load_destinations(cfg.input->destinations); });
    }
    return data;
}

}  // namespace cli_detail

/// Writes the synthetic tables as events.csv and destinations.csv.
inline void cmd_synthesize(const RunConfig& cfg) {
    auto [events, destinations] =
        synthesize_dataset(cfg.synthetic->n, cfg.synthetic->hotel_clusters, cfg.seed,
                           cfg.synthetic->separation, cfg.synthetic->booking_rate);
    std::filesystem::create_directories(cfg.out_dir);
    write_csv(events, std::filesystem::path(cfg.out_dir) / "events.csv");
    write_csv(destinations, std::filesystem::path(cfg.out_dir) / "destinations.csv");
}

/// Correlation matrix, class histogram and coarse-label cross-tabulations:
/// hotel_cluster vs the smallest configured k, then each further k vs the
/// smallest.
inline void cmd_analyze(const RunConfig& cfg) {
    const cli_detail::LoadedData data = cli_detail::acquire_data(cfg);
    const PreparedData prepared = prepare_pipeline(
        data.events, data.destinations ? &*data.destinations : nullptr, cfg.pipeline);

    const FeatureMatrix& raw = cfg.analysis.use_destinations ? prepared.features_with_destinations
                                                             : prepared.features_without_destinations;
    FeatureMatrix features = raw;
    if (cfg.standardize) features = standardize_apply(raw, standardize_fit(raw));

    std::filesystem::create_directories(cfg.out_dir);
    const std::filesystem::path out(cfg.out_dir);
    write_correlation_csv(correlation_matrix(raw), out / "correlation.csv");
    write_histogram_csv(class_histogram(prepared.labels), out / "class_histogram.csv");

    std::vector<int> ks = cfg.analysis.coarsen_ks;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

    std::vector<std::vector<int>> coarse;
    for (int k : ks)
        coarse.push_back(
            coarsen_labels(features, k, substream(cfg.seed, "analysis-coarsen", static_cast<std::uint64_t>(k))())
                .labels);

    const std::string base_name = "k" + std::to_string(ks[0]);
    write_crosstab_csv(crosstab(prepared.labels, coarse[0]),
                       out / ("crosstab_hotel_cluster_vs_" + base_name + ".csv"));
    for (std::size_t i = 1; i < ks.size(); ++i)
        write_crosstab_csv(crosstab(coarse[i], coarse[0]),
                           out / ("crosstab_k" + std::to_string(ks[i]) + "_vs_" + base_name + ".csv"));
}

/// End-to-end: load/synthesize, prepare, run the grid, write report.csv,
/// report.txt, timings.csv and the per-cell model files.
inline MetricsReport cmd_experiment(const RunConfig& cfg) {
    const cli_detail::LoadedData data = cli_detail::acquire_data(cfg);
    const PreparedData prepared = prepare_pipeline(
        data.events, data.destinations ? &*data.destinations : nullptr, cfg.pipeline);

    std::vector<ExperimentConfig> grid = cfg.experiments;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i].seed == 0) grid[i].seed = substream(cfg.seed, "cell", i)();

    const MetricsReport report =
        run_experiment_matrix(grid, prepared.features_with_destinations,
                              prepared.features_without_destinations, prepared.labels, cfg.workers);

    std::filesystem::create_directories(cfg.out_dir);
    const std::filesystem::path out(cfg.out_dir);
    write_report_csv(report, out / "report.csv");
    write_report_text(report, out / "report.txt");
    write_timings_csv(report, out / "timings.csv");

    std::filesystem::create_directories(out / "models");
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        if (!report.rows[i].first_fold_model) continue;
        char name[64];
        std::snprintf(name, sizeof(name), "cell_%03zu_%s.model", i,
                      algorithm_name(report.rows[i].config.algorithm));
        save_model(*report.rows[i].first_fold_model, out / "models" / name);
    }
    return report;
}

}  // namespace hotelml
