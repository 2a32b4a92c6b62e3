#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hotelml/dataset.hpp"
#include "hotelml/features.hpp"

namespace hotelml {

struct PipelineOptions {
    bool filter_bookings = true;
    bool merge_destinations = true;
    bool discretize_dates = true;
};

/// Everything downstream experiments need: the prepared table, raw
/// (unstandardized) feature matrices with and without the destination
/// latents, and the original labels. Standardization happens per evaluation
/// fold, not here.
struct PreparedData {
    Dataset table;
    FeatureMatrix features_with_destinations;
    FeatureMatrix features_without_destinations;
    std::vector<int> labels;
};

/// Wraps a pipeline stage so failures report which stage broke.
template <typename F>
auto pipeline_stage(const char* stage, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(std::string("pipeline stage '") + stage + "' failed: " + e.what());
    }
}

inline PreparedData prepare_pipeline(const Dataset& events, const Dataset* destinations,
                                     const PipelineOptions& options,
                                     const std::string& target = "hotel_cluster") {
    Dataset table = events;
    if (options.filter_bookings)
        table = pipeline_stage("filter_bookings", [&] { return filter_bookings(table); });
    const bool merged = options.merge_destinations && destinations != nullptr;
    if (merged)
        table = pipeline_stage("merge_destinations",
                               [&] { return merge_on_destination(table, *destinations); });
    if (options.discretize_dates)
        table = pipeline_stage("discretize_dates", [&] { return discretize_dates(table); });
    table = pipeline_stage("impute_missing",
                           [&] { return apply_impute(table, compute_impute_stats(table)); });

    PreparedData out;
    std::vector<std::string> latents;
    if (merged)
        for (int i = 1; i <= kDestinationLatentCount; ++i) latents.push_back("d" + std::to_string(i));

    auto extraction = pipeline_stage("build_features", [&] {
        return build_feature_matrix(table, target, /*standardize=*/false);
    });
    out.features_with_destinations = std::move(extraction.features);
    out.labels = std::move(extraction.labels);
    if (merged) {
        out.features_without_destinations = pipeline_stage("build_features", [&] {
            return build_feature_matrix(table, target, /*standardize=*/false, latents).features;
        });
    } else {
        out.features_without_destinations = out.features_with_destinations;
    }
    out.table = std::move(table);
    return out;
}

}  // namespace hotelml
