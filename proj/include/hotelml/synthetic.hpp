#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "hotelml/dataset.hpp"
#include "hotelml/rng.hpp"

namespace hotelml {

/// Schema-conforming synthetic event and destination tables for desk-scale
/// experiments. Feature distributions depend on hotel_cluster with strength
/// controlled by `separation`: each (cluster, column) pair prefers one value
/// with probability separation/(separation+2), so separation 0 makes every
/// feature independent of the label. Destination latents carry the same
/// signal through the srch_destination_id link. Fully deterministic per seed.
inline std::pair<Dataset, Dataset> synthesize_dataset(std::size_t n, int n_hotel_clusters,
                                                      std::uint64_t seed, double cluster_separation,
                                                      double booking_rate = 0.4) {
    if (n < 1) throw ArgumentError("synthesize_dataset: n must be >= 1");
    if (n_hotel_clusters < 1 || n_hotel_clusters > 100)
        throw ArgumentError("synthesize_dataset: n_hotel_clusters must be in [1,100]");
    if (cluster_separation < 0.0)
        throw ArgumentError("synthesize_dataset: cluster_separation must be >= 0");
    if (booking_rate <= 0.0 || booking_rate > 1.0)
        throw ArgumentError("synthesize_dataset: booking_rate must be in (0,1]");

    const std::size_t k = static_cast<std::size_t>(n_hotel_clusters);
    const double theta = cluster_separation / (cluster_separation + 2.0);
    const std::size_t n_dest = std::clamp<std::size_t>(n / 20, 20, 2000);

    // ID-like columns fed with one preferred value per cluster.
    struct CatColumn {
        const char* name;
        std::uint64_t range;
    };
    const CatColumn cat_columns[] = {
        {"site_name", 40},          {"posa_continent", 5},
        {"user_location_country", 60}, {"user_location_region", 150},
        {"user_location_city", 400},   {"channel", 10},
        {"srch_destination_type_id", 8}, {"hotel_continent", 6},
        {"hotel_country", 40},          {"hotel_market", 120},
    };
    constexpr std::size_t n_cat = sizeof(cat_columns) / sizeof(cat_columns[0]);

    auto proto_rng = substream(seed, "synthetic-prototypes");
    std::vector<std::vector<std::int64_t>> preferred(n_cat, std::vector<std::int64_t>(k));
    for (std::size_t j = 0; j < n_cat; ++j)
        for (std::size_t c = 0; c < k; ++c)
            preferred[j][c] = static_cast<std::int64_t>(uniform_index(proto_rng, cat_columns[j].range));
    std::vector<double> distance_proto(k);
    for (std::size_t c = 0; c < k; ++c) distance_proto[c] = normal(proto_rng);
    std::vector<std::vector<double>> latent_proto(k, std::vector<double>(kDestinationLatentCount));
    for (std::size_t c = 0; c < k; ++c)
        for (int j = 0; j < kDestinationLatentCount; ++j) latent_proto[c][j] = normal(proto_rng);

    // Event rows.
    auto row_rng = substream(seed, "synthetic-rows");
    std::vector<Column> cols;
    for (const ColumnSpec& spec : event_schema()) cols.emplace_back(spec.name, spec.type);
    auto column = [&cols](std::string_view name) -> Column& {
        for (Column& c : cols)
            if (c.name() == name) return c;
        throw SchemaError("synthesize_dataset: unknown column");
    };

    const long start_day = days_from_civil(2013, 1, 1);
    const long end_day = days_from_civil(2015, 12, 31);

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = uniform_index(row_rng, k);

        Timestamp event_time = civil_from_days(
            start_day + static_cast<long>(uniform_index(row_rng, static_cast<std::uint64_t>(end_day - start_day + 1))));
        event_time.hour = static_cast<int>(uniform_index(row_rng, 24));
        event_time.minute = static_cast<int>(uniform_index(row_rng, 60));
        event_time.second = static_cast<int>(uniform_index(row_rng, 60));
        event_time.has_time = true;
        column("date_time").push_ts(event_time);

        Timestamp check_in = add_days(event_time, 1 + static_cast<long>(uniform_index(row_rng, 60)));
        check_in.has_time = false;
        check_in.hour = check_in.minute = check_in.second = 0;
        const Timestamp check_out = add_days(check_in, 1 + static_cast<long>(uniform_index(row_rng, 14)));
        column("srch_ci").push_ts(check_in);
        column("srch_co").push_ts(check_out);

        for (std::size_t j = 0; j < n_cat; ++j) {
            const bool concentrate = uniform_real(row_rng) < theta;
            const std::int64_t v = concentrate
                                       ? preferred[j][c]
                                       : static_cast<std::int64_t>(uniform_index(row_rng, cat_columns[j].range));
            column(cat_columns[j].name).push_int(v);
        }

        // Destination ids with cluster affinity: ids congruent to the cluster
        // index modulo k belong to it.
        std::int64_t dest_id;
        if (uniform_real(row_rng) < theta) {
            const std::uint64_t per_cluster = (n_dest + k - 1 - c) / k;  // ids c, c+k, c+2k, ...
            dest_id = static_cast<std::int64_t>(c + k * uniform_index(row_rng, per_cluster));
        } else {
            dest_id = static_cast<std::int64_t>(uniform_index(row_rng, n_dest));
        }
        column("srch_destination_id").push_int(dest_id);

        if (uniform_real(row_rng) < 0.03) {
            column("orig_destination_distance").push_missing();
        } else {
            const double value =
                std::exp(4.0 + 0.6 * cluster_separation * distance_proto[c] + 0.5 * normal(row_rng));
            column("orig_destination_distance").push_real(std::round(value * 10000.0) / 10000.0);
        }

        column("user_id").push_int(static_cast<std::int64_t>(1000 + uniform_index(row_rng, 1000000)));
        column("is_mobile").push_int(uniform_real(row_rng) < 0.3 ? 1 : 0);
        column("is_package").push_int(uniform_real(row_rng) < 0.25 ? 1 : 0);
        column("is_booking").push_int(uniform_real(row_rng) < booking_rate ? 1 : 0);

        column("srch_adults_cnt").push_int(1 + static_cast<std::int64_t>(uniform_index(row_rng, 4)));
        column("srch_children_cnt").push_int(static_cast<std::int64_t>(uniform_index(row_rng, 3)));
        column("srch_rm_cnt").push_int(1 + static_cast<std::int64_t>(uniform_index(row_rng, 3)));

        std::int64_t cnt = 1;
        while (cnt < 10 && uniform_real(row_rng) < 0.4) ++cnt;
        column("cnt").push_int(cnt);

        column("hotel_cluster").push_int(static_cast<std::int64_t>(c));
    }
    Dataset events(std::move(cols));

    // Destination table: latents around the prototype of the owning cluster.
    auto dest_rng = substream(seed, "synthetic-destinations");
    std::vector<Column> dcols;
    for (const ColumnSpec& spec : destination_schema()) dcols.emplace_back(spec.name, spec.type);
    for (std::size_t id = 0; id < n_dest; ++id) {
        dcols[0].push_int(static_cast<std::int64_t>(id));
        const std::size_t owner = id % k;
        for (int j = 0; j < kDestinationLatentCount; ++j) {
            const double v =
                0.35 * cluster_separation * latent_proto[owner][j] + 0.25 * normal(dest_rng);
            dcols[static_cast<std::size_t>(j) + 1].push_real(std::round(v * 1e6) / 1e6);
        }
    }
    Dataset destinations(std::move(dcols));

    validate_events(events, "<synthetic>");
    return {std::move(events), std::move(destinations)};
}

}  // namespace hotelml
