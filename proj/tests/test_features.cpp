#include <catch2/catch_amalgamated.hpp>

#include "hotelml/features.hpp"
#include "test_support.hpp"

using namespace hotelml;
using test_support::make_matrix;

namespace {

Dataset date_fixture() {
    Column dt("date_time", ColumnType::Timestamp);
    dt.push_ts(*parse_timestamp("2014-08-11 07:46:59"));
    dt.push_ts(*parse_timestamp("10-04-2016"));
    Column x("x", ColumnType::Integer);
    x.push_int(5);
    x.push_int(6);
    std::vector<Column> cols;
    cols.push_back(std::move(dt));
    cols.push_back(std::move(x));
    return Dataset(std::move(cols));
}

}  // namespace

TEST_CASE("discretize_dates splits timestamps into month and year", "[features]") {
    const Dataset out = discretize_dates(date_fixture());
    REQUIRE(out.col_count() == 3);
    CHECK_FALSE(out.has("date_time"));
    CHECK(out.col("date_time_month").int_at(0) == 8);
    CHECK(out.col("date_time_year").int_at(0) == 2014);
    CHECK(out.col("date_time_month").int_at(1) == 10);
    CHECK(out.col("date_time_year").int_at(1) == 2016);
    CHECK(out.row_count() == 2);

    SECTION("deterministic") {
        CHECK(discretize_dates(date_fixture()).equals(out));
    }
    SECTION("missing timestamps become missing month/year") {
        Column dt("d", ColumnType::Timestamp);
        dt.push_missing();
        std::vector<Column> cols;
        cols.push_back(std::move(dt));
        const Dataset d = discretize_dates(Dataset(std::move(cols)));
        CHECK(d.col("d_month").is_missing(0));
        CHECK(d.col("d_year").is_missing(0));
    }
}

TEST_CASE("imputation fills missing cells from training statistics", "[features]") {
    Column v("v", ColumnType::Real);
    v.push_real(1.0);
    v.push_missing();
    v.push_real(3.0);
    Column i("i", ColumnType::Integer);
    i.push_int(10);
    i.push_missing();
    i.push_int(11);
    std::vector<Column> cols;
    cols.push_back(std::move(v));
    cols.push_back(std::move(i));
    const Dataset ds(std::move(cols));

    const ImputeStats stats = compute_impute_stats(ds);
    const Dataset filled = apply_impute(ds, stats);
    CHECK(filled.col("v").real_at(1) == 2.0);
    CHECK(filled.col("i").int_at(1) == 11);  // round(10.5) away from zero
    CHECK_FALSE(filled.col("v").has_missing());

    SECTION("stats from one table can fill another") {
        Column w("v", ColumnType::Real);
        w.push_missing();
        Column j("i", ColumnType::Integer);
        j.push_int(0);
        std::vector<Column> other_cols;
        other_cols.push_back(std::move(w));
        other_cols.push_back(std::move(j));
        const Dataset other(std::move(other_cols));
        CHECK(apply_impute(other, stats).col("v").real_at(0) == 2.0);
    }
}

TEST_CASE("build_feature_matrix extracts labels and encodes kinds", "[features]") {
    Column site("site_name", ColumnType::Integer);
    Column dist("orig_destination_distance", ColumnType::Real);
    Column adults("srch_adults_cnt", ColumnType::Integer);
    Column user("user_id", ColumnType::Integer);
    Column target("hotel_cluster", ColumnType::Integer);
    for (int i = 0; i < 3; ++i) {
        site.push_int(i);
        dist.push_real(1.5 * i);
        adults.push_int(i + 1);
        user.push_int(1000 + i);
        target.push_int(i % 2);
    }
    std::vector<Column> cols;
    cols.push_back(std::move(site));
    cols.push_back(std::move(dist));
    cols.push_back(std::move(adults));
    cols.push_back(std::move(user));
    cols.push_back(std::move(target));
    const Dataset ds(std::move(cols));

    const auto [features, labels] = build_feature_matrix(ds, "hotel_cluster", false);
    CHECK(labels == std::vector<int>{0, 1, 0});
    REQUIRE(features.names == std::vector<std::string>{"site_name", "orig_destination_distance",
                                                       "srch_adults_cnt"});
    CHECK(features.kinds[0] == FeatureKind::Categorical);  // id column
    CHECK(features.kinds[1] == FeatureKind::Numeric);      // real column
    CHECK(features.kinds[2] == FeatureKind::Numeric);      // *_cnt column

    SECTION("target must exist") {
        CHECK_THROWS_AS(build_feature_matrix(ds, "nope", false), SchemaError);
    }
    SECTION("extra exclusions are honored") {
        const auto cut = build_feature_matrix(ds, "hotel_cluster", false, {"site_name"});
        CHECK(cut.features.dim() == 2);
    }
}

TEST_CASE("standardization matches the hand-computed z-scores", "[features]") {
    const FeatureMatrix fm = make_matrix({{2.0}, {4.0}});
    const Standardization s = standardize_fit(fm);
    CHECK(s.mean[0] == 3.0);
    CHECK(s.stddev[0] == 1.0);  // population convention
    const FeatureMatrix z = standardize_apply(fm, s);
    CHECK(z.values.at(0, 0) == -1.0);
    CHECK(z.values.at(1, 0) == 1.0);

    SECTION("constant features map to zeros") {
        const FeatureMatrix c = make_matrix({{7.0}, {7.0}, {7.0}});
        const FeatureMatrix zc = standardize_apply(c, standardize_fit(c));
        for (std::size_t i = 0; i < 3; ++i) CHECK(zc.values.at(i, 0) == 0.0);
    }
}

TEST_CASE("standardized columns have zero mean and unit deviation", "[features]") {
    auto rng = substream(17, "standardize-property");
    const FeatureMatrix fm = test_support::random_numeric_matrix(200, 6, rng);
    const FeatureMatrix z = standardize_apply(fm, standardize_fit(fm));
    for (std::size_t j = 0; j < z.dim(); ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < z.row_count(); ++i) mean += z.values.at(i, j);
        mean /= static_cast<double>(z.row_count());
        double var = 0.0;
        for (std::size_t i = 0; i < z.row_count(); ++i) {
            const double d = z.values.at(i, j) - mean;
            var += d * d;
        }
        var /= static_cast<double>(z.row_count());
        CHECK(std::abs(mean) < 1e-9);
        CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
    }

    SECTION("recorded parameters reproduce the training transform exactly") {
        const Standardization s = standardize_fit(fm);
        const FeatureMatrix once = standardize_apply(fm, s);
        const FeatureMatrix again = standardize_apply(fm, *once.standardization);
        CHECK(once.values == again.values);
    }
}

TEST_CASE("correlation matrix matches hand-computed Pearson values", "[features]") {
    SECTION("self-correlation is exactly 1") {
        const FeatureMatrix fm = make_matrix({{1.0, 1.0}, {2.0, 2.0}, {5.0, 5.0}});
        const CorrelationMatrix cm = correlation_matrix(fm);
        CHECK(cm.entries.at(0, 1) == Catch::Approx(1.0));
        CHECK(cm.entries.at(0, 0) == 1.0);
    }
    SECTION("perfect anticorrelation") {
        const FeatureMatrix fm = make_matrix({{1.0, -1.0}, {2.0, -2.0}, {5.0, -5.0}});
        CHECK(correlation_matrix(fm).entries.at(0, 1) == Catch::Approx(-1.0));
    }
    SECTION("hand-computed example") {
        const FeatureMatrix fm = make_matrix({{1.0, 2.0}, {2.0, 4.0}, {3.0, 7.0}});
        // r = 15 / sqrt(228)
        CHECK(correlation_matrix(fm).entries.at(0, 1) ==
              Catch::Approx(15.0 / std::sqrt(228.0)).epsilon(1e-9));
        CHECK(correlation_matrix(fm).entries.at(0, 1) == Catch::Approx(0.9934).margin(5e-5));
    }
    SECTION("constant columns correlate 0 off-diagonal") {
        const FeatureMatrix fm = make_matrix({{1.0, 3.0}, {2.0, 3.0}});
        const CorrelationMatrix cm = correlation_matrix(fm);
        CHECK(cm.entries.at(0, 1) == 0.0);
        CHECK(cm.entries.at(1, 1) == 1.0);
    }
    SECTION("single-row input is rejected") {
        CHECK_THROWS_AS(correlation_matrix(make_matrix({{1.0, 2.0}})), ArgumentError);
    }
}

TEST_CASE("correlation matrix is symmetric, unit-diagonal and bounded", "[features]") {
    auto rng = substream(23, "correlation-property");
    for (int trial = 0; trial < 5; ++trial) {
        const FeatureMatrix fm = test_support::random_numeric_matrix(40, 7, rng);
        const CorrelationMatrix cm = correlation_matrix(fm);
        for (std::size_t a = 0; a < cm.names.size(); ++a) {
            CHECK(cm.entries.at(a, a) == 1.0);
            for (std::size_t b = 0; b < cm.names.size(); ++b) {
                CHECK(cm.entries.at(a, b) == cm.entries.at(b, a));
                CHECK(cm.entries.at(a, b) >= -1.0);
                CHECK(cm.entries.at(a, b) <= 1.0);
            }
        }
    }
}

TEST_CASE("class histogram counts every label", "[features]") {
    CHECK(class_histogram({0, 0, 1}) == ClassHistogram{{0, 2}, {1, 1}});

    SECTION("100 distinct labels appear once each") {
        std::vector<int> labels(100);
        for (int i = 0; i < 100; ++i) labels[static_cast<std::size_t>(i)] = i;
        const ClassHistogram h = class_histogram(labels);
        REQUIRE(h.size() == 100);
        for (const auto& [cls, count] : h) CHECK(count == 1);
    }
    SECTION("counts sum to the label count") {
        auto rng = substream(5, "histogram-property");
        const std::vector<int> labels = test_support::random_labels(10000, 37, rng);
        const ClassHistogram h = class_histogram(labels);
        std::int64_t total = 0;
        for (const auto& [cls, count] : h) total += count;
        CHECK(total == 10000);
    }
    SECTION("empty input is rejected") {
        CHECK_THROWS_AS(class_histogram({}), ArgumentError);
    }
}

TEST_CASE("plot-data serialization writes plain CSV", "[features]") {
    test_support::TempDir tmp;
    const FeatureMatrix fm = make_matrix({{1.0, 2.0}, {2.0, 4.0}, {3.0, 7.0}});
    write_correlation_csv(correlation_matrix(fm), tmp.file("corr.csv"));
    const std::string corr = test_support::read_file(tmp.file("corr.csv"));
    CHECK(corr.find("feature,f0,f1") == 0);

    write_histogram_csv(class_histogram({3, 3, 9}), tmp.file("hist.csv"));
    CHECK(test_support::read_file(tmp.file("hist.csv")) == "class,count\n3,2\n9,1\n");
}
