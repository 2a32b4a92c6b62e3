#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "hotelml/kmeans.hpp"
#include "test_support.hpp"

using namespace hotelml;
using test_support::make_matrix;

namespace {

FeatureMatrix square_fixture() {
    return make_matrix({{0.0, 0.0}, {0.0, 1.0}, {10.0, 0.0}, {10.0, 1.0}});
}

/// Three well-separated Gaussian blobs.
FeatureMatrix blob_fixture(std::size_t per_blob, std::uint64_t seed, double spread = 0.5) {
    const double centers[3][2] = {{0.0, 0.0}, {8.0, 0.0}, {4.0, 7.0}};
    auto rng = substream(seed, "blob-fixture");
    std::vector<std::vector<double>> rows;
    for (int b = 0; b < 3; ++b)
        for (std::size_t i = 0; i < per_blob; ++i)
            rows.push_back({centers[b][0] + spread * normal(rng), centers[b][1] + spread * normal(rng)});
    return make_matrix(rows);
}

}  // namespace

TEST_CASE("k-means reproduces the hand-solved square fixture", "[kmeans]") {
    const FeatureMatrix fm = square_fixture();

    SECTION("k=2: the two side pairs, inertia exactly 1") {
        for (std::uint64_t seed : {0ULL, 1ULL, 2ULL, 3ULL}) {
            const KMeansModel model = kmeans_fit(fm, 2, seed);
            CHECK(model.inertia == 1.0);
            std::set<std::pair<double, double>> centroids;
            for (std::size_t c = 0; c < 2; ++c)
                centroids.insert({model.centroids.at(c, 0), model.centroids.at(c, 1)});
            CHECK(centroids ==
                  std::set<std::pair<double, double>>{{0.0, 0.5}, {10.0, 0.5}});
        }
    }
    SECTION("k=1: global mean, inertia 101") {
        const KMeansModel model = kmeans_fit(fm, 1, 42);
        CHECK(model.centroids.at(0, 0) == 5.0);
        CHECK(model.centroids.at(0, 1) == 0.5);
        CHECK(model.inertia == 101.0);
    }
    SECTION("k=n: every point a centroid, inertia 0") {
        const KMeansModel model = kmeans_fit(fm, 4, 7);
        CHECK(model.inertia == 0.0);
        std::set<std::pair<double, double>> centroids;
        for (std::size_t c = 0; c < 4; ++c)
            centroids.insert({model.centroids.at(c, 0), model.centroids.at(c, 1)});
        CHECK(centroids.size() == 4);
    }
    SECTION("argument checks") {
        CHECK_THROWS_AS(kmeans_fit(fm, 5, 1), ArgumentError);
        CHECK_THROWS_AS(kmeans_fit(fm, 0, 1), ArgumentError);
        CHECK_THROWS_AS(kmeans_fit(make_matrix({}), 1, 1), ArgumentError);
        CHECK_THROWS_AS(kmeans_fit(fm, 2, 1, 0), ArgumentError);
        CHECK_THROWS_AS(kmeans_fit(fm, 2, 1, 300, -1.0), ArgumentError);
    }
}

TEST_CASE("Lloyd iterations never increase inertia", "[kmeans]") {
    auto rng = substream(99, "lloyd-fixture");
    const FeatureMatrix fm = test_support::random_numeric_matrix(500, 5, rng);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const KMeansModel model = kmeans_fit(fm, 12, seed);
        REQUIRE(model.inertia_trace.size() >= 2);
        for (std::size_t i = 1; i < model.inertia_trace.size(); ++i)
            CHECK(model.inertia_trace[i] <= model.inertia_trace[i - 1]);
        CHECK(model.inertia == model.inertia_trace.back());
    }
}

TEST_CASE("converged centroids equal the means of their assigned points", "[kmeans]") {
    auto rng = substream(31, "centroid-mean-fixture");
    const FeatureMatrix fm = test_support::random_numeric_matrix(300, 4, rng);
    const double tol = 1e-4;
    const KMeansModel model = kmeans_fit(fm, 8, 3, 300, tol);
    const std::vector<int> assign = kmeans_assign(model, fm);

    Matrix sums(8, fm.dim());
    std::vector<std::size_t> counts(8, 0);
    for (std::size_t i = 0; i < fm.row_count(); ++i) {
        const auto c = static_cast<std::size_t>(assign[i]);
        ++counts[c];
        for (std::size_t j = 0; j < fm.dim(); ++j) sums.at(c, j) += fm.values.at(i, j);
    }
    for (std::size_t c = 0; c < 8; ++c) {
        REQUIRE(counts[c] > 0);
        double dist = 0.0;
        for (std::size_t j = 0; j < fm.dim(); ++j) {
            const double diff = sums.at(c, j) / static_cast<double>(counts[c]) - model.centroids.at(c, j);
            dist += diff * diff;
        }
        CHECK(std::sqrt(dist) <= tol);
    }
}

TEST_CASE("assignment uses nearest centroid with lowest-index ties", "[kmeans]") {
    KMeansModel model;
    model.k = 3;
    model.centroids = make_matrix({{0.0, 0.0}, {4.0, 0.0}, {8.0, 0.0}}).values;

    SECTION("a point equal to a centroid lands there") {
        CHECK(kmeans_assign(model, make_matrix({{8.0, 0.0}})) == std::vector<int>{2});
    }
    SECTION("equidistant points pick the lower index") {
        CHECK(kmeans_assign(model, make_matrix({{6.0, 0.0}})) == std::vector<int>{1});
        CHECK(kmeans_assign(model, make_matrix({{2.0, 0.0}})) == std::vector<int>{0});
    }
    SECTION("dimension mismatch is rejected") {
        CHECK_THROWS_AS(kmeans_assign(model, make_matrix({{1.0}})), ArgumentError);
    }
    SECTION("re-assigning the training data reproduces the converged assignment") {
        const FeatureMatrix fm = blob_fixture(40, 4);
        const KMeansModel fitted = kmeans_fit(fm, 3, 11);
        const std::vector<int> assigned = kmeans_assign(fitted, fm);
        double inertia = 0.0;
        for (std::size_t i = 0; i < fm.row_count(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < fitted.centroids.rows; ++c)
                best = std::min(best, squared_distance(fm.values.row(i), fitted.centroids.row(c),
                                                       fm.dim()));
            inertia += best;
        }
        CHECK(inertia == Catch::Approx(fitted.inertia));
        CHECK(assigned == kmeans_assign(fitted, fm));
    }
}

TEST_CASE("coarsen_labels is a total deterministic relabeling", "[kmeans]") {
    const FeatureMatrix fm = blob_fixture(30, 8);

    SECTION("labels stay within [0, k)") {
        const Coarsening c = coarsen_labels(fm, 5, 21);
        REQUIRE(c.labels.size() == fm.row_count());
        for (int v : c.labels) CHECK((v >= 0 && v < 5));
    }
    SECTION("k equal to the number of distinct rows gives inertia 0") {
        auto rng = substream(77, "distinct-rows");
        const FeatureMatrix distinct = test_support::random_numeric_matrix(100, 3, rng);
        const Coarsening c = coarsen_labels(distinct, 100, 5);
        CHECK(c.model.inertia == 0.0);
        std::set<int> seen(c.labels.begin(), c.labels.end());
        CHECK(seen.size() == 100);  // a permutation labeling
    }
    SECTION("same seed, same labeling") {
        CHECK(coarsen_labels(fm, 4, 9).labels == coarsen_labels(fm, 4, 9).labels);
    }
}

TEST_CASE("k-means++ seeding beats uniform seeding on separated blobs", "[kmeans]") {
    const FeatureMatrix fm = blob_fixture(40, 123, 0.4);
    double pp_total = 0.0, uniform_total = 0.0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        pp_total += kmeans_fit(fm, 3, static_cast<std::uint64_t>(s), 300, 1e-4,
                               KMeansInit::PlusPlus)
                        .inertia;
        uniform_total += kmeans_fit(fm, 3, static_cast<std::uint64_t>(s), 300, 1e-4,
                                    KMeansInit::UniformRandom)
                             .inertia;
    }
    CHECK(pp_total / seeds <= uniform_total / seeds);
}

TEST_CASE("empty clusters are reseeded rather than dropped", "[kmeans]") {
    // Two tight groups but k=3: at least one seeding collapses, forcing the
    // reseed path; k must survive with nonempty clusters.
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 10; ++i) rows.push_back({0.0 + 1e-3 * i, 0.0});
    for (int i = 0; i < 10; ++i) rows.push_back({50.0 + 1e-3 * i, 0.0});
    const FeatureMatrix fm = make_matrix(rows);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const KMeansModel model = kmeans_fit(fm, 3, seed);
        const std::vector<int> assign = kmeans_assign(model, fm);
        std::set<int> used(assign.begin(), assign.end());
        CHECK(used.size() == 3);
        for (std::size_t i = 1; i < model.inertia_trace.size(); ++i)
            CHECK(model.inertia_trace[i] <= model.inertia_trace[i - 1]);
    }
}

TEST_CASE("crosstab counts label pairs", "[kmeans]") {
    SECTION("worked example") {
        const ContingencyTable t = crosstab({0, 0, 1}, {1, 1, 0});
        REQUIRE(t.row_labels == std::vector<int>{0, 1});
        REQUIRE(t.col_labels == std::vector<int>{0, 1});
        CHECK(t.counts[0][1] == 2);
        CHECK(t.counts[1][0] == 1);
        CHECK(t.counts[0][0] == 0);
        CHECK(t.total() == 3);
    }
    SECTION("identical labelings give a diagonal table") {
        const std::vector<int> y{3, 1, 3, 2, 1};
        const ContingencyTable t = crosstab(y, y);
        for (std::size_t r = 0; r < t.row_labels.size(); ++r)
            for (std::size_t c = 0; c < t.col_labels.size(); ++c)
                if (r != c) CHECK(t.counts[r][c] == 0);
    }
    SECTION("row sums equal the first labeling's histogram") {
        const FeatureMatrix fm = blob_fixture(25, 3);
        auto rng = substream(12, "crosstab-labels");
        const std::vector<int> hundred = test_support::random_labels(fm.row_count(), 100, rng);
        const std::vector<int> five = coarsen_labels(fm, 5, 4).labels;
        const ContingencyTable t = crosstab(hundred, five);
        const ClassHistogram h = class_histogram(hundred);
        for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
            std::int64_t row_sum = 0;
            for (std::int64_t v : t.counts[r]) row_sum += v;
            CHECK(row_sum == h.at(t.row_labels[r]));
        }
    }
    SECTION("length mismatch is rejected") {
        CHECK_THROWS_AS(crosstab({1, 2}, {1}), ArgumentError);
        CHECK_THROWS_AS(crosstab({}, {}), ArgumentError);
    }
}
