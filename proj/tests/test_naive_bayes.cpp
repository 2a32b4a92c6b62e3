#include <catch2/catch_amalgamated.hpp>

#include "hotelml/naive_bayes.hpp"
#include "test_support.hpp"

using namespace hotelml;
using test_support::make_matrix;

TEST_CASE("smoothed frequencies match the hand-enumerated fixture", "[naive_bayes]") {
    // Class 0 ("A"): x=1 in both rows; class 1 ("B"): x=1 in neither.
    const FeatureMatrix train =
        make_matrix({{1.0}, {1.0}, {0.0}, {0.0}}, {FeatureKind::Categorical});
    const std::vector<int> labels{0, 0, 1, 1};
    const NaiveBayesModel model = nb_fit(train, labels, 1.0);

    // P(x=1|A) = (2+1)/(2+2) = 0.75, P(x=1|B) = (0+1)/(2+2) = 0.25
    const FeatureMatrix query = make_matrix({{1.0}}, {FeatureKind::Categorical});
    const Matrix proba = nb_predict_proba(model, query);
    CHECK(proba.at(0, 0) == Catch::Approx(0.75).margin(1e-12));
    CHECK(proba.at(0, 1) == Catch::Approx(0.25).margin(1e-12));
    CHECK(nb_predict(model, query) == std::vector<int>{0});

    SECTION("priors exponentiate-and-sum to one") {
        double total = 0.0;
        for (double lp : model.log_priors) total += std::exp(lp);
        CHECK(total == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("gaussian statistics use the population convention", "[naive_bayes]") {
    const FeatureMatrix train = make_matrix({{1.0}, {3.0}}, {FeatureKind::Numeric});
    const NaiveBayesModel model = nb_fit(train, {0, 0}, 1.0);
    CHECK(model.means.at(0, 0) == 2.0);
    CHECK(model.vars.at(0, 0) == 1.0);

    SECTION("zero variance is floored, not divided by") {
        const FeatureMatrix constant = make_matrix({{5.0}, {5.0}}, {FeatureKind::Numeric});
        const NaiveBayesModel m = nb_fit(constant, {0, 0}, 1.0);
        CHECK(m.vars.at(0, 0) == kVarianceFloor);
        CHECK(std::isfinite(nb_predict_proba(m, constant).at(0, 0)));
    }
}

TEST_CASE("single-class training predicts that class with probability 1", "[naive_bayes]") {
    const FeatureMatrix train = make_matrix({{1.0}, {2.0}}, {FeatureKind::Numeric});
    const NaiveBayesModel model = nb_fit(train, {7, 7}, 1.0);
    const FeatureMatrix query = make_matrix({{1.5}}, {FeatureKind::Numeric});
    CHECK(nb_predict(model, query) == std::vector<int>{7});
    CHECK(nb_predict_proba(model, query).at(0, 0) == 1.0);
}

TEST_CASE("posterior equals brute-force Bayes enumeration", "[naive_bayes]") {
    auto rng = substream(2024, "nb-oracle");
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 10 + uniform_index(rng, 30);
        const std::size_t d = 1 + uniform_index(rng, 4);
        const int num_classes = 2 + static_cast<int>(uniform_index(rng, 2));
        const double alpha = trial % 3 == 0 ? 0.5 : 1.0;

        FeatureMatrix train = test_support::random_numeric_matrix(n, d, rng, /*distinct=*/3);
        train.kinds.assign(d, FeatureKind::Categorical);
        const std::vector<int> labels = test_support::random_labels(n, num_classes, rng);

        const NaiveBayesModel model = nb_fit(train, labels, alpha);
        FeatureMatrix queries = test_support::random_numeric_matrix(8, d, rng, /*distinct=*/4);
        queries.kinds.assign(d, FeatureKind::Categorical);  // value 3 never seen in training
        const Matrix proba = nb_predict_proba(model, queries);
        const std::vector<int> pred = nb_predict(model, queries);

        for (std::size_t q = 0; q < queries.row_count(); ++q) {
            std::vector<double> query_row(d);
            for (std::size_t j = 0; j < d; ++j) query_row[j] = queries.values.at(q, j);
            const std::vector<double> expected =
                test_support::nb_enumeration_posterior(train, labels, query_row, alpha);
            double row_sum = 0.0;
            for (std::size_t c = 0; c < expected.size(); ++c) {
                CHECK(proba.at(q, c) == Catch::Approx(expected[c]).margin(1e-9));
                row_sum += proba.at(q, c);
            }
            CHECK(row_sum == Catch::Approx(1.0).margin(1e-9));

            // prediction = argmax with lowest-class ties
            std::size_t best = 0;
            for (std::size_t c = 1; c < expected.size(); ++c)
                if (expected[c] > expected[best] + 1e-12) best = c;
            CHECK(pred[q] == model.classes[best]);
        }
    }
}

TEST_CASE("naive bayes argument errors", "[naive_bayes]") {
    const FeatureMatrix train = make_matrix({{1.0}}, {FeatureKind::Numeric});
    CHECK_THROWS_AS(nb_fit(make_matrix({}), {}, 1.0), ArgumentError);
    CHECK_THROWS_AS(nb_fit(train, {0}, 0.0), ArgumentError);
    CHECK_THROWS_AS(nb_fit(train, {0, 1}, 1.0), ArgumentError);

    const NaiveBayesModel model = nb_fit(train, {0}, 1.0);
    CHECK_THROWS_AS(nb_predict(model, make_matrix({{1.0, 2.0}})), ArgumentError);
}
