#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "feedback_kmeans/core.hpp"
#include "feedback_kmeans/random.hpp"
#include "test_support.hpp"

using namespace fbk;

namespace {

Dataset four_points() {
    Matrix points(4, 2);
    points << 0, 0, 1, 0, 5, 5, 6, 5;
    return make_dataset(points);
}

bool mentions(const std::vector<std::string>& violations, const std::string& needle) {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const std::string& v) { return v.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("single cluster holding every point is valid") {
    const auto dataset = four_points();
    Clustering c{{0, 0, 0, 0}, Matrix::Zero(1, 2), 1};
    CHECK(validate_clustering(dataset, c).empty());
}

TEST_CASE("declared but unused cluster id is reported empty") {
    const auto dataset = four_points();
    Clustering c{{0, 0, 1, 1}, Matrix::Zero(3, 2), 3};
    const auto violations = validate_clustering(dataset, c);
    CHECK(mentions(violations, "cluster 2 empty"));
}

TEST_CASE("short assignment is a length mismatch") {
    const auto dataset = four_points();
    Clustering c{{0, 0, 1}, Matrix::Zero(2, 2), 2};
    CHECK(mentions(validate_clustering(dataset, c), "assignment length mismatch"));
}

TEST_CASE("other malformed clusterings") {
    const auto dataset = four_points();
    SUBCASE("id out of range") {
        Clustering c{{0, 0, 1, 2}, Matrix::Zero(2, 2), 2};
        CHECK_FALSE(validate_clustering(dataset, c).empty());
    }
    SUBCASE("negative id") {
        Clustering c{{0, -1, 1, 1}, Matrix::Zero(2, 2), 2};
        CHECK_FALSE(validate_clustering(dataset, c).empty());
    }
    SUBCASE("centroid count differs from k") {
        Clustering c{{0, 0, 1, 1}, Matrix::Zero(3, 2), 2};
        CHECK_FALSE(validate_clustering(dataset, c).empty());
    }
    SUBCASE("centroid dimension differs") {
        Clustering c{{0, 0, 1, 1}, Matrix::Zero(2, 3), 2};
        CHECK_FALSE(validate_clustering(dataset, c).empty());
    }
    SUBCASE("non-positive k") {
        Clustering c{{}, Matrix(0, 2), 0};
        CHECK_FALSE(validate_clustering(dataset, c).empty());
    }
}

TEST_CASE("dataset invariants") {
    CHECK(dataset_violations(four_points()).empty());
    CHECK_FALSE(dataset_violations(make_dataset(Matrix(0, 3))).empty());

    auto with_bookings = four_points();
    with_bookings.bookings = std::vector<std::int64_t>{1, 2, 3};
    CHECK_FALSE(dataset_violations(with_bookings).empty());
    CHECK_THROWS_AS(check_dataset(with_bookings), Error);

    auto negative = four_points();
    negative.bookings = std::vector<std::int64_t>{1, -2, 3, 4};
    CHECK_FALSE(dataset_violations(negative).empty());

    auto labels = four_points();
    labels.hidden_segment = std::vector<int>{0, 1};
    CHECK_FALSE(dataset_violations(labels).empty());
}

TEST_CASE("default feature names") {
    CHECK(make_dataset(Matrix::Zero(2, 8)).feature_names[2] == "stay_duration");
    const auto names = make_dataset(Matrix::Zero(2, 3)).feature_names;
    CHECK(names == std::vector<std::string>{"f0", "f1", "f2"});
}

TEST_CASE("accepted clusterings are surjective and sizes sum to the point count") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 5 + static_cast<int>(uniform_below(rng, 60));
        const int k = 1 + static_cast<int>(uniform_below(rng, std::min<std::uint64_t>(n, 8)));
        const auto dataset = testing::random_dataset(rng, n, 3);
        const auto c = testing::random_clustering(dataset, k, rng);
        REQUIRE(validate_clustering(dataset, c).empty());
        const auto sizes = cluster_sizes(c);
        CHECK(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) == static_cast<std::size_t>(n));
        for (int id = 0; id < k; ++id) {
            CHECK(std::find(c.assignment.begin(), c.assignment.end(), id) != c.assignment.end());
        }
    }
}

TEST_CASE("renumber_dense drops unused ids and keeps order") {
    Matrix centroids(4, 1);
    centroids << 10, 11, 12, 13;
    const auto dense = renumber_dense(Clustering{{3, 1, 3, 1}, centroids, 4});
    CHECK(dense.k == 2);
    CHECK(dense.assignment == Assignment{1, 0, 1, 0});
    CHECK(dense.centroids(0, 0) == 11);
    CHECK(dense.centroids(1, 0) == 13);
}

TEST_CASE("members and sizes agree") {
    Clustering c{{1, 0, 1, 1}, Matrix::Zero(2, 1), 2};
    CHECK(cluster_sizes(c) == std::vector<std::size_t>{1, 3});
    CHECK(members_of(c, 1) == IndexList{0, 2, 3});
    CHECK(cluster_members(c)[0] == IndexList{1});
}

TEST_CASE("sense helpers") {
    CHECK(to_string(Sense::HigherIsBetter) == "higher_is_better");
    CHECK(sense_from_string("lower_is_better") == Sense::LowerIsBetter);
    CHECK_THROWS_AS(sense_from_string("sideways"), Error);
    CHECK(is_better(2.0, 1.0, Sense::HigherIsBetter));
    CHECK(is_better(1.0, 2.0, Sense::LowerIsBetter));
    CHECK_FALSE(is_better(1.0, 1.0, Sense::HigherIsBetter));
    CHECK_FALSE(is_better(1.0, 1.0, Sense::LowerIsBetter));
}

TEST_CASE("derived seeds are order sensitive and stable") {
    static_assert(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
    CHECK(derive_seed(5, {1}) == derive_seed(5, {1}));
    CHECK(derive_seed(5, {1}) != derive_seed(6, {1}));
    CHECK(derive_seed(5, {}) != derive_seed(5, {0}));
}

TEST_CASE("uniform_below stays in range and covers it") {
    Rng rng(3);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 7000; ++i) {
        const auto v = uniform_below(rng, 7);
        REQUIRE(v < 7);
        ++hits[v];
    }
    for (int h : hits) CHECK(h > 800);
}

TEST_CASE("sampling without replacement yields distinct indices") {
    Rng rng(9);
    const auto s = sample_without_replacement(20, 8, rng);
    CHECK(s.size() == 8);
    auto sorted = s;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    CHECK(sorted.back() < 20);

    auto all = sample_without_replacement(5, 9, rng);
    std::sort(all.begin(), all.end());
    CHECK(all == std::vector<std::size_t>{0, 1, 2, 3, 4});
}
