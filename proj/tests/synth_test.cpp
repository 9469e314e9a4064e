#include <doctest.h>

#include <cmath>
#include <set>

#include "feedback_kmeans/kmeans.hpp"
#include "feedback_kmeans/synth.hpp"
#include "test_support.hpp"

using namespace fbk;

namespace {

SegmentSpec segment(int id, double weight, FeatureVector means, FeatureVector stddevs) {
    SegmentSpec s;
    s.id = id;
    s.mixture_weight = weight;
    s.feature_means = means;
    s.feature_stddevs = stddevs;
    s.oracle_weights = {1.0, 0.0};
    s.booking_mu = 1.0;
    s.booking_sigma = 0.5;
    return s;
}

const FeatureVector kZero{};

}  // namespace

TEST_CASE("zero spread gives identical points at the quantized mean") {
    GeneratorConfig config;
    config.n_points = 50;
    config.segments = {segment(0, 1.0, {1200.5, 30, 7, 2.4, 0.6, 1.2, 4.7, 9}, kZero)};
    const auto dataset = generate(config);
    for (Index p = 0; p < dataset.size(); ++p) {
        const RowVector row = dataset.points.row(p);
        CHECK(row(0) == 1200.5);
        CHECK(row(3) == 2.0);
        CHECK(row(4) == 1.0);
        CHECK(row(5) == 1.0);
        CHECK(row(6) == 5.0);
        CHECK(row(7) == 6.0);
    }
}

TEST_CASE("segments with disjoint supports are recovered by k-means") {
    GeneratorConfig config;
    config.n_points = 2000;
    config.seed = 4;
    const FeatureVector spread{50, 3, 1, 0.3, 0.3, 0.2, 0.5, 0.5};
    config.segments = {segment(0, 0.5, {500, 10, 3, 1, 0, 0, 1, 2}, spread),
                       segment(1, 0.5, {5000, 60, 14, 3, 1, 2, 5, 5}, spread)};
    const auto dataset = standardize(generate(config));
    const auto c = lloyd(dataset, KMeansConfig{2, 3, 100, 1e-9});
    CHECK(testing::min_purity(c, *dataset.hidden_segment) >= 0.99);
}

TEST_CASE("segment counts follow the mixture weights") {
    GeneratorConfig config;
    config.n_points = 10000;
    config.seed = 17;
    config.segments = {segment(0, 0.7, kZero, kZero), segment(1, 0.3, kZero, kZero)};
    const auto dataset = generate(config);
    const auto count = std::count(dataset.hidden_segment->begin(), dataset.hidden_segment->end(), 0);
    const double sigma = std::sqrt(10000 * 0.7 * 0.3);
    CHECK(std::abs(static_cast<double>(count) - 7000.0) <= 3 * sigma);
}

TEST_CASE("generated fields respect their ranges and labels have oracle weights") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto config = planted_segments_config(3000, seed);
        CHECK(generator_violations(config).empty());
        const auto dataset = generate(config);
        const auto profile = oracle_profile(config);
        CHECK(dataset_violations(dataset).empty());
        CHECK(dataset.size() == 3000);
        CHECK(dataset.dim() == 8);
        for (Index p = 0; p < dataset.size(); ++p) {
            const RowVector x = dataset.points.row(p);
            CHECK(x(3) >= 1.0);
            CHECK(x(4) >= 0.0);
            CHECK(x(3) == std::round(x(3)));
            CHECK(x(4) == std::round(x(4)));
            CHECK((x(5) == 0.0 || x(5) == 1.0 || x(5) == 2.0));
            for (int d : {6, 7}) {
                CHECK(x(d) >= 0.0);
                CHECK(x(d) <= 6.0);
                CHECK(x(d) == std::round(x(d)));
            }
            CHECK((*dataset.bookings)[static_cast<std::size_t>(p)] >= 0);
            CHECK(profile.segment_weights.count((*dataset.hidden_segment)[static_cast<std::size_t>(p)]) == 1);
        }
        CHECK(dataset.origin->size() == 3000);
        CHECK(dataset.destination->size() == 3000);
    }
}

TEST_CASE("generation is deterministic per seed") {
    const auto a = generate(planted_segments_config(500, 3));
    const auto b = generate(planted_segments_config(500, 3));
    const auto c = generate(planted_segments_config(500, 4));
    CHECK(a.points == b.points);
    CHECK(*a.bookings == *b.bookings);
    CHECK(*a.origin == *b.origin);
    CHECK(a.points != c.points);
}

TEST_CASE("generator config validation and json round trip") {
    auto config = planted_segments_config(100, 9);
    const auto back = generator_from_json(generator_to_json(config));
    CHECK(back.n_points == config.n_points);
    CHECK(back.seed == config.seed);
    REQUIRE(back.segments.size() == config.segments.size());
    for (std::size_t s = 0; s < back.segments.size(); ++s) {
        CHECK(back.segments[s].feature_means == config.segments[s].feature_means);
        CHECK(back.segments[s].feature_stddevs == config.segments[s].feature_stddevs);
        CHECK(back.segments[s].oracle_weights == config.segments[s].oracle_weights);
        CHECK(back.segments[s].booking_mu == config.segments[s].booking_mu);
        CHECK(back.segments[s].booking_sigma == config.segments[s].booking_sigma);
    }
    CHECK(back.oracle.rng_seed == config.oracle.rng_seed);
    CHECK(generate(back).points == generate(config).points);

    auto bad_mix = config;
    bad_mix.segments[0].mixture_weight += 0.1;
    CHECK_FALSE(generator_violations(bad_mix).empty());
    CHECK_THROWS_AS(generate(bad_mix), Error);

    auto bad_sd = config;
    bad_sd.segments[1].feature_stddevs[2] = -1.0;
    CHECK_FALSE(generator_violations(bad_sd).empty());

    auto short_means = generator_to_json(config);
    short_means["segments"][0]["feature_means"] = {1, 2, 3};
    CHECK_THROWS_AS(generator_from_json(short_means), Error);
}

TEST_CASE("standardize") {
    Rng rng(4);
    std::normal_distribution<double> gauss(3.0, 7.0);
    Matrix raw(400, 3);
    for (Index p = 0; p < 400; ++p) {
        raw(p, 0) = gauss(rng);
        raw(p, 1) = 2.5;
        raw(p, 2) = 100.0 * gauss(rng);
    }
    const auto dataset = make_dataset(raw);
    Standardization t;
    const auto z = standardize(dataset, &t);

    SUBCASE("constant feature passes through") {
        CHECK(t.stddev(1) == 0.0);
        CHECK(z.points.col(1).isApprox(raw.col(1)));
        CHECK((z.points.col(1).array() == 2.5).all());
    }
    SUBCASE("z-scores") {
        for (Index j : {Index{0}, Index{2}}) {
            const double mean = z.points.col(j).mean();
            const double var = (z.points.col(j).array() - mean).square().mean();
            CHECK(std::abs(mean) <= 1e-9);
            CHECK(std::abs(std::sqrt(var) - 1.0) <= 1e-9);
        }
    }
    SUBCASE("standardizing twice changes nothing") {
        Standardization again;
        const auto zz = standardize(z, &again);
        CHECK((zz.points - z.points).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK(std::abs(again.mean(0)) <= 1e-9);
        CHECK(std::abs(again.stddev(0) - 1.0) <= 1e-9);
    }
    SUBCASE("round trip") {
        const auto back = unstandardize(z, t);
        CHECK((back.points - raw).cwiseAbs().maxCoeff() <= 1e-9);
    }
}
