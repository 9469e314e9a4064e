#ifndef FEEDBACK_KMEANS_SYNTH_HPP
#define FEEDBACK_KMEANS_SYNTH_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "feedback_kmeans/core.hpp"
#include "feedback_kmeans/feedback.hpp"

namespace fbk {

inline constexpr int kFeatureCount = 8;
using FeatureVector = std::array<double, kFeatureCount>;

struct SegmentSpec {
    int id = 0;
    double mixture_weight = 1.0;
    FeatureVector feature_means{};
    FeatureVector feature_stddevs{};
    std::vector<double> oracle_weights;
    double booking_mu = 1.0;
    double booking_sigma = 0.5;
};

/// Oracle knobs that travel with a generator config.
struct OracleSettings {
    double score_offset = 10.0;
    double noise_sigma = 0.05;
    int sample_size = 100;
    double eval_pool_fraction = 0.2;
    std::uint64_t rng_seed = 0;
};

struct GeneratorConfig {
    int n_points = 1000;
    std::vector<SegmentSpec> segments;
    std::uint64_t seed = 0;
    OracleSettings oracle;
};

std::vector<std::string> generator_violations(const GeneratorConfig& config);

nlohmann::json generator_to_json(const GeneratorConfig& config);
GeneratorConfig generator_from_json(const nlohmann::json& json);

/// Draws n_points searches from the segment mixture. Counts are rounded
/// (passengers >= 1, children >= 0), geography is quantized to {0,1,2} and
/// days of the week to [0,6]; bookings are rounded log-normal draws.
Dataset generate(const GeneratorConfig& config);

/// The hidden weights of every segment plus the config's oracle knobs.
OracleProfile oracle_profile(const GeneratorConfig& config);

/// Four planted customer segments used by the demo and acceptance runs.
GeneratorConfig planted_segments_config(int n_points, std::uint64_t seed);

struct Standardization {
    Vector mean;
    Vector stddev;  // population stddev; 0 marks a constant feature left unscaled
};

/// Per-feature z-scores. Constant features pass through unchanged.
Dataset standardize(const Dataset& dataset, Standardization* transform = nullptr);
Dataset unstandardize(const Dataset& dataset, const Standardization& transform);

}  // namespace fbk

#endif  // FEEDBACK_KMEANS_SYNTH_HPP
