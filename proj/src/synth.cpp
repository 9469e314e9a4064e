#include "feedback_kmeans/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "feedback_kmeans/random.hpp"

namespace fbk {

namespace {

enum Feature { kDistance, kAdvance, kStay, kPassengers, kChildren, kGeography, kDepDow, kRetDow };

double unit_uniform(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t pick_segment(const std::vector<double>& cumulative, Rng& rng) {
    const double u = unit_uniform(rng) * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

std::string airport_code(Rng& rng) {
    std::string code(3, 'A');
    for (auto& ch : code) ch = static_cast<char>('A' + uniform_below(rng, 26));
    return code;
}

FeatureVector feature_array(const nlohmann::json& json, const char* key) {
    const auto values = json.at(key).get<std::vector<double>>();
    if (values.size() != kFeatureCount) {
        throw Error(std::string("segment field '") + key + "' needs " + std::to_string(kFeatureCount) + " values");
    }
    FeatureVector out{};
    std::copy(values.begin(), values.end(), out.begin());
    return out;
}

}  // namespace

std::vector<std::string> generator_violations(const GeneratorConfig& config) {
    std::vector<std::string> out;
    if (config.n_points < 1) out.emplace_back("n_points must be positive");
    if (config.segments.empty()) out.emplace_back("at least one segment is required");
    double mixture = 0.0;
    std::size_t m = config.segments.empty() ? 0 : config.segments.front().oracle_weights.size();
    std::vector<int> ids;
    for (const auto& s : config.segments) {
        const auto name = "segment " + std::to_string(s.id);
        mixture += s.mixture_weight;
        if (s.mixture_weight < 0.0) out.push_back(name + ": negative mixture weight");
        for (double sd : s.feature_stddevs) {
            if (!(sd >= 0.0)) {
                out.push_back(name + ": negative feature stddev");
                break;
            }
        }
        if (!(s.booking_sigma >= 0.0)) out.push_back(name + ": negative booking sigma");
        if (s.oracle_weights.empty() || s.oracle_weights.size() != m) {
            out.push_back(name + ": oracle weight vectors must be non-empty and of equal length");
        }
        if (std::find(ids.begin(), ids.end(), s.id) != ids.end()) out.push_back(name + ": duplicate id");
        ids.push_back(s.id);
    }
    if (!config.segments.empty() && std::abs(mixture - 1.0) > 1e-9) {
        out.push_back("mixture weights sum to " + std::to_string(mixture) + ", expected 1");
    }
    return out;
}

nlohmann::json generator_to_json(const GeneratorConfig& config) {
    nlohmann::json segments = nlohmann::json::array();
    for (const auto& s : config.segments) {
        segments.push_back({{"id", s.id},
                            {"mixture_weight", s.mixture_weight},
                            {"feature_means", s.feature_means},
                            {"feature_stddevs", s.feature_stddevs},
                            {"oracle_weights", s.oracle_weights},
                            {"booking_lognormal", {s.booking_mu, s.booking_sigma}}});
    }
    return {{"n_points", config.n_points},
            {"seed", config.seed},
            {"segments", segments},
            {"oracle",
             {{"C", config.oracle.score_offset},
              {"noise_sigma", config.oracle.noise_sigma},
              {"sample_size", config.oracle.sample_size},
              {"eval_pool_fraction", config.oracle.eval_pool_fraction},
              {"rng_seed", config.oracle.rng_seed}}}};
}

GeneratorConfig generator_from_json(const nlohmann::json& json) {
    GeneratorConfig config;
    try {
        config.n_points = json.value("n_points", config.n_points);
        config.seed = json.value("seed", config.seed);
        for (const auto& s : json.at("segments")) {
            SegmentSpec seg;
            seg.id = s.at("id").get<int>();
            seg.mixture_weight = s.at("mixture_weight").get<double>();
            seg.feature_means = feature_array(s, "feature_means");
            seg.feature_stddevs = feature_array(s, "feature_stddevs");
            seg.oracle_weights = s.at("oracle_weights").get<std::vector<double>>();
            const auto booking = s.at("booking_lognormal").get<std::vector<double>>();
            if (booking.size() != 2) throw Error("booking_lognormal needs [mu, sigma]");
            seg.booking_mu = booking[0];
            seg.booking_sigma = booking[1];
            config.segments.push_back(std::move(seg));
        }
        if (json.contains("oracle")) {
            const auto& o = json.at("oracle");
            config.oracle.score_offset = o.value("C", config.oracle.score_offset);
            config.oracle.noise_sigma = o.value("noise_sigma", config.oracle.noise_sigma);
            config.oracle.sample_size = o.value("sample_size", config.oracle.sample_size);
            config.oracle.eval_pool_fraction = o.value("eval_pool_fraction", config.oracle.eval_pool_fraction);
            config.oracle.rng_seed = o.value("rng_seed", config.oracle.rng_seed);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed generator config: ") + e.what());
    }
    if (auto violations = generator_violations(config); !violations.empty()) {
        throw Error("invalid generator config: " + violations.front());
    }
    return config;
}

Dataset generate(const GeneratorConfig& config) {
    if (auto violations = generator_violations(config); !violations.empty()) {
        throw Error("invalid generator config: " + violations.front());
    }
    std::vector<double> cumulative;
    double running = 0.0;
    for (const auto& s : config.segments) cumulative.push_back(running += s.mixture_weight);

    const auto n = static_cast<std::size_t>(config.n_points);
    Dataset out = make_dataset(Matrix(static_cast<Index>(n), kFeatureCount));
    out.bookings.emplace(n);
    out.hidden_segment.emplace(n);
    out.origin.emplace(n);
    out.destination.emplace(n);

    Rng rng(config.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t p = 0; p < n; ++p) {
        const auto& seg = config.segments[pick_segment(cumulative, rng)];
        FeatureVector x{};
        for (int f = 0; f < kFeatureCount; ++f) x[f] = seg.feature_means[f] + seg.feature_stddevs[f] * gauss(rng);

        x[kPassengers] = std::max(1.0, std::round(x[kPassengers]));
        x[kChildren] = std::max(0.0, std::round(x[kChildren]));
        x[kGeography] = std::clamp(std::round(x[kGeography]), 0.0, 2.0);
        x[kDepDow] = std::clamp(std::round(x[kDepDow]), 0.0, 6.0);
        x[kRetDow] = std::clamp(std::round(x[kRetDow]), 0.0, 6.0);
        // Normalizes -0 left by rounding.
        for (int f : {kPassengers, kChildren, kGeography, kDepDow, kRetDow}) x[f] += 0.0;
        for (int f = 0; f < kFeatureCount; ++f) out.points(static_cast<Index>(p), f) = x[f];

        const double booking = std::exp(seg.booking_mu + seg.booking_sigma * gauss(rng));
        (*out.bookings)[p] = static_cast<std::int64_t>(std::max(0.0, std::round(booking)));
        (*out.hidden_segment)[p] = seg.id;
        (*out.origin)[p] = airport_code(rng);
        (*out.destination)[p] = airport_code(rng);
    }
    return out;
}

OracleProfile oracle_profile(const GeneratorConfig& config) {
    OracleProfile profile;
    profile.m = config.segments.empty() ? 0 : static_cast<int>(config.segments.front().oracle_weights.size());
    for (const auto& s : config.segments) {
        profile.segment_weights[s.id] =
            Eigen::Map<const Vector>(s.oracle_weights.data(), static_cast<Index>(s.oracle_weights.size()));
    }
    profile.score_offset = config.oracle.score_offset;
    profile.noise_sigma = config.oracle.noise_sigma;
    profile.sample_size = config.oracle.sample_size;
    profile.eval_pool_fraction = config.oracle.eval_pool_fraction;
    profile.rng_seed = config.oracle.rng_seed;
    check_profile(profile);
    return profile;
}

GeneratorConfig planted_segments_config(int n_points, std::uint64_t seed) {
    GeneratorConfig config;
    config.n_points = n_points;
    config.seed = seed;
    config.oracle.rng_seed = derive_seed(seed, {7});
    // distance, advance_purchase, stay_duration, n_passengers, n_children,
    // geography, dep_dow, ret_dow
    config.segments = {
        {0, 0.30, {700, 6, 2, 1, 0, 0, 1, 4}, {300, 4, 1, 0.3, 0.2, 0.3, 0.8, 0.8}, {2.0, 0.0, 0.5, 0.0}, 2.0, 0.6},
        {1, 0.30, {2000, 45, 7, 2, 0, 1, 4, 6}, {700, 20, 3, 0.4, 0.2, 0.4, 1.2, 1.0}, {0.0, 1.5, 0.0, 1.0}, 1.5, 0.6},
        {2, 0.20, {7000, 90, 16, 3.8, 1.8, 2, 5, 5}, {2500, 30, 5, 0.8, 0.7, 0.3, 1.5, 1.5}, {0.5, 0.0, 2.0, 0.5}, 1.2, 0.7},
        {3, 0.20, {900, 20, 2.5, 2, 0.2, 0, 4.5, 6}, {400, 10, 1, 0.5, 0.4, 0.5, 0.5, 0.5}, {1.0, 1.0, -1.0, 1.5}, 1.8, 0.6},
    };
    return config;
}

Dataset standardize(const Dataset& dataset, Standardization* transform) {
    const auto n = static_cast<double>(dataset.size());
    Standardization t;
    t.mean = dataset.points.colwise().mean().transpose();
    t.stddev = ((dataset.points.rowwise() - t.mean.transpose()).colwise().squaredNorm() / n).cwiseSqrt().transpose();

    Dataset out = dataset;
    for (Index j = 0; j < dataset.dim(); ++j) {
        const bool constant = dataset.points.col(j).maxCoeff() == dataset.points.col(j).minCoeff();
        if (!constant && t.stddev(j) > 0.0) {
            out.points.col(j) = (dataset.points.col(j).array() - t.mean(j)) / t.stddev(j);
        } else {
            t.stddev(j) = 0.0;
        }
    }
    if (transform) *transform = std::move(t);
    return out;
}

Dataset unstandardize(const Dataset& dataset, const Standardization& transform) {
    Dataset out = dataset;
    for (Index j = 0; j < dataset.dim(); ++j) {
        if (transform.stddev(j) > 0.0) {
            out.points.col(j) = dataset.points.col(j).array() * transform.stddev(j) + transform.mean(j);
        }
    }
    return out;
}

}  // namespace fbk
