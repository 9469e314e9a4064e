#include "feedback_kmeans/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fbk {

double aggregate_weighted(std::span<const double> per_cluster, std::span<const std::size_t> sizes) {
    if (per_cluster.size() != sizes.size()) {
        throw Error("aggregate_weighted: " + std::to_string(per_cluster.size()) + " values for " +
                    std::to_string(sizes.size()) + " sizes");
    }
    double weighted = 0.0;
    std::size_t total = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        weighted += static_cast<double>(sizes[i]) * per_cluster[i];
        total += sizes[i];
    }
    if (total == 0) throw Error("aggregate_weighted: cluster sizes sum to zero");
    return weighted / static_cast<double>(total);
}

double relative_change(double reference, double value) {
    if (!(std::abs(reference) >= kDegenerateReference)) {
        throw Error("degenerate baseline: |reference| = " + std::to_string(std::abs(reference)));
    }
    return (value - reference) / std::abs(reference);
}

std::vector<std::string> profile_violations(const OracleProfile& profile) {
    std::vector<std::string> out;
    if (profile.m < 1) out.emplace_back("m must be at least 1");
    if (!(profile.score_offset > 0.0)) out.emplace_back("score offset C must be positive");
    if (!(profile.noise_sigma >= 0.0)) out.emplace_back("noise_sigma must be non-negative");
    if (profile.sample_size < 1) out.emplace_back("sample_size must be at least 1");
    if (!(profile.eval_pool_fraction > 0.0 && profile.eval_pool_fraction <= 1.0)) {
        out.emplace_back("eval_pool_fraction must lie in (0, 1]");
    }
    for (const auto& [segment, weights] : profile.segment_weights) {
        const auto name = "segment " + std::to_string(segment);
        if (weights.size() != profile.m) {
            out.push_back(name + " has " + std::to_string(weights.size()) + " weights, expected m=" +
                          std::to_string(profile.m));
        } else if (weights.squaredNorm() > profile.score_offset) {
            out.push_back(name + " weights exceed sqrt(C) in norm");
        }
    }
    return out;
}

void check_profile(const OracleProfile& profile) {
    auto violations = profile_violations(profile);
    if (violations.empty()) return;
    std::ostringstream msg;
    msg << "invalid oracle profile:";
    for (const auto& v : violations) msg << ' ' << v << ';';
    throw Error(msg.str());
}

nlohmann::json profile_to_json(const OracleProfile& profile) {
    nlohmann::json segments = nlohmann::json::object();
    for (const auto& [segment, weights] : profile.segment_weights) {
        segments[std::to_string(segment)] = std::vector<double>(weights.data(), weights.data() + weights.size());
    }
    return nlohmann::json{{"m", profile.m},
                          {"segments", segments},
                          {"C", profile.score_offset},
                          {"noise_sigma", profile.noise_sigma},
                          {"sample_size", profile.sample_size},
                          {"eval_pool_fraction", profile.eval_pool_fraction},
                          {"rng_seed", profile.rng_seed}};
}

OracleProfile profile_from_json(const nlohmann::json& json) {
    OracleProfile profile;
    try {
        profile.m = json.at("m").get<int>();
        for (const auto& [key, value] : json.at("segments").items()) {
            const auto weights = value.get<std::vector<double>>();
            profile.segment_weights[std::stoi(key)] =
                Eigen::Map<const Vector>(weights.data(), static_cast<Index>(weights.size()));
        }
        profile.score_offset = json.value("C", profile.score_offset);
        profile.noise_sigma = json.value("noise_sigma", profile.noise_sigma);
        profile.sample_size = json.value("sample_size", profile.sample_size);
        profile.eval_pool_fraction = json.value("eval_pool_fraction", profile.eval_pool_fraction);
        profile.rng_seed = json.value("rng_seed", profile.rng_seed);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed oracle profile: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw Error("malformed oracle profile: segment ids must be integers");
    }
    check_profile(profile);
    return profile;
}

namespace {

void require_labels(const Dataset& dataset) {
    if (!dataset.hidden_segment || !dataset.bookings) {
        throw Error("oracle requires generator-labeled data (bookings and hidden_segment columns)");
    }
}

const Vector& segment_weights(const OracleProfile& profile, int segment) {
    auto it = profile.segment_weights.find(segment);
    if (it == profile.segment_weights.end()) {
        throw Error("segment " + std::to_string(segment) + " has no weights in the oracle profile");
    }
    return it->second;
}

}  // namespace

Vector fit_weights(const Dataset& dataset, std::span<const Index> sample, const OracleProfile& profile) {
    if (!dataset.hidden_segment) throw Error("oracle requires generator-labeled data (hidden_segment column)");
    if (sample.empty()) throw Error("fit_weights: empty sample");
    Vector sum = Vector::Zero(profile.m);
    for (auto p : sample) sum += segment_weights(profile, (*dataset.hidden_segment)[static_cast<std::size_t>(p)]);
    return sum / static_cast<double>(sample.size());
}

double popularity(const Dataset& dataset, std::span<const Index> eval_points, const Vector& weights,
                  const OracleProfile& profile, Rng& rng) {
    if (!dataset.hidden_segment) throw Error("oracle requires generator-labeled data (hidden_segment column)");
    if (eval_points.empty()) throw Error("popularity: empty evaluation set");
    std::normal_distribution<double> noise(0.0, profile.noise_sigma > 0.0 ? profile.noise_sigma : 1.0);
    double sum = 0.0;
    for (auto p : eval_points) {
        const auto& truth = segment_weights(profile, (*dataset.hidden_segment)[static_cast<std::size_t>(p)]);
        double score = profile.score_offset - (weights - truth).squaredNorm();
        if (profile.noise_sigma > 0.0) score += noise(rng);
        sum += score;
    }
    return sum / static_cast<double>(eval_points.size());
}

ClusterFeedbackValue customizability_cluster(const Dataset& dataset, std::span<const Index> members,
                                             const OracleProfile& profile, Rng& rng) {
    require_labels(dataset);
    const auto n = members.size();
    if (n < 2) throw Error("customizability needs at least two points per cluster, got " + std::to_string(n));

    const auto& bookings = *dataset.bookings;
    IndexList ranked(members.begin(), members.end());
    std::sort(ranked.begin(), ranked.end(), [&](Index a, Index b) {
        const auto ba = bookings[static_cast<std::size_t>(a)];
        const auto bb = bookings[static_cast<std::size_t>(b)];
        return ba != bb ? ba > bb : a < b;
    });

    const auto sample = static_cast<std::size_t>(profile.sample_size);
    const std::size_t fit_count = n < 2 * sample ? n / 2 : sample;
    const std::span<const Index> fit(ranked.data(), fit_count);

    const auto top = static_cast<std::size_t>(std::ceil(profile.eval_pool_fraction * static_cast<double>(n)));
    std::span<const Index> pool;
    if (std::min(top, n) > fit_count) {
        pool = std::span<const Index>(ranked.data() + fit_count, std::min(top, n) - fit_count);
    } else {
        pool = std::span<const Index>(ranked.data() + fit_count, n - fit_count);
    }

    IndexList eval;
    for (auto i : sample_without_replacement(pool.size(), sample, rng)) eval.push_back(pool[i]);

    ClusterFeedbackValue out;
    out.cluster_size = n;
    CustomizabilityDetail detail;
    detail.fitted_weights = fit_weights(dataset, fit, profile);
    detail.pop_w = popularity(dataset, eval, detail.fitted_weights, profile, rng);
    detail.pop_0 = popularity(dataset, eval, Vector::Zero(profile.m), profile, rng);
    if (std::abs(detail.pop_0) < 1e-9) throw Error("degenerate price baseline: |pop_0| < 1e-9");
    out.value = relative_change(detail.pop_0, detail.pop_w);
    out.detail = std::move(detail);
    return out;
}

std::string_view to_string(FeedbackKind kind) { return kind == FeedbackKind::Rss ? "rss" : "custom"; }

FeedbackKind feedback_kind_from_string(std::string_view name) {
    if (name == "rss") return FeedbackKind::Rss;
    if (name == "custom") return FeedbackKind::Customizability;
    throw Error("unknown feedback '" + std::string(name) + "' (expected rss or custom)");
}

ClusterFeedbackValue RssFeedback::evaluate_cluster(const Dataset& dataset, std::span<const Index> members,
                                                   const RowVector& centroid, std::uint64_t) const {
    IndexList rows(members.begin(), members.end());
    return ClusterFeedbackValue{rss_cluster(select_rows(dataset.points, rows), centroid), members.size(), {}};
}

CustomizabilityFeedback::CustomizabilityFeedback(OracleProfile profile) : profile_(std::move(profile)) {
    check_profile(profile_);
}

ClusterFeedbackValue CustomizabilityFeedback::evaluate_cluster(const Dataset& dataset, std::span<const Index> members,
                                                               const RowVector&, std::uint64_t stream) const {
    Rng rng(derive_seed(profile_.rng_seed, {stream}));
    return customizability_cluster(dataset, members, profile_, rng);
}

std::shared_ptr<const FeedbackProvider> make_provider(std::string_view name, const OracleProfile* profile) {
    switch (feedback_kind_from_string(name)) {
        case FeedbackKind::Rss:
            return std::make_shared<RssFeedback>();
        case FeedbackKind::Customizability:
            if (profile == nullptr) throw Error("custom feedback requires an oracle profile (--oracle)");
            return std::make_shared<CustomizabilityFeedback>(*profile);
    }
    throw Error("unreachable feedback kind");
}

FeedbackReport evaluate_clustering(const Dataset& dataset, const Clustering& clustering,
                                   const FeedbackProvider& provider, std::uint64_t stream) {
    if (auto violations = validate_clustering(dataset, clustering); !violations.empty()) {
        throw Error("evaluate_clustering: invalid clustering: " + violations.front());
    }
    FeedbackReport report;
    report.sense = provider.sense();
    const auto members = cluster_members(clustering);
    for (ClusterId c = 0; c < clustering.k; ++c) {
        const auto& rows = members[static_cast<std::size_t>(c)];
        auto value = provider.evaluate_cluster(dataset, rows, clustering.centroids.row(c),
                                               derive_seed(stream, {static_cast<std::uint64_t>(c)}));
        report.per_cluster.push_back(value.value);
        report.sizes.push_back(rows.size());
        report.details.push_back(std::move(value.detail));
    }
    report.aggregate = aggregate_weighted(report.per_cluster, report.sizes);
    return report;
}

}  // namespace fbk
