#include "feedback_kmeans/engines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "feedback_kmeans/kmeans.hpp"
#include "feedback_kmeans/random.hpp"

namespace fbk {

std::string_view to_string(Method method) { return method == Method::Sme ? "sme" : "sm"; }

Method method_from_string(std::string_view name) {
    if (name == "sme") return Method::Sme;
    if (name == "sm") return Method::Sm;
    throw Error("unknown method '" + std::string(name) + "' (expected sme or sm)");
}

int default_iterations(Method method) { return method == Method::Sme ? 6 : 12; }

std::uint64_t init_seed(std::uint64_t seed) { return derive_seed(seed, {1}); }

std::uint64_t split_seed(std::uint64_t seed, std::size_t step) { return derive_seed(seed, {2, step}); }

std::uint64_t feedback_stream(std::uint64_t seed, std::size_t step) { return derive_seed(seed, {3, step}); }

namespace {

KMeansConfig kmeans_defaults(const EngineConfig& config) {
    KMeansConfig out;
    out.max_iterations = config.kmeans_max_iterations;
    out.tolerance = config.kmeans_tolerance;
    return out;
}

bool target_reached(const RunTrace& trace, const EngineConfig& config) {
    if (!config.target_evaluation) return false;
    return trace.sense == Sense::HigherIsBetter ? trace.best_evaluation >= *config.target_evaluation
                                                : trace.best_evaluation <= *config.target_evaluation;
}

/// Runs the initial k-means and records it as step 0.
Clustering start(const Dataset& dataset, int k, const EngineConfig& config, RunTrace& trace) {
    check_dataset(dataset);
    if (!config.feedback) throw Error("engine requires a feedback provider");
    if (config.iterations < 1) throw Error("iterations must be at least 1");
    if (config.min_k < 1) throw Error("min_k must be at least 1");
    if (k < config.min_k) {
        throw Error("initial k=" + std::to_string(k) + " is below the minimum cluster count " +
                    std::to_string(config.min_k));
    }
    trace.seed = config.seed;
    trace.method = std::string(to_string(config.method));
    trace.feedback = std::string(to_string(config.feedback->kind()));

    auto km = kmeans_defaults(config);
    km.k = k;
    km.seed = init_seed(config.seed);
    auto clustering = lloyd(dataset, km);
    auto report = evaluate_clustering(dataset, clustering, *config.feedback, feedback_stream(config.seed, 0));
    trace.record({Action::init()}, clustering, std::move(report), config.snapshot_cap);
    return clustering;
}

}  // namespace

RunTrace run_sme(const Dataset& dataset, int k, const EngineConfig& config) {
    if (config.method != Method::Sme) throw Error("run_sme called with a non-SME config");
    RunTrace trace;
    auto current = start(dataset, k, config, trace);
    const auto km = kmeans_defaults(config);

    for (int iteration = 1; iteration <= config.iterations; ++iteration) {
        if (target_reached(trace, config)) {
            trace.stop_reason = "target evaluation reached";
            break;
        }
        const auto step = static_cast<std::size_t>(iteration);
        // A singleton or all-duplicate worst cluster hands the split to the
        // next-worst cluster that can be bisected.
        ClusterId target = -1;
        for (auto id : clusters_worst_first(trace.steps.back().feedback)) {
            if (is_splittable(dataset, current, id)) {
                target = id;
                break;
            }
        }
        if (target < 0) {
            trace.stalled = true;
            trace.stop_reason = "stalled: no splittable cluster";
            break;
        }
        auto split = split_cluster(dataset, current, target, split_seed(config.seed, step), km);
        const auto [i, j] = closest_centroid_pair(split);
        current = merge_pair(dataset, split, i, j, config.min_k);
        auto report = evaluate_clustering(dataset, current, *config.feedback, feedback_stream(config.seed, step));
        trace.record({Action::split(target), Action::merge(i, j)}, current, std::move(report), config.snapshot_cap);
    }
    if (trace.stop_reason.empty()) trace.stop_reason = "iteration budget exhausted";
    return trace;
}

RunTrace run_sm(const Dataset& dataset, int k, const EngineConfig& config) {
    if (config.method != Method::Sm) throw Error("run_sm called with a non-S/M config");
    RunTrace trace;
    auto current = start(dataset, k, config, trace);
    const auto km = kmeans_defaults(config);

    for (int iteration = 1; iteration <= config.iterations; ++iteration) {
        if (target_reached(trace, config)) {
            trace.stop_reason = "target evaluation reached";
            break;
        }
        const auto step = static_cast<std::size_t>(iteration);
        const auto worst = worst_cluster(trace.steps.back().feedback);
        SmAction decision{};
        try {
            decision = sm_decide(dataset, current, worst, config.min_k);
        } catch (const Error& e) {
            trace.stalled = true;
            trace.stop_reason = std::string("stalled: ") + e.what();
            break;
        }
        Action action;
        if (decision == SmAction::Split) {
            current = split_cluster(dataset, current, worst, split_seed(config.seed, step), km);
            action = Action::split(worst);
        } else {
            const auto partner = nearest_centroid(current, worst);
            current = merge_pair(dataset, current, worst, partner, config.min_k);
            action = Action::merge(worst, partner);
        }
        auto report = evaluate_clustering(dataset, current, *config.feedback, feedback_stream(config.seed, step));
        trace.record({action}, current, std::move(report), config.snapshot_cap);
    }
    if (trace.stop_reason.empty()) trace.stop_reason = "iteration budget exhausted";
    return trace;
}

RunTrace run_engine(const Dataset& dataset, int k, const EngineConfig& config) {
    return config.method == Method::Sme ? run_sme(dataset, k, config) : run_sm(dataset, k, config);
}

std::vector<std::string> check_trace(const Dataset& dataset, const std::vector<TraceRecord>& records, int min_k) {
    std::vector<std::string> out;
    if (records.empty()) {
        out.emplace_back("trace is empty");
        return out;
    }
    const auto& first = records.front();
    if (first.actions.size() != 1 || first.actions.front().kind != ActionKind::Init) {
        out.emplace_back("step 0 is not init");
    }
    const auto sense = first.sense;
    const bool sme = first.method == "sme";
    const bool sm = first.method == "sm";

    std::size_t best_count = 0;
    std::size_t expected_best = 0;
    for (std::size_t s = 0; s < records.size(); ++s) {
        const auto& r = records[s];
        const auto where = "step " + std::to_string(s) + ": ";
        if (r.step != s) out.push_back(where + "step index " + std::to_string(r.step));
        for (const auto& v : validate_clustering(dataset, r.clustering)) out.push_back(where + v);
        if (r.per_cluster.size() != static_cast<std::size_t>(r.k) || r.sizes.size() != static_cast<std::size_t>(r.k)) {
            out.push_back(where + "feedback tuple length differs from k");
            continue;
        }
        if (validate_clustering(dataset, r.clustering).empty()) {
            if (cluster_sizes(r.clustering) != r.sizes) out.push_back(where + "cluster sizes disagree with assignment");
            if (r.feedback == "rss") {
                const auto members = cluster_members(r.clustering);
                for (ClusterId c = 0; c < r.k; ++c) {
                    const auto rss = rss_cluster(select_rows(dataset.points, members[static_cast<std::size_t>(c)]),
                                                 r.clustering.centroids.row(c));
                    const auto y = r.per_cluster[static_cast<std::size_t>(c)];
                    if (std::abs(rss - y) > 1e-9 * std::max(1.0, std::abs(rss))) {
                        out.push_back(where + "RSS of cluster " + std::to_string(c) + " does not recompute");
                    }
                }
            }
        }
        const auto aggregate = aggregate_weighted(r.per_cluster, r.sizes);
        if (std::abs(aggregate - r.aggregate) > 1e-12 * std::max(1.0, std::abs(aggregate))) {
            out.push_back(where + "aggregate is not the size-weighted mean of the feedback tuple");
        }
        if (r.is_best) ++best_count;
        if (is_better(r.aggregate, records[expected_best].aggregate, sense)) expected_best = s;

        if (s == 0) continue;
        if (sme) {
            if (r.k != first.k) out.push_back(where + "SME changed the cluster count");
            if (r.actions.size() != 2 || r.actions[0].kind != ActionKind::Split || r.actions[1].kind != ActionKind::Merge) {
                out.push_back(where + "SME step is not split+merge");
            }
        } else if (sm) {
            if (r.actions.size() != 1 || r.actions[0].kind == ActionKind::Init) {
                out.push_back(where + "S/M step does not carry exactly one action");
            }
            if (r.k < min_k || r.k > first.k + static_cast<int>(s)) out.push_back(where + "S/M cluster count out of bounds");
        }
    }
    if (best_count != 1) out.push_back("expected exactly one best step, found " + std::to_string(best_count));
    else if (!records[expected_best].is_best) out.push_back("is_best is not on the first optimal step " + std::to_string(expected_best));
    return out;
}

}  // namespace fbk
