#ifndef FEEDBACK_KMEANS_HARNESS_HPP
#define FEEDBACK_KMEANS_HARNESS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "feedback_kmeans/core.hpp"
#include "feedback_kmeans/engines.hpp"
#include "feedback_kmeans/feedback.hpp"

namespace fbk {

/// One of the four method variants, e.g. {Sm, Customizability} = "sm:custom".
struct MethodSpec {
    Method method = Method::Sme;
    FeedbackKind feedback = FeedbackKind::Rss;

    std::string key() const;    // "sme:rss"
    std::string label() const;  // "SME(RSS)"
    friend bool operator==(const MethodSpec&, const MethodSpec&) = default;
};

MethodSpec method_spec_from_string(std::string_view key);
std::vector<MethodSpec> all_methods();

/// Oriented so that improvement is non-negative:
/// HigherIsBetter -> (best - initial)/|initial|, LowerIsBetter -> (initial - best)/|initial|.
double impact(double initial, double best, Sense sense);

enum class FluctuationPairing { ToFirstCall, AllPairs };

/// Mean |relative change| between repeated evaluations of one clustering,
/// each call on its own substream. ToFirstCall pairs calls 2..N with call 1;
/// AllPairs averages over every ordered pair (i < j) with call i as reference.
double expected_relative_change(const Dataset& dataset, const Clustering& clustering,
                                const FeedbackProvider& provider, int calls, std::uint64_t seed,
                                FluctuationPairing pairing = FluctuationPairing::ToFirstCall);

struct ExperimentConfig {
    std::vector<MethodSpec> methods = all_methods();
    std::vector<int> k_values{2, 3, 4, 5, 6, 7};
    int sme_iterations = 6;
    int sm_iterations = 12;
    int repeats_per_cell = 3;
    int fluctuation_calls = 10;
    std::uint64_t seed = 0;
    // 0 = FEEDBACK_KMEANS_THREADS or hardware concurrency.
    int threads = 0;
};

std::vector<std::string> experiment_violations(const ExperimentConfig& config);

struct ImpactRecord {
    std::string method;  // MethodSpec::key()
    int k = 0;
    std::uint64_t seed = 0;
    std::string driving_feedback;
    double initial_eval = 0.0;
    double best_eval = 0.0;
    double impact = 0.0;
    std::optional<double> custom_initial;
    std::optional<double> custom_reference;
    std::optional<double> custom_impact;
    int final_k = 0;
    bool stalled = false;
    std::string error;  // non-empty marks a failed cell

    bool failed() const { return !error.empty(); }
};

struct ExperimentReport {
    std::vector<ImpactRecord> records;
    // Per k: expected relative change of the initial clustering under
    // customizability, measured on the first repeat.
    std::map<int, double> fluctuation_by_k;
};

/// Runs every (method, k, repeat) cell. Cells with the same (k, repeat)
/// share the engine seed, so all methods start from the same initial
/// clustering and the same initial customizability evaluation.
ExperimentReport run_experiment(const Dataset& dataset, const ExperimentConfig& config,
                                const OracleProfile& oracle_profile);

/// Engine seed of the (k, repeat) cell.
std::uint64_t cell_seed(std::uint64_t experiment_seed, int k, int repeat);

struct MethodSummary {
    std::string method;
    double mean_impact = 0.0;         // unweighted mean over k of per-k means
    double mean_custom_impact = 0.0;  // same, for the customizability comparison
    std::map<int, double> impact_by_k;
    std::map<int, double> custom_impact_by_k;
    std::map<int, int> final_k_counts;
    int cells = 0;
    int failed = 0;
};

struct ExperimentSummary {
    std::vector<MethodSummary> methods;
    std::map<int, double> initial_custom_by_k;
    std::map<int, double> fluctuation_by_k;
};

ExperimentSummary summarize(const ExperimentReport& report);
nlohmann::json summary_to_json(const ExperimentSummary& summary);

/// Plain-text table of per-method mean impacts and the per-k breakdown.
std::string format_summary(const ExperimentSummary& summary);

}  // namespace fbk

#endif  // FEEDBACK_KMEANS_HARNESS_HPP
