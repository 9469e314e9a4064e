#ifndef FEEDBACK_KMEANS_ENGINES_HPP
#define FEEDBACK_KMEANS_ENGINES_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "feedback_kmeans/core.hpp"
#include "feedback_kmeans/feedback.hpp"
#include "feedback_kmeans/operators.hpp"
#include "feedback_kmeans/trace.hpp"

namespace fbk {

enum class Method { Sme, Sm };

std::string_view to_string(Method method);
Method method_from_string(std::string_view name);

/// 6 for SME, 12 for S/M: both then apply 12 split/merge actions.
int default_iterations(Method method);

struct EngineConfig {
    Method method = Method::Sme;
    int iterations = 6;
    std::optional<double> target_evaluation;
    std::uint64_t seed = 0;
    std::shared_ptr<const FeedbackProvider> feedback;
    int min_k = kMinClusters;
    int kmeans_max_iterations = 100;
    double kmeans_tolerance = 1e-9;
    std::size_t snapshot_cap = 256;
};

/// Split-merge-evolve: each iteration splits the worst splittable cluster,
/// merges the globally closest centroid pair and evaluates once.
RunTrace run_sme(const Dataset& dataset, int k, const EngineConfig& config);

/// Split-or-merge: each iteration applies one action picked by sm_decide on
/// the worst cluster (merge partner: its nearest centroid) and evaluates.
RunTrace run_sm(const Dataset& dataset, int k, const EngineConfig& config);

RunTrace run_engine(const Dataset& dataset, int k, const EngineConfig& config);

/// Seeds used by a run, all derived from EngineConfig::seed.
std::uint64_t init_seed(std::uint64_t seed);
std::uint64_t split_seed(std::uint64_t seed, std::size_t step);
std::uint64_t feedback_stream(std::uint64_t seed, std::size_t step);

/// Checks a parsed trace against the dataset: every clustering valid,
/// step 0 is Init, aggregates and is_best consistent, and the per-method
/// cluster-count rules. Empty iff all hold.
std::vector<std::string> check_trace(const Dataset& dataset, const std::vector<TraceRecord>& records,
                                     int min_k = kMinClusters);

}  // namespace fbk

#endif  // FEEDBACK_KMEANS_ENGINES_HPP
