#ifndef FEEDBACK_KMEANS_TRACE_HPP
#define FEEDBACK_KMEANS_TRACE_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "feedback_kmeans/core.hpp"

namespace fbk {

enum class ActionKind { Init, Split, Merge };

struct Action {
    ActionKind kind = ActionKind::Init;
    ClusterId first = -1;
    ClusterId second = -1;

    static Action init() { return {}; }
    static Action split(ClusterId target) { return {ActionKind::Split, target, -1}; }
    static Action merge(ClusterId i, ClusterId j) { return {ActionKind::Merge, i, j}; }

    friend bool operator==(const Action&, const Action&) = default;
};

/// "init", "split(3)", "merge(0,2)"
std::string to_string(const Action& action);
std::string to_string(const std::vector<Action>& actions);

/// Difference between a step's clustering and the one recorded before it.
struct ClusteringDelta {
    std::vector<std::pair<Index, ClusterId>> moved;
    Matrix centroids;
    int k = 0;
};

ClusteringDelta diff_clustering(const Clustering& before, const Clustering& after);
Clustering apply_delta(Clustering base, const ClusteringDelta& delta);

/// One evaluated state. SME steps carry a split and a merge, S/M steps a
/// single action; step 0 carries Init.
struct TraceStep {
    std::vector<Action> actions;
    int k = 0;
    FeedbackReport feedback;
    std::optional<Clustering> snapshot;
    ClusteringDelta delta;
};

struct RunTrace {
    std::vector<TraceStep> steps;
    std::size_t best_step_index = 0;
    double best_evaluation = 0.0;
    Clustering best;
    Sense sense = Sense::LowerIsBetter;
    std::uint64_t seed = 0;
    std::string method;
    std::string feedback;
    bool stalled = false;
    std::string stop_reason;

    std::size_t evaluation_count() const { return steps.size(); }
    std::size_t action_count() const;

    /// Rebuilds the clustering of any step from the nearest earlier
    /// snapshot and the deltas after it.
    Clustering clustering_at(std::size_t step) const;

    /// Appends a step and applies the evolve rule (strict improvement).
    /// Keeps full snapshots for the first `snapshot_cap` steps only.
    void record(std::vector<Action> actions, const Clustering& clustering, FeedbackReport feedback,
                std::size_t snapshot_cap);
};

/// Evaluation and clustering of the best step.
std::pair<Clustering, double> best_clustering(const RunTrace& trace);

/// One JSON object per line: step, action, actions, k, per_cluster_feedback,
/// cluster_sizes, aggregate, is_best, sense, method, feedback, stalled,
/// assignment, centroids.
void write_trace_jsonl(const RunTrace& trace, std::ostream& out);

/// A parsed trace line.
struct TraceRecord {
    std::size_t step = 0;
    std::vector<Action> actions;
    int k = 0;
    std::vector<double> per_cluster;
    std::vector<std::size_t> sizes;
    double aggregate = 0.0;
    bool is_best = false;
    Sense sense = Sense::LowerIsBetter;
    std::string method;
    std::string feedback;
    bool stalled = false;
    Clustering clustering;
};

std::vector<TraceRecord> read_trace_jsonl(std::istream& in);

}  // namespace fbk

#endif  // FEEDBACK_KMEANS_TRACE_HPP
