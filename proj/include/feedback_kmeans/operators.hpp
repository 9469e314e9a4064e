#ifndef FEEDBACK_KMEANS_OPERATORS_HPP
#define FEEDBACK_KMEANS_OPERATORS_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "feedback_kmeans/core.hpp"
#include "feedback_kmeans/kmeans.hpp"

namespace fbk {

/// Minimum number of clusters any merge may leave behind.
inline constexpr int kMinClusters = 2;

/// The 2-means bisection of one cluster, before it is spliced back.
struct Bisection {
    IndexList members;
    Assignment child;  // 0 or 1 per member
    Matrix centroids;  // 2 rows
};

/// A cluster can be bisected when it holds at least two distinct points.
bool is_splittable(const Dataset& dataset, const Clustering& clustering, ClusterId target);

Bisection bisect_cluster(const Dataset& dataset, const Clustering& clustering, ClusterId target,
                         std::uint64_t seed, const KMeansConfig& defaults = {});

/// Replaces `target` by the two 2-means children (appended as the last two
/// ids), then runs exactly one global assignment pass over all points with
/// no centroid update. Clusters emptied by that pass are repaired.
Clustering split_cluster(const Dataset& dataset, const Clustering& clustering, ClusterId target,
                         std::uint64_t seed, const KMeansConfig& defaults = {});

/// Union of clusters i and j, placed last, with the mean of the union as its
/// centroid. No reassignment pass.
Clustering merge_pair(const Dataset& dataset, const Clustering& clustering, ClusterId i, ClusterId j,
                      int min_k = kMinClusters);

/// Globally closest pair of centroids, lexicographically smallest on ties.
std::pair<ClusterId, ClusterId> closest_centroid_pair(const Clustering& clustering);

/// The other cluster whose centroid is nearest to `from` (lowest id on ties).
ClusterId nearest_centroid(const Clustering& clustering, ClusterId from);

ClusterId worst_cluster(const FeedbackReport& report);

/// All cluster ids ordered from worst to best feedback, ties by id.
std::vector<ClusterId> clusters_worst_first(const FeedbackReport& report);

enum class SmAction { Split, Merge };

/// Bare size rule: Split iff the cluster's rank among sizes sorted
/// descending (ties by id) is below ceil(k/2).
SmAction sm_size_rule(const std::vector<std::size_t>& sizes, ClusterId worst);

/// Size rule plus overrides for unsplittable clusters and for merges that
/// would drop below `min_k`.
SmAction sm_decide(const Dataset& dataset, const Clustering& clustering, ClusterId worst,
                   int min_k = kMinClusters);

}  // namespace fbk

#endif  // FEEDBACK_KMEANS_OPERATORS_HPP
