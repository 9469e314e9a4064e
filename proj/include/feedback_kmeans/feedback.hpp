#ifndef FEEDBACK_KMEANS_FEEDBACK_HPP
#define FEEDBACK_KMEANS_FEEDBACK_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "feedback_kmeans/core.hpp"
#include "feedback_kmeans/random.hpp"

namespace fbk {

// ---------------------------------------------------------------------------
// Shared primitives
// ---------------------------------------------------------------------------

/// Mean squared distance of `points` (one per row) to `centroid`.
template <typename PointsT, typename CentroidT>
double rss_cluster(const Eigen::MatrixBase<PointsT>& points, const Eigen::MatrixBase<CentroidT>& centroid) {
    if (points.rows() == 0) throw Error("rss_cluster: empty cluster");
    return (points.rowwise() - centroid.derived().row(0)).rowwise().squaredNorm().sum() /
           static_cast<double>(points.rows());
}

/// (1/|X|) * sum_i |X_i| * y_i
double aggregate_weighted(std::span<const double> per_cluster, std::span<const std::size_t> sizes);

inline constexpr double kDegenerateReference = 1e-12;

/// (value - reference) / |reference|
double relative_change(double reference, double value);

// ---------------------------------------------------------------------------
// Simulated customizability oracle
// ---------------------------------------------------------------------------

/// Hidden per-segment preference weights and the knobs of the simulated
/// popularity score  C - |w - w*_seg|^2 + noise.
struct OracleProfile {
    int m = 4;
    std::map<int, Vector> segment_weights;
    double score_offset = 10.0;
    double noise_sigma = 0.05;
    int sample_size = 100;
    double eval_pool_fraction = 0.2;
    std::uint64_t rng_seed = 0;
};

std::vector<std::string> profile_violations(const OracleProfile& profile);
void check_profile(const OracleProfile& profile);

nlohmann::json profile_to_json(const OracleProfile& profile);
OracleProfile profile_from_json(const nlohmann::json& json);

/// Mean of the true segment weights of the sample: the exact maximizer of
/// the noiseless mean score over the same sample.
Vector fit_weights(const Dataset& dataset, std::span<const Index> sample, const OracleProfile& profile);

/// Mean simulated score of `weights` over `eval_points`, one noise draw per
/// point from `rng`.
double popularity(const Dataset& dataset, std::span<const Index> eval_points, const Vector& weights,
                  const OracleProfile& profile, Rng& rng);

/// Fits on the most-booked members, evaluates on a fresh random draw from the
/// most-booked pool, and reports the relative popularity gain over the
/// all-zero weights.
ClusterFeedbackValue customizability_cluster(const Dataset& dataset, std::span<const Index> members,
                                             const OracleProfile& profile, Rng& rng);

// ---------------------------------------------------------------------------
// Providers
// ---------------------------------------------------------------------------

enum class FeedbackKind { Rss, Customizability };

std::string_view to_string(FeedbackKind kind);
FeedbackKind feedback_kind_from_string(std::string_view name);

class FeedbackProvider {
public:
    virtual ~FeedbackProvider() = default;

    virtual FeedbackKind kind() const = 0;
    virtual Sense sense() const = 0;
    virtual bool deterministic() const = 0;

    /// `stream` identifies the RNG substream for this cluster; deterministic
    /// providers ignore it.
    virtual ClusterFeedbackValue evaluate_cluster(const Dataset& dataset, std::span<const Index> members,
                                                  const RowVector& centroid, std::uint64_t stream) const = 0;
};

class RssFeedback final : public FeedbackProvider {
public:
    FeedbackKind kind() const override { return FeedbackKind::Rss; }
    Sense sense() const override { return Sense::LowerIsBetter; }
    bool deterministic() const override { return true; }
    ClusterFeedbackValue evaluate_cluster(const Dataset& dataset, std::span<const Index> members,
                                          const RowVector& centroid, std::uint64_t stream) const override;
};

class CustomizabilityFeedback final : public FeedbackProvider {
public:
    explicit CustomizabilityFeedback(OracleProfile profile);

    FeedbackKind kind() const override { return FeedbackKind::Customizability; }
    Sense sense() const override { return Sense::HigherIsBetter; }
    bool deterministic() const override { return false; }
    ClusterFeedbackValue evaluate_cluster(const Dataset& dataset, std::span<const Index> members,
                                          const RowVector& centroid, std::uint64_t stream) const override;

    const OracleProfile& profile() const { return profile_; }

private:
    OracleProfile profile_;
};

/// "rss" or "custom"; the latter requires a profile.
std::shared_ptr<const FeedbackProvider> make_provider(std::string_view name, const OracleProfile* profile);

/// Per-cluster feedback plus its size-weighted aggregate. Cluster c draws from
/// substream derive_seed(stream, {c}).
FeedbackReport evaluate_clustering(const Dataset& dataset, const Clustering& clustering,
                                   const FeedbackProvider& provider, std::uint64_t stream);

}  // namespace fbk

#endif  // FEEDBACK_KMEANS_FEEDBACK_HPP
