#ifndef FEEDBACK_KMEANS_CORE_HPP
#define FEEDBACK_KMEANS_CORE_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace fbk {

// Points are stored one per row so that a single search is contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;

using ClusterId = int;
using Assignment = std::vector<ClusterId>;
using IndexList = std::vector<Index>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::array<std::string_view, 8> kFlightFeatures = {
    "distance",  "advance_purchase", "stay_duration", "n_passengers",
    "n_children", "geography",       "dep_dow",       "ret_dow"};

struct Dataset {
    Matrix points;
    std::vector<std::string> feature_names;
    std::optional<std::vector<std::int64_t>> bookings;
    // Generator-only ground truth.
    std::optional<std::vector<int>> hidden_segment;
    std::optional<std::vector<std::string>> origin;
    std::optional<std::vector<std::string>> destination;

    Index size() const { return points.rows(); }
    Index dim() const { return points.cols(); }
};

/// Builds a dataset around a bare point matrix. Feature names default to the
/// flight-search schema when the dimension is 8 and to f0, f1, ... otherwise.
Dataset make_dataset(Matrix points);

std::vector<std::string> dataset_violations(const Dataset& dataset);

/// Throws fbk::Error listing every violation when the dataset is malformed.
void check_dataset(const Dataset& dataset);

/// A surjective map from points onto {0..k-1} together with the k centroids.
struct Clustering {
    Assignment assignment;
    Matrix centroids;
    int k = 0;
};

/// Empty iff the clustering is well formed against `dataset`: matching
/// lengths and dimensions, ids in range, and every id used at least once.
std::vector<std::string> validate_clustering(const Dataset& dataset, const Clustering& clustering);

std::vector<std::size_t> cluster_sizes(const Clustering& clustering);
std::vector<IndexList> cluster_members(const Clustering& clustering);
IndexList members_of(const Clustering& clustering, ClusterId id);

/// Drops ids that no point uses (and their centroids), then relabels the
/// remaining ids 0..k'-1 in their original order.
Clustering renumber_dense(Clustering clustering);

Matrix select_rows(const Matrix& points, const IndexList& rows);

enum class Sense { HigherIsBetter, LowerIsBetter };

std::string_view to_string(Sense sense);
Sense sense_from_string(std::string_view text);

/// Strict improvement; equal values never count as better.
bool is_better(double candidate, double incumbent, Sense sense);

struct CustomizabilityDetail {
    double pop_w = 0.0;
    double pop_0 = 0.0;
    Vector fitted_weights;
};

struct ClusterFeedbackValue {
    double value = 0.0;
    std::size_t cluster_size = 0;
    std::optional<CustomizabilityDetail> detail;
};

/// The feedback k-tuple and its size-weighted aggregate.
struct FeedbackReport {
    std::vector<double> per_cluster;
    std::vector<std::size_t> sizes;
    double aggregate = 0.0;
    Sense sense = Sense::LowerIsBetter;
    std::vector<std::optional<CustomizabilityDetail>> details;
};

}  // namespace fbk

#endif  // FEEDBACK_KMEANS_CORE_HPP
