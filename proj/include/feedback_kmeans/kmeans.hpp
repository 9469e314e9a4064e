#ifndef FEEDBACK_KMEANS_KMEANS_HPP
#define FEEDBACK_KMEANS_KMEANS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "feedback_kmeans/core.hpp"

namespace fbk {

struct KMeansConfig {
    int k = 2;
    std::uint64_t seed = 0;
    int max_iterations = 100;
    // Bound on the largest squared centroid displacement between iterations.
    double tolerance = 1e-9;
};

/// Index of the centroid closest to `point` in squared Euclidean distance;
/// ties go to the lowest index.
template <typename PointT, typename CentroidsT>
ClusterId nearest_row(const Eigen::MatrixBase<PointT>& point, const Eigen::MatrixBase<CentroidsT>& centroids) {
    ClusterId best = 0;
    typename CentroidsT::Scalar best_dist = (centroids.row(0) - point).squaredNorm();
    for (Index c = 1; c < centroids.rows(); ++c) {
        const auto dist = (centroids.row(c) - point).squaredNorm();
        if (dist < best_dist) {
            best_dist = dist;
            best = static_cast<ClusterId>(c);
        }
    }
    return best;
}

template <typename PointsT, typename CentroidsT>
Assignment assign_points(const Eigen::MatrixBase<PointsT>& points, const Eigen::MatrixBase<CentroidsT>& centroids) {
    if (centroids.rows() == 0) throw Error("assign_points: no centroids");
    if (centroids.cols() != points.cols()) throw Error("assign_points: centroid dimension mismatch");
    Assignment out(static_cast<std::size_t>(points.rows()));
    for (Index p = 0; p < points.rows(); ++p) out[static_cast<std::size_t>(p)] = nearest_row(points.row(p), centroids);
    return out;
}

struct CentroidUpdate {
    Matrix centroids;
    std::vector<ClusterId> empties;
};

/// Per-cluster arithmetic means. Rows of empty clusters are left at zero and
/// reported in `empties`.
template <typename PointsT>
CentroidUpdate update_centroids(const Eigen::MatrixBase<PointsT>& points, const Assignment& assignment, int k) {
    CentroidUpdate out{Matrix::Zero(k, points.cols()), {}};
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (Index p = 0; p < points.rows(); ++p) {
        const auto id = assignment[static_cast<std::size_t>(p)];
        out.centroids.row(id) += points.row(p);
        ++counts[static_cast<std::size_t>(id)];
    }
    for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] == 0) {
            out.empties.push_back(c);
        } else {
            out.centroids.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
        }
    }
    return out;
}

/// Sum over points of the squared distance to their assigned centroid.
template <typename PointsT, typename CentroidsT>
double total_squared_error(const Eigen::MatrixBase<PointsT>& points, const Assignment& assignment,
                           const Eigen::MatrixBase<CentroidsT>& centroids) {
    double sum = 0.0;
    for (Index p = 0; p < points.rows(); ++p) {
        sum += (points.row(p) - centroids.row(assignment[static_cast<std::size_t>(p)])).squaredNorm();
    }
    return sum;
}

/// k distinct rows of `points` drawn uniformly without replacement.
Matrix init_centroids(const Matrix& points, int k, std::uint64_t seed);
Matrix init_centroids(const Dataset& dataset, int k, std::uint64_t seed);

/// Re-seeds every empty cluster at the point farthest from its current
/// centroid (ties to the lowest point index), taking points only from
/// clusters that keep at least one member.
Clustering repair_empty(const Matrix& points, Assignment assignment, Matrix centroids,
                        std::vector<ClusterId> empties);
Clustering repair_empty(const Dataset& dataset, Assignment assignment, Matrix centroids,
                        std::vector<ClusterId> empties);

/// Called once per Lloyd iteration with the (assignment, mean centroids)
/// state reached at the end of that iteration.
using LloydObserver = std::function<void(int iteration, const Clustering& state)>;

Clustering lloyd(const Matrix& points, const KMeansConfig& config, const LloydObserver& observer = {});
Clustering lloyd(const Dataset& dataset, const KMeansConfig& config, const LloydObserver& observer = {});

}  // namespace fbk

#endif  // FEEDBACK_KMEANS_KMEANS_HPP
