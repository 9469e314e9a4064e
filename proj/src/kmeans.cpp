#include "feedback_kmeans/kmeans.hpp"

#include <algorithm>
#include <string>

#include "feedback_kmeans/random.hpp"

namespace fbk {

Matrix init_centroids(const Matrix& points, int k, std::uint64_t seed) {
    if (k < 1) throw Error("k must be positive");
    const auto n = static_cast<std::size_t>(points.rows());
    Rng rng(seed);
    const auto order = sample_without_replacement(n, n, rng);

    Matrix chosen(k, points.cols());
    int found = 0;
    for (auto p : order) {
        if (found == k) break;
        const auto row = points.row(static_cast<Index>(p));
        bool duplicate = false;
        for (int c = 0; c < found && !duplicate; ++c) duplicate = (chosen.row(c) == row);
        if (!duplicate) chosen.row(found++) = row;
    }
    if (found < k) {
        throw Error("k exceeds distinct points: k=" + std::to_string(k) + " but only " + std::to_string(found) +
                    " distinct points");
    }
    return chosen;
}

Matrix init_centroids(const Dataset& dataset, int k, std::uint64_t seed) {
    return init_centroids(dataset.points, k, seed);
}

Clustering repair_empty(const Matrix& points, Assignment assignment, Matrix centroids,
                        std::vector<ClusterId> empties) {
    const auto k = static_cast<int>(centroids.rows());
    if (k > points.rows()) {
        throw Error("cannot repair empty clusters: k=" + std::to_string(k) + " exceeds " +
                    std::to_string(points.rows()) + " points");
    }
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (auto id : assignment) ++counts[static_cast<std::size_t>(id)];

    std::sort(empties.begin(), empties.end());
    for (auto empty : empties) {
        if (counts[static_cast<std::size_t>(empty)] > 0) continue;
        Index farthest = -1;
        double farthest_dist = -1.0;
        for (Index p = 0; p < points.rows(); ++p) {
            const auto owner = assignment[static_cast<std::size_t>(p)];
            if (counts[static_cast<std::size_t>(owner)] < 2) continue;
            const double dist = (points.row(p) - centroids.row(owner)).squaredNorm();
            if (dist > farthest_dist) {
                farthest_dist = dist;
                farthest = p;
            }
        }
        if (farthest < 0) throw Error("cannot repair empty clusters: no donor point");
        auto& owner = assignment[static_cast<std::size_t>(farthest)];
        --counts[static_cast<std::size_t>(owner)];
        owner = empty;
        counts[static_cast<std::size_t>(empty)] = 1;
        centroids.row(empty) = points.row(farthest);
    }
    return Clustering{std::move(assignment), std::move(centroids), k};
}

Clustering repair_empty(const Dataset& dataset, Assignment assignment, Matrix centroids,
                        std::vector<ClusterId> empties) {
    return repair_empty(dataset.points, std::move(assignment), std::move(centroids), std::move(empties));
}

Clustering lloyd(const Matrix& points, const KMeansConfig& config, const LloydObserver& observer) {
    if (config.k < 1) throw Error("k must be positive");
    if (config.k > points.rows()) {
        throw Error("k=" + std::to_string(config.k) + " exceeds " + std::to_string(points.rows()) + " points");
    }
    if (config.max_iterations < 1) throw Error("max_iterations must be at least 1");
    if (config.tolerance < 0.0) throw Error("tolerance must be non-negative");

    Matrix centroids = init_centroids(points, config.k, config.seed);
    Assignment assignment;
    for (int iteration = 1; iteration <= config.max_iterations; ++iteration) {
        assignment = assign_points(points, centroids);
        auto update = update_centroids(points, assignment, config.k);
        if (!update.empties.empty()) {
            auto repaired = repair_empty(points, std::move(assignment), std::move(update.centroids),
                                         std::move(update.empties));
            assignment = std::move(repaired.assignment);
            update = update_centroids(points, assignment, config.k);
        }
        const double movement = (update.centroids - centroids).rowwise().squaredNorm().maxCoeff();
        centroids = std::move(update.centroids);
        if (observer) observer(iteration, Clustering{assignment, centroids, config.k});
        if (movement <= config.tolerance) break;
    }
    return Clustering{std::move(assignment), std::move(centroids), config.k};
}

Clustering lloyd(const Dataset& dataset, const KMeansConfig& config, const LloydObserver& observer) {
    return lloyd(dataset.points, config, observer);
}

}  // namespace fbk
