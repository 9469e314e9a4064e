#include "feedback_kmeans/operators.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace fbk {

namespace {

void check_id(const Clustering& clustering, ClusterId id, const char* what) {
    if (id < 0 || id >= clustering.k) {
        throw Error(std::string(what) + ": cluster id " + std::to_string(id) + " out of range for k=" +
                    std::to_string(clustering.k));
    }
}

}  // namespace

bool is_splittable(const Dataset& dataset, const Clustering& clustering, ClusterId target) {
    check_id(clustering, target, "is_splittable");
    Index first = -1;
    for (std::size_t p = 0; p < clustering.assignment.size(); ++p) {
        if (clustering.assignment[p] != target) continue;
        const auto row = static_cast<Index>(p);
        if (first < 0) {
            first = row;
        } else if (dataset.points.row(row) != dataset.points.row(first)) {
            return true;
        }
    }
    return false;
}

Bisection bisect_cluster(const Dataset& dataset, const Clustering& clustering, ClusterId target,
                         std::uint64_t seed, const KMeansConfig& defaults) {
    check_id(clustering, target, "split_cluster");
    Bisection out;
    out.members = members_of(clustering, target);
    if (out.members.size() < 2) throw Error("cannot split singleton cluster " + std::to_string(target));
    if (!is_splittable(dataset, clustering, target)) {
        throw Error("cannot split cluster " + std::to_string(target) + ": all points identical");
    }
    KMeansConfig config = defaults;
    config.k = 2;
    config.seed = seed;
    auto halves = lloyd(select_rows(dataset.points, out.members), config);
    out.child = std::move(halves.assignment);
    out.centroids = std::move(halves.centroids);
    return out;
}

Clustering split_cluster(const Dataset& dataset, const Clustering& clustering, ClusterId target,
                         std::uint64_t seed, const KMeansConfig& defaults) {
    const auto halves = bisect_cluster(dataset, clustering, target, seed, defaults);

    const int k = clustering.k + 1;
    Matrix centroids(k, clustering.centroids.cols());
    Index row = 0;
    for (ClusterId c = 0; c < clustering.k; ++c) {
        if (c != target) centroids.row(row++) = clustering.centroids.row(c);
    }
    centroids.row(row++) = halves.centroids.row(0);
    centroids.row(row) = halves.centroids.row(1);

    auto assignment = assign_points(dataset.points, centroids);
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (auto id : assignment) ++counts[static_cast<std::size_t>(id)];
    std::vector<ClusterId> empties;
    for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] == 0) empties.push_back(c);
    }
    if (empties.empty()) return Clustering{std::move(assignment), std::move(centroids), k};
    return renumber_dense(repair_empty(dataset.points, std::move(assignment), std::move(centroids), std::move(empties)));
}

Clustering merge_pair(const Dataset& dataset, const Clustering& clustering, ClusterId i, ClusterId j,
                      int min_k) {
    check_id(clustering, i, "merge_pair");
    check_id(clustering, j, "merge_pair");
    if (i == j) throw Error("merge_pair: cannot merge cluster " + std::to_string(i) + " with itself");
    if (clustering.k - 1 < min_k) {
        throw Error("minimum cluster count: merging would leave " + std::to_string(clustering.k - 1) +
                    " clusters, below " + std::to_string(min_k));
    }
    const int k = clustering.k - 1;
    std::vector<ClusterId> relabel(static_cast<std::size_t>(clustering.k));
    Matrix centroids(k, clustering.centroids.cols());
    ClusterId next = 0;
    for (ClusterId c = 0; c < clustering.k; ++c) {
        if (c == i || c == j) {
            relabel[static_cast<std::size_t>(c)] = k - 1;
        } else {
            centroids.row(next) = clustering.centroids.row(c);
            relabel[static_cast<std::size_t>(c)] = next++;
        }
    }

    Clustering out{clustering.assignment, std::move(centroids), k};
    RowVector sum = RowVector::Zero(dataset.dim());
    std::size_t count = 0;
    for (std::size_t p = 0; p < out.assignment.size(); ++p) {
        auto& id = out.assignment[p];
        if (id == i || id == j) {
            sum += dataset.points.row(static_cast<Index>(p));
            ++count;
        }
        id = relabel[static_cast<std::size_t>(id)];
    }
    out.centroids.row(k - 1) = sum / static_cast<double>(count);
    return out;
}

std::pair<ClusterId, ClusterId> closest_centroid_pair(const Clustering& clustering) {
    if (clustering.k < 2) throw Error("closest_centroid_pair requires at least two clusters");
    std::pair<ClusterId, ClusterId> best{0, 1};
    double best_dist = (clustering.centroids.row(0) - clustering.centroids.row(1)).squaredNorm();
    for (ClusterId a = 0; a < clustering.k; ++a) {
        for (ClusterId b = a + 1; b < clustering.k; ++b) {
            const double dist = (clustering.centroids.row(a) - clustering.centroids.row(b)).squaredNorm();
            if (dist < best_dist) {
                best_dist = dist;
                best = {a, b};
            }
        }
    }
    return best;
}

ClusterId nearest_centroid(const Clustering& clustering, ClusterId from) {
    check_id(clustering, from, "nearest_centroid");
    if (clustering.k < 2) throw Error("nearest_centroid requires at least two clusters");
    ClusterId best = -1;
    double best_dist = 0.0;
    for (ClusterId c = 0; c < clustering.k; ++c) {
        if (c == from) continue;
        const double dist = (clustering.centroids.row(c) - clustering.centroids.row(from)).squaredNorm();
        if (best < 0 || dist < best_dist) {
            best_dist = dist;
            best = c;
        }
    }
    return best;
}

std::vector<ClusterId> clusters_worst_first(const FeedbackReport& report) {
    std::vector<ClusterId> order(report.per_cluster.size());
    std::iota(order.begin(), order.end(), ClusterId{0});
    const auto& y = report.per_cluster;
    std::stable_sort(order.begin(), order.end(), [&](ClusterId a, ClusterId b) {
        const auto ya = y[static_cast<std::size_t>(a)];
        const auto yb = y[static_cast<std::size_t>(b)];
        return report.sense == Sense::LowerIsBetter ? ya > yb : ya < yb;
    });
    return order;
}

ClusterId worst_cluster(const FeedbackReport& report) {
    if (report.per_cluster.empty()) throw Error("worst_cluster: empty feedback report");
    return clusters_worst_first(report).front();
}

SmAction sm_size_rule(const std::vector<std::size_t>& sizes, ClusterId worst) {
    if (worst < 0 || static_cast<std::size_t>(worst) >= sizes.size()) throw Error("sm_decide: worst id out of range");
    std::vector<ClusterId> order(sizes.size());
    std::iota(order.begin(), order.end(), ClusterId{0});
    std::stable_sort(order.begin(), order.end(), [&](ClusterId a, ClusterId b) {
        return sizes[static_cast<std::size_t>(a)] > sizes[static_cast<std::size_t>(b)];
    });
    const auto rank = static_cast<std::size_t>(std::find(order.begin(), order.end(), worst) - order.begin());
    const auto half = (sizes.size() + 1) / 2;
    return rank < half ? SmAction::Split : SmAction::Merge;
}

SmAction sm_decide(const Dataset& dataset, const Clustering& clustering, ClusterId worst, int min_k) {
    check_id(clustering, worst, "sm_decide");
    const bool can_split = is_splittable(dataset, clustering, worst);
    const bool can_merge = clustering.k - 1 >= min_k;
    auto action = sm_size_rule(cluster_sizes(clustering), worst);
    if (action == SmAction::Split && !can_split) action = SmAction::Merge;
    else if (action == SmAction::Merge && !can_merge) action = SmAction::Split;

    if ((action == SmAction::Split && !can_split) || (action == SmAction::Merge && !can_merge)) {
        throw Error("no legal action for cluster " + std::to_string(worst) + " at k=" + std::to_string(clustering.k));
    }
    return action;
}

}  // namespace fbk
