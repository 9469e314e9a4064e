#include "feedback_kmeans/core.hpp"

#include <sstream>

namespace fbk {

Dataset make_dataset(Matrix points) {
    Dataset dataset;
    const auto dim = points.cols();
    dataset.points = std::move(points);
    if (dim == static_cast<Index>(kFlightFeatures.size())) {
        for (auto name : kFlightFeatures) dataset.feature_names.emplace_back(name);
    } else {
        for (Index j = 0; j < dim; ++j) dataset.feature_names.push_back("f" + std::to_string(j));
    }
    return dataset;
}

std::vector<std::string> dataset_violations(const Dataset& dataset) {
    std::vector<std::string> out;
    const auto n = static_cast<std::size_t>(dataset.size());
    if (n == 0) out.emplace_back("dataset is empty");
    if (dataset.dim() < 1) out.emplace_back("dimension must be at least 1");
    if (dataset.feature_names.size() != static_cast<std::size_t>(dataset.dim())) {
        out.emplace_back("feature_names length " + std::to_string(dataset.feature_names.size()) +
                         " does not match dimension " + std::to_string(dataset.dim()));
    }
    auto check_len = [&](const char* name, std::size_t len) {
        if (len != n) {
            out.push_back(std::string(name) + " has " + std::to_string(len) + " entries for " +
                          std::to_string(n) + " points");
        }
    };
    if (dataset.bookings) {
        check_len("bookings", dataset.bookings->size());
        for (auto b : *dataset.bookings) {
            if (b < 0) {
                out.emplace_back("bookings must be non-negative");
                break;
            }
        }
    }
    if (dataset.hidden_segment) check_len("hidden_segment", dataset.hidden_segment->size());
    if (dataset.origin) check_len("origin", dataset.origin->size());
    if (dataset.destination) check_len("destination", dataset.destination->size());
    if (!dataset.points.allFinite()) out.emplace_back("points contain non-finite values");
    return out;
}

void check_dataset(const Dataset& dataset) {
    auto violations = dataset_violations(dataset);
    if (violations.empty()) return;
    std::ostringstream msg;
    msg << "invalid dataset:";
    for (const auto& v : violations) msg << ' ' << v << ';';
    throw Error(msg.str());
}

std::vector<std::string> validate_clustering(const Dataset& dataset, const Clustering& clustering) {
    std::vector<std::string> out;
    const auto n = static_cast<std::size_t>(dataset.size());
    if (clustering.k < 1) out.push_back("k must be positive, got " + std::to_string(clustering.k));
    if (clustering.assignment.size() != n) {
        out.push_back("assignment length mismatch: " + std::to_string(clustering.assignment.size()) +
                      " entries for " + std::to_string(n) + " points");
    }
    if (clustering.centroids.rows() != clustering.k) {
        out.push_back("centroid count " + std::to_string(clustering.centroids.rows()) +
                      " does not match k=" + std::to_string(clustering.k));
    }
    if (clustering.centroids.rows() > 0 && clustering.centroids.cols() != dataset.dim()) {
        out.push_back("centroid dimension " + std::to_string(clustering.centroids.cols()) +
                      " does not match dataset dimension " + std::to_string(dataset.dim()));
    }
    if (clustering.k < 1) return out;

    std::vector<std::size_t> counts(static_cast<std::size_t>(clustering.k), 0);
    bool reported_range = false;
    for (std::size_t p = 0; p < clustering.assignment.size(); ++p) {
        const auto id = clustering.assignment[p];
        if (id < 0 || id >= clustering.k) {
            if (!reported_range) {
                out.push_back("point " + std::to_string(p) + " has cluster id " + std::to_string(id) +
                              " outside [0, " + std::to_string(clustering.k) + ")");
                reported_range = true;
            }
            continue;
        }
        ++counts[static_cast<std::size_t>(id)];
    }
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) out.push_back("cluster " + std::to_string(c) + " empty");
    }
    return out;
}

std::vector<std::size_t> cluster_sizes(const Clustering& clustering) {
    std::vector<std::size_t> sizes(static_cast<std::size_t>(clustering.k), 0);
    for (auto id : clustering.assignment) ++sizes.at(static_cast<std::size_t>(id));
    return sizes;
}

std::vector<IndexList> cluster_members(const Clustering& clustering) {
    std::vector<IndexList> members(static_cast<std::size_t>(clustering.k));
    for (std::size_t p = 0; p < clustering.assignment.size(); ++p) {
        members.at(static_cast<std::size_t>(clustering.assignment[p])).push_back(static_cast<Index>(p));
    }
    return members;
}

IndexList members_of(const Clustering& clustering, ClusterId id) {
    IndexList members;
    for (std::size_t p = 0; p < clustering.assignment.size(); ++p) {
        if (clustering.assignment[p] == id) members.push_back(static_cast<Index>(p));
    }
    return members;
}

Clustering renumber_dense(Clustering clustering) {
    const auto k = static_cast<std::size_t>(clustering.k);
    std::vector<std::size_t> counts(k, 0);
    for (auto id : clustering.assignment) ++counts.at(static_cast<std::size_t>(id));

    std::vector<ClusterId> relabel(k, -1);
    ClusterId next = 0;
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] > 0) relabel[c] = next++;
    }
    if (next == clustering.k) return clustering;

    Matrix centroids(next, clustering.centroids.cols());
    for (std::size_t c = 0; c < k; ++c) {
        if (relabel[c] >= 0) centroids.row(relabel[c]) = clustering.centroids.row(static_cast<Index>(c));
    }
    for (auto& id : clustering.assignment) id = relabel[static_cast<std::size_t>(id)];
    clustering.centroids = std::move(centroids);
    clustering.k = next;
    return clustering;
}

Matrix select_rows(const Matrix& points, const IndexList& rows) {
    Matrix out(static_cast<Index>(rows.size()), points.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = points.row(rows[r]);
    return out;
}

std::string_view to_string(Sense sense) {
    return sense == Sense::HigherIsBetter ? "higher_is_better" : "lower_is_better";
}

Sense sense_from_string(std::string_view text) {
    if (text == "higher_is_better") return Sense::HigherIsBetter;
    if (text == "lower_is_better") return Sense::LowerIsBetter;
    throw Error("unknown sense '" + std::string(text) + "'");
}

bool is_better(double candidate, double incumbent, Sense sense) {
    return sense == Sense::HigherIsBetter ? candidate > incumbent : candidate < incumbent;
}

}  // namespace fbk
