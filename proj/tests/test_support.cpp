#include "test_support.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace fbk::testing {

Dataset random_dataset(Rng& rng, int n, int dim) {
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    Matrix points(n, dim);
    for (Index p = 0; p < n; ++p) {
        for (Index j = 0; j < dim; ++j) points(p, j) = u(rng);
    }
    return make_dataset(std::move(points));
}

Dataset gaussian_blobs(const std::vector<std::vector<double>>& centers, double stddev, int per_blob,
                       std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, stddev);
    const auto dim = static_cast<Index>(centers.front().size());
    Matrix points(static_cast<Index>(centers.size()) * per_blob, dim);
    std::vector<int> labels;
    Index row = 0;
    for (std::size_t b = 0; b < centers.size(); ++b) {
        for (int i = 0; i < per_blob; ++i, ++row) {
            for (Index j = 0; j < dim; ++j) points(row, j) = centers[b][static_cast<std::size_t>(j)] + gauss(rng);
            labels.push_back(static_cast<int>(b));
        }
    }
    auto dataset = make_dataset(std::move(points));
    dataset.hidden_segment = std::move(labels);
    return dataset;
}

Clustering random_clustering(const Dataset& dataset, int k, Rng& rng) {
    const auto n = static_cast<std::size_t>(dataset.size());
    Assignment assignment(n);
    // First k points seed each id so the map is surjective.
    for (std::size_t p = 0; p < n; ++p) {
        assignment[p] = p < static_cast<std::size_t>(k) ? static_cast<ClusterId>(p)
                                                         : static_cast<ClusterId>(uniform_below(rng, static_cast<std::uint64_t>(k)));
    }
    Matrix centroids = Matrix::Zero(k, dataset.dim());
    std::vector<double> counts(static_cast<std::size_t>(k), 0.0);
    for (std::size_t p = 0; p < n; ++p) {
        for (Index j = 0; j < dataset.dim(); ++j) centroids(assignment[p], j) += dataset.points(static_cast<Index>(p), j);
        counts[static_cast<std::size_t>(assignment[p])] += 1.0;
    }
    for (int c = 0; c < k; ++c) {
        for (Index j = 0; j < dataset.dim(); ++j) centroids(c, j) /= counts[static_cast<std::size_t>(c)];
    }
    return Clustering{std::move(assignment), std::move(centroids), k};
}

double min_purity(const Clustering& clustering, const std::vector<int>& labels) {
    std::vector<std::map<int, int>> tallies(static_cast<std::size_t>(clustering.k));
    for (std::size_t p = 0; p < labels.size(); ++p) ++tallies[static_cast<std::size_t>(clustering.assignment[p])][labels[p]];
    double worst = 1.0;
    for (const auto& tally : tallies) {
        int total = 0;
        int top = 0;
        for (const auto& [label, count] : tally) {
            total += count;
            top = std::max(top, count);
        }
        if (total > 0) worst = std::min(worst, static_cast<double>(top) / total);
    }
    return worst;
}

double flat_rss(const Dataset& dataset, const Clustering& clustering) {
    double sum = 0.0;
    for (Index p = 0; p < dataset.size(); ++p) {
        const auto c = clustering.assignment[static_cast<std::size_t>(p)];
        for (Index j = 0; j < dataset.dim(); ++j) {
            const double d = dataset.points(p, j) - clustering.centroids(c, j);
            sum += d * d;
        }
    }
    return sum / static_cast<double>(dataset.size());
}

double two_pass_rss(const std::vector<std::vector<double>>& points, const std::vector<double>& centroid) {
    std::vector<double> dists;
    for (const auto& x : points) {
        double d = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) d += (x[j] - centroid[j]) * (x[j] - centroid[j]);
        dists.push_back(d);
    }
    double sum = 0.0;
    for (double d : dists) sum += d;
    return sum / static_cast<double>(points.size());
}

std::vector<std::vector<double>> rows_of(const Matrix& points) {
    std::vector<std::vector<double>> rows;
    for (Index p = 0; p < points.rows(); ++p) {
        std::vector<double> row;
        for (Index j = 0; j < points.cols(); ++j) row.push_back(points(p, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<double> naive_mean(const Dataset& dataset, const IndexList& rows) {
    std::vector<double> mean(static_cast<std::size_t>(dataset.dim()), 0.0);
    for (auto p : rows) {
        for (Index j = 0; j < dataset.dim(); ++j) mean[static_cast<std::size_t>(j)] += dataset.points(p, j);
    }
    for (auto& v : mean) v /= static_cast<double>(rows.size());
    return mean;
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("feedback_kmeans_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

}  // namespace fbk::testing
