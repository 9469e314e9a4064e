#ifndef FEEDBACK_KMEANS_TEST_SUPPORT_HPP
#define FEEDBACK_KMEANS_TEST_SUPPORT_HPP

// Test-only helpers. The oracles here use plain loops over std::vector so they
// stay independent of the Eigen expressions used by the library.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "feedback_kmeans/core.hpp"
#include "feedback_kmeans/random.hpp"

namespace fbk::testing {

/// Uniform points in [-5, 5]^dim.
Dataset random_dataset(Rng& rng, int n, int dim);

/// Isotropic Gaussian blobs, `per_blob` points each, hidden_segment = blob index.
Dataset gaussian_blobs(const std::vector<std::vector<double>>& centers, double stddev, int per_blob,
                       std::uint64_t seed);

/// Random dense clustering of `dataset` into k clusters with mean centroids.
Clustering random_clustering(const Dataset& dataset, int k, Rng& rng);

/// Smallest per-cluster majority fraction of hidden labels.
double min_purity(const Clustering& clustering, const std::vector<int>& labels);

/// sum_x |x - m_c(x)|^2 / |X| by a flat loop over points.
double flat_rss(const Dataset& dataset, const Clustering& clustering);

/// Two-pass mean squared distance of the rows of `points` to `centroid`.
double two_pass_rss(const std::vector<std::vector<double>>& points, const std::vector<double>& centroid);

std::vector<std::vector<double>> rows_of(const Matrix& points);

/// Column-wise mean of the listed points by naive summation.
std::vector<double> naive_mean(const Dataset& dataset, const IndexList& rows);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

std::string read_file(const std::filesystem::path& path);

}  // namespace fbk::testing

#endif  // FEEDBACK_KMEANS_TEST_SUPPORT_HPP
