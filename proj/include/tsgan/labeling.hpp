#pragma once

#include <cstdint>
#include <vector>

#include "tsgan/models.hpp"
#include "tsgan/profile_data.hpp"

namespace tsgan {

struct LabelReport {
  std::size_t n_classes = 0;
  std::size_t n_clusters = 0;
  std::vector<std::vector<double>> assignment;  // [class][cluster] fractions, rows sum to 1
  std::vector<int> best_permutation;            // cluster -> class
  double accuracy = 0.0;
};

// Permutation-matched agreement between cluster ids and true classes.
// Exhaustive over cluster relabelings; supports up to 8 clusters.
LabelReport score_labels(const std::vector<int>& pred, const std::vector<int>& truth);

// Argmax of the code head over a normalized, untagged dataset.
template <typename T>
std::vector<int> label_with_q(const Critic<T>& critic, const ProfileDataset& normalized,
                              std::size_t batch = 256);

struct KMeansResult {
  std::vector<int> labels;
  std::vector<std::vector<double>> centroids;
  double inertia = 0.0;
  std::size_t iterations = 0;
  std::vector<double> inertia_trace;  // per Lloyd iteration of the kept restart, then refined
};

struct KMeansOptions {
  std::size_t k = 2;
  std::uint64_t seed = 0;
  std::size_t restarts = 10;
  std::size_t max_iter = 300;
  double tol = 1e-8;
};

// Lloyd's algorithm with k-means++ seeding on raw vectors, squared Euclidean
// distance, followed by single-point transfers while any lowers the inertia;
// the restart with lowest inertia wins. An emptied cluster is
// re-seeded at the point farthest from its assigned centroid.
KMeansResult kmeans(const std::vector<std::vector<double>>& points, const KMeansOptions& opt);
KMeansResult kmeans(const ProfileDataset& ds, const KMeansOptions& opt);

}  // namespace tsgan
