#pragma once

#include <cstdint>
#include <vector>

namespace swapforge::curation {

using Embedding = std::vector<float>;

inline constexpr int kDefaultClusters = 25;
inline constexpr int kKMeansMaxIterations = 300;

struct KMeansResult {
    std::vector<int> assignments;
    std::vector<std::vector<double>> centroids;
    int iterations = 0;
    /// Sum of squared distances after each assignment step.
    std::vector<double> objective_history;
};

/// Lloyd's algorithm seeded by k-means++. Deterministic for fixed inputs and
/// seed. An empty cluster keeps its previous centroid.
KMeansResult kmeans_cluster(const std::vector<Embedding>& embeddings, int k, std::uint64_t seed,
                            int max_iterations = kKMeansMaxIterations);

}  // namespace swapforge::curation
