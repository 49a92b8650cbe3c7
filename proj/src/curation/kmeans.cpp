#include "swapforge/curation/kmeans.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "swapforge/errors.hpp"

namespace swapforge::curation {

namespace {

// Library-independent uniform draw in [0, 1).
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double sq_dist(const Embedding& a, const std::vector<double>& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - c[i];
        s += d * d;
    }
    return s;
}

}  // namespace

KMeansResult kmeans_cluster(const std::vector<Embedding>& embeddings, int k, std::uint64_t seed,
                            int max_iterations) {
    const std::size_t n = embeddings.size();
    if (k < 1) throw InvalidArgument("kmeans_cluster: k must be >= 1");
    if (static_cast<std::size_t>(k) > n) {
        throw InvalidArgument("kmeans_cluster: k=" + std::to_string(k) + " exceeds " + std::to_string(n) +
                              " embeddings");
    }
    const std::size_t dim = embeddings.front().size();
    for (const auto& e : embeddings) {
        if (e.size() != dim) throw InvalidArgument("kmeans_cluster: embeddings differ in dimension");
        for (float v : e)
            if (!std::isfinite(v)) throw InvalidArgument("kmeans_cluster: non-finite embedding value");
    }

    std::mt19937_64 rng(seed);
    KMeansResult res;
    auto& centroids = res.centroids;

    // k-means++ seeding.
    const std::size_t first = static_cast<std::size_t>(uniform01(rng) * n);
    centroids.emplace_back(embeddings[first].begin(), embeddings[first].end());
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    while (centroids.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], sq_dist(embeddings[i], centroids.back()));
            total += d2[i];
        }
        std::size_t pick = n - 1;
        if (total > 0.0) {
            const double target = uniform01(rng) * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<std::size_t>(uniform01(rng) * n);
        }
        centroids.emplace_back(embeddings[pick].begin(), embeddings[pick].end());
    }

    res.assignments.assign(n, -1);
    for (int iter = 0; iter < max_iterations; ++iter) {
        bool changed = false;
        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_dist(embeddings[i], centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d = sq_dist(embeddings[i], centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (res.assignments[i] != best) changed = true;
            res.assignments[i] = best;
            objective += best_d;
        }
        res.objective_history.push_back(objective);
        res.iterations = iter + 1;
        if (!changed && iter > 0) break;

        // Fixed-order accumulation keeps the update bitwise reproducible.
        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto& s = sums[res.assignments[i]];
            for (std::size_t d = 0; d < dim; ++d) s[d] += embeddings[i][d];
            ++counts[res.assignments[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            for (std::size_t d = 0; d < dim; ++d) centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
        }
    }
    return res;
}

}  // namespace swapforge::curation
