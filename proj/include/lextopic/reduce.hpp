#pragma once

/**
 * @file reduce.hpp
 *
 * @brief UMAP-style manifold reduction.
 *
 * The pipeline is: exact k-nearest neighbours, smooth-kNN membership
 * calibration, fuzzy union into a symmetric graph, spectral initialisation
 * of the layout and finally stochastic optimisation with negative sampling.
 * All steps are single-threaded and deterministic for a fixed seed.
 */

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "lextopic/embed_store.hpp"

namespace lextopic::reduce {

enum class Metric { Cosine, Euclidean };

Metric parse_metric(std::string_view name);
std::string_view to_string(Metric metric);

struct ReduceConfig {
  int n_neighbors = 5;
  int n_components = 5;
  double min_dist = 0.0;
  double spread = 1.0;
  Metric metric = Metric::Cosine;
  int n_epochs = 500;
  int negative_sample_rate = 5;
  std::uint64_t seed = 42;
};

/// Row-major n x k neighbour table, self excluded, ascending distance.
struct KnnGraph {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<std::size_t> indices;
  std::vector<double> distances;

  std::span<const std::size_t> neighbors(std::size_t i) const { return {indices.data() + i * k, k}; }
  std::span<const double> dists(std::size_t i) const { return {distances.data() + i * k, k}; }
};

double distance(std::span<const float> a, std::span<const float> b, Metric metric);

/// Exact brute force; ties broken by row index. Cosine distance is
/// 1 - cosine similarity and rejects zero-norm rows.
KnnGraph knn_graph(const embed::EmbeddingMatrix& x, std::size_t k, Metric metric);

struct SmoothKnn {
  std::vector<double> rho;
  std::vector<double> sigma;
  /// Same layout as KnnGraph::distances.
  std::vector<double> weights;
};

/// Per row, rho is the nearest distance and sigma is found by 64 bisection
/// steps in [1e-12, 1e4] so that sum_j exp(-max(0, d_j - rho) / sigma) = log2(k).
SmoothKnn smooth_weights(std::span<const double> distances, std::size_t k);

struct GraphEdge {
  std::size_t i = 0;
  std::size_t j = 0;
  double weight = 0;
};

/// Symmetric sparse graph stored as its upper triangle (i < j), sorted.
struct FuzzyGraph {
  std::size_t n = 0;
  std::vector<GraphEdge> edges;

  double weight(std::size_t i, std::size_t j) const;
  /// Number of nonzero entries of the full symmetric matrix.
  std::size_t nonzeros() const { return 2 * edges.size(); }
};

/// Probabilistic t-conorm a + b - a*b, elementwise.
inline double fuzzy_union(double a, double b) { return a + b - a * b; }

FuzzyGraph fuzzy_union(const KnnGraph& knn, std::span<const double> weights);

/// Least-squares fit of 1 / (1 + a d^(2b)) to the target membership curve
/// (1 for d <= min_dist, exp(-(d - min_dist) / spread) beyond) on 300
/// samples of [0, 3 * spread].
std::pair<double, double> find_ab(double spread, double min_dist);

/// Spectral embedding from the normalized Laplacian, rows x dims in
/// row-major order. Returns an empty vector when the eigensolve fails.
std::vector<double> spectral_layout(const FuzzyGraph& graph, int dims);

/// Reduced coordinates, one row per input row, same ids.
embed::EmbeddingMatrix fit_transform(const embed::EmbeddingMatrix& x, const ReduceConfig& config);

}  // namespace lextopic::reduce
