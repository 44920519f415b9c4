#pragma once

/**
 * @file cluster.hpp
 *
 * @brief HDBSCAN-style density clustering on dense coordinates.
 *
 * Core distances and mutual reachability feed a Prim minimum spanning tree,
 * which is turned into a single-linkage hierarchy, condensed with the
 * minimum cluster size and finally cut by excess-of-mass selection.
 * Pairwise distances are computed on the fly, so memory stays O(n).
 */

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "lextopic/embed_store.hpp"

namespace lextopic::cluster {

struct ClusterConfig {
  int min_cluster_size = 5;
  int min_samples = 5;
  /// Let the root be selected even when it has surviving child clusters.
  /// Without it the root is only chosen when no split survives condensing.
  bool allow_single_cluster = false;
};

inline constexpr int kNoise = -1;

struct MstEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double weight = 0;

  friend bool operator==(const MstEdge&, const MstEdge&) = default;
};

/// Distance to the min_samples-th nearest neighbour, self excluded.
std::vector<double> core_distances(const embed::EmbeddingMatrix& z, int min_samples);

inline double mutual_reachability(double distance, double core_i, double core_j) {
  return std::max({core_i, core_j, distance});
}

/// Dense Prim's algorithm over the complete graph whose edge weights are
/// given by `weight(i, j)`. Starts at vertex 0; ties go to the smaller
/// vertex index. Edges are reported with a < b.
template <typename WeightFn>
std::vector<MstEdge> minimum_spanning_tree(std::size_t n, WeightFn&& weight) {
  std::vector<MstEdge> edges;
  if (n < 2) return edges;
  std::vector<bool> in_tree(n, false);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(n, 0);
  std::size_t current = 0;
  in_tree[0] = true;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = n;
    double next_w = std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const double w = weight(current, v);
      if (w < best[v] || (w == best[v] && current < parent[v])) {
        best[v] = w;
        parent[v] = current;
      }
      if (next == n || best[v] < next_w) {
        next_w = best[v];
        next = v;
      }
    }
    in_tree[next] = true;
    edges.push_back({std::min(parent[next], next), std::max(parent[next], next), best[next]});
    current = next;
  }
  return edges;
}

/// MST over the mutual-reachability graph of `z` (Euclidean).
std::vector<MstEdge> mutual_reachability_mst(const embed::EmbeddingMatrix& z, std::span<const double> core);

/// One union-find merge: clusters `left` and `right` (ids < n are points,
/// id n + m is the cluster created by merge m) joined at `distance`.
struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double distance = 0;
  std::size_t size = 0;
};

/// Single-linkage dendrogram: merges in ascending weight, ties by edge
/// endpoints (smaller pair first).
std::vector<Merge> build_hierarchy(std::span<const MstEdge> mst, std::size_t n);

/// Edge of the condensed tree. Cluster ids start at n (the root); point
/// children have ids < n and child_size 1.
struct CondensedEdge {
  std::size_t parent = 0;
  std::size_t child = 0;
  double lambda = 0;
  std::size_t child_size = 1;
};

struct CondensedTree {
  std::size_t n_points = 0;
  std::vector<CondensedEdge> edges;

  std::size_t root() const { return n_points; }
  /// Number of cluster nodes including the root.
  std::size_t cluster_count() const;
};

/// lambda = 1 / distance, with zero distances mapped to kMaxLambda.
inline constexpr double kMaxLambda = 1e100;

CondensedTree condense(std::span<const Merge> hierarchy, std::size_t n, int min_cluster_size);

struct Extraction {
  std::vector<int> labels;
  /// Stability of each output label.
  std::vector<double> stability;
  /// Condensed-tree node selected for each output label.
  std::vector<std::size_t> nodes;
};

Extraction extract(const CondensedTree& tree, bool allow_single_cluster = false);

/// Full pipeline on reduced coordinates.
Extraction hdbscan(const embed::EmbeddingMatrix& z, const ClusterConfig& config);

}  // namespace lextopic::cluster
