#include "lextopic/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>

namespace lextopic::cluster {

using embed::EmbeddingMatrix;

namespace {

double euclidean(std::span<const float> a, std::span<const float> b) {
  double s = 0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = static_cast<double>(a[d]) - static_cast<double>(b[d]);
    s += diff * diff;
  }
  return std::sqrt(s);
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void link(std::size_t child_root, std::size_t new_root) { parent_[child_root] = new_root; }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<double> core_distances(const EmbeddingMatrix& z, int min_samples) {
  const std::size_t n = z.rows();
  if (min_samples < 1) throw ValidationError("min_samples must be >= 1");
  if (static_cast<std::size_t>(min_samples) >= n) {
    throw ValidationError("min_samples (" + std::to_string(min_samples) + ") must be smaller than the number of points (" +
                          std::to_string(n) + ")");
  }
  const auto kth = static_cast<std::size_t>(min_samples - 1);
  std::vector<double> core(n);
  std::vector<double> dists;
  dists.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    dists.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) dists.push_back(euclidean(z.row(i), z.row(j)));
    }
    std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(kth), dists.end());
    core[i] = dists[kth];
  }
  return core;
}

std::vector<MstEdge> mutual_reachability_mst(const EmbeddingMatrix& z, std::span<const double> core) {
  return minimum_spanning_tree(z.rows(), [&](std::size_t i, std::size_t j) {
    return mutual_reachability(euclidean(z.row(i), z.row(j)), core[i], core[j]);
  });
}

std::vector<Merge> build_hierarchy(std::span<const MstEdge> mst, std::size_t n) {
  std::vector<MstEdge> sorted(mst.begin(), mst.end());
  std::sort(sorted.begin(), sorted.end(), [](const MstEdge& l, const MstEdge& r) {
    if (l.weight != r.weight) return l.weight < r.weight;
    if (l.a != r.a) return l.a < r.a;
    return l.b < r.b;
  });

  UnionFind uf(2 * n);
  std::vector<std::size_t> size(2 * n, 1);
  std::vector<Merge> merges;
  merges.reserve(sorted.size());
  for (const auto& e : sorted) {
    const std::size_t ra = uf.find(e.a);
    const std::size_t rb = uf.find(e.b);
    if (ra == rb) throw ValidationError("MST contains a cycle");
    const std::size_t id = n + merges.size();
    size[id] = size[ra] + size[rb];
    uf.link(ra, id);
    uf.link(rb, id);
    merges.push_back({std::min(ra, rb), std::max(ra, rb), e.weight, size[id]});
  }
  return merges;
}

std::size_t CondensedTree::cluster_count() const {
  std::size_t max_id = n_points;
  for (const auto& e : edges) {
    max_id = std::max(max_id, e.parent);
    if (e.child >= n_points) max_id = std::max(max_id, e.child);
  }
  return max_id - n_points + 1;
}

CondensedTree condense(std::span<const Merge> hierarchy, std::size_t n, int min_cluster_size) {
  CondensedTree tree;
  tree.n_points = n;
  if (n < 2 || hierarchy.empty()) {
    for (std::size_t p = 0; p < n; ++p) tree.edges.push_back({n, p, 0.0, 1});
    return tree;
  }
  const auto mcs = static_cast<std::size_t>(min_cluster_size);
  const std::size_t root = n + hierarchy.size() - 1;
  auto node_size = [&](std::size_t node) { return node < n ? std::size_t{1} : hierarchy[node - n].size; };

  auto descendants = [&](std::size_t node) {
    std::vector<std::size_t> out{node};
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (out[i] >= n) {
        out.push_back(hierarchy[out[i] - n].left);
        out.push_back(hierarchy[out[i] - n].right);
      }
    }
    return out;
  };

  std::vector<std::size_t> relabel(root + 1, 0);
  std::vector<bool> ignore(root + 1, false);
  relabel[root] = n;
  std::size_t next_label = n + 1;

  auto fall_out = [&](std::size_t subtree, std::size_t parent_label, double lambda) {
    for (std::size_t sub : descendants(subtree)) {
      if (sub < n) tree.edges.push_back({parent_label, sub, lambda, 1});
      ignore[sub] = true;
    }
  };

  for (std::size_t node : descendants(root)) {
    if (ignore[node] || node < n) continue;
    const auto& m = hierarchy[node - n];
    const double lambda = m.distance > 0 ? std::min(1.0 / m.distance, kMaxLambda) : kMaxLambda;
    const std::size_t left_count = node_size(m.left);
    const std::size_t right_count = node_size(m.right);
    const std::size_t label = relabel[node];

    if (left_count >= mcs && right_count >= mcs) {
      relabel[m.left] = next_label++;
      tree.edges.push_back({label, relabel[m.left], lambda, left_count});
      relabel[m.right] = next_label++;
      tree.edges.push_back({label, relabel[m.right], lambda, right_count});
    } else if (left_count < mcs && right_count < mcs) {
      fall_out(m.left, label, lambda);
      fall_out(m.right, label, lambda);
    } else if (left_count < mcs) {
      relabel[m.right] = label;
      fall_out(m.left, label, lambda);
    } else {
      relabel[m.left] = label;
      fall_out(m.right, label, lambda);
    }
  }
  return tree;
}

Extraction extract(const CondensedTree& tree, bool allow_single_cluster) {
  const std::size_t n = tree.n_points;
  const std::size_t n_clusters = tree.cluster_count();
  const std::size_t root = tree.root();
  auto idx = [&](std::size_t cluster) { return cluster - root; };

  std::vector<double> birth(n_clusters, 0.0);
  std::vector<std::optional<std::size_t>> parent_of(n_clusters);
  std::vector<std::vector<std::size_t>> children(n_clusters);
  for (const auto& e : tree.edges) {
    if (e.child >= n) {
      birth[idx(e.child)] = e.lambda;
      parent_of[idx(e.child)] = e.parent;
      children[idx(e.parent)].push_back(e.child);
    }
  }
  std::vector<double> stability(n_clusters, 0.0);
  for (const auto& e : tree.edges) {
    stability[idx(e.parent)] += (e.lambda - birth[idx(e.parent)]) * static_cast<double>(e.child_size);
  }
  const std::vector<double> own_stability = stability;

  std::vector<bool> selected(n_clusters, false);
  auto deselect_below = [&](std::size_t cluster) {
    std::vector<std::size_t> stack(children[idx(cluster)]);
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      selected[idx(c)] = false;
      for (std::size_t g : children[idx(c)]) stack.push_back(g);
    }
  };

  // Children always carry larger ids than their parents.
  for (std::size_t c = root + n_clusters; c-- > root;) {
    double subtree = 0;
    for (std::size_t ch : children[idx(c)]) subtree += stability[idx(ch)];
    const bool is_root = c == root;
    if (is_root && !allow_single_cluster) {
      if (children[idx(c)].empty()) selected[idx(c)] = true;
      continue;
    }
    if (!children[idx(c)].empty() && subtree > stability[idx(c)]) {
      stability[idx(c)] = subtree;
    } else {
      selected[idx(c)] = true;
      deselect_below(c);
    }
  }

  // Nearest selected ancestor-or-self of every cluster node.
  std::vector<std::optional<std::size_t>> owner(n_clusters);
  for (std::size_t c = root; c < root + n_clusters; ++c) {
    if (selected[idx(c)]) {
      owner[idx(c)] = c;
    } else if (parent_of[idx(c)]) {
      owner[idx(c)] = owner[idx(*parent_of[idx(c)])];
    }
  }

  std::vector<std::optional<std::size_t>> point_owner(n);
  for (const auto& e : tree.edges) {
    if (e.child < n) point_owner[e.child] = owner[idx(e.parent)];
  }

  Extraction out;
  out.labels.assign(n, kNoise);
  std::map<std::size_t, int> label_of;
  for (std::size_t p = 0; p < n; ++p) {
    if (!point_owner[p]) continue;
    auto [it, inserted] = label_of.emplace(*point_owner[p], static_cast<int>(label_of.size()));
    if (inserted) {
      out.nodes.push_back(*point_owner[p]);
      out.stability.push_back(own_stability[idx(*point_owner[p])]);
    }
    out.labels[p] = it->second;
  }
  return out;
}

Extraction hdbscan(const EmbeddingMatrix& z, const ClusterConfig& config) {
  if (config.min_cluster_size < 2) throw ValidationError("min_cluster_size must be >= 2");
  if (config.min_samples < 1) throw ValidationError("min_samples must be >= 1");
  const std::size_t n = z.rows();
  if (n < 2) return {std::vector<int>(n, kNoise), {}, {}};
  const auto core = core_distances(z, config.min_samples);
  const auto mst = mutual_reachability_mst(z, core);
  const auto merges = build_hierarchy(mst, n);
  const auto tree = condense(merges, n, config.min_cluster_size);
  return extract(tree, config.allow_single_cluster);
}

}  // namespace lextopic::cluster
