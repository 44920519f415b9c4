#include "lextopic/reduce.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

namespace lextopic::reduce {

using embed::EmbeddingMatrix;

Metric parse_metric(std::string_view name) {
  if (name == "cosine") return Metric::Cosine;
  if (name == "euclidean") return Metric::Euclidean;
  throw ValidationError("unknown metric \"" + std::string(name) + "\" (expected cosine or euclidean)");
}

std::string_view to_string(Metric metric) { return metric == Metric::Cosine ? "cosine" : "euclidean"; }

double distance(std::span<const float> a, std::span<const float> b, Metric metric) {
  if (metric == Metric::Euclidean) {
    double s = 0;
    for (std::size_t d = 0; d < a.size(); ++d) {
      const double diff = static_cast<double>(a[d]) - static_cast<double>(b[d]);
      s += diff * diff;
    }
    return std::sqrt(s);
  }
  return 1.0 - embed::cosine_similarity(a, b);
}

KnnGraph knn_graph(const EmbeddingMatrix& x, std::size_t k, Metric metric) {
  const std::size_t n = x.rows();
  if (k == 0 || k >= n) {
    throw ValidationError("k must satisfy 1 <= k < rows (k=" + std::to_string(k) + ", rows=" + std::to_string(n) + ")");
  }
  std::vector<double> norms(n, 1.0);
  if (metric == Metric::Cosine) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (float v : x.row(i)) s += static_cast<double>(v) * v;
      if (s <= 0) throw ValidationError("zero-norm row " + std::to_string(i) + " under cosine metric");
      norms[i] = std::sqrt(s);
    }
  }

  KnnGraph g;
  g.n = n;
  g.k = k;
  g.indices.resize(n * k);
  g.distances.resize(n * k);
  std::vector<std::pair<double, std::size_t>> cand;
  cand.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    cand.clear();
    const auto xi = x.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto xj = x.row(j);
      double d;
      if (metric == Metric::Cosine) {
        double dot = 0;
        for (std::size_t t = 0; t < xi.size(); ++t) dot += static_cast<double>(xi[t]) * xj[t];
        d = 1.0 - std::clamp(dot / (norms[i] * norms[j]), -1.0, 1.0);
      } else {
        d = distance(xi, xj, metric);
      }
      cand.emplace_back(d, j);
    }
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
    for (std::size_t t = 0; t < k; ++t) {
      g.distances[i * k + t] = cand[t].first;
      g.indices[i * k + t] = cand[t].second;
    }
  }
  return g;
}

SmoothKnn smooth_weights(std::span<const double> distances, std::size_t k) {
  if (k == 0 || distances.size() % k != 0) throw ValidationError("distance table is not a multiple of k");
  const std::size_t n = distances.size() / k;
  const double target = std::log2(static_cast<double>(k));
  SmoothKnn out;
  out.rho.resize(n);
  out.sigma.resize(n);
  out.weights.resize(distances.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = distances.subspan(i * k, k);
    const double rho = row[0];
    auto mass = [&](double sigma) {
      double s = 0;
      for (double d : row) s += std::exp(-std::max(0.0, d - rho) / sigma);
      return s;
    };
    double lo = 1e-12, hi = 1e4;
    for (int it = 0; it < 64; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mass(mid) > target) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    const double sigma = 0.5 * (lo + hi);
    out.rho[i] = rho;
    out.sigma[i] = sigma;
    for (std::size_t t = 0; t < k; ++t) out.weights[i * k + t] = std::exp(-std::max(0.0, row[t] - rho) / sigma);
  }
  return out;
}

double FuzzyGraph::weight(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  if (i > j) std::swap(i, j);
  auto it = std::lower_bound(edges.begin(), edges.end(), std::pair{i, j}, [](const GraphEdge& e, const auto& key) {
    return std::pair{e.i, e.j} < key;
  });
  if (it != edges.end() && it->i == i && it->j == j) return it->weight;
  return 0.0;
}

FuzzyGraph fuzzy_union(const KnnGraph& knn, std::span<const double> weights) {
  // (lo, hi) -> (weight lo->hi, weight hi->lo)
  std::map<std::pair<std::size_t, std::size_t>, std::pair<double, double>> directed;
  for (std::size_t i = 0; i < knn.n; ++i) {
    for (std::size_t t = 0; t < knn.k; ++t) {
      const std::size_t j = knn.indices[i * knn.k + t];
      const double w = weights[i * knn.k + t];
      if (i == j || w <= 0) continue;
      auto& entry = directed[{std::min(i, j), std::max(i, j)}];
      (i < j ? entry.first : entry.second) = w;
    }
  }
  FuzzyGraph g;
  g.n = knn.n;
  g.edges.reserve(directed.size());
  for (const auto& [key, w] : directed) {
    const double u = fuzzy_union(w.first, w.second);
    if (u > 0) g.edges.push_back({key.first, key.second, std::min(u, 1.0)});
  }
  return g;
}

std::pair<double, double> find_ab(double spread, double min_dist) {
  constexpr int kSamples = 300;
  std::vector<double> xs(kSamples), ys(kSamples);
  for (int s = 0; s < kSamples; ++s) {
    xs[s] = 3.0 * spread * s / (kSamples - 1);
    ys[s] = xs[s] <= min_dist ? 1.0 : std::exp(-(xs[s] - min_dist) / spread);
  }
  auto sse = [&](double a, double b) {
    double e = 0;
    for (int s = 0; s < kSamples; ++s) {
      const double r = 1.0 / (1.0 + a * std::pow(xs[s], 2 * b)) - ys[s];
      e += r * r;
    }
    return e;
  };

  // Levenberg-Marquardt on the two curve parameters.
  double a = 1.0, b = 1.0, lambda = 1e-3;
  double err = sse(a, b);
  for (int it = 0; it < 500; ++it) {
    Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
    Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
    for (int s = 0; s < kSamples; ++s) {
      const double x = xs[s];
      const double p = x > 0 ? std::pow(x, 2 * b) : 0.0;
      const double denom = 1.0 + a * p;
      const double r = 1.0 / denom - ys[s];
      Eigen::Vector2d grad(-p / (denom * denom), x > 0 ? -a * p * 2.0 * std::log(x) / (denom * denom) : 0.0);
      jtj += grad * grad.transpose();
      jtr += grad * r;
    }
    bool improved = false;
    double gain = 0;
    for (int tries = 0; tries < 20 && !improved; ++tries) {
      Eigen::Matrix2d damped = jtj;
      damped.diagonal() *= (1.0 + lambda);
      const Eigen::Vector2d step = damped.ldlt().solve(-jtr);
      const double na = a + step[0], nb = b + step[1];
      const double nerr = (na > 0 && nb > 0) ? sse(na, nb) : INFINITY;
      if (nerr < err) {
        gain = err - nerr;
        a = na;
        b = nb;
        err = nerr;
        lambda = std::max(lambda / 10.0, 1e-12);
        improved = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved || gain < 1e-15 * err) break;
  }
  return {a, b};
}

namespace {

constexpr std::size_t kDenseEigenLimit = 1000;

// Normalized adjacency D^-1/2 W D^-1/2 as a dense matrix.
Eigen::MatrixXd normalized_adjacency(const FuzzyGraph& graph, const std::vector<double>& inv_sqrt_deg) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(graph.n), static_cast<Eigen::Index>(graph.n));
  for (const auto& e : graph.edges) {
    const double v = e.weight * inv_sqrt_deg[e.i] * inv_sqrt_deg[e.j];
    s(static_cast<Eigen::Index>(e.i), static_cast<Eigen::Index>(e.j)) = v;
    s(static_cast<Eigen::Index>(e.j), static_cast<Eigen::Index>(e.i)) = v;
  }
  return s;
}

// Top eigenvectors of the normalized adjacency by block subspace iteration
// with Rayleigh-Ritz extraction; used for graphs too large for a dense solve.
Eigen::MatrixXd subspace_top_eigenvectors(const FuzzyGraph& graph, const std::vector<double>& inv_sqrt_deg, int count) {
  const auto n = static_cast<Eigen::Index>(graph.n);
  const int block = count + 4;
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd q(n, block);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int c = 0; c < block; ++c) q(i, c) = normal(rng);
  }
  auto apply = [&](const Eigen::MatrixXd& v) {
    // (S + I) / 2 has the same eigenvectors with eigenvalues shifted into [0, 1].
    Eigen::MatrixXd out = 0.5 * v;
    for (const auto& e : graph.edges) {
      const double w = 0.5 * e.weight * inv_sqrt_deg[e.i] * inv_sqrt_deg[e.j];
      out.row(static_cast<Eigen::Index>(e.i)) += w * v.row(static_cast<Eigen::Index>(e.j));
      out.row(static_cast<Eigen::Index>(e.j)) += w * v.row(static_cast<Eigen::Index>(e.i));
    }
    return out;
  };
  for (int it = 0; it < 300; ++it) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(apply(q));
    q = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
  }
  const Eigen::MatrixXd small = q.transpose() * apply(q);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(small);
  if (solver.info() != Eigen::Success) return {};
  // Ascending eigenvalues; reverse to descending.
  Eigen::MatrixXd ritz = q * solver.eigenvectors().rowwise().reverse();
  return ritz.leftCols(count);
}

}  // namespace

std::vector<double> spectral_layout(const FuzzyGraph& graph, int dims) {
  const std::size_t n = graph.n;
  if (dims < 1 || n <= static_cast<std::size_t>(dims) + 1) return {};
  std::vector<double> degree(n, 0.0);
  for (const auto& e : graph.edges) {
    degree[e.i] += e.weight;
    degree[e.j] += e.weight;
  }
  std::vector<double> inv_sqrt_deg(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (degree[i] <= 0) return {};
    inv_sqrt_deg[i] = 1.0 / std::sqrt(degree[i]);
  }

  // Largest eigenvalues of the normalized adjacency are the smallest of the
  // normalized Laplacian; the first one is the trivial vector and is skipped.
  Eigen::MatrixXd top;
  if (n <= kDenseEigenLimit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(normalized_adjacency(graph, inv_sqrt_deg));
    if (solver.info() != Eigen::Success) return {};
    top = solver.eigenvectors().rightCols(dims + 1).rowwise().reverse();
  } else {
    top = subspace_top_eigenvectors(graph, inv_sqrt_deg, dims + 1);
    if (top.size() == 0) return {};
  }

  std::vector<double> layout(n * static_cast<std::size_t>(dims));
  for (std::size_t i = 0; i < n; ++i) {
    for (int d = 0; d < dims; ++d) {
      const double v = top(static_cast<Eigen::Index>(i), d + 1);
      if (!std::isfinite(v)) return {};
      layout[i * dims + d] = v;
    }
  }
  return layout;
}

namespace {

double clip(double v) { return std::clamp(v, -4.0, 4.0); }

void rescale_layout(std::vector<double>& layout, std::size_t n, std::size_t dims, std::mt19937_64& rng, bool from_spectral) {
  if (from_spectral) {
    double max_abs = 0;
    for (double v : layout) max_abs = std::max(max_abs, std::abs(v));
    const double expansion = max_abs > 0 ? 10.0 / max_abs : 1.0;
    std::normal_distribution<double> noise(0.0, 1e-4);
    for (double& v : layout) v = v * expansion + noise(rng);
  }
  for (std::size_t d = 0; d < dims; ++d) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      lo = std::min(lo, layout[i * dims + d]);
      hi = std::max(hi, layout[i * dims + d]);
    }
    if (hi - lo <= 0) continue;
    for (std::size_t i = 0; i < n; ++i) layout[i * dims + d] = 10.0 * (layout[i * dims + d] - lo) / (hi - lo);
  }
}

struct DirectedEdge {
  std::size_t head;
  std::size_t tail;
  double epochs_per_sample;
};

void optimize_layout(std::vector<double>& emb, std::size_t n, std::size_t dims, const std::vector<DirectedEdge>& edges,
                     double a, double b, const ReduceConfig& config, std::mt19937_64& rng) {
  const int n_epochs = config.n_epochs;
  std::vector<double> next_sample(edges.size());
  std::vector<double> per_negative(edges.size());
  std::vector<double> next_negative(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    next_sample[e] = edges[e].epochs_per_sample;
    per_negative[e] = edges[e].epochs_per_sample / config.negative_sample_rate;
    next_negative[e] = per_negative[e];
  }

  double alpha = 1.0;
  for (int epoch = 0; epoch < n_epochs; ++epoch) {
    const double now = epoch;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (next_sample[e] > now) continue;
      double* current = &emb[edges[e].head * dims];
      double* other = &emb[edges[e].tail * dims];

      double dist_sq = 0;
      for (std::size_t d = 0; d < dims; ++d) dist_sq += (current[d] - other[d]) * (current[d] - other[d]);
      double coeff = 0;
      if (dist_sq > 0) {
        coeff = -2.0 * a * b * std::pow(dist_sq, b - 1.0) / (a * std::pow(dist_sq, b) + 1.0);
      }
      for (std::size_t d = 0; d < dims; ++d) {
        const double g = clip(coeff * (current[d] - other[d]));
        current[d] += g * alpha;
        other[d] -= g * alpha;
      }
      next_sample[e] += edges[e].epochs_per_sample;

      const auto n_neg = static_cast<long>((now - next_negative[e]) / per_negative[e]);
      for (long p = 0; p < n_neg; ++p) {
        const std::size_t k = static_cast<std::size_t>(rng() % n);
        if (k == edges[e].head) continue;
        const double* neg = &emb[k * dims];
        double nd = 0;
        for (std::size_t d = 0; d < dims; ++d) nd += (current[d] - neg[d]) * (current[d] - neg[d]);
        if (nd <= 0) continue;
        const double rep = 2.0 * b / ((0.001 + nd) * (a * std::pow(nd, b) + 1.0));
        for (std::size_t d = 0; d < dims; ++d) current[d] += clip(rep * (current[d] - neg[d])) * alpha;
      }
      next_negative[e] += static_cast<double>(n_neg) * per_negative[e];
    }
    alpha = 1.0 - static_cast<double>(epoch + 1) / n_epochs;
  }
}

}  // namespace

EmbeddingMatrix fit_transform(const EmbeddingMatrix& x, const ReduceConfig& config) {
  const std::size_t n = x.rows();
  if (config.n_components < 1) throw ValidationError("n_components must be >= 1");
  if (n <= static_cast<std::size_t>(config.n_components) + 1) {
    throw ValidationError("cannot reduce " + std::to_string(n) + " rows to " + std::to_string(config.n_components) +
                          " components: need more than n_components + 1 rows");
  }
  if (config.n_neighbors < 2 || static_cast<std::size_t>(config.n_neighbors) >= n) {
    throw ValidationError("n_neighbors must satisfy 2 <= n_neighbors < rows (got " + std::to_string(config.n_neighbors) +
                          " for " + std::to_string(n) + " rows)");
  }
  if (config.min_dist < 0) throw ValidationError("min_dist must be >= 0");
  if (config.spread <= 0) throw ValidationError("spread must be > 0");
  if (config.n_epochs < 1) throw ValidationError("n_epochs must be >= 1");
  if (config.negative_sample_rate < 1) throw ValidationError("negative_sample_rate must be >= 1");

  const auto k = static_cast<std::size_t>(config.n_neighbors);
  const auto dims = static_cast<std::size_t>(config.n_components);
  const KnnGraph knn = knn_graph(x, k, config.metric);
  const SmoothKnn smooth = smooth_weights(knn.distances, k);
  FuzzyGraph graph = fuzzy_union(knn, smooth.weights);

  std::mt19937_64 rng(config.seed);
  std::vector<double> layout = spectral_layout(graph, config.n_components);
  const bool spectral = !layout.empty();
  if (!spectral) {
    layout.resize(n * dims);
    std::uniform_real_distribution<double> uniform(-10.0, 10.0);
    for (double& v : layout) v = uniform(rng);
  }
  rescale_layout(layout, n, dims, rng, spectral);

  // Edges too weak to be sampled even once are dropped.
  double max_w = 0;
  for (const auto& e : graph.edges) max_w = std::max(max_w, e.weight);
  std::vector<DirectedEdge> edges;
  for (const auto& e : graph.edges) {
    if (e.weight < max_w / config.n_epochs) continue;
    const double eps = max_w / e.weight;
    edges.push_back({e.i, e.j, eps});
    edges.push_back({e.j, e.i, eps});
  }
  std::sort(edges.begin(), edges.end(), [](const DirectedEdge& l, const DirectedEdge& r) {
    return std::pair{l.head, l.tail} < std::pair{r.head, r.tail};
  });

  const auto [a, b] = find_ab(config.spread, config.min_dist);
  optimize_layout(layout, n, dims, edges, a, b, config, rng);

  std::vector<float> data(layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i) data[i] = static_cast<float>(layout[i]);
  return EmbeddingMatrix(n, dims, std::move(data), x.ids());
}

}  // namespace lextopic::reduce
