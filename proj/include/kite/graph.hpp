#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace kite {

// Undirected edge with endpoints normalised so that first < second.
using Edge = std::pair<int, int>;

inline Edge make_edge(int u, int v) {
  if (u == v) throw std::invalid_argument("make_edge: self-loop");
  return u < v ? Edge{u, v} : Edge{v, u};
}

// Simple undirected graph on vertices {0, ..., dim-1}. The edge list is kept
// sorted, so equality, containment checks and serialisation are canonical.
class Graph {
 public:
  explicit Graph(int dim) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("Graph: dim must be >= 1");
  }

  int dim() const { return dim_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  bool has_edge(int u, int v) const {
    check_vertex(u);
    check_vertex(v);
    if (u == v) return false;
    return std::binary_search(edges_.begin(), edges_.end(), make_edge(u, v));
  }

  // Inserts the edge if absent; adding an existing edge is a no-op.
  void add_edge(int u, int v) {
    check_vertex(u);
    check_vertex(v);
    const Edge e = make_edge(u, v);
    const auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
    if (it == edges_.end() || *it != e) edges_.insert(it, e);
  }

  std::vector<int> degrees() const {
    std::vector<int> deg(static_cast<std::size_t>(dim_), 0);
    for (const auto& [u, v] : edges_) {
      ++deg[static_cast<std::size_t>(u)];
      ++deg[static_cast<std::size_t>(v)];
    }
    return deg;
  }

  // Sorted neighbour lists.
  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(dim_));
    for (const auto& [u, v] : edges_) {
      adj[static_cast<std::size_t>(u)].push_back(v);
      adj[static_cast<std::size_t>(v)].push_back(u);
    }
    for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
    return adj;
  }

  std::vector<int> isolated_vertices() const {
    const auto deg = degrees();
    std::vector<int> out;
    for (int v = 0; v < dim_; ++v) {
      if (deg[static_cast<std::size_t>(v)] == 0) out.push_back(v);
    }
    return out;
  }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  void check_vertex(int v) const {
    if (v < 0 || v >= dim_) throw std::out_of_range("Graph: vertex out of range");
  }

  int dim_;
  std::vector<Edge> edges_;
};

// Symmetric pairwise dissimilarity matrix with a +inf diagonal. A +inf
// off-diagonal entry means "no usable value for this pair"; such pairs never
// enter the greedy edge stream.
class MetricMatrix {
 public:
  explicit MetricMatrix(int dim)
      : dim_(dim),
        values_(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim),
                std::numeric_limits<double>::infinity()) {
    if (dim < 1) throw std::invalid_argument("MetricMatrix: dim must be >= 1");
  }

  int dim() const { return dim_; }

  double at(int i, int j) const {
    check_vertex(i);
    check_vertex(j);
    return values_[index(i, j)];
  }

  // Sets d(i,j) = d(j,i). The diagonal is fixed at +inf and cannot be written.
  void set(int i, int j, double value) {
    check_vertex(i);
    check_vertex(j);
    if (i == j) throw std::invalid_argument("MetricMatrix: diagonal is fixed at +inf");
    if (std::isnan(value)) throw std::invalid_argument("MetricMatrix: NaN entry");
    values_[index(i, j)] = value;
    values_[index(j, i)] = value;
  }

  friend bool operator==(const MetricMatrix&, const MetricMatrix&) = default;

 private:
  void check_vertex(int v) const {
    if (v < 0 || v >= dim_) throw std::out_of_range("MetricMatrix: index out of range");
  }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(dim_) +
           static_cast<std::size_t>(j);
  }

  int dim_;
  std::vector<double> values_;
};

struct RecoveryMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int hamming = 0;
  bool exact = false;
};

// Edge-set agreement between an estimated graph and the ground truth.
// Empty denominators score 1 (an empty estimate has no false positives; an
// empty truth has no missed edges).
inline RecoveryMetrics recovery_metrics(const Graph& estimated, const Graph& truth) {
  if (estimated.dim() != truth.dim()) {
    throw std::invalid_argument("recovery_metrics: dimension mismatch");
  }
  const auto& est = estimated.edges();
  const auto& tru = truth.edges();
  std::vector<Edge> both;
  std::set_intersection(est.begin(), est.end(), tru.begin(), tru.end(),
                        std::back_inserter(both));
  const auto tp = static_cast<double>(both.size());
  RecoveryMetrics out;
  out.precision = est.empty() ? 1.0 : tp / static_cast<double>(est.size());
  out.recall = tru.empty() ? 1.0 : tp / static_cast<double>(tru.size());
  out.f1 = (out.precision + out.recall) > 0.0
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  out.hamming = static_cast<int>(est.size() + tru.size() - 2 * both.size());
  out.exact = est == tru;
  return out;
}

}  // namespace kite
