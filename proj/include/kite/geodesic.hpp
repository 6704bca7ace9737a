#pragma once

#include <algorithm>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kite/graph.hpp"
#include "kite/greedy.hpp"

namespace kite {

struct GeodesicResult {
  double hop_distance = std::numeric_limits<double>::infinity();
  std::vector<Edge> edge_set;  // sorted; edges on at least one hop-shortest path
};

namespace detail {

// BFS hop distances from a source; -1 marks unreachable vertices.
inline std::vector<int> bfs_distances(const std::vector<std::vector<int>>& adj, int source) {
  std::vector<int> dist(adj.size(), -1);
  std::queue<int> frontier;
  dist[static_cast<std::size_t>(source)] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (const int w : adj[static_cast<std::size_t>(u)]) {
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
        frontier.push(w);
      }
    }
  }
  return dist;
}

}  // namespace detail

// Hop distance between i and j together with the union of edges over all
// hop-shortest i-j paths. An edge (u,v) lies on a shortest path iff the
// distances from both endpoints tile exactly: dist_i(u) + 1 + dist_j(v) or
// its mirror equals dist_i(j).
inline GeodesicResult geodesic_edge_set(const Graph& graph, int i, int j) {
  if (i == j) throw std::invalid_argument("geodesic_edge_set: i and j must differ");
  const auto adj = graph.adjacency();
  const auto from_i = detail::bfs_distances(adj, i);
  const auto from_j = detail::bfs_distances(adj, j);
  GeodesicResult out;
  const int span = from_i[static_cast<std::size_t>(j)];
  if (span < 0) return out;
  out.hop_distance = span;
  for (const auto& [u, v] : graph.edges()) {
    const int iu = from_i[static_cast<std::size_t>(u)];
    const int iv = from_i[static_cast<std::size_t>(v)];
    const int ju = from_j[static_cast<std::size_t>(u)];
    const int jv = from_j[static_cast<std::size_t>(v)];
    if (iu < 0 || iv < 0 || ju < 0 || jv < 0) continue;
    if (iu + 1 + jv == span || iv + 1 + ju == span) out.edge_set.emplace_back(u, v);
  }
  return out;
}

enum class FermatViolationKind { containment, variational };

struct FermatViolation {
  FermatViolationKind kind = FermatViolationKind::containment;
  // containment: inner/outer are the two vertex pairs with Path(inner) a
  // strict subset of Path(outer) but d_inner >= d_outer.
  // variational: outer is the non-edge pair, inner the geodesic edge whose
  // metric value reaches or exceeds d_outer.
  Edge inner;
  Edge outer;
  double d_inner = 0.0;
  double d_outer = 0.0;
};

struct FermatCheck {
  bool is_fermat = false;
  std::vector<FermatViolation> violations;
};

// Verifies the two defining conditions of a Fermat metric on `graph`:
// strict geodesic containment Path(u,v) strictly inside Path(i,j) must give
// d_uv < d_ij, and for every non-edge (i,j) the value d_ij must exceed every
// metric value along Path(i,j). Only connected pairs are examined;
// disconnected pairs carry no geodesic information.
inline FermatCheck is_fermat_metric(const Graph& graph, const MetricMatrix& metric) {
  if (graph.dim() != metric.dim()) {
    throw std::invalid_argument("is_fermat_metric: dimension mismatch");
  }
  const int d = graph.dim();
  struct PairInfo {
    Edge pair;
    std::vector<Edge> path;
  };
  std::vector<PairInfo> pairs;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      auto geo = geodesic_edge_set(graph, i, j);
      if (!std::isfinite(geo.hop_distance)) continue;
      pairs.push_back({Edge{i, j}, std::move(geo.edge_set)});
    }
  }

  FermatCheck out;
  for (const auto& a : pairs) {
    for (const auto& b : pairs) {
      if (a.pair == b.pair) continue;
      if (a.path.size() >= b.path.size()) continue;
      const bool contained = std::includes(b.path.begin(), b.path.end(),
                                           a.path.begin(), a.path.end());
      if (!contained) continue;
      const double da = metric.at(a.pair.first, a.pair.second);
      const double db = metric.at(b.pair.first, b.pair.second);
      if (!(da < db)) {
        out.violations.push_back({FermatViolationKind::containment, a.pair, b.pair, da, db});
      }
    }
  }
  for (const auto& p : pairs) {
    const auto [i, j] = p.pair;
    if (graph.has_edge(i, j)) continue;
    const double dij = metric.at(i, j);
    for (const auto& [u, v] : p.path) {
      const double duv = metric.at(u, v);
      if (!(dij > duv)) {
        out.violations.push_back({FermatViolationKind::variational, Edge{u, v}, p.pair, duv, dij});
      }
    }
  }
  out.is_fermat = out.violations.empty();
  return out;
}

// Adjacent-transposition restriction of the crucial set: swap each pair of
// neighbouring entries in the sorted edge stream, re-run the graph learner,
// and report the pair iff the output changes. Brute-force diagnostic for
// small d only.
inline std::set<std::pair<Edge, Edge>> crucial_pairs_bruteforce(const MetricMatrix& metric) {
  const auto stream = sorted_edge_stream(metric);
  for (std::size_t k = 0; k + 1 < stream.size(); ++k) {
    if (stream[k].first == stream[k + 1].first) {
      throw std::invalid_argument("crucial_pairs_bruteforce: tied metric values, order swap undefined");
    }
  }
  const Graph base = mtg(metric);
  std::set<std::pair<Edge, Edge>> crucial;
  for (std::size_t k = 0; k + 1 < stream.size(); ++k) {
    const auto& [va, ea] = stream[k];
    const auto& [vb, eb] = stream[k + 1];
    MetricMatrix swapped = metric;
    swapped.set(ea.first, ea.second, vb);
    swapped.set(eb.first, eb.second, va);
    if (mtg(swapped) != base) crucial.insert({ea, eb});
  }
  return crucial;
}

// Minimum metric gap over the crucial pairs; empirical analogue of the
// recovery-gap quantity.
inline double min_crucial_gap(const MetricMatrix& metric,
                              const std::set<std::pair<Edge, Edge>>& crucial) {
  if (crucial.empty()) {
    throw std::invalid_argument("min_crucial_gap: crucial set is empty");
  }
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& [ea, eb] : crucial) {
    const double va = metric.at(ea.first, ea.second);
    const double vb = metric.at(eb.first, eb.second);
    gap = std::min(gap, std::abs(va - vb));
  }
  return gap;
}

}  // namespace kite
