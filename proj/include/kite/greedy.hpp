#pragma once

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kite/graph.hpp"

namespace kite {

// One streamed candidate edge, with the decisions both greedy learners took
// at that point of the shared ascending stream.
struct TraceRecord {
  Edge edge;
  double value = 0.0;
  int rank = 0;  // 1-based position in the stream
  bool mst_accepted = false;
  bool mtg_accepted = false;
};

struct GreedyTrace {
  int dim = 0;
  std::vector<TraceRecord> records;
};

// Finite entries of the metric in ascending order, ties broken by the
// lexicographically smaller edge. +inf entries never enter the stream.
inline std::vector<std::pair<double, Edge>> sorted_edge_stream(const MetricMatrix& metric) {
  const int d = metric.dim();
  std::vector<std::pair<double, Edge>> stream;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const double v = metric.at(i, j);
      if (std::isfinite(v)) stream.emplace_back(v, Edge{i, j});
    }
  }
  std::sort(stream.begin(), stream.end());
  return stream;
}

// True iff adding `edge` to `graph` would close a triangle, i.e. its
// endpoints already share a common neighbour.
inline bool forms_triangle(const Graph& graph, const Edge& edge) {
  const auto [u, v] = edge;
  if (u == v) throw std::invalid_argument("forms_triangle: self-loop");
  const auto adj = graph.adjacency();
  const auto& nu = adj[static_cast<std::size_t>(u)];
  const auto& nv = adj[static_cast<std::size_t>(v)];
  std::size_t a = 0, b = 0;
  while (a < nu.size() && b < nv.size()) {
    if (nu[a] == nv[b]) return true;
    if (nu[a] < nv[b]) {
      ++a;
    } else {
      ++b;
    }
  }
  return false;
}

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      parent_[static_cast<std::size_t>(x)] =
          parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
      x = parent_[static_cast<std::size_t>(x)];
    }
    return x;
  }

  // Returns false if x and y were already in the same component.
  bool unite(int x, int y) {
    const int rx = find(x), ry = find(y);
    if (rx == ry) return false;
    parent_[static_cast<std::size_t>(rx)] = ry;
    return true;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace detail

// Runs both greedy learners over the shared ascending edge stream.
//
// The tree learner accepts an edge iff it joins two components (Kruskal).
// The graph learner accepts an edge iff its endpoints have no common
// neighbour among all edges considered so far; the triangle test runs
// against everything streamed before the current edge, accepted or not.
inline GreedyTrace run_greedy(const MetricMatrix& metric) {
  const int d = metric.dim();
  GreedyTrace trace;
  trace.dim = d;
  const auto stream = sorted_edge_stream(metric);
  trace.records.reserve(stream.size());

  detail::UnionFind components(d);
  std::vector<char> considered(static_cast<std::size_t>(d) * static_cast<std::size_t>(d), 0);
  const auto seen = [&](int a, int b) {
    return considered[static_cast<std::size_t>(a) * static_cast<std::size_t>(d) +
                      static_cast<std::size_t>(b)] != 0;
  };

  int rank = 0;
  for (const auto& [value, edge] : stream) {
    const auto [u, v] = edge;
    TraceRecord rec;
    rec.edge = edge;
    rec.value = value;
    rec.rank = ++rank;

    bool common = false;
    for (int w = 0; w < d && !common; ++w) {
      common = seen(u, w) && seen(v, w);
    }
    rec.mtg_accepted = !common;
    rec.mst_accepted = components.unite(u, v);

    considered[static_cast<std::size_t>(u) * static_cast<std::size_t>(d) +
               static_cast<std::size_t>(v)] = 1;
    considered[static_cast<std::size_t>(v) * static_cast<std::size_t>(d) +
               static_cast<std::size_t>(u)] = 1;
    trace.records.push_back(rec);
  }
  return trace;
}

namespace detail {

inline Graph accepted_prefix(const GreedyTrace& trace, int k, bool TraceRecord::* flag) {
  if (k < 0 || k > static_cast<int>(trace.records.size())) {
    throw std::out_of_range("prefix: k outside [0, record count]");
  }
  Graph g(trace.dim);
  for (int r = 0; r < k; ++r) {
    const auto& rec = trace.records[static_cast<std::size_t>(r)];
    if (rec.*flag) g.add_edge(rec.edge.first, rec.edge.second);
  }
  return g;
}

}  // namespace detail

// Forest built from the tree learner's accepted edges among the first k
// stream entries.
inline Graph mst_prefix(const GreedyTrace& trace, int k) {
  return detail::accepted_prefix(trace, k, &TraceRecord::mst_accepted);
}

// Triangle-free graph built from the graph learner's accepted edges among the
// first k stream entries.
inline Graph mtg_prefix(const GreedyTrace& trace, int k) {
  return detail::accepted_prefix(trace, k, &TraceRecord::mtg_accepted);
}

inline Graph mst(const MetricMatrix& metric) {
  const auto trace = run_greedy(metric);
  return mst_prefix(trace, static_cast<int>(trace.records.size()));
}

inline Graph mtg(const MetricMatrix& metric) {
  const auto trace = run_greedy(metric);
  return mtg_prefix(trace, static_cast<int>(trace.records.size()));
}

}  // namespace kite
