#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "kite/geodesic.hpp"
#include "kite/graph.hpp"
#include "kite/greedy.hpp"
#include "kite/rng.hpp"

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

kite::MetricMatrix four_cycle_metric() {
  kite::MetricMatrix m(4);
  m.set(0, 1, 1.0);
  m.set(1, 2, 1.1);
  m.set(2, 3, 1.2);
  m.set(0, 3, 1.3);
  m.set(0, 2, 2.5);
  m.set(1, 3, 2.6);
  return m;
}

kite::MetricMatrix triangle_metric() {
  kite::MetricMatrix m(3);
  m.set(0, 1, 1.0);
  m.set(0, 2, 2.0);
  m.set(1, 2, 3.0);
  return m;
}

std::vector<kite::Edge> stream_prefix_edges(const kite::GreedyTrace& trace, int k) {
  std::vector<kite::Edge> out;
  for (int r = 0; r < k; ++r) out.push_back(trace.records[static_cast<std::size_t>(r)].edge);
  std::sort(out.begin(), out.end());
  return out;
}

bool subset_of(const std::vector<kite::Edge>& a, const std::vector<kite::Edge>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool is_acyclic(const kite::Graph& g) {
  kite::detail::UnionFind uf(g.dim());
  for (const auto& [u, v] : g.edges()) {
    if (!uf.unite(u, v)) return false;
  }
  return true;
}

bool has_triangle(const kite::Graph& g) {
  for (const auto& e : g.edges()) {
    kite::Graph without(g.dim());
    for (const auto& other : g.edges()) {
      if (other != e) without.add_edge(other.first, other.second);
    }
    if (kite::forms_triangle(without, e)) return true;
  }
  return false;
}

kite::MetricMatrix random_metric(int d, kite::SplitMix64& gen, double infinite_fraction) {
  kite::MetricMatrix m(d);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      if (gen.uniform() < infinite_fraction) continue;
      m.set(i, j, gen.uniform(-1.0, 1.0));
    }
  }
  return m;
}

// Random spanning tree plus an additive path metric from positive weights.
struct TreeInstance {
  kite::Graph tree;
  kite::MetricMatrix metric;
};

TreeInstance random_additive_tree(int d, kite::SplitMix64& gen) {
  kite::Graph tree(d);
  std::vector<int> label(static_cast<std::size_t>(d));
  std::iota(label.begin(), label.end(), 0);
  for (int v = static_cast<int>(label.size()) - 1; v > 0; --v) {
    std::swap(label[static_cast<std::size_t>(v)],
              label[static_cast<std::size_t>(gen.uniform_int(v + 1))]);
  }
  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(d));
  for (int v = 1; v < d; ++v) {
    const int p = label[static_cast<std::size_t>(gen.uniform_int(v))];
    const int c = label[static_cast<std::size_t>(v)];
    const double w = gen.uniform(0.1, 2.0);
    tree.add_edge(p, c);
    adj[static_cast<std::size_t>(p)].push_back({c, w});
    adj[static_cast<std::size_t>(c)].push_back({p, w});
  }
  kite::MetricMatrix metric(d);
  for (int s = 0; s < d; ++s) {
    std::vector<double> dist(static_cast<std::size_t>(d), -1.0);
    std::vector<int> stack = {s};
    dist[static_cast<std::size_t>(s)] = 0.0;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const auto& [w, len] : adj[static_cast<std::size_t>(u)]) {
        if (dist[static_cast<std::size_t>(w)] < 0.0) {
          dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + len;
          stack.push_back(w);
        }
      }
    }
    for (int t = s + 1; t < d; ++t) metric.set(s, t, dist[static_cast<std::size_t>(t)]);
  }
  return {tree, metric};
}

}  // namespace

TEST(MetricMatrix, DiagonalIsInfiniteAndWriteProtected) {
  kite::MetricMatrix m(3);
  EXPECT_EQ(m.at(1, 1), kInf);
  EXPECT_EQ(m.at(0, 2), kInf);
  EXPECT_THROW(m.set(2, 2, 1.0), std::invalid_argument);
}

TEST(MetricMatrix, SymmetricWrite) {
  kite::MetricMatrix m(3);
  m.set(2, 0, -0.25);
  EXPECT_EQ(m.at(0, 2), -0.25);
  EXPECT_EQ(m.at(2, 0), -0.25);
}

TEST(MetricMatrix, RejectsNanAndBadIndices) {
  kite::MetricMatrix m(2);
  EXPECT_THROW(m.set(0, 1, std::nan("")), std::invalid_argument);
  EXPECT_THROW(m.at(0, 2), std::out_of_range);
  EXPECT_THROW(kite::MetricMatrix(0), std::invalid_argument);
}

TEST(Graph, EdgeBasics) {
  kite::Graph g(4);
  g.add_edge(2, 0);
  g.add_edge(0, 2);
  g.add_edge(1, 3);
  EXPECT_EQ(g.edge_count(), 2);
  EXPECT_TRUE(g.has_edge(0, 2));
  EXPECT_FALSE(g.has_edge(0, 1));
  EXPECT_EQ(g.edges(), (std::vector<kite::Edge>{{0, 2}, {1, 3}}));
  EXPECT_THROW(g.add_edge(1, 1), std::invalid_argument);
  EXPECT_THROW(g.add_edge(0, 4), std::out_of_range);
  EXPECT_EQ(g.isolated_vertices(), std::vector<int>{});
  g = kite::Graph(3);
  EXPECT_EQ(g.isolated_vertices(), (std::vector<int>{0, 1, 2}));
}

TEST(SortedEdgeStream, AscendingWithInfExcluded) {
  const auto stream = kite::sorted_edge_stream(triangle_metric());
  ASSERT_EQ(stream.size(), 3u);
  EXPECT_EQ(stream[0].second, (kite::Edge{0, 1}));
  EXPECT_EQ(stream[1].second, (kite::Edge{0, 2}));
  EXPECT_EQ(stream[2].second, (kite::Edge{1, 2}));

  EXPECT_TRUE(kite::sorted_edge_stream(kite::MetricMatrix(5)).empty());
}

TEST(SortedEdgeStream, LexicographicTieBreak) {
  kite::MetricMatrix m(3);
  m.set(0, 1, 1.0);
  m.set(0, 2, 1.0);
  const auto stream = kite::sorted_edge_stream(m);
  ASSERT_EQ(stream.size(), 2u);
  EXPECT_EQ(stream[0].second, (kite::Edge{0, 1}));
  EXPECT_EQ(stream[1].second, (kite::Edge{0, 2}));
}

TEST(Mst, ThreeNodeAndAllInfinite) {
  const auto g = kite::mst(triangle_metric());
  EXPECT_EQ(g.edges(), (std::vector<kite::Edge>{{0, 1}, {0, 2}}));
  EXPECT_EQ(kite::mst(kite::MetricMatrix(4)).edge_count(), 0);
}

TEST(Mst, FourCycleDropsClosingEdge) {
  const auto g = kite::mst(four_cycle_metric());
  EXPECT_EQ(g.edges(), (std::vector<kite::Edge>{{0, 1}, {1, 2}, {2, 3}}));
}

TEST(Mtg, FourCycleRecovered) {
  const auto g = kite::mtg(four_cycle_metric());
  EXPECT_EQ(g.edges(), (std::vector<kite::Edge>{{0, 1}, {0, 3}, {1, 2}, {2, 3}}));
}

TEST(Mtg, TriangleSkippedAndAllInfinite) {
  const auto g = kite::mtg(triangle_metric());
  EXPECT_EQ(g.edges(), (std::vector<kite::Edge>{{0, 1}, {0, 2}}));
  EXPECT_EQ(kite::mtg(kite::MetricMatrix(3)).edge_count(), 0);
}

TEST(RunGreedy, FourCycleTrace) {
  const auto trace = kite::run_greedy(four_cycle_metric());
  ASSERT_EQ(trace.records.size(), 6u);
  for (int r = 0; r < 6; ++r) {
    EXPECT_EQ(trace.records[static_cast<std::size_t>(r)].rank, r + 1);
  }
  // The tree learner accepts ranks 1-3, the graph learner ranks 1-4.
  for (int r = 0; r < 6; ++r) {
    const auto& rec = trace.records[static_cast<std::size_t>(r)];
    EXPECT_EQ(rec.mst_accepted, r < 3) << "rank " << rec.rank;
    EXPECT_EQ(rec.mtg_accepted, r < 4) << "rank " << rec.rank;
  }
  EXPECT_EQ(trace.records[3].edge, (kite::Edge{0, 3}));
  EXPECT_DOUBLE_EQ(trace.records[3].value, 1.3);
}

TEST(RunGreedy, SingleEdgeAcceptedByBoth) {
  kite::MetricMatrix m(4);
  m.set(1, 3, 0.7);
  const auto trace = kite::run_greedy(m);
  ASSERT_EQ(trace.records.size(), 1u);
  EXPECT_TRUE(trace.records[0].mst_accepted);
  EXPECT_TRUE(trace.records[0].mtg_accepted);
}

TEST(RunGreedy, PrefixesMatchFullOutputs) {
  const auto m = four_cycle_metric();
  const auto trace = kite::run_greedy(m);
  const int k = static_cast<int>(trace.records.size());
  EXPECT_EQ(kite::mst_prefix(trace, k), kite::mst(m));
  EXPECT_EQ(kite::mtg_prefix(trace, k), kite::mtg(m));
  EXPECT_EQ(kite::mst_prefix(trace, 0).edge_count(), 0);
  EXPECT_THROW(kite::mst_prefix(trace, k + 1), std::out_of_range);
  EXPECT_THROW(kite::mtg_prefix(trace, -1), std::out_of_range);
}

// At every prefix the tree learner's edges sit inside the graph learner's,
// which sit inside everything streamed; no distributional assumption needed.
TEST(RunGreedy, FiltrationHoldsOnArbitraryInputs) {
  kite::SplitMix64 gen(20240817);
  for (int trial = 0; trial < 300; ++trial) {
    const int d = 4 + gen.uniform_int(17);
    const auto m = random_metric(d, gen, trial % 3 == 0 ? 0.3 : 0.0);
    const auto trace = kite::run_greedy(m);
    const int total = static_cast<int>(trace.records.size());
    for (int k = 0; k <= total; ++k) {
      const auto forest = kite::mst_prefix(trace, k).edges();
      const auto graph = kite::mtg_prefix(trace, k).edges();
      const auto streamed = stream_prefix_edges(trace, k);
      ASSERT_TRUE(subset_of(forest, graph)) << "d=" << d << " k=" << k;
      ASSERT_TRUE(subset_of(graph, streamed)) << "d=" << d << " k=" << k;
    }
    EXPECT_TRUE(is_acyclic(kite::mst_prefix(trace, total)));
    EXPECT_FALSE(has_triangle(kite::mtg_prefix(trace, total)));
    for (std::size_t r = 1; r < trace.records.size(); ++r) {
      const auto& prev = trace.records[r - 1];
      const auto& cur = trace.records[r];
      ASSERT_TRUE(prev.value < cur.value ||
                  (prev.value == cur.value && prev.edge < cur.edge));
    }
  }
}

// The learners only consult the order of the stream, so any strictly
// increasing rescaling of the metric leaves their outputs unchanged.
TEST(RunGreedy, MonotoneTransformInvariance) {
  kite::SplitMix64 gen(99021);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 4 + gen.uniform_int(10);
    const auto m = random_metric(d, gen, 0.2);
    kite::MetricMatrix expm(d), ashm(d);
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        const double v = m.at(i, j);
        if (!std::isfinite(v)) continue;
        expm.set(i, j, std::exp(v));
        ashm.set(i, j, std::asinh(v) + 2.0);
      }
    }
    const auto base_stream = kite::sorted_edge_stream(m);
    for (const auto* t : {&expm, &ashm}) {
      const auto stream = kite::sorted_edge_stream(*t);
      ASSERT_EQ(stream.size(), base_stream.size());
      for (std::size_t k = 0; k < stream.size(); ++k) {
        ASSERT_EQ(stream[k].second, base_stream[k].second);
      }
      EXPECT_EQ(kite::mst(*t), kite::mst(m));
      EXPECT_EQ(kite::mtg(*t), kite::mtg(m));
    }
  }
}

TEST(FormsTriangle, Examples) {
  kite::Graph path(3);
  path.add_edge(0, 1);
  path.add_edge(1, 2);
  EXPECT_TRUE(kite::forms_triangle(path, {0, 2}));

  kite::Graph sparse(4);
  sparse.add_edge(0, 1);
  EXPECT_FALSE(kite::forms_triangle(sparse, {2, 3}));

  kite::Graph cycle(4);
  cycle.add_edge(0, 1);
  cycle.add_edge(1, 2);
  cycle.add_edge(2, 3);
  cycle.add_edge(0, 3);
  EXPECT_TRUE(kite::forms_triangle(cycle, {0, 2}));
}

TEST(GeodesicEdgeSet, PathGraph) {
  kite::Graph g(3);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  const auto res = kite::geodesic_edge_set(g, 0, 2);
  EXPECT_DOUBLE_EQ(res.hop_distance, 2.0);
  EXPECT_EQ(res.edge_set, (std::vector<kite::Edge>{{0, 1}, {1, 2}}));
}

TEST(GeodesicEdgeSet, FourCycleHasTwoShortestPaths) {
  kite::Graph g(4);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  g.add_edge(0, 3);
  const auto res = kite::geodesic_edge_set(g, 0, 2);
  EXPECT_DOUBLE_EQ(res.hop_distance, 2.0);
  EXPECT_EQ(res.edge_set.size(), 4u);
}

TEST(GeodesicEdgeSet, DisconnectedAndDegenerate) {
  kite::Graph g(4);
  g.add_edge(0, 1);
  const auto res = kite::geodesic_edge_set(g, 0, 3);
  EXPECT_EQ(res.hop_distance, kInf);
  EXPECT_TRUE(res.edge_set.empty());
  EXPECT_THROW(kite::geodesic_edge_set(g, 2, 2), std::invalid_argument);
}

TEST(IsFermatMetric, PathExample) {
  kite::Graph g(3);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  kite::MetricMatrix m(3);
  m.set(0, 1, 1.0);
  m.set(1, 2, 1.5);
  m.set(0, 2, 3.0);
  const auto check = kite::is_fermat_metric(g, m);
  EXPECT_TRUE(check.is_fermat);
  EXPECT_TRUE(check.violations.empty());
}

TEST(IsFermatMetric, VariationalViolationDetected) {
  kite::Graph g(3);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  kite::MetricMatrix m(3);
  m.set(0, 1, 1.0);
  m.set(1, 2, 1.5);
  m.set(0, 2, 1.2);
  const auto check = kite::is_fermat_metric(g, m);
  EXPECT_FALSE(check.is_fermat);
  bool found = false;
  for (const auto& v : check.violations) {
    if (v.kind == kite::FermatViolationKind::variational &&
        v.outer == kite::Edge{0, 2}) {
      found = true;
      EXPECT_DOUBLE_EQ(v.d_outer, 1.2);
    }
  }
  EXPECT_TRUE(found);
}

TEST(IsFermatMetric, AdditiveTreeMetricsAreFermat) {
  kite::SplitMix64 gen(5150);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 3 + gen.uniform_int(8);
    const auto inst = random_additive_tree(d, gen);
    const auto check = kite::is_fermat_metric(inst.tree, inst.metric);
    ASSERT_TRUE(check.is_fermat) << "trial " << trial << " d=" << d;
    // A Fermat metric on a triangle-free graph is recovered exactly.
    EXPECT_EQ(kite::mtg(inst.metric), inst.tree);
  }
}

TEST(IsFermatMetric, DimensionMismatchThrows) {
  EXPECT_THROW(kite::is_fermat_metric(kite::Graph(3), kite::MetricMatrix(4)),
               std::invalid_argument);
}

TEST(CrucialPairs, ThreeNodeInstance) {
  const auto crucial = kite::crucial_pairs_bruteforce(triangle_metric());
  // Swapping the two cheapest entries leaves the output unchanged; swapping
  // (0,2) with (1,2) changes it, so exactly one adjacent pair is crucial.
  std::set<std::pair<kite::Edge, kite::Edge>> expected{
      {kite::Edge{0, 2}, kite::Edge{1, 2}}};
  EXPECT_EQ(crucial, expected);
}

TEST(CrucialPairs, TiesRejectedAndSingleEdgeEmpty) {
  kite::MetricMatrix tied(3);
  tied.set(0, 1, 1.0);
  tied.set(0, 2, 1.0);
  EXPECT_THROW(kite::crucial_pairs_bruteforce(tied), std::invalid_argument);

  kite::MetricMatrix single(3);
  single.set(0, 1, 0.5);
  EXPECT_TRUE(kite::crucial_pairs_bruteforce(single).empty());
}

TEST(MinCrucialGap, Examples) {
  const auto m = triangle_metric();
  const auto crucial = kite::crucial_pairs_bruteforce(m);
  EXPECT_DOUBLE_EQ(kite::min_crucial_gap(m, crucial), 1.0);

  kite::MetricMatrix wide(4);
  wide.set(0, 1, 1.0);
  wide.set(0, 2, 1.5);
  wide.set(1, 2, 1.7);
  wide.set(2, 3, 4.0);
  const std::set<std::pair<kite::Edge, kite::Edge>> pairs{
      {kite::Edge{0, 1}, kite::Edge{0, 2}},
      {kite::Edge{0, 2}, kite::Edge{1, 2}}};
  EXPECT_DOUBLE_EQ(kite::min_crucial_gap(wide, pairs), 0.2);

  EXPECT_THROW(kite::min_crucial_gap(m, {}), std::invalid_argument);
}

TEST(RecoveryMetrics, Examples) {
  kite::Graph a(3), b(3);
  a.add_edge(0, 1);
  a.add_edge(0, 2);
  const auto same = kite::recovery_metrics(a, a);
  EXPECT_DOUBLE_EQ(same.precision, 1.0);
  EXPECT_DOUBLE_EQ(same.recall, 1.0);
  EXPECT_DOUBLE_EQ(same.f1, 1.0);
  EXPECT_EQ(same.hamming, 0);
  EXPECT_TRUE(same.exact);

  b.add_edge(0, 1);
  b.add_edge(1, 2);
  const auto half = kite::recovery_metrics(a, b);
  EXPECT_DOUBLE_EQ(half.precision, 0.5);
  EXPECT_DOUBLE_EQ(half.recall, 0.5);
  EXPECT_EQ(half.hamming, 2);
  EXPECT_FALSE(half.exact);

  kite::Graph empty(3), truth(4);
  truth.add_edge(0, 1);
  truth.add_edge(1, 2);
  truth.add_edge(2, 3);
  EXPECT_THROW(kite::recovery_metrics(empty, truth), std::invalid_argument);
  const auto miss = kite::recovery_metrics(kite::Graph(4), truth);
  EXPECT_DOUBLE_EQ(miss.precision, 1.0);
  EXPECT_DOUBLE_EQ(miss.recall, 0.0);
  EXPECT_EQ(miss.hamming, 3);
  EXPECT_FALSE(miss.exact);

  const auto both_empty = kite::recovery_metrics(kite::Graph(2), kite::Graph(2));
  EXPECT_DOUBLE_EQ(both_empty.precision, 1.0);
  EXPECT_DOUBLE_EQ(both_empty.recall, 1.0);
  EXPECT_TRUE(both_empty.exact);
}
