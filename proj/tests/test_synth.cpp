#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "kite/copula.hpp"
#include "kite/dataset.hpp"
#include "kite/graph.hpp"
#include "kite/synth.hpp"

namespace {

bool has_triangle(const kite::Graph& graph) {
  const auto adjacency = graph.adjacency();
  for (const auto& [i, j] : graph.edges()) {
    for (const int w : adjacency[static_cast<std::size_t>(i)]) {
      if (w != j && graph.has_edge(w, j)) return true;
    }
  }
  return false;
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Kolmogorov-Smirnov sup distance of a sample against a continuous CDF.
double ks_statistic(std::vector<double> sample, double (*cdf)(double)) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const double value = cdf(sample[k]);
    worst = std::max(worst, std::abs(value - static_cast<double>(k) / n));
    worst = std::max(worst, std::abs(value - static_cast<double>(k + 1) / n));
  }
  return worst;
}

double uniform_cdf(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

TEST(PatternGraph, HubIsDisjointStars) {
  const auto star = kite::make_pattern_graph(kite::Hub{1, 4}, 7);
  EXPECT_EQ(star.edges(), (std::vector<kite::Edge>{{0, 1}, {0, 2}, {0, 3}}));

  const auto two = kite::make_pattern_graph(kite::Hub{2, 3}, 7);
  EXPECT_EQ(two.dim(), 6);
  EXPECT_EQ(two.edges(), (std::vector<kite::Edge>{{0, 1}, {0, 2}, {3, 4}, {3, 5}}));
  EXPECT_FALSE(has_triangle(two));

  EXPECT_THROW(kite::make_pattern_graph(kite::Hub{0, 4}, 7), std::invalid_argument);
  EXPECT_THROW(kite::make_pattern_graph(kite::Hub{1, 1}, 7), std::invalid_argument);
}

TEST(PatternGraph, BandNeighborhoods) {
  const auto band = kite::make_pattern_graph(kite::Band{1, 5, 2}, 3);
  EXPECT_EQ(band.edges(), (std::vector<kite::Edge>{
                              {0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 4}}));
  EXPECT_TRUE(has_triangle(band));

  const auto blocks = kite::make_pattern_graph(kite::Band{2, 4, 2}, 3);
  EXPECT_EQ(blocks.dim(), 8);
  for (const auto& [i, j] : blocks.edges()) EXPECT_EQ(i / 4, j / 4);
}

TEST(PatternGraph, ConstellationUnicyclicAndTriangleFree) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const kite::Constellation pattern{3, 6};
    const auto graph = kite::make_pattern_graph(pattern, seed);
    EXPECT_EQ(graph.dim(), 18);
    EXPECT_FALSE(has_triangle(graph));
    std::vector<int> component_edges(3, 0);
    for (const auto& [i, j] : graph.edges()) {
      ASSERT_EQ(i / 6, j / 6) << "components must stay disjoint";
      ++component_edges[static_cast<std::size_t>(i / 6)];
    }
    for (const int count : component_edges) {
      EXPECT_GE(count, 5);  // spanning tree of the component
      EXPECT_LE(count, 6);  // at most one extra edge, so at most one cycle
    }
  }
  const auto a = kite::make_pattern_graph(kite::Constellation{3, 6}, 12);
  EXPECT_EQ(a, kite::make_pattern_graph(kite::Constellation{3, 6}, 12));
  EXPECT_NE(a, kite::make_pattern_graph(kite::Constellation{3, 6}, 13));

  // Components too small for a length-4 cycle stay trees.
  const auto tiny = kite::make_pattern_graph(kite::Constellation{2, 3}, 5);
  EXPECT_EQ(tiny.edge_count(), 4);

  EXPECT_THROW(kite::make_pattern_graph(kite::Constellation{1, 6, 3}, 0),
               std::invalid_argument);
}

TEST(PatternGraph, ClusterEdgeFrequencyMatchesP) {
  const int size = 10;
  const double pairs = size * (size - 1) / 2.0;
  double total = 0.0;
  const int seeds = 600;
  for (int seed = 0; seed < seeds; ++seed) {
    total += kite::make_pattern_graph(kite::Cluster{1, size, 0.2},
                                      static_cast<std::uint64_t>(seed))
                 .edge_count();
  }
  const double mean = total / seeds;
  EXPECT_NEAR(mean, 0.2 * pairs, 0.1 * 0.2 * pairs);

  EXPECT_THROW(kite::make_pattern_graph(kite::Cluster{1, 5, 1.5}, 0), std::invalid_argument);
}

TEST(MakePrecision, EmptyGraphGivesIdentity) {
  const auto model = kite::make_precision(kite::Graph(4), 99);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      EXPECT_DOUBLE_EQ(model.omega(i, j), i == j ? 1.0 : 0.0);
      EXPECT_NEAR(model.sigma(i, j), i == j ? 1.0 : 0.0, 1e-12);
    }
    EXPECT_DOUBLE_EQ(model.mu(i), 0.5);
  }
}

TEST(MakePrecision, InvariantsOnSeededOutputs) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto graph = kite::make_pattern_graph(kite::Constellation{2, 5}, seed);
    const auto model = kite::make_precision(graph, 1000 + seed);
    const int d = graph.dim();

    // Support preserved exactly, off-support exactly zero.
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        EXPECT_EQ(model.omega(i, j), model.omega(j, i));
        if (graph.has_edge(i, j)) {
          EXPECT_NE(model.omega(i, j), 0.0);
        } else {
          EXPECT_EQ(model.omega(i, j), 0.0);
        }
      }
    }

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> omega_eigen(model.omega);
    EXPECT_GT(omega_eigen.eigenvalues().minCoeff(), 0.0);
    EXPECT_NEAR(omega_eigen.eigenvalues().maxCoeff(), 1.0, 1e-10);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sigma_eigen(model.sigma);
    EXPECT_NEAR(sigma_eigen.eigenvalues().minCoeff(), 1.0, 1e-8);
  }

  kite::Graph pair(2);
  pair.add_edge(0, 1);
  const auto model = kite::make_precision(pair, 4242);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(model.sigma);
  EXPECT_NEAR(eigen.eigenvalues().minCoeff(), 1.0, 1e-8);
}

TEST(SampleGaussian, DeterministicMomentsAndMarginals) {
  const auto graph = kite::make_pattern_graph(kite::Hub{1, 4}, 0);
  const auto model = kite::make_precision(graph, 5);

  const auto a = kite::sample_gaussian(model, 100, 77);
  const auto b = kite::sample_gaussian(model, 100, 77);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, kite::sample_gaussian(model, 100, 78).values);

  const int n = 50000;
  const auto big = kite::sample_gaussian(model, n, 123);
  const int d = 4;
  for (int j = 0; j < d; ++j) {
    double mean = 0.0;
    for (int k = 0; k < n; ++k) mean += big.at(k, j);
    mean /= n;
    EXPECT_NEAR(mean, model.mu(j), 0.05);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      double cov = 0.0;
      for (int k = 0; k < n; ++k) {
        cov += (big.at(k, i) - model.mu(i)) * (big.at(k, j) - model.mu(j));
      }
      cov /= n;
      // 0.1 in units of the pair's scale; this model's variances are ~18.
      const double scale = std::sqrt(model.sigma(i, i) * model.sigma(j, j));
      EXPECT_NEAR(cov, model.sigma(i, j), 0.1 * std::max(1.0, scale));
    }
  }

  // Identity model at unit scale: mean within 0.05 and covariance within 0.1
  // in absolute terms, plus coordinatewise KS against the standard normal at
  // the 1% level (critical value 1.628 / sqrt(n)).
  {
    const kite::GaussianModel identity{Eigen::VectorXd::Zero(3),
                                       Eigen::MatrixXd::Identity(3, 3),
                                       Eigen::MatrixXd::Identity(3, 3), kite::Graph(3)};
    const auto sample = kite::sample_gaussian(identity, n, 321);
    for (int i = 0; i < 3; ++i) {
      double mean = 0.0;
      for (int k = 0; k < n; ++k) mean += sample.at(k, i);
      EXPECT_NEAR(mean / n, 0.0, 0.05);
      for (int j = i; j < 3; ++j) {
        double cov = 0.0;
        for (int k = 0; k < n; ++k) cov += sample.at(k, i) * sample.at(k, j);
        EXPECT_NEAR(cov / n, i == j ? 1.0 : 0.0, 0.1);
      }
      EXPECT_LT(ks_statistic(sample.column(i), standard_normal_cdf), 1.628 / std::sqrt(n));
    }
  }

  EXPECT_THROW(kite::sample_gaussian(model, 0, 1), std::invalid_argument);
}

TEST(BoxCox, PointValuesAndMonotonicity) {
  kite::ContinuousDataset data(4, 1);
  data.at(0, 0) = 1.0;
  data.at(1, 0) = -1.0;
  data.at(2, 0) = 2.0;
  data.at(3, 0) = 0.0;
  const auto out = kite::box_cox(data, 2.5);
  EXPECT_DOUBLE_EQ(out.at(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(out.at(1, 0), -0.8);
  EXPECT_NEAR(out.at(2, 0), (std::pow(2.0, 2.5) - 1.0) / 2.5, 1e-12);
  EXPECT_NEAR(out.at(2, 0), 1.8627, 1e-4);
  EXPECT_DOUBLE_EQ(out.at(3, 0), -0.4);

  kite::SplitMix64 gen(9);
  kite::ContinuousDataset random(200, 1);
  for (int k = 0; k < 200; ++k) random.at(k, 0) = 4.0 * gen.normal();
  const auto warped = kite::box_cox(random, 2.5);
  for (int k = 0; k + 1 < 200; ++k) {
    for (int l = k + 1; l < 200; ++l) {
      EXPECT_EQ(random.at(k, 0) < random.at(l, 0), warped.at(k, 0) < warped.at(l, 0));
    }
  }

  EXPECT_THROW(kite::box_cox(data, 0.0), std::invalid_argument);
}

TEST(Nonparanormal, ProbabilityIntegralTransform) {
  const auto graph = kite::make_pattern_graph(kite::Band{1, 3, 2}, 0);
  const auto model = kite::make_precision(graph, 17);
  const int n = 20000;
  const auto data = kite::sample_gaussian(model, n, 55);
  const auto z = kite::nonparanormal(data, model);

  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < n; ++k) {
      ASSERT_GT(z.at(k, j), 0.0);
      ASSERT_LT(z.at(k, j), 1.0);
    }
    EXPECT_LT(ks_statistic(z.column(j), uniform_cdf), 1.628 / std::sqrt(n));
    EXPECT_EQ(kite::column_ranks(z.column(j)), kite::column_ranks(data.column(j)));
  }

  // At the mean the transform hits one half exactly.
  kite::ContinuousDataset at_mean(1, 3);
  for (int j = 0; j < 3; ++j) at_mean.at(0, j) = model.mu(j);
  const auto mid = kite::nonparanormal(at_mean, model);
  for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(mid.at(0, j), 0.5);

  EXPECT_THROW(kite::nonparanormal(kite::ContinuousDataset(5, 2), model),
               std::invalid_argument);
}

// Both distortions are strictly increasing per coordinate, so the rank-based
// copula metric cannot move by even one bit.
TEST(Distortions, CopulaMetricInvariant) {
  const auto graph = kite::make_pattern_graph(kite::Hub{1, 3}, 0);
  const auto model = kite::make_precision(graph, 31);
  const auto data = kite::sample_gaussian(model, 300, 888);
  const auto base = kite::mi_matrix_copula(data);
  const auto after_boxcox = kite::mi_matrix_copula(kite::box_cox(data, 2.5));
  const auto after_npn = kite::mi_matrix_copula(kite::nonparanormal(data, model));
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      EXPECT_EQ(base.at(i, j), after_boxcox.at(i, j));
      EXPECT_EQ(base.at(i, j), after_npn.at(i, j));
    }
  }
}
