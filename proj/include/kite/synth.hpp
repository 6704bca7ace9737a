#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "kite/dataset.hpp"
#include "kite/graph.hpp"
#include "kite/rng.hpp"

namespace kite {

// The four ground-truth pattern families. Every pattern is a disjoint union
// of identical-size components; d is derived from the parameters.
struct Hub {
  int stars;
  int star_size;
};

struct Constellation {
  int components;
  int component_size;
  // Any added cycle must be at least this long, which keeps constellation
  // truths triangle-free.
  int min_cycle_len = 4;
};

struct Band {
  int bands;
  int band_size;
  int width = 2;
};

struct Cluster {
  int clusters;
  int cluster_size;
  double p = 0.2;
};

using GraphPattern = std::variant<Hub, Constellation, Band, Cluster>;

struct GaussianModel {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd omega;
  Graph graph;
};

inline int pattern_dim(const GraphPattern& pattern) {
  return std::visit(
      [](const auto& p) -> int {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Hub>) return p.stars * p.star_size;
        if constexpr (std::is_same_v<T, Constellation>) return p.components * p.component_size;
        if constexpr (std::is_same_v<T, Band>) return p.bands * p.band_size;
        if constexpr (std::is_same_v<T, Cluster>) return p.clusters * p.cluster_size;
      },
      pattern);
}

namespace detail {

inline void check_component_counts(int components, int size, const char* what) {
  if (components < 1 || size < 2) {
    throw std::invalid_argument(std::string(what) +
                                ": need at least one component of size >= 2");
  }
}

// Hop distances inside one component of the partially built graph.
inline std::vector<int> component_distances(const std::vector<std::vector<int>>& adjacency,
                                            int source) {
  std::vector<int> dist(adjacency.size(), -1);
  std::queue<int> frontier;
  dist[static_cast<std::size_t>(source)] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (const int v : adjacency[static_cast<std::size_t>(u)]) {
      if (dist[static_cast<std::size_t>(v)] < 0) {
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
        frontier.push(v);
      }
    }
  }
  return dist;
}

}  // namespace detail

// Deterministic pattern generator. Hub and band graphs are fully determined
// by their sizes; constellation and cluster components consume the seeded
// generator.
inline Graph make_pattern_graph(const GraphPattern& pattern, std::uint64_t seed) {
  SplitMix64 gen(seed);
  Graph graph(pattern_dim(pattern));

  if (const auto* hub = std::get_if<Hub>(&pattern)) {
    detail::check_component_counts(hub->stars, hub->star_size, "make_pattern_graph(hub)");
    for (int s = 0; s < hub->stars; ++s) {
      const int base = s * hub->star_size;
      for (int t = 1; t < hub->star_size; ++t) graph.add_edge(base, base + t);
    }
    return graph;
  }

  if (const auto* band = std::get_if<Band>(&pattern)) {
    detail::check_component_counts(band->bands, band->band_size, "make_pattern_graph(band)");
    if (band->width < 1) throw std::invalid_argument("make_pattern_graph(band): width >= 1");
    for (int b = 0; b < band->bands; ++b) {
      const int base = b * band->band_size;
      for (int i = 0; i < band->band_size; ++i) {
        for (int j = i + 1; j < band->band_size && j - i <= band->width; ++j) {
          graph.add_edge(base + i, base + j);
        }
      }
    }
    return graph;
  }

  if (const auto* cluster = std::get_if<Cluster>(&pattern)) {
    detail::check_component_counts(cluster->clusters, cluster->cluster_size,
                                   "make_pattern_graph(cluster)");
    if (cluster->p < 0.0 || cluster->p > 1.0) {
      throw std::invalid_argument("make_pattern_graph(cluster): p must be in [0, 1]");
    }
    for (int c = 0; c < cluster->clusters; ++c) {
      const int base = c * cluster->cluster_size;
      for (int i = 0; i < cluster->cluster_size; ++i) {
        for (int j = i + 1; j < cluster->cluster_size; ++j) {
          if (gen.uniform() < cluster->p) graph.add_edge(base + i, base + j);
        }
      }
    }
    return graph;
  }

  const auto& constellation = std::get<Constellation>(pattern);
  detail::check_component_counts(constellation.components, constellation.component_size,
                                 "make_pattern_graph(constellation)");
  if (constellation.min_cycle_len < 4) {
    throw std::invalid_argument("make_pattern_graph(constellation): min_cycle_len >= 4");
  }
  const int size = constellation.component_size;
  for (int c = 0; c < constellation.components; ++c) {
    const int base = c * size;
    // Random tree: each vertex attaches to a uniformly chosen earlier one.
    std::vector<std::vector<int>> adjacency(static_cast<std::size_t>(size));
    for (int t = 1; t < size; ++t) {
      const int parent = gen.uniform_int(t);
      graph.add_edge(base + parent, base + t);
      adjacency[static_cast<std::size_t>(parent)].push_back(t);
      adjacency[static_cast<std::size_t>(t)].push_back(parent);
    }
    // At most one cycle: close a uniformly chosen vertex pair whose tree
    // distance is long enough, when such a pair exists.
    std::vector<Edge>candidates;
    for (int u = 0; u < size; ++u) {
      const auto dist = detail::component_distances(adjacency, u);
      for (int v = u + 1; v < size; ++v) {
        if (dist[static_cast<std::size_t>(v)] >= constellation.min_cycle_len - 1) {
          candidates.push_back({u, v});
        }
      }
    }
    if (!candidates.empty()) {
      const auto [u, v] = candidates[static_cast<std::size_t>(
          gen.uniform_int(static_cast<int>(candidates.size())))];
      graph.add_edge(base + u, base + v);
    }
  }
  return graph;
}

// Precision-matrix recipe: uniform off-diagonal weights on the support,
// diagonal shift to positive definiteness, then a uniform rescale that puts
// the smallest eigenvalue of the covariance at exactly one. The rescale
// touches no zero entry, so the support is preserved bit for bit.
inline GaussianModel make_precision(const Graph& graph, std::uint64_t seed) {
  SplitMix64 gen(seed);
  const int d = graph.dim();
  Eigen::MatrixXd omega0 = Eigen::MatrixXd::Zero(d, d);
  for (const auto& [i, j] : graph.edges()) {
    const double weight = gen.uniform(-30.0, 10.0);
    omega0(i, j) = weight;
    omega0(j, i) = weight;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen0(omega0);
  const double shift = std::abs(eigen0.eigenvalues().minCoeff()) + 1.0;
  Eigen::MatrixXd omega = omega0;
  omega.diagonal().array() += shift;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen1(omega);
  omega /= eigen1.eigenvalues().maxCoeff();

  GaussianModel model{Eigen::VectorXd::Constant(d, 0.5), omega.inverse(), omega, graph};
  return model;
}

inline ContinuousDataset sample_gaussian(const GaussianModel& model, int n,
                                         std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_gaussian: n must be >= 1");
  const int d = static_cast<int>(model.mu.size());
  const Eigen::LLT<Eigen::MatrixXd> llt(model.sigma);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("sample_gaussian: covariance is not positive definite");
  }
  const Eigen::MatrixXd chol = llt.matrixL();
  SplitMix64 gen(seed);
  ContinuousDataset data(n, d);
  Eigen::VectorXd z(d);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < d; ++j) z(j) = gen.normal();
    const Eigen::VectorXd x = model.mu + chol * z;
    for (int j = 0; j < d; ++j) data.at(k, j) = x(j);
  }
  return data;
}

// Signed-power distortion y = (sign(x) |x|^nu - 1) / nu, strictly increasing
// for every positive exponent.
inline ContinuousDataset box_cox(const ContinuousDataset& data, double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("box_cox: exponent must be positive");
  ContinuousDataset out(data.n, data.d);
  for (std::size_t idx = 0; idx < data.values.size(); ++idx) {
    const double x = data.values[idx];
    const double signed_power = (x < 0.0 ? -1.0 : 1.0) * std::pow(std::abs(x), nu);
    out.values[idx] = (signed_power - 1.0) / nu;
  }
  return out;
}

// Probability integral transform through the model's own Gaussian marginals:
// z = Phi((x - mu_i) / sqrt(sigma_ii)), landing in (0, 1).
inline ContinuousDataset nonparanormal(const ContinuousDataset& data,
                                       const GaussianModel& model) {
  if (static_cast<int>(model.mu.size()) != data.d) {
    throw std::invalid_argument("nonparanormal: model/data dimension mismatch");
  }
  ContinuousDataset out(data.n, data.d);
  for (int j = 0; j < data.d; ++j) {
    const double scale = std::sqrt(model.sigma(j, j));
    for (int k = 0; k < data.n; ++k) {
      const double t = (data.at(k, j) - model.mu(j)) / scale;
      out.at(k, j) = 0.5 * std::erfc(-t / std::numbers::sqrt2);
    }
  }
  return out;
}

}  // namespace kite
