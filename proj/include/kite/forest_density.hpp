#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kite/dataset.hpp"
#include "kite/graph.hpp"
#include "kite/greedy.hpp"
#include "kite/kernel.hpp"
#include "kite/stats.hpp"

namespace kite {

struct ForestDensityConfig {
  double c1 = 1.0;  // isolated-node bandwidth scale, h1 = c1 * spread * n^(-1/5)
  double c2 = 1.0;  // edge / non-isolated bandwidth scale, h2 = c2 * spread * n^(-1/6)
  KernelSpec kernel = epanechnikov();
};

// A forest density estimate: per-edge bivariate KDEs divided by their
// univariate margins, times univariate KDEs for every vertex. Isolated
// vertices get the slower h1 bandwidth, everything else h2. Bandwidths are
// per column, scaled by the column's interquartile range.
struct FittedForestDensity {
  Graph forest;
  std::vector<int> isolated;  // sorted degree-0 vertices
  std::vector<double> h1;     // per column
  std::vector<double> h2;     // per column
  std::vector<std::vector<double>> train_columns;
  KernelSpec kernel;
  int n;
  int d;
};

enum class LikelihoodMode { kite, fde };

namespace detail {

inline bool graph_has_cycle(const Graph& graph) {
  UnionFind uf(graph.dim());
  for (const auto& [i, j] : graph.edges()) {
    if (!uf.unite(i, j)) return true;
  }
  return false;
}

inline double univariate_kde(const std::vector<double>& column, double x, double h,
                             const KernelSpec& kernel) {
  double total = 0.0;
  for (const double v : column) total += kernel.eval((x - v) / h);
  return total / (static_cast<double>(column.size()) * h);
}

inline double bivariate_kde(const std::vector<double>& column_a,
                            const std::vector<double>& column_b, double xa, double xb,
                            double ha, double hb, const KernelSpec& kernel) {
  double total = 0.0;
  for (std::size_t k = 0; k < column_a.size(); ++k) {
    total += kernel.eval((xa - column_a[k]) / ha) * kernel.eval((xb - column_b[k]) / hb);
  }
  return total / (static_cast<double>(column_a.size()) * ha * hb);
}

inline double column_spread(const std::vector<double>& column, const char* what) {
  double spread = interquartile_range(column);
  if (!(spread > 0.0)) spread = sample_std(column);
  if (!(spread > 0.0)) throw std::invalid_argument(std::string(what) + ": constant column");
  return spread;
}

}  // namespace detail

inline FittedForestDensity fit_forest_density(const ContinuousDataset& train,
                                              const Graph& forest,
                                              const ForestDensityConfig& config = {}) {
  if (forest.dim() != train.d) {
    throw std::invalid_argument("fit_forest_density: graph/data dimension mismatch");
  }
  if (detail::graph_has_cycle(forest)) {
    throw std::invalid_argument("fit_forest_density: input graph has a cycle");
  }
  if (train.n < 2) throw std::invalid_argument("fit_forest_density: need at least 2 samples");
  if (!(config.c1 > 0.0) || !(config.c2 > 0.0)) {
    throw std::invalid_argument("fit_forest_density: bandwidth scales must be positive");
  }

  FittedForestDensity fd{forest, forest.isolated_vertices(), {}, {}, {},
                         config.kernel,  train.n,            train.d};
  const double nn = static_cast<double>(train.n);
  const double rate1 = std::pow(nn, -0.2);
  const double rate2 = std::pow(nn, -1.0 / 6.0);
  fd.train_columns.resize(static_cast<std::size_t>(train.d));
  fd.h1.resize(static_cast<std::size_t>(train.d));
  fd.h2.resize(static_cast<std::size_t>(train.d));
  for (int j = 0; j < train.d; ++j) {
    auto column = train.column(j);
    const double spread = detail::column_spread(column, "fit_forest_density");
    fd.h1[static_cast<std::size_t>(j)] = config.c1 * spread * rate1;
    fd.h2[static_cast<std::size_t>(j)] = config.c2 * spread * rate2;
    fd.train_columns[static_cast<std::size_t>(j)] = std::move(column);
  }
  return fd;
}

namespace detail {

constexpr double kDensityFloor = 1e-12;

inline double floored_log(double value) { return std::log(std::max(value, kDensityFloor)); }

// One held-out point. The kite mode is the full estimate; fde drops the
// isolated-vertex univariate factors.
inline double log_density_at(const FittedForestDensity& fd, const double* x,
                             LikelihoodMode mode) {
  std::vector<char> is_isolated(static_cast<std::size_t>(fd.d), 0);
  for (const int u : fd.isolated) is_isolated[static_cast<std::size_t>(u)] = 1;

  double total = 0.0;
  for (const auto& [j, l] : fd.forest.edges()) {
    const auto sj = static_cast<std::size_t>(j);
    const auto sl = static_cast<std::size_t>(l);
    const double joint = bivariate_kde(fd.train_columns[sj], fd.train_columns[sl], x[j], x[l],
                                       fd.h2[sj], fd.h2[sl], fd.kernel);
    const double margin_j = univariate_kde(fd.train_columns[sj], x[j], fd.h2[sj], fd.kernel);
    const double margin_l = univariate_kde(fd.train_columns[sl], x[l], fd.h2[sl], fd.kernel);
    total += floored_log(joint) - floored_log(margin_j) - floored_log(margin_l);
  }
  for (int j = 0; j < fd.d; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    if (is_isolated[sj]) {
      if (mode == LikelihoodMode::kite) {
        total += floored_log(univariate_kde(fd.train_columns[sj], x[j], fd.h1[sj], fd.kernel));
      }
    } else {
      total += floored_log(univariate_kde(fd.train_columns[sj], x[j], fd.h2[sj], fd.kernel));
    }
  }
  return total;
}

}  // namespace detail

inline double log_density(const FittedForestDensity& fd, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != fd.d) {
    throw std::invalid_argument("log_density: point dimension mismatch");
  }
  for (const double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("log_density: point must be finite");
  }
  return detail::log_density_at(fd, x.data(), LikelihoodMode::kite);
}

inline double heldout_ll(const FittedForestDensity& fd, const ContinuousDataset& heldout,
                         LikelihoodMode mode) {
  if (heldout.d != fd.d) throw std::invalid_argument("heldout_ll: dimension mismatch");
  if (heldout.n == 0) throw std::invalid_argument("heldout_ll: empty held-out set");
  double total = 0.0;
  for (int k = 0; k < heldout.n; ++k) {
    total += detail::log_density_at(fd, &heldout.values[static_cast<std::size_t>(k) *
                                                        static_cast<std::size_t>(fd.d)],
                                    mode);
  }
  return total / static_cast<double>(heldout.n);
}

// Mean Gaussian log-likelihood -1/2 (x-mu)' Omega (x-mu) + 1/2 log(det Omega / (2 pi)^d)
// of a supplied mean/precision pair on the held-out sample.
inline double heldout_ll_gauss(const Eigen::VectorXd& mu, const Eigen::MatrixXd& omega,
                               const ContinuousDataset& heldout) {
  const int d = heldout.d;
  if (mu.size() != d || omega.rows() != d || omega.cols() != d) {
    throw std::invalid_argument("heldout_ll_gauss: dimension mismatch");
  }
  if (heldout.n == 0) throw std::invalid_argument("heldout_ll_gauss: empty held-out set");
  if (!omega.isApprox(omega.transpose(), 1e-10)) {
    throw std::invalid_argument("heldout_ll_gauss: precision matrix must be symmetric");
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(omega);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("heldout_ll_gauss: precision matrix is not positive definite");
  }
  double log_det = 0.0;
  for (int j = 0; j < d; ++j) log_det += 2.0 * std::log(llt.matrixL()(j, j));
  const double constant =
      0.5 * (log_det - static_cast<double>(d) * std::log(2.0 * std::numbers::pi));
  double total = 0.0;
  for (int k = 0; k < heldout.n; ++k) {
    Eigen::VectorXd delta(d);
    for (int j = 0; j < d; ++j) delta(j) = heldout.at(k, j) - mu(j);
    total += -0.5 * delta.dot(omega * delta) + constant;
  }
  return total / static_cast<double>(heldout.n);
}

}  // namespace kite
