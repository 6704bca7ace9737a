#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kite/dataset.hpp"
#include "kite/graph.hpp"
#include "kite/kernel.hpp"

namespace kite {

// Copula density estimates on the m×m midpoint grid ((a+1/2)/m, (b+1/2)/m);
// the first grid axis belongs to the first rank column. Mirror reflection
// returns all kernel mass leaking past the unit-square boundary, so an
// untruncated grid carries midpoint-rule mass sum(values)/m² = 1 up to the
// quadrature tolerance 10·L_K/(m·h²), with L_K the kernel's Lipschitz
// constant.
struct CopulaGrid {
  int m = 0;
  double h = 0.0;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  bool truncated = false;
  std::vector<double> values;  // row-major m×m

  double at(int a, int b) const {
    return values[static_cast<std::size_t>(a) * static_cast<std::size_t>(m) +
                  static_cast<std::size_t>(b)];
  }
};

struct CopulaConfig {
  double c0 = 0.22;
  double kappa1 = 0.01;
  double kappa2 = 100.0;
  int grid_m = 256;
  KernelSpec kernel = epanechnikov();
};

// The nine boundary reflections of a rank pair, in the fixed order
// (u,v), (-u,v), (u,-v), (-u,-v), (u,2-v), (-u,2-v), (2-u,v), (2-u,-v),
// (2-u,2-v).
inline std::array<std::pair<double, double>, 9> mirror_points(double u, double v) {
  return {{{u, v},
           {-u, v},
           {u, -v},
           {-u, -v},
           {u, 2.0 - v},
           {-u, 2.0 - v},
           {2.0 - u, v},
           {2.0 - u, -v},
           {2.0 - u, 2.0 - v}}};
}

// Mirror-reflection copula KDE evaluated on the midpoint grid:
//   (1/(n h^2)) sum_k sum_{l=1..9} K((u - u_k^(l))/h) K((v - v_k^(l))/h).
// The nine reflections form the Cartesian product {u,-u,2-u} x {v,-v,2-v},
// so each sample contributes a rank-1 term and the whole grid is one matrix
// product. Samples are accumulated in a canonical (sorted) order, which makes
// the result independent of the input sample order bit for bit.
inline CopulaGrid copula_kde(const std::vector<double>& ranks_i,
                             const std::vector<double>& ranks_j, double h,
                             const KernelSpec& kernel, int m = 256) {
  if (ranks_i.size() != ranks_j.size() || ranks_i.empty()) {
    throw std::invalid_argument("copula_kde: rank columns must match and be nonempty");
  }
  if (!(h > 0.0) || h > 1.0) {
    throw std::invalid_argument("copula_kde: bandwidth must be in (0, 1]");
  }
  if (m < 16) throw std::invalid_argument("copula_kde: grid resolution must be >= 16");
  const std::size_t n = ranks_i.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (!(ranks_i[k] >= 0.0) || ranks_i[k] > 1.0 || !(ranks_j[k] >= 0.0) || ranks_j[k] > 1.0) {
      throw std::invalid_argument("copula_kde: rank values must lie in [0, 1]");
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (ranks_i[a] != ranks_i[b]) return ranks_i[a] < ranks_i[b];
    return ranks_j[a] < ranks_j[b];
  });

  const auto reflected_column = [m, h, &kernel](double value, Eigen::MatrixXd& mat,
                                                Eigen::Index col) {
    for (int a = 0; a < m; ++a) {
      const double g = (static_cast<double>(a) + 0.5) / static_cast<double>(m);
      mat(a, col) = kernel.eval((g - value) / h) + kernel.eval((g + value) / h) +
                    kernel.eval((g - 2.0 + value) / h);
    }
  };

  Eigen::MatrixXd ai(m, static_cast<Eigen::Index>(n));
  Eigen::MatrixXd aj(m, static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    reflected_column(ranks_i[order[k]], ai, static_cast<Eigen::Index>(k));
    reflected_column(ranks_j[order[k]], aj, static_cast<Eigen::Index>(k));
  }
  const Eigen::MatrixXd grid_mat = (ai * aj.transpose()) / (static_cast<double>(n) * h * h);

  CopulaGrid grid;
  grid.m = m;
  grid.h = h;
  grid.values.resize(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      grid.values[static_cast<std::size_t>(a) * static_cast<std::size_t>(m) +
                  static_cast<std::size_t>(b)] = grid_mat(a, b);
    }
  }
  return grid;
}

// Valuewise clamp to [kappa1, kappa2], bounding the density away from zero
// and infinity.
inline CopulaGrid truncate_grid(const CopulaGrid& grid, double kappa1, double kappa2) {
  if (!(kappa1 > 0.0) || !(kappa1 < kappa2)) {
    throw std::invalid_argument("truncate_grid: need 0 < kappa1 < kappa2");
  }
  CopulaGrid out = grid;
  out.kappa1 = kappa1;
  out.kappa2 = kappa2;
  out.truncated = true;
  for (auto& v : out.values) v = std::clamp(v, kappa1, kappa2);
  return out;
}

// Copula mutual information: midpoint quadrature of c log c over the unit
// square. Equals the negative copula entropy.
inline double mi_copula(const CopulaGrid& grid) {
  if (!grid.truncated) {
    throw std::invalid_argument("mi_copula: grid must be truncated first");
  }
  double total = 0.0;
  for (const double v : grid.values) total += v * std::log(v);
  return total / (static_cast<double>(grid.m) * static_cast<double>(grid.m));
}

// Bandwidth rule h = min(1, c0 (log n / n)^(1/6)).
inline double default_bandwidth(int n, double c0) {
  if (n < 2) throw std::invalid_argument("default_bandwidth: n must be >= 2");
  if (!(c0 > 0.0)) throw std::invalid_argument("default_bandwidth: c0 must be positive");
  const double nn = static_cast<double>(n);
  return std::min(1.0, c0 * std::pow(std::log(nn) / nn, 1.0 / 6.0));
}

namespace detail {

// Full pipeline for one rank pair: bandwidth rule, mirror KDE, truncation,
// quadrature. The argument pair is canonicalised (the estimator is symmetric
// in its arguments), so (i,j) and (j,i) produce bit-identical values.
inline double copula_mi_from_ranks(const std::vector<double>& ranks_i,
                                   const std::vector<double>& ranks_j,
                                   const CopulaConfig& config) {
  // Orient the pair by comparing the sorted (u,v) pair lists. The key is a
  // function of the sample multiset only, so reordering the samples cannot
  // flip the orientation.
  const std::size_t n = ranks_i.size();
  std::vector<std::pair<double, double>> forward(n), reversed(n);
  for (std::size_t k = 0; k < n; ++k) {
    forward[k] = {ranks_i[k], ranks_j[k]};
    reversed[k] = {ranks_j[k], ranks_i[k]};
  }
  std::sort(forward.begin(), forward.end());
  std::sort(reversed.begin(), reversed.end());
  const std::vector<double>* u = &ranks_i;
  const std::vector<double>* v = &ranks_j;
  if (reversed < forward) std::swap(u, v);
  const double h = default_bandwidth(static_cast<int>(u->size()), config.c0);
  const auto grid = copula_kde(*u, *v, h, config.kernel, config.grid_m);
  return mi_copula(truncate_grid(grid, config.kappa1, config.kappa2));
}

}  // namespace detail

inline double mi_copula_pair(const std::vector<double>& x, const std::vector<double>& y,
                             const CopulaConfig& config = {}) {
  if (x.size() != y.size()) throw std::invalid_argument("mi_copula_pair: length mismatch");
  return detail::copula_mi_from_ranks(column_ranks(x), column_ranks(y), config);
}

// Pairwise copula MI over all columns, stored as the negated estimate -I so
// that strongly dependent pairs come first in the ascending edge stream.
inline MetricMatrix mi_matrix_copula(const ContinuousDataset& data,
                                     const CopulaConfig& config = {}) {
  const auto rank_matrix = ranks(data);
  std::vector<std::vector<double>> cols(static_cast<std::size_t>(data.d));
  for (int j = 0; j < data.d; ++j) cols[static_cast<std::size_t>(j)] = rank_matrix.column(j);
  MetricMatrix metric(data.d);
  for (int i = 0; i < data.d; ++i) {
    for (int j = i + 1; j < data.d; ++j) {
      const double mi = detail::copula_mi_from_ranks(cols[static_cast<std::size_t>(i)],
                                                     cols[static_cast<std::size_t>(j)], config);
      metric.set(i, j, -mi);
    }
  }
  return metric;
}

}  // namespace kite
