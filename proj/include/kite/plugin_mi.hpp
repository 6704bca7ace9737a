#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kite/copula.hpp"
#include "kite/dataset.hpp"
#include "kite/kernel.hpp"
#include "kite/stats.hpp"

namespace kite {

struct PluginConfig {
  double h = 0.0;  // 0 means the default rule n^(-1/4)
  double kappa1 = 0.01;
  double kappa2 = 100.0;
  int grid_m = 256;
  KernelSpec kernel = epanechnikov();
};

inline double default_plugin_bandwidth(int n) {
  if (n < 1) throw std::invalid_argument("default_plugin_bandwidth: n must be >= 1");
  return std::pow(static_cast<double>(n), -0.25);
}

namespace detail {

inline std::vector<double> minmax_rescale(const std::vector<double>& x, const char* what) {
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) throw std::invalid_argument(std::string(what) + ": constant column");
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = (x[k] - lo) / (hi - lo);
  return out;
}

// Mirror-reflected univariate KDE on the unit-interval midpoint grid,
// clamped to the same truncation band as the bivariate estimate. Input is
// sorted first so the accumulation order is canonical.
inline std::vector<double> mirrored_univariate_kde(std::vector<double> x, double h,
                                                   const KernelSpec& kernel, int m,
                                                   double kappa1, double kappa2) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  std::vector<double> density(static_cast<std::size_t>(m), 0.0);
  for (int a = 0; a < m; ++a) {
    const double g = (static_cast<double>(a) + 0.5) / static_cast<double>(m);
    double total = 0.0;
    for (const double v : x) {
      total += kernel.eval((g - v) / h) + kernel.eval((g + v) / h) +
               kernel.eval((g - 2.0 + v) / h);
    }
    density[static_cast<std::size_t>(a)] = std::clamp(total / (n * h), kappa1, kappa2);
  }
  return density;
}

}  // namespace detail

// Classical plug-in KDE mutual information on min-max rescaled data:
// mirror-reflected bivariate and univariate estimates on the unit square,
// truncated, combined by midpoint quadrature of p log(p / (p1 p2)).
inline double plugin_mi(const std::vector<double>& x, const std::vector<double>& y,
                        const PluginConfig& config = {}) {
  if (x.size() != y.size() || x.empty()) {
    throw std::invalid_argument("plugin_mi: columns must match and be nonempty");
  }
  auto rx = detail::minmax_rescale(x, "plugin_mi");
  auto ry = detail::minmax_rescale(y, "plugin_mi");
  // Orient the pair by the sorted (x,y) pair lists — a sample-order-free key
  // — so swapping the arguments or permuting the rows cannot change a bit.
  {
    const std::size_t n = rx.size();
    std::vector<std::pair<double, double>> forward(n), reversed(n);
    for (std::size_t k = 0; k < n; ++k) {
      forward[k] = {rx[k], ry[k]};
      reversed[k] = {ry[k], rx[k]};
    }
    std::sort(forward.begin(), forward.end());
    std::sort(reversed.begin(), reversed.end());
    if (reversed < forward) std::swap(rx, ry);
  }
  const double h =
      config.h > 0.0 ? config.h : default_plugin_bandwidth(static_cast<int>(x.size()));
  const auto joint = truncate_grid(copula_kde(rx, ry, h, config.kernel, config.grid_m),
                                   config.kappa1, config.kappa2);
  const auto px = detail::mirrored_univariate_kde(rx, h, config.kernel, config.grid_m,
                                                  config.kappa1, config.kappa2);
  const auto py = detail::mirrored_univariate_kde(ry, h, config.kernel, config.grid_m,
                                                  config.kappa1, config.kappa2);
  const int m = config.grid_m;
  double total = 0.0;
  for (int a = 0; a < m; ++a) {
    const double log_px = std::log(px[static_cast<std::size_t>(a)]);
    for (int b = 0; b < m; ++b) {
      const double p = joint.at(a, b);
      total += p * (std::log(p) - log_px - std::log(py[static_cast<std::size_t>(b)]));
    }
  }
  return total / (static_cast<double>(m) * static_cast<double>(m));
}

// Differential entropy of one column: plain (unreflected) KDE integrated
// over [min - h, max + h] by the midpoint rule, with the density floored
// inside the log.
inline double marginal_entropy(const std::vector<double>& x, double h,
                               const KernelSpec& kernel = epanechnikov(), int grid_m = 512) {
  if (x.empty()) throw std::invalid_argument("marginal_entropy: empty column");
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("marginal_entropy: bandwidth must be positive");
  }
  if (grid_m < 16) throw std::invalid_argument("marginal_entropy: grid resolution must be >= 16");
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  if (!(*hi_it > *lo_it)) throw std::invalid_argument("marginal_entropy: constant column");
  std::vector<double> sorted(x);
  std::sort(sorted.begin(), sorted.end());
  const double lo = *lo_it - h;
  const double width = (*hi_it + h) - lo;
  const double step = width / static_cast<double>(grid_m);
  const double n = static_cast<double>(x.size());
  constexpr double kFloor = 1e-12;
  double entropy = 0.0;
  for (int g = 0; g < grid_m; ++g) {
    const double t = lo + (static_cast<double>(g) + 0.5) * step;
    double density = 0.0;
    for (const double v : sorted) density += kernel.eval((t - v) / h);
    density /= n * h;
    entropy -= density * std::log(std::max(density, kFloor)) * step;
  }
  return entropy;
}

// Driver bandwidth rule for held-out entropies: spread-scaled n^(-1/4),
// falling back to the standard deviation when the interquartile range
// degenerates.
inline double entropy_bandwidth(const std::vector<double>& x) {
  if (x.size() < 2) throw std::invalid_argument("entropy_bandwidth: need at least 2 values");
  double spread = interquartile_range(x);
  if (!(spread > 0.0)) spread = sample_std(x);
  if (!(spread > 0.0)) throw std::invalid_argument("entropy_bandwidth: constant column");
  return spread * default_plugin_bandwidth(static_cast<int>(x.size()));
}

inline MetricMatrix mi_matrix_plugin(const ContinuousDataset& data,
                                     const PluginConfig& config = {}) {
  std::vector<std::vector<double>> cols(static_cast<std::size_t>(data.d));
  for (int j = 0; j < data.d; ++j) cols[static_cast<std::size_t>(j)] = data.column(j);
  MetricMatrix metric(data.d);
  for (int i = 0; i < data.d; ++i) {
    for (int j = i + 1; j < data.d; ++j) {
      metric.set(i, j, -plugin_mi(cols[static_cast<std::size_t>(i)],
                                  cols[static_cast<std::size_t>(j)], config));
    }
  }
  return metric;
}

}  // namespace kite
