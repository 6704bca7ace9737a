#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace kite {

struct ContinuousDataset {
  int n = 0;
  int d = 0;
  std::vector<double> values;  // row-major n×d

  ContinuousDataset(int n_, int d_)
      : n(n_), d(d_),
        values(static_cast<std::size_t>(n_) * static_cast<std::size_t>(d_), 0.0) {
    if (n < 1 || d < 1) throw std::invalid_argument("ContinuousDataset: n and d must be >= 1");
  }

  ContinuousDataset(int n_, int d_, std::vector<double> values_)
      : ContinuousDataset(n_, d_) {
    if (values_.size() != values.size()) {
      throw std::invalid_argument("ContinuousDataset: cell count mismatch");
    }
    values = std::move(values_);
    for (const double v : values) {
      if (!std::isfinite(v)) throw std::invalid_argument("ContinuousDataset: non-finite cell");
    }
  }

  double at(int k, int j) const {
    return values[static_cast<std::size_t>(k) * static_cast<std::size_t>(d) +
                  static_cast<std::size_t>(j)];
  }
  double& at(int k, int j) {
    return values[static_cast<std::size_t>(k) * static_cast<std::size_t>(d) +
                  static_cast<std::size_t>(j)];
  }

  std::vector<double> column(int j) const {
    if (j < 0 || j >= d) throw std::out_of_range("ContinuousDataset: column out of range");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = at(k, j);
    return out;
  }
};

// Columnwise empirical-CDF values; every entry is a positive multiple of 1/n.
struct RankMatrix {
  int n = 0;
  int d = 0;
  std::vector<double> values;  // row-major n×d

  double at(int k, int j) const {
    return values[static_cast<std::size_t>(k) * static_cast<std::size_t>(d) +
                  static_cast<std::size_t>(j)];
  }

  std::vector<double> column(int j) const {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = at(k, j);
    return out;
  }
};

// Empirical CDF of one column: rank of x_k is (#{m : x_m <= x_k}) / n, so
// tied values share the maximal rank of their group.
inline std::vector<double> column_ranks(const std::vector<double>& column) {
  const std::size_t n = column.size();
  if (n == 0) throw std::invalid_argument("column_ranks: empty column");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&column](std::size_t a, std::size_t b) { return column[a] < column[b]; });
  std::vector<double> out(n, 0.0);
  std::size_t start = 0;
  while (start < n) {
    std::size_t stop = start + 1;
    while (stop < n && column[order[stop]] == column[order[start]]) ++stop;
    const double rank = static_cast<double>(stop) / static_cast<double>(n);
    for (std::size_t k = start; k < stop; ++k) out[order[k]] = rank;
    start = stop;
  }
  return out;
}

inline RankMatrix ranks(const ContinuousDataset& data) {
  RankMatrix out;
  out.n = data.n;
  out.d = data.d;
  out.values.assign(static_cast<std::size_t>(data.n) * static_cast<std::size_t>(data.d), 0.0);
  for (int j = 0; j < data.d; ++j) {
    const auto col = column_ranks(data.column(j));
    for (int k = 0; k < data.n; ++k) {
      out.values[static_cast<std::size_t>(k) * static_cast<std::size_t>(data.d) +
                 static_cast<std::size_t>(j)] = col[static_cast<std::size_t>(k)];
    }
  }
  return out;
}

}  // namespace kite
