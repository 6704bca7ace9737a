#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "kite/graph.hpp"

namespace kite {

// Categorical data table; labels live in {0, ..., alphabet-1}. The alphabet
// size is declared, not inferred, so unseen categories stay visible as zero
// marginals downstream.
struct DiscreteDataset {
  int n = 0;
  int d = 0;
  int alphabet = 2;
  std::vector<int> cells;  // row-major n×d

  DiscreteDataset(int n_, int d_, int alphabet_)
      : n(n_), d(d_), alphabet(alphabet_),
        cells(static_cast<std::size_t>(n_) * static_cast<std::size_t>(d_), 0) {
    if (n < 1 || d < 1) throw std::invalid_argument("DiscreteDataset: n and d must be >= 1");
    if (alphabet < 2) throw std::invalid_argument("DiscreteDataset: alphabet must be >= 2");
  }

  DiscreteDataset(int n_, int d_, int alphabet_, std::vector<int> cells_)
      : DiscreteDataset(n_, d_, alphabet_) {
    if (cells_.size() != cells.size()) {
      throw std::invalid_argument("DiscreteDataset: cell count mismatch");
    }
    cells = std::move(cells_);
    for (const int c : cells) {
      if (c < 0 || c >= alphabet) {
        throw std::invalid_argument("DiscreteDataset: cell outside alphabet");
      }
    }
  }

  int at(int k, int j) const {
    return cells[static_cast<std::size_t>(k) * static_cast<std::size_t>(d) +
                 static_cast<std::size_t>(j)];
  }
  int& at(int k, int j) {
    return cells[static_cast<std::size_t>(k) * static_cast<std::size_t>(d) +
                 static_cast<std::size_t>(j)];
  }
};

// Joint probability table of one variable pair, with its two marginals.
struct JointProbMatrix {
  int alphabet = 2;
  std::vector<double> probs;         // row-major s×s; row = first variable
  std::vector<double> row_marginal;  // distribution of the first variable
  std::vector<double> col_marginal;  // distribution of the second variable

  explicit JointProbMatrix(int alphabet_, std::vector<double> probs_)
      : alphabet(alphabet_), probs(std::move(probs_)) {
    if (alphabet < 2) throw std::invalid_argument("JointProbMatrix: alphabet must be >= 2");
    const auto s = static_cast<std::size_t>(alphabet);
    if (probs.size() != s * s) throw std::invalid_argument("JointProbMatrix: size mismatch");
    double total = 0.0;
    row_marginal.assign(s, 0.0);
    col_marginal.assign(s, 0.0);
    for (std::size_t a = 0; a < s; ++a) {
      for (std::size_t b = 0; b < s; ++b) {
        const double p = probs[a * s + b];
        if (p < 0.0 || std::isnan(p)) {
          throw std::invalid_argument("JointProbMatrix: negative or NaN entry");
        }
        total += p;
        row_marginal[a] += p;
        col_marginal[b] += p;
      }
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw std::invalid_argument("JointProbMatrix: entries must sum to 1");
    }
  }

  double at(int a, int b) const {
    return probs[static_cast<std::size_t>(a) * static_cast<std::size_t>(alphabet) +
                 static_cast<std::size_t>(b)];
  }
};

inline JointProbMatrix empirical_joint(const DiscreteDataset& data, int i, int j) {
  if (i == j) throw std::invalid_argument("empirical_joint: i and j must differ");
  if (i < 0 || j < 0 || i >= data.d || j >= data.d) {
    throw std::out_of_range("empirical_joint: column index out of range");
  }
  const auto s = static_cast<std::size_t>(data.alphabet);
  std::vector<double> probs(s * s, 0.0);
  const double w = 1.0 / static_cast<double>(data.n);
  for (int k = 0; k < data.n; ++k) {
    probs[static_cast<std::size_t>(data.at(k, i)) * s +
          static_cast<std::size_t>(data.at(k, j))] += w;
  }
  return JointProbMatrix(data.alphabet, std::move(probs));
}

// Determinant information distance
//   d = -log|det P_ij| + 0.5 log det P_ii + 0.5 log det P_jj,
// where P_ii, P_jj are the diagonal marginal matrices of the joint. Singular
// joints and zero marginals map to +inf.
inline double info_distance(const JointProbMatrix& joint) {
  constexpr double kSingular = 1e-12;
  const int s = joint.alphabet;
  const Eigen::Map<const Eigen::MatrixXd> p(joint.probs.data(), s, s);
  const double det_joint = std::abs(p.determinant());
  double log_marginals = 0.0;
  for (int a = 0; a < s; ++a) {
    const double ra = joint.row_marginal[static_cast<std::size_t>(a)];
    const double ca = joint.col_marginal[static_cast<std::size_t>(a)];
    if (ra < kSingular || ca < kSingular) return std::numeric_limits<double>::infinity();
    log_marginals += std::log(ra) + std::log(ca);
  }
  if (det_joint < kSingular) return std::numeric_limits<double>::infinity();
  return -std::log(det_joint) + 0.5 * log_marginals;
}

// Strictly increasing squash of the information distance onto [-1, 0);
// +inf maps to exactly 0, so uninformative pairs sort last in the stream.
inline double neg_exp_metric(double d) {
  if (std::isinf(d) && d > 0.0) return 0.0;
  const double v = -std::exp(-d);
  return v == 0.0 ? 0.0 : v;
}

inline MetricMatrix discrete_metric_matrix(const DiscreteDataset& data) {
  MetricMatrix metric(data.d);
  for (int i = 0; i < data.d; ++i) {
    for (int j = i + 1; j < data.d; ++j) {
      metric.set(i, j, neg_exp_metric(info_distance(empirical_joint(data, i, j))));
    }
  }
  return metric;
}

}  // namespace kite
