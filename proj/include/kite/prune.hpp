#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kite/graph.hpp"
#include "kite/greedy.hpp"

namespace kite {

struct PruneResult {
  std::vector<double> objective_per_k;  // indexed by stream prefix length 0..K
  std::vector<int> argmax_set;
  int k_hat;
  Graph pruned_graph;
};

// Held-out pruning of a greedy trace. For every prefix length k the objective
// is the held-out score of the forest prefix: the sum of held-out MI over the
// accepted-so-far forest edges minus the sum of held-out marginal entropies
// over the vertices those edges touch. The selected graph is the triangle-free
// iterate at the largest maximizing prefix.
//
// heldout_mi must contain plain (non-negated) mutual information values.
inline PruneResult prune(const GreedyTrace& trace, const MetricMatrix& heldout_mi,
                         const std::vector<double>& heldout_entropy) {
  if (heldout_mi.dim() != trace.dim) {
    throw std::invalid_argument("prune: MI matrix dimension mismatch");
  }
  if (static_cast<int>(heldout_entropy.size()) != trace.dim) {
    throw std::invalid_argument("prune: entropy vector dimension mismatch");
  }

  const int total = static_cast<int>(trace.records.size());
  std::vector<double> objective_per_k;
  objective_per_k.reserve(static_cast<std::size_t>(total) + 1);
  std::vector<int> degree(static_cast<std::size_t>(trace.dim), 0);
  double objective = 0.0;
  objective_per_k.push_back(objective);
  for (const auto& record : trace.records) {
    if (record.mst_accepted) {
      const auto [i, j] = record.edge;
      objective += heldout_mi.at(i, j);
      if (degree[static_cast<std::size_t>(i)]++ == 0) {
        objective -= heldout_entropy[static_cast<std::size_t>(i)];
      }
      if (degree[static_cast<std::size_t>(j)]++ == 0) {
        objective -= heldout_entropy[static_cast<std::size_t>(j)];
      }
    }
    objective_per_k.push_back(objective);
  }

  const double best = *std::max_element(objective_per_k.begin(), objective_per_k.end());
  std::vector<int> argmax_set;
  for (int k = 0; k <= total; ++k) {
    if (objective_per_k[static_cast<std::size_t>(k)] == best) argmax_set.push_back(k);
  }
  const int k_hat = argmax_set.back();
  return PruneResult{std::move(objective_per_k), std::move(argmax_set), k_hat,
                     mtg_prefix(trace, k_hat)};
}

}  // namespace kite
