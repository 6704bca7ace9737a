#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "kite/discrete.hpp"
#include "kite/graph.hpp"
#include "kite/rng.hpp"

namespace kite {

// Markov tree over categorical variables: a root marginal plus one
// row-stochastic conditional table per non-root vertex, oriented away from
// the root. conditionals[v] has rows indexed by the parent's symbol.
struct DiscreteTreeModel {
  Graph tree;
  int root = 0;
  int alphabet = 2;
  std::vector<double> root_marginal;
  std::vector<std::vector<double>> conditionals;  // indexed by vertex; empty at root

  explicit DiscreteTreeModel(Graph tree_) : tree(std::move(tree_)) {}
};

namespace detail {

// Parent array (-1 at the root) and a root-first visiting order.
struct TreeOrientation {
  std::vector<int> parent;
  std::vector<int> order;
};

inline TreeOrientation orient_tree(const Graph& tree, int root) {
  const int d = tree.dim();
  if (root < 0 || root >= d) throw std::invalid_argument("orient_tree: root out of range");
  if (tree.edge_count() != d - 1) {
    throw std::invalid_argument("orient_tree: edge count is not d - 1");
  }
  TreeOrientation out;
  out.parent.assign(static_cast<std::size_t>(d), -2);
  const auto adj = tree.adjacency();
  std::queue<int> frontier;
  out.parent[static_cast<std::size_t>(root)] = -1;
  frontier.push(root);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    out.order.push_back(u);
    for (const int w : adj[static_cast<std::size_t>(u)]) {
      if (out.parent[static_cast<std::size_t>(w)] == -2) {
        out.parent[static_cast<std::size_t>(w)] = u;
        frontier.push(w);
      }
    }
  }
  if (static_cast<int>(out.order.size()) != d) {
    throw std::invalid_argument("orient_tree: graph is not connected");
  }
  return out;
}

inline void check_stochastic_rows(const std::vector<double>& table, int s, const char* what) {
  if (table.size() != static_cast<std::size_t>(s) * static_cast<std::size_t>(s)) {
    throw std::invalid_argument(std::string(what) + ": table size mismatch");
  }
  for (int a = 0; a < s; ++a) {
    double total = 0.0;
    for (int b = 0; b < s; ++b) {
      const double p = table[static_cast<std::size_t>(a) * static_cast<std::size_t>(s) +
                             static_cast<std::size_t>(b)];
      if (p < 0.0 || std::isnan(p)) {
        throw std::invalid_argument(std::string(what) + ": negative entry");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw std::invalid_argument(std::string(what) + ": row does not sum to 1");
    }
  }
}

}  // namespace detail

inline void validate_tree_model(const DiscreteTreeModel& model) {
  const int d = model.tree.dim();
  const int s = model.alphabet;
  if (s < 2) throw std::invalid_argument("DiscreteTreeModel: alphabet must be >= 2");
  detail::orient_tree(model.tree, model.root);  // throws unless a spanning tree
  if (model.root_marginal.size() != static_cast<std::size_t>(s)) {
    throw std::invalid_argument("DiscreteTreeModel: root marginal size mismatch");
  }
  double total = 0.0;
  for (const double p : model.root_marginal) {
    if (p < 0.0 || std::isnan(p)) {
      throw std::invalid_argument("DiscreteTreeModel: negative root marginal");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("DiscreteTreeModel: root marginal does not sum to 1");
  }
  if (model.conditionals.size() != static_cast<std::size_t>(d)) {
    throw std::invalid_argument("DiscreteTreeModel: conditionals must be indexed by vertex");
  }
  for (int v = 0; v < d; ++v) {
    if (v == model.root) continue;
    detail::check_stochastic_rows(model.conditionals[static_cast<std::size_t>(v)], s,
                                  "DiscreteTreeModel conditional");
  }
}

// Exact marginal of every vertex by ancestral propagation from the root.
inline std::vector<std::vector<double>> node_marginals(const DiscreteTreeModel& model) {
  validate_tree_model(model);
  const int d = model.tree.dim();
  const int s = model.alphabet;
  const auto orientation = detail::orient_tree(model.tree, model.root);
  std::vector<std::vector<double>> marginal(static_cast<std::size_t>(d));
  marginal[static_cast<std::size_t>(model.root)] = model.root_marginal;
  for (const int v : orientation.order) {
    if (v == model.root) continue;
    const int p = orientation.parent[static_cast<std::size_t>(v)];
    const auto& parent_marg = marginal[static_cast<std::size_t>(p)];
    const auto& table = model.conditionals[static_cast<std::size_t>(v)];
    std::vector<double> marg(static_cast<std::size_t>(s), 0.0);
    for (int a = 0; a < s; ++a) {
      for (int b = 0; b < s; ++b) {
        marg[static_cast<std::size_t>(b)] +=
            parent_marg[static_cast<std::size_t>(a)] *
            table[static_cast<std::size_t>(a) * static_cast<std::size_t>(s) +
                  static_cast<std::size_t>(b)];
      }
    }
    marginal[static_cast<std::size_t>(v)] = std::move(marg);
  }
  return marginal;
}

// Exact joint of (X_i, X_j): the unique tree path makes the pair a Markov
// chain, so the joint is diag(marginal_i) times the product of one-step
// transition matrices along the path. Steps toward the root use the
// Bayes-reversed conditional.
inline JointProbMatrix tree_exact_pairwise(const DiscreteTreeModel& model, int i, int j) {
  if (i == j) throw std::invalid_argument("tree_exact_pairwise: i and j must differ");
  const int d = model.tree.dim();
  const int s = model.alphabet;
  const auto marginal = node_marginals(model);
  const auto orientation = detail::orient_tree(model.tree, model.root);

  // Vertex path i -> j via BFS restricted to the tree.
  const auto adj = model.tree.adjacency();
  std::vector<int> back(static_cast<std::size_t>(d), -2);
  std::queue<int> frontier;
  back[static_cast<std::size_t>(i)] = -1;
  frontier.push(i);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    if (u == j) break;
    for (const int w : adj[static_cast<std::size_t>(u)]) {
      if (back[static_cast<std::size_t>(w)] == -2) {
        back[static_cast<std::size_t>(w)] = u;
        frontier.push(w);
      }
    }
  }
  std::vector<int> path;
  for (int u = j; u != -1; u = back[static_cast<std::size_t>(u)]) path.push_back(u);
  std::reverse(path.begin(), path.end());

  const auto ss = static_cast<std::size_t>(s);
  std::vector<double> transport(ss * ss, 0.0);  // transport[a][b] = P(X_cur=b | X_i=a)
  for (std::size_t a = 0; a < ss; ++a) transport[a * ss + a] = 1.0;

  for (std::size_t step = 0; step + 1 < path.size(); ++step) {
    const int u = path[step];
    const int w = path[step + 1];
    std::vector<double> t(ss * ss, 0.0);  // one-step transition u -> w
    if (orientation.parent[static_cast<std::size_t>(w)] == u) {
      t = model.conditionals[static_cast<std::size_t>(w)];
    } else {
      const auto& cond = model.conditionals[static_cast<std::size_t>(u)];  // P(u | w)
      const auto& mu = marginal[static_cast<std::size_t>(u)];
      const auto& mw = marginal[static_cast<std::size_t>(w)];
      for (std::size_t a = 0; a < ss; ++a) {
        if (mu[a] <= 0.0) continue;
        for (std::size_t b = 0; b < ss; ++b) {
          t[a * ss + b] = mw[b] * cond[b * ss + a] / mu[a];
        }
      }
    }
    std::vector<double> next(ss * ss, 0.0);
    for (std::size_t a = 0; a < ss; ++a) {
      for (std::size_t m = 0; m < ss; ++m) {
        const double f = transport[a * ss + m];
        if (f == 0.0) continue;
        for (std::size_t b = 0; b < ss; ++b) next[a * ss + b] += f * t[m * ss + b];
      }
    }
    transport = std::move(next);
  }

  const auto& mi = marginal[static_cast<std::size_t>(i)];
  std::vector<double> joint(ss * ss, 0.0);
  for (std::size_t a = 0; a < ss; ++a) {
    for (std::size_t b = 0; b < ss; ++b) joint[a * ss + b] = mi[a] * transport[a * ss + b];
  }
  return JointProbMatrix(s, std::move(joint));
}

// Ancestral sampling; deterministic given the generator state.
inline DiscreteDataset sample_discrete_tree(const DiscreteTreeModel& model, int n,
                                            SplitMix64& gen) {
  if (n < 1) throw std::invalid_argument("sample_discrete_tree: n must be >= 1");
  validate_tree_model(model);
  const int d = model.tree.dim();
  const int s = model.alphabet;
  const auto orientation = detail::orient_tree(model.tree, model.root);
  DiscreteDataset data(n, d, s);
  std::vector<double> row(static_cast<std::size_t>(s));
  for (int k = 0; k < n; ++k) {
    data.at(k, model.root) = gen.categorical(model.root_marginal);
    for (const int v : orientation.order) {
      if (v == model.root) continue;
      const int p = orientation.parent[static_cast<std::size_t>(v)];
      const auto& table = model.conditionals[static_cast<std::size_t>(v)];
      const auto a = static_cast<std::size_t>(data.at(k, p));
      row.assign(table.begin() + static_cast<std::ptrdiff_t>(a * static_cast<std::size_t>(s)),
                 table.begin() + static_cast<std::ptrdiff_t>((a + 1) * static_cast<std::size_t>(s)));
      data.at(k, v) = gen.categorical(row);
    }
  }
  return data;
}

inline DiscreteDataset sample_discrete_tree(const DiscreteTreeModel& model, int n,
                                            std::uint64_t seed) {
  SplitMix64 gen(seed);
  return sample_discrete_tree(model, n, gen);
}

// Random tree model for tests: random spanning tree, Dirichlet(1) root
// marginal, conditional rows mixed half-and-half between the identity and a
// fresh Dirichlet(1) draw. min_edge_det > 0 resamples each conditional until
// |det| reaches the floor, which makes every edge strongly informative.
inline DiscreteTreeModel random_tree_model(int d, int s, SplitMix64& gen,
                                           double min_edge_det = 0.0) {
  if (d < 2) throw std::invalid_argument("random_tree_model: d must be >= 2");
  if (s < 2) throw std::invalid_argument("random_tree_model: alphabet must be >= 2");
  if (min_edge_det < 0.0 || min_edge_det >= 1.0) {
    throw std::invalid_argument("random_tree_model: min_edge_det must be in [0, 1)");
  }
  std::vector<int> label(static_cast<std::size_t>(d));
  std::iota(label.begin(), label.end(), 0);
  for (int v = d - 1; v > 0; --v) {
    std::swap(label[static_cast<std::size_t>(v)],
              label[static_cast<std::size_t>(gen.uniform_int(v + 1))]);
  }
  Graph tree(d);
  std::vector<int> parent(static_cast<std::size_t>(d), -1);
  for (int v = 1; v < d; ++v) {
    const int p = label[static_cast<std::size_t>(gen.uniform_int(v))];
    const int c = label[static_cast<std::size_t>(v)];
    tree.add_edge(p, c);
    parent[static_cast<std::size_t>(c)] = p;
  }
  DiscreteTreeModel model(tree);
  model.root = label[0];
  model.alphabet = s;

  const auto dirichlet_row = [&gen, s]() {
    std::vector<double> row(static_cast<std::size_t>(s));
    double total = 0.0;
    for (auto& x : row) {
      double u = 0.0;
      do {
        u = gen.uniform();
      } while (u <= 0.0);
      x = -std::log(u);
      total += x;
    }
    for (auto& x : row) x /= total;
    return row;
  };

  model.root_marginal = dirichlet_row();
  model.conditionals.assign(static_cast<std::size_t>(d), {});
  const auto ss = static_cast<std::size_t>(s);
  for (int v = 0; v < d; ++v) {
    if (v == model.root) continue;
    std::vector<double> table(ss * ss);
    while (true) {
      for (std::size_t a = 0; a < ss; ++a) {
        const auto row = dirichlet_row();
        for (std::size_t b = 0; b < ss; ++b) {
          table[a * ss + b] = 0.5 * (a == b ? 1.0 : 0.0) + 0.5 * row[b];
        }
      }
      if (min_edge_det == 0.0) break;
      const Eigen::Map<const Eigen::MatrixXd> t(table.data(), s, s);
      if (std::abs(t.determinant()) >= min_edge_det) break;
    }
    model.conditionals[static_cast<std::size_t>(v)] = std::move(table);
  }
  return model;
}

// Pairwise Ising model with spins {-1, +1}; theta runs parallel to
// graph.edges() and phi holds per-vertex external fields.
struct IsingModel {
  Graph graph;
  std::vector<double> theta;
  std::vector<double> phi;

  explicit IsingModel(Graph graph_)
      : graph(std::move(graph_)),
        theta(static_cast<std::size_t>(graph.edge_count()), 0.0),
        phi(static_cast<std::size_t>(graph.dim()), 0.0) {}
};

// Exact pairwise joint over {-1,+1}^2 (symbol 0 = spin -1, symbol 1 = +1)
// by full enumeration of the 2^d configurations.
inline JointProbMatrix ising_exact_pairwise(const IsingModel& model, int i, int j) {
  const int d = model.graph.dim();
  if (d > 15) throw std::invalid_argument("ising_exact_pairwise: enumeration bound is d <= 15");
  if (i == j) throw std::invalid_argument("ising_exact_pairwise: i and j must differ");
  if (model.theta.size() != static_cast<std::size_t>(model.graph.edge_count()) ||
      model.phi.size() != static_cast<std::size_t>(d)) {
    throw std::invalid_argument("ising_exact_pairwise: parameter size mismatch");
  }
  const auto& edges = model.graph.edges();
  std::vector<double> mass(4, 0.0);
  double z = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
    const auto spin = [mask](int v) {
      return (mask >> static_cast<unsigned>(v)) & 1u ? 1.0 : -1.0;
    };
    double energy = 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      energy += model.theta[e] * spin(edges[e].first) * spin(edges[e].second);
    }
    for (int v = 0; v < d; ++v) energy += model.phi[static_cast<std::size_t>(v)] * spin(v);
    const double w = std::exp(energy);
    z += w;
    const std::size_t a = (mask >> static_cast<unsigned>(i)) & 1u;
    const std::size_t b = (mask >> static_cast<unsigned>(j)) & 1u;
    mass[a * 2 + b] += w;
  }
  for (auto& m : mass) m /= z;
  return JointProbMatrix(2, std::move(mass));
}

// Exact information-distance matrices for the two model oracles.
inline MetricMatrix tree_exact_metric(const DiscreteTreeModel& model) {
  const int d = model.tree.dim();
  MetricMatrix metric(d);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      metric.set(i, j, info_distance(tree_exact_pairwise(model, i, j)));
    }
  }
  return metric;
}

inline MetricMatrix ising_exact_metric(const IsingModel& model) {
  const int d = model.graph.dim();
  MetricMatrix metric(d);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      metric.set(i, j, info_distance(ising_exact_pairwise(model, i, j)));
    }
  }
  return metric;
}

}  // namespace kite
