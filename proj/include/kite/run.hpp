#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kite/copula.hpp"
#include "kite/dataset.hpp"
#include "kite/discrete.hpp"
#include "kite/forest_density.hpp"
#include "kite/graph.hpp"
#include "kite/greedy.hpp"
#include "kite/io.hpp"
#include "kite/kernel.hpp"
#include "kite/plugin_mi.hpp"
#include "kite/prune.hpp"
#include "kite/synth.hpp"

namespace kite {

using json = nlohmann::json;

struct EstimatorConfig {
  double c0 = 0.22;
  double kappa1 = 0.01;
  double kappa2 = 100.0;
  int grid_m = 256;
  std::string kernel = "epanechnikov";
  double plugin_h = 0.0;  // 0 selects the n^(-1/4) rule
  double c1 = 1.0;
  double c2 = 1.0;
};

struct RunConfig {
  std::uint64_t seed = 1;
  GraphPattern pattern = Hub{20, 5};
  int n_train = 100;
  int n_heldout = 100;
  std::string distortion = "none";  // none | boxcox | nonparanormal
  double boxcox_nu = 2.5;
  std::string metric = "copula-mi";  // discrete | copula-mi | plugin-mi
  std::string learner = "mtg";       // mst | mtg
  EstimatorConfig estimator;
  int replications = 1;
  std::string precision_file;  // optional externally fitted precision matrix
};

namespace detail {

inline void check_keys(const json& object, std::initializer_list<const char*> allowed,
                       const char* where) {
  if (!object.is_object()) {
    throw std::invalid_argument(std::string(where) + ": expected a JSON object");
  }
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (const char* candidate : allowed) {
      if (key == candidate) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument(std::string(where) + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
void assign_if_present(const json& object, const char* key, T& target) {
  if (const auto it = object.find(key); it != object.end()) target = it->get<T>();
}

inline bool graph_has_triangle(const Graph& graph) {
  const auto adjacency = graph.adjacency();
  for (const auto& [i, j] : graph.edges()) {
    for (const int w : adjacency[static_cast<std::size_t>(i)]) {
      if (w != j && graph.has_edge(w, j)) return true;
    }
  }
  return false;
}

}  // namespace detail

inline json pattern_to_json(const GraphPattern& pattern) {
  json out;
  if (const auto* hub = std::get_if<Hub>(&pattern)) {
    out = {{"type", "hub"}, {"stars", hub->stars}, {"star_size", hub->star_size}};
  } else if (const auto* constellation = std::get_if<Constellation>(&pattern)) {
    out = {{"type", "constellation"},
           {"components", constellation->components},
           {"component_size", constellation->component_size},
           {"min_cycle_len", constellation->min_cycle_len}};
  } else if (const auto* band = std::get_if<Band>(&pattern)) {
    out = {{"type", "band"},
           {"bands", band->bands},
           {"band_size", band->band_size},
           {"width", band->width}};
  } else {
    const auto& cluster = std::get<Cluster>(pattern);
    out = {{"type", "cluster"},
           {"clusters", cluster.clusters},
           {"cluster_size", cluster.cluster_size},
           {"p", cluster.p}};
  }
  return out;
}

inline GraphPattern pattern_from_json(const json& object) {
  if (!object.is_object() || !object.contains("type")) {
    throw std::invalid_argument("pattern: expected an object with a 'type' key");
  }
  const std::string type = object.at("type").get<std::string>();
  if (type == "hub") {
    detail::check_keys(object, {"type", "stars", "star_size"}, "pattern(hub)");
    Hub hub{object.at("stars").get<int>(), object.at("star_size").get<int>()};
    return hub;
  }
  if (type == "constellation") {
    detail::check_keys(object, {"type", "components", "component_size", "min_cycle_len"},
                       "pattern(constellation)");
    Constellation constellation{object.at("components").get<int>(),
                                object.at("component_size").get<int>(), 4};
    detail::assign_if_present(object, "min_cycle_len", constellation.min_cycle_len);
    return constellation;
  }
  if (type == "band") {
    detail::check_keys(object, {"type", "bands", "band_size", "width"}, "pattern(band)");
    Band band{object.at("bands").get<int>(), object.at("band_size").get<int>(), 2};
    detail::assign_if_present(object, "width", band.width);
    return band;
  }
  if (type == "cluster") {
    detail::check_keys(object, {"type", "clusters", "cluster_size", "p"}, "pattern(cluster)");
    Cluster cluster{object.at("clusters").get<int>(), object.at("cluster_size").get<int>(), 0.2};
    detail::assign_if_present(object, "p", cluster.p);
    return cluster;
  }
  throw std::invalid_argument("pattern: unknown type '" + type + "'");
}

inline RunConfig parse_run_config(const json& object) {
  detail::check_keys(object,
                     {"seed", "pattern", "n_train", "n_heldout", "distortion", "boxcox_nu",
                      "metric", "learner", "estimator", "replications", "precision_file"},
                     "config");
  RunConfig config;
  detail::assign_if_present(object, "seed", config.seed);
  if (object.contains("pattern")) config.pattern = pattern_from_json(object.at("pattern"));
  detail::assign_if_present(object, "n_train", config.n_train);
  detail::assign_if_present(object, "n_heldout", config.n_heldout);
  detail::assign_if_present(object, "distortion", config.distortion);
  detail::assign_if_present(object, "boxcox_nu", config.boxcox_nu);
  detail::assign_if_present(object, "metric", config.metric);
  detail::assign_if_present(object, "learner", config.learner);
  detail::assign_if_present(object, "replications", config.replications);
  detail::assign_if_present(object, "precision_file", config.precision_file);
  if (object.contains("estimator")) {
    const auto& est = object.at("estimator");
    detail::check_keys(
        est, {"c0", "kappa1", "kappa2", "grid_m", "kernel", "plugin_h", "c1", "c2"},
        "config.estimator");
    detail::assign_if_present(est, "c0", config.estimator.c0);
    detail::assign_if_present(est, "kappa1", config.estimator.kappa1);
    detail::assign_if_present(est, "kappa2", config.estimator.kappa2);
    detail::assign_if_present(est, "grid_m", config.estimator.grid_m);
    detail::assign_if_present(est, "kernel", config.estimator.kernel);
    detail::assign_if_present(est, "plugin_h", config.estimator.plugin_h);
    detail::assign_if_present(est, "c1", config.estimator.c1);
    detail::assign_if_present(est, "c2", config.estimator.c2);
  }

  if (config.n_train < 2 || config.n_heldout < 2) {
    throw std::invalid_argument("config: n_train and n_heldout must be >= 2");
  }
  if (config.distortion != "none" && config.distortion != "boxcox" &&
      config.distortion != "nonparanormal") {
    throw std::invalid_argument("config: distortion must be none|boxcox|nonparanormal");
  }
  if (!(config.boxcox_nu > 0.0)) throw std::invalid_argument("config: boxcox_nu must be > 0");
  if (config.metric != "discrete" && config.metric != "copula-mi" &&
      config.metric != "plugin-mi") {
    throw std::invalid_argument("config: metric must be discrete|copula-mi|plugin-mi");
  }
  if (config.learner != "mst" && config.learner != "mtg") {
    throw std::invalid_argument("config: learner must be mst|mtg");
  }
  if (config.replications < 1) throw std::invalid_argument("config: replications must be >= 1");
  if (!(config.estimator.c0 > 0.0) || !(config.estimator.c1 > 0.0) ||
      !(config.estimator.c2 > 0.0)) {
    throw std::invalid_argument("config: estimator scale constants must be positive");
  }
  if (!(config.estimator.kappa1 > 0.0) ||
      !(config.estimator.kappa1 < config.estimator.kappa2)) {
    throw std::invalid_argument("config: need 0 < kappa1 < kappa2");
  }
  if (config.estimator.grid_m < 16) throw std::invalid_argument("config: grid_m must be >= 16");
  if (config.estimator.plugin_h < 0.0 || config.estimator.plugin_h > 1.0) {
    throw std::invalid_argument("config: plugin_h must be in [0, 1]");
  }
  kernel_by_name(config.estimator.kernel);  // throws on unknown names
  pattern_dim(config.pattern);
  return config;
}

inline json run_config_to_json(const RunConfig& config) {
  return json{{"seed", config.seed},
              {"pattern", pattern_to_json(config.pattern)},
              {"n_train", config.n_train},
              {"n_heldout", config.n_heldout},
              {"distortion", config.distortion},
              {"boxcox_nu", config.boxcox_nu},
              {"metric", config.metric},
              {"learner", config.learner},
              {"estimator",
               {{"c0", config.estimator.c0},
                {"kappa1", config.estimator.kappa1},
                {"kappa2", config.estimator.kappa2},
                {"grid_m", config.estimator.grid_m},
                {"kernel", config.estimator.kernel},
                {"plugin_h", config.estimator.plugin_h},
                {"c1", config.estimator.c1},
                {"c2", config.estimator.c2}}},
              {"replications", config.replications},
              {"precision_file", config.precision_file}};
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(json::parse(read_file(path)));
}

struct ResultRecord {
  int replication = 0;
  RecoveryMetrics recovery{};
  bool truth_triangle_free = false;
  double ll_kite = 0.0;
  double ll_fde = 0.0;
  std::optional<double> ll_gauss;
  std::vector<double> objective_per_k;
  int k_hat = 0;
  int pruned_edges = 0;
  double elapsed_ms = 0.0;
};

inline json result_record_to_json(const ResultRecord& record) {
  json out{{"replication", record.replication},
           {"recovery",
            {{"precision", record.recovery.precision},
             {"recall", record.recovery.recall},
             {"f1", record.recovery.f1},
             {"hamming", record.recovery.hamming},
             {"exact", record.recovery.exact}}},
           {"truth_triangle_free", record.truth_triangle_free},
           {"ll_kite", record.ll_kite},
           {"ll_fde", record.ll_fde},
           {"objective_per_k", record.objective_per_k},
           {"k_hat", record.k_hat},
           {"pruned_edges", record.pruned_edges},
           {"elapsed_ms", record.elapsed_ms}};
  if (record.ll_gauss) out["ll_gauss"] = *record.ll_gauss;
  return out;
}

inline ResultRecord result_record_from_json(const json& object) {
  detail::check_keys(object,
                     {"replication", "recovery", "truth_triangle_free", "ll_kite", "ll_fde",
                      "ll_gauss", "objective_per_k", "k_hat", "pruned_edges", "elapsed_ms"},
                     "result_record");
  ResultRecord record;
  record.replication = object.at("replication").get<int>();
  const auto& recovery = object.at("recovery");
  record.recovery.precision = recovery.at("precision").get<double>();
  record.recovery.recall = recovery.at("recall").get<double>();
  record.recovery.f1 = recovery.at("f1").get<double>();
  record.recovery.hamming = recovery.at("hamming").get<int>();
  record.recovery.exact = recovery.at("exact").get<bool>();
  record.truth_triangle_free = object.at("truth_triangle_free").get<bool>();
  record.ll_kite = object.at("ll_kite").get<double>();
  record.ll_fde = object.at("ll_fde").get<double>();
  if (object.contains("ll_gauss")) record.ll_gauss = object.at("ll_gauss").get<double>();
  record.objective_per_k = object.at("objective_per_k").get<std::vector<double>>();
  record.k_hat = object.at("k_hat").get<int>();
  record.pruned_edges = object.at("pruned_edges").get<int>();
  record.elapsed_ms = object.at("elapsed_ms").get<double>();
  return record;
}

inline CopulaConfig copula_config(const EstimatorConfig& estimator) {
  return CopulaConfig{estimator.c0, estimator.kappa1, estimator.kappa2, estimator.grid_m,
                      kernel_by_name(estimator.kernel)};
}

inline PluginConfig plugin_config(const EstimatorConfig& estimator) {
  return PluginConfig{estimator.plugin_h, estimator.kappa1, estimator.kappa2,
                      estimator.grid_m, kernel_by_name(estimator.kernel)};
}

struct GeneratedInstance {
  Graph truth;
  GaussianModel model;
  ContinuousDataset train;
  ContinuousDataset heldout;
};

// One synthetic instance from a single replication stream: pattern graph,
// precision model, train and held-out draws, then the configured distortion.
inline GeneratedInstance generate_instance(const RunConfig& config, std::uint64_t subseed) {
  SplitMix64 stage(subseed);
  const std::uint64_t graph_seed = stage();
  const std::uint64_t precision_seed = stage();
  const std::uint64_t train_seed = stage();
  const std::uint64_t heldout_seed = stage();
  Graph truth = make_pattern_graph(config.pattern, graph_seed);
  GaussianModel model = make_precision(truth, precision_seed);
  ContinuousDataset train = sample_gaussian(model, config.n_train, train_seed);
  ContinuousDataset heldout = sample_gaussian(model, config.n_heldout, heldout_seed);
  if (config.distortion == "boxcox") {
    train = box_cox(train, config.boxcox_nu);
    heldout = box_cox(heldout, config.boxcox_nu);
  } else if (config.distortion == "nonparanormal") {
    train = nonparanormal(train, model);
    heldout = nonparanormal(heldout, model);
  }
  return GeneratedInstance{std::move(truth), std::move(model), std::move(train),
                           std::move(heldout)};
}

inline MetricMatrix compute_metric(const ContinuousDataset& data, const RunConfig& config) {
  if (config.metric == "copula-mi") return mi_matrix_copula(data, copula_config(config.estimator));
  if (config.metric == "plugin-mi") return mi_matrix_plugin(data, plugin_config(config.estimator));
  throw std::invalid_argument("compute_metric: method '" + config.metric +
                              "' does not apply to continuous data");
}

inline void cmd_generate(const RunConfig& config, const std::filesystem::path& out_dir) {
  const auto instance = generate_instance(config, config.seed);
  json model_json{{"d", instance.truth.dim()},
                  {"mu", std::vector<double>(instance.model.mu.data(),
                                             instance.model.mu.data() + instance.model.mu.size())},
                  {"edges", json::array()},
                  {"omega", json::array()}};
  for (const auto& [i, j] : instance.truth.edges()) {
    model_json["edges"].push_back(json::array({i, j}));
  }
  for (int i = 0; i < instance.truth.dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < instance.truth.dim(); ++j) row.push_back(instance.model.omega(i, j));
    model_json["omega"].push_back(std::move(row));
  }
  std::filesystem::create_directories(out_dir);
  write_continuous_csv(out_dir / "train.csv", instance.train);
  write_continuous_csv(out_dir / "heldout.csv", instance.heldout);
  write_edge_list(out_dir / "truth.edges", instance.truth);
  atomic_write(out_dir / "model.json", model_json.dump(2) + "\n");
}

inline void cmd_metric(const std::filesystem::path& data_file, const RunConfig& config,
                       const std::filesystem::path& out_file) {
  MetricMatrix metric(1);
  if (config.metric == "discrete") {
    metric = discrete_metric_matrix(read_discrete_csv(data_file));
  } else {
    metric = compute_metric(read_continuous_csv(data_file), config);
  }
  write_metric_csv(out_file, metric);
}

struct LearnOutcome {
  Graph graph;
  std::optional<RecoveryMetrics> recovery;
};

inline LearnOutcome cmd_learn(const std::filesystem::path& metric_file,
                              const std::string& learner,
                              const std::optional<std::filesystem::path>& truth_file,
                              const std::filesystem::path& out_graph_file,
                              const std::optional<std::filesystem::path>& record_file) {
  if (learner != "mst" && learner != "mtg") {
    throw std::invalid_argument("cmd_learn: learner must be mst|mtg");
  }
  const MetricMatrix metric = read_metric_csv(metric_file);
  const Graph graph = learner == "mst" ? mst(metric) : mtg(metric);
  if (learner == "mst" && detail::graph_has_cycle(graph)) {
    throw std::logic_error("cmd_learn: tree learner produced a cycle");
  }
  if (learner == "mtg" && detail::graph_has_triangle(graph)) {
    throw std::logic_error("cmd_learn: triangle-free learner produced a triangle");
  }

  std::optional<RecoveryMetrics> recovery;
  std::optional<bool> truth_triangle_free;
  if (truth_file) {
    const Graph truth = read_edge_list(*truth_file);
    recovery = recovery_metrics(graph, truth);
    truth_triangle_free = !detail::graph_has_triangle(truth);
  }

  write_edge_list(out_graph_file, graph);
  if (recovery && record_file) {
    json line{{"learner", learner},
              {"edges", graph.edge_count()},
              {"recovery",
               {{"precision", recovery->precision},
                {"recall", recovery->recall},
                {"f1", recovery->f1},
                {"hamming", recovery->hamming},
                {"exact", recovery->exact}}},
              {"truth_triangle_free", *truth_triangle_free}};
    std::ofstream out(*record_file, std::ios::app);
    if (!out) throw std::runtime_error("cmd_learn: cannot open " + record_file->string());
    out << line.dump() << '\n';
  }
  return LearnOutcome{graph, recovery};
}

struct PruneOutcome {
  GreedyTrace trace;
  PruneResult result;
};

// Train-split metric feeds the greedy trace; the held-out split supplies the
// MI and entropy values that score each prefix.
inline PruneOutcome run_prune(const ContinuousDataset& train, const ContinuousDataset& heldout,
                              const RunConfig& config) {
  if (train.d != heldout.d) throw std::invalid_argument("run_prune: dimension mismatch");
  const MetricMatrix train_metric = compute_metric(train, config);
  GreedyTrace trace = run_greedy(train_metric);

  const KernelSpec& kernel = kernel_by_name(config.estimator.kernel);
  MetricMatrix heldout_mi(heldout.d);
  std::vector<std::vector<double>> cols(static_cast<std::size_t>(heldout.d));
  for (int j = 0; j < heldout.d; ++j) cols[static_cast<std::size_t>(j)] = heldout.column(j);
  for (int i = 0; i < heldout.d; ++i) {
    for (int j = i + 1; j < heldout.d; ++j) {
      double mi = 0.0;
      if (config.metric == "plugin-mi") {
        mi = plugin_mi(cols[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)],
                       plugin_config(config.estimator));
      } else {
        mi = mi_copula_pair(cols[static_cast<std::size_t>(i)],
                            cols[static_cast<std::size_t>(j)], copula_config(config.estimator));
      }
      heldout_mi.set(i, j, mi);
    }
  }
  std::vector<double> entropy(static_cast<std::size_t>(heldout.d));
  for (int j = 0; j < heldout.d; ++j) {
    const auto& col = cols[static_cast<std::size_t>(j)];
    entropy[static_cast<std::size_t>(j)] =
        marginal_entropy(col, entropy_bandwidth(col), kernel);
  }
  PruneResult result = prune(trace, heldout_mi, entropy);
  return PruneOutcome{std::move(trace), std::move(result)};
}

inline void cmd_prune(const std::filesystem::path& train_file,
                      const std::filesystem::path& heldout_file, const RunConfig& config,
                      const std::filesystem::path& out_graph_file,
                      const std::filesystem::path& out_json_file) {
  const auto train = read_continuous_csv(train_file);
  const auto heldout = read_continuous_csv(heldout_file);
  const auto outcome = run_prune(train, heldout, config);
  const Graph forest = mst_prefix(outcome.trace, outcome.result.k_hat);
  json out{{"objective_per_k", outcome.result.objective_per_k},
           {"argmax_set", outcome.result.argmax_set},
           {"k_hat", outcome.result.k_hat},
           {"pruned_edges", outcome.result.pruned_graph.edge_count()},
           {"forest", json::array()}};
  for (const auto& [i, j] : forest.edges()) out["forest"].push_back(json::array({i, j}));
  write_edge_list(out_graph_file, outcome.result.pruned_graph);
  atomic_write(out_json_file, out.dump(2) + "\n");
}

inline void cmd_density(const std::filesystem::path& train_file,
                        const std::filesystem::path& heldout_file,
                        const std::filesystem::path& graph_file, const RunConfig& config,
                        const std::filesystem::path& out_json_file) {
  const auto train = read_continuous_csv(train_file);
  const auto heldout = read_continuous_csv(heldout_file);
  const Graph forest = read_edge_list(graph_file);
  const ForestDensityConfig density_config{config.estimator.c1, config.estimator.c2,
                                           kernel_by_name(config.estimator.kernel)};
  const auto fit = fit_forest_density(train, forest, density_config);
  const json out{{"ll_kite", heldout_ll(fit, heldout, LikelihoodMode::kite)},
                 {"ll_fde", heldout_ll(fit, heldout, LikelihoodMode::fde)},
                 {"edges", forest.edge_count()},
                 {"isolated", static_cast<int>(fit.isolated.size())}};
  atomic_write(out_json_file, out.dump(2) + "\n");
}

inline ResultRecord run_replication(const RunConfig& config, int replication,
                                    const std::optional<Eigen::MatrixXd>& external_precision) {
  const auto start = std::chrono::steady_clock::now();
  const auto instance =
      generate_instance(config, config.seed + static_cast<std::uint64_t>(replication));
  const auto outcome = run_prune(instance.train, instance.heldout, config);

  const Graph estimate = config.learner == "mst"
                             ? mst_prefix(outcome.trace, outcome.result.k_hat)
                             : outcome.result.pruned_graph;
  const Graph forest = mst_prefix(outcome.trace, outcome.result.k_hat);

  ResultRecord record;
  record.replication = replication;
  record.recovery = recovery_metrics(estimate, instance.truth);
  record.truth_triangle_free = !detail::graph_has_triangle(instance.truth);
  const ForestDensityConfig density_config{config.estimator.c1, config.estimator.c2,
                                           kernel_by_name(config.estimator.kernel)};
  const auto fit = fit_forest_density(instance.train, forest, density_config);
  record.ll_kite = heldout_ll(fit, instance.heldout, LikelihoodMode::kite);
  record.ll_fde = heldout_ll(fit, instance.heldout, LikelihoodMode::fde);
  if (external_precision) {
    Eigen::VectorXd mean(instance.train.d);
    for (int j = 0; j < instance.train.d; ++j) {
      double total = 0.0;
      for (int k = 0; k < instance.train.n; ++k) total += instance.train.at(k, j);
      mean(j) = total / instance.train.n;
    }
    record.ll_gauss = heldout_ll_gauss(mean, *external_precision, instance.heldout);
  }
  record.objective_per_k = outcome.result.objective_per_k;
  record.k_hat = outcome.result.k_hat;
  record.pruned_edges = outcome.result.pruned_graph.edge_count();
  record.elapsed_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return record;
}

inline std::vector<ResultRecord> run_bench(const RunConfig& config,
                                           const std::filesystem::path& out_dir) {
  std::optional<Eigen::MatrixXd> external_precision;
  if (!config.precision_file.empty()) {
    const std::string text = read_file(config.precision_file);
    const auto lines = detail::nonempty_lines(text);
    const int d = static_cast<int>(lines.size());
    Eigen::MatrixXd omega(d, d);
    for (int i = 0; i < d; ++i) {
      const auto fields = detail::split(lines[static_cast<std::size_t>(i)], ',');
      if (static_cast<int>(fields.size()) != d) {
        throw std::invalid_argument("precision_file: expected a square matrix");
      }
      for (int j = 0; j < d; ++j) {
        omega(i, j) = parse_double(fields[static_cast<std::size_t>(j)], "precision_file");
      }
    }
    external_precision = std::move(omega);
  }

  std::vector<ResultRecord> records;
  records.reserve(static_cast<std::size_t>(config.replications));
  for (int r = 0; r < config.replications; ++r) {
    try {
      records.push_back(run_replication(config, r, external_precision));
    } catch (const std::exception& error) {
      throw std::runtime_error("replication " + std::to_string(r) + ": " + error.what());
    }
  }

  std::string jsonl;
  for (const auto& record : records) jsonl += result_record_to_json(record).dump() + "\n";

  std::size_t curve_len = 0;
  for (const auto& record : records) {
    curve_len = std::max(curve_len, record.objective_per_k.size());
  }
  double mean_precision = 0.0, mean_recall = 0.0, mean_f1 = 0.0, mean_hamming = 0.0;
  double mean_ll_kite = 0.0, mean_ll_fde = 0.0, mean_pruned = 0.0;
  for (const auto& record : records) {
    mean_precision += record.recovery.precision;
    mean_recall += record.recovery.recall;
    mean_f1 += record.recovery.f1;
    mean_hamming += record.recovery.hamming;
    mean_ll_kite += record.ll_kite;
    mean_ll_fde += record.ll_fde;
    mean_pruned += record.pruned_edges;
  }
  const double count = static_cast<double>(records.size());
  std::string summary;
  summary += "# replications=" + std::to_string(records.size()) + "\n";
  summary += "# mean_precision=" + format_double(mean_precision / count) + "\n";
  summary += "# mean_recall=" + format_double(mean_recall / count) + "\n";
  summary += "# mean_f1=" + format_double(mean_f1 / count) + "\n";
  summary += "# mean_hamming=" + format_double(mean_hamming / count) + "\n";
  summary += "# mean_ll_kite=" + format_double(mean_ll_kite / count) + "\n";
  summary += "# mean_ll_fde=" + format_double(mean_ll_fde / count) + "\n";
  summary += "# mean_pruned_edges=" + format_double(mean_pruned / count) + "\n";
  summary += "k,mean_objective,replications\n";
  for (std::size_t k = 0; k < curve_len; ++k) {
    double total = 0.0;
    int present = 0;
    for (const auto& record : records) {
      if (k < record.objective_per_k.size()) {
        total += record.objective_per_k[k];
        ++present;
      }
    }
    summary += std::to_string(k) + "," + format_double(total / present) + "," +
               std::to_string(present) + "\n";
  }

  std::filesystem::create_directories(out_dir);
  atomic_write(out_dir / "records.jsonl", jsonl);
  atomic_write(out_dir / "summary.csv", summary);
  return records;
}

}  // namespace kite
