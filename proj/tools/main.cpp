#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "kite/run.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> metric;
  std::optional<std::string> learner;
  std::optional<std::string> distortion;
  std::optional<int> replications;
  std::optional<int> n_train;
  std::optional<int> n_heldout;
};

void add_common_options(CLI::App& cmd, CommonArgs& args) {
  cmd.add_option("--config", args.config_path, "Path to a JSON run configuration")
      ->check(CLI::ExistingFile);
  cmd.add_option("--out", args.out_dir, "Directory that output paths are resolved against");
  cmd.add_option("--seed", args.seed, "Override the configured seed");
  cmd.add_option("--metric", args.metric, "Override the metric: discrete|copula-mi|plugin-mi");
  cmd.add_option("--learner", args.learner, "Override the learner: mst|mtg");
  cmd.add_option("--distortion", args.distortion,
                 "Override the distortion: none|boxcox|nonparanormal");
  cmd.add_option("--replications", args.replications, "Override the replication count");
  cmd.add_option("--n-train", args.n_train, "Override the training sample size");
  cmd.add_option("--n-heldout", args.n_heldout, "Override the held-out sample size");
}

kite::RunConfig resolve_config(const CommonArgs& args) {
  kite::json doc = kite::json::object();
  if (!args.config_path.empty()) doc = kite::json::parse(kite::read_file(args.config_path));
  if (args.seed) doc["seed"] = *args.seed;
  if (args.metric) doc["metric"] = *args.metric;
  if (args.learner) doc["learner"] = *args.learner;
  if (args.distortion) doc["distortion"] = *args.distortion;
  if (args.replications) doc["replications"] = *args.replications;
  if (args.n_train) doc["n_train"] = *args.n_train;
  if (args.n_heldout) doc["n_heldout"] = *args.n_heldout;
  kite::RunConfig config = kite::parse_run_config(doc);
  if (!config.precision_file.empty()) {
    config.precision_file = (fs::path(args.out_dir) / config.precision_file).string();
  }
  return config;
}

fs::path resolve(const CommonArgs& args, const std::string& relative) {
  return fs::path(args.out_dir) / relative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy forest and triangle-free graph learning toolkit"};
  app.require_subcommand(1);

  CommonArgs args;

  auto* generate = app.add_subcommand(
      "generate", "Sample a synthetic instance: train/heldout CSVs, truth edges, model JSON");
  add_common_options(*generate, args);

  auto* metric = app.add_subcommand("metric", "Compute a pairwise metric matrix from a dataset");
  add_common_options(*metric, args);
  std::string metric_data = "train.csv";
  std::string metric_out = "metric.csv";
  metric->add_option("--data", metric_data, "Input dataset CSV (relative to --out)");
  metric->add_option("--matrix", metric_out, "Output metric CSV (relative to --out)");

  auto* learn = app.add_subcommand("learn", "Run a greedy learner on a metric matrix");
  add_common_options(*learn, args);
  std::string learn_metric = "metric.csv";
  std::string learn_graph = "graph.edges";
  std::string learn_truth;
  std::string learn_records = "records.jsonl";
  learn->add_option("--matrix", learn_metric, "Input metric CSV (relative to --out)");
  learn->add_option("--graph", learn_graph, "Output edge list (relative to --out)");
  learn->add_option("--truth", learn_truth,
                    "Optional truth edge list; enables recovery scoring");
  learn->add_option("--records", learn_records,
                    "JSONL file that recovery records are appended to");

  auto* prune = app.add_subcommand(
      "prune", "Learn on train data and prune the trace against the held-out split");
  add_common_options(*prune, args);
  std::string prune_train = "train.csv";
  std::string prune_heldout = "heldout.csv";
  std::string prune_graph = "pruned.edges";
  std::string prune_json = "prune.json";
  prune->add_option("--train", prune_train, "Training CSV (relative to --out)");
  prune->add_option("--heldout", prune_heldout, "Held-out CSV (relative to --out)");
  prune->add_option("--graph", prune_graph, "Output pruned edge list (relative to --out)");
  prune->add_option("--report", prune_json, "Output pruning report JSON (relative to --out)");

  auto* density = app.add_subcommand(
      "density", "Fit a forest density on train data and score the held-out split");
  add_common_options(*density, args);
  std::string density_train = "train.csv";
  std::string density_heldout = "heldout.csv";
  std::string density_graph = "forest.edges";
  std::string density_json = "density.json";
  density->add_option("--train", density_train, "Training CSV (relative to --out)");
  density->add_option("--heldout", density_heldout, "Held-out CSV (relative to --out)");
  density->add_option("--graph", density_graph, "Forest edge list (relative to --out)");
  density->add_option("--report", density_json, "Output report JSON (relative to --out)");

  auto* bench = app.add_subcommand(
      "bench", "Run the full generate/learn/prune/density pipeline over replications");
  add_common_options(*bench, args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      kite::cmd_generate(resolve_config(args), fs::path(args.out_dir));
    } else if (metric->parsed()) {
      kite::cmd_metric(resolve(args, metric_data), resolve_config(args),
                       resolve(args, metric_out));
    } else if (learn->parsed()) {
      const kite::RunConfig config = resolve_config(args);
      std::optional<fs::path> truth;
      if (!learn_truth.empty()) truth = resolve(args, learn_truth);
      kite::cmd_learn(resolve(args, learn_metric), config.learner, truth,
                      resolve(args, learn_graph), resolve(args, learn_records));
    } else if (prune->parsed()) {
      kite::cmd_prune(resolve(args, prune_train), resolve(args, prune_heldout),
                      resolve_config(args), resolve(args, prune_graph),
                      resolve(args, prune_json));
    } else if (density->parsed()) {
      kite::cmd_density(resolve(args, density_train), resolve(args, density_heldout),
                        resolve(args, density_graph), resolve_config(args),
                        resolve(args, density_json));
    } else if (bench->parsed()) {
      kite::run_bench(resolve_config(args), fs::path(args.out_dir));
    }
  } catch (const std::exception& error) {
    std::cerr << kite::json{{"error", error.what()}}.dump() << '\n';
    return 1;
  }
  return 0;
}
