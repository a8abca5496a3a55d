// rclass run / rclass generate

#include <CLI11.hpp>
#include <atomic>
#include <csignal>
#include <iostream>
#include <thread>

#include "rclass/errors.hpp"
#include "rclass/harness/config.hpp"
#include "rclass/harness/dataset.hpp"
#include "rclass/harness/prequential.hpp"
#include "rclass/harness/report.hpp"
#include "rclass/harness/service.hpp"
#include "rclass/harness/snapshot.hpp"
#include "rclass/harness/synthetic.hpp"

namespace {

using namespace rclass;
using namespace rclass::harness;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

struct RunArgs {
  std::string data;
  std::size_t train = 0;
  std::size_t test = 0;
  bool train_set = false;
  std::optional<double> budget;
  std::string config;
  std::string serve;
  std::string oracle = "file";
  std::optional<std::uint64_t> seed;
  int folds = 0;
  std::string snapshot;
  std::string trace_dir = ".";
  int timeout_ms = 30000;
};

int do_run(const RunArgs& a) {
  Dataset data = load_dataset(a.data);
  HyperParams cfg = a.config.empty() ? HyperParams{} : load_config(a.config);
  if (a.budget) cfg.budget = *a.budget;
  if (a.seed) cfg.seed = *a.seed;
  cfg.validate();

  RunOptions opts;
  opts.n_test = a.test;
  opts.n_train = a.train_set ? a.train : data.samples.size() - std::min(a.test, data.samples.size());
  if (opts.n_train + opts.n_test > data.samples.size()) {
    throw ConfigError("--train + --test exceeds the " + std::to_string(data.samples.size()) +
                      " rows in " + a.data);
  }

  if (a.folds > 0) {
    const FoldSummary sum = run_folds(data, cfg, opts, a.folds, cfg.seed);
    std::cout << to_json(sum).dump(2) << '\n';
    return 0;
  }

  std::unique_ptr<LabelHub> hub;
  std::unique_ptr<Service> service;
  std::unique_ptr<HubObserver> observer;
  if (!a.serve.empty() || a.oracle == "interactive") {
    hub = std::make_unique<LabelHub>(data.n_classes);
    observer = std::make_unique<HubObserver>(*hub);
  }
  if (!a.serve.empty()) {
    const auto [host, port] = parse_bind_address(a.serve);
    service = std::make_unique<Service>(*hub);
    service->start(host, port);
    std::cerr << "serving on " << host << ':' << service->port() << '\n';
  } else if (a.oracle == "interactive") {
    throw ConfigError("--oracle interactive needs --serve");
  }

  std::unique_ptr<Oracle> oracle;
  if (a.oracle == "interactive") {
    oracle = std::make_unique<InteractiveOracle>(*hub, std::chrono::milliseconds(a.timeout_ms));
  } else {
    oracle = std::make_unique<FileOracle>();
  }

  std::vector<StreamSample> stream = data.samples;
  MinMaxScaler::fit(stream, opts.n_train).apply_all(stream);
  Classifier model(cfg, data.n_classes, data.n_features());
  const RunReport rep = run_prequential(model, stream, *oracle, opts, observer.get());

  std::cout << to_json(rep).dump(2) << '\n';
  write_traces(rep, a.trace_dir);
  if (!a.snapshot.empty()) snapshot_save(model.state(), a.snapshot);

  if (service) {
    hub->publish_status(engine_status(model.state()));
    std::cerr << "run finished; still serving, interrupt to exit\n";
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    service->stop();
  }
  return 0;
}

struct GenArgs {
  std::string kind = "gaussian";
  std::size_t n = 1000;
  std::uint64_t seed = 42;
  int classes = 4;
  int features = 4;
  double minority = 0.05;
  std::string out;
};

int do_generate(const GenArgs& g) {
  std::vector<StreamSample> s;
  int u = g.features;
  if (g.kind == "gaussian") {
    GaussianSpec spec;
    spec.n_classes = g.classes;
    spec.n_features = g.features;
    s = gaussian_stream(g.n, spec, g.seed);
  } else if (g.kind == "drift") {
    s = drifting_stream(g.n, g.seed);
    u = 4;
  } else if (g.kind == "toolwear") {
    s = tool_wear_like(g.seed);
    u = 12;
  } else if (g.kind == "imbalanced") {
    s = imbalanced_stream(g.n, g.minority, g.seed);
    u = 2;
  } else {
    throw ConfigError("unknown --kind " + g.kind);
  }
  write_dataset(g.out, s, u);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recurrent evolving fuzzy classifier with budgeted active learning"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "prequential run over a CSV dataset");
  run->add_option("--data", ra.data, "dataset CSV")->required()->check(CLI::ExistingFile);
  auto* train_opt = run->add_option("--train", ra.train, "training prefix length");
  run->add_option("--test", ra.test, "test suffix length");
  run->add_option("--budget", ra.budget, "label budget B in [0,1]");
  run->add_option("--config", ra.config, "key = value hyperparameter file")
      ->check(CLI::ExistingFile);
  run->add_option("--serve", ra.serve, "serve the JSON protocol on host:port");
  run->add_option("--oracle", ra.oracle, "label source")
      ->check(CLI::IsMember({"file", "interactive"}));
  run->add_option("--seed", ra.seed, "random seed");
  run->add_option("--folds", ra.folds, "random-permutation runs (mean/std report)");
  run->add_option("--snapshot", ra.snapshot, "write the final model here");
  run->add_option("--trace-dir", ra.trace_dir, "directory for the CSV traces");
  run->add_option("--timeout-ms", ra.timeout_ms, "interactive label deadline");

  GenArgs ga;
  auto* gen = app.add_subcommand("generate", "write a synthetic dataset");
  gen->add_option("--kind", ga.kind)->check(
      CLI::IsMember({"gaussian", "drift", "toolwear", "imbalanced"}));
  gen->add_option("--n", ga.n, "samples");
  gen->add_option("--seed", ga.seed);
  gen->add_option("--classes", ga.classes);
  gen->add_option("--features", ga.features);
  gen->add_option("--minority", ga.minority);
  gen->add_option("--out", ga.out)->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) {
      ra.train_set = train_opt->count() > 0;
      return do_run(ra);
    }
    return do_generate(ga);
  } catch (const rclass::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
