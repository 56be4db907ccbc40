// Command-line front end: synthetic data generation, graph estimation on CSV
// data, evaluation against a known graph, and the experiment drivers.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric failure.

#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "nbsel/experiments.hpp"
#include "nbsel/io.hpp"
#include "nbsel/neighborhood.hpp"
#include "nbsel/rng.hpp"
#include "nbsel/synth.hpp"

namespace fs = std::filesystem;
using namespace nbsel;

namespace {

struct Common {
  std::vector<Index> p;
  Index n = 0;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::string rule = "and";
  std::string kernel;
  int workers = 1;
  std::string out;
};

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text(out, text);
  }
}

int run_gen(const Common& c) {
  const Index p = c.p.empty() ? 100 : c.p.front();
  const Kernel kernel = parse_kernel(c.kernel.empty() ? "text" : c.kernel);
  const Stream root(c.seed);
  const GgmModel model = make_model(generate_geometric_graph(p, root.at(0), kernel));
  const DataMatrix data = sample_gaussian(model.covariance, c.n == 0 ? 100 : c.n, root.at(1));
  const fs::path dir = c.out.empty() ? fs::path(".") : fs::path(c.out);
  fs::create_directories(dir);
  write_text(dir / "model.json", model_to_json(model, kernel, root.at(0)));
  save_csv(data, dir / "data.csv");
  write_edges(model.graph.edges, dir / "truth.tsv");
  std::cerr << "p=" << p << " n=" << data.n() << " edges=" << model.graph.edges.size()
            << " (before pruning " << model.graph.raw_edge_count << ")\n";
  return 0;
}

int run_estimate(const Common& c, const std::string& data_path, double lambda, bool cv,
                 int folds) {
  if (data_path.empty()) throw Error(ErrorKind::ConfigError, "--data is required");
  if (c.rule != "and" && c.rule != "or")
    throw Error(ErrorKind::ConfigError, "--rule must be and or or");
  const Design design(standardize(load_csv(data_path)));
  PenaltySpec spec;
  spec.seed = c.seed;
  spec.alpha = c.alpha;
  if (cv) {
    spec.rule = PenaltyRule::CrossValidated;
    spec.folds = folds;
  } else if (lambda >= 0.0) {
    spec.rule = PenaltyRule::Fixed;
    spec.lambda = lambda;
  }
  const auto hoods = estimate_all_neighborhoods(design, spec, c.workers);
  const EdgeSet edges = c.rule == "and" ? aggregate_and(hoods) : aggregate_or(hoods);
  emit(format_edges(edges), c.out);
  std::cerr << "n=" << design.n() << " p=" << design.p() << " rule=" << c.rule
            << " penalty=" << to_string(spec.rule) << " edges=" << edges.size() << "\n";
  return 0;
}

int run_eval(const Common& c, const std::string& estimate_path, const std::string& truth_path,
             const std::string& model_path) {
  EdgeSet truth;
  Index p = c.p.empty() ? 0 : c.p.front();
  if (!model_path.empty()) {
    const GgmModel model = model_from_json(read_text(model_path));
    truth = model.graph.edges;
    p = model.graph.p;
  } else {
    if (truth_path.empty() || p == 0)
      throw Error(ErrorKind::ConfigError, "eval needs --model, or --truth together with --p");
    truth = read_edges(truth_path, p);
  }
  if (estimate_path.empty()) throw Error(ErrorKind::ConfigError, "--estimate is required");
  const Metrics m = compare_edge_sets(read_edges(estimate_path, p), truth);
  nlohmann::ordered_json doc;
  doc["p"] = p;
  doc["truth_edges"] = truth.size();
  doc["true_positives"] = m.true_positives;
  doc["false_positives"] = m.false_positives;
  doc["false_negatives"] = m.false_negatives;
  doc["fdp"] = m.fdp;
  doc["joins_components"] = m.joins_components;
  emit(doc.dump(1) + "\n", c.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse Gaussian graphical model estimation by Lasso neighborhood selection"};
  app.require_subcommand(1);

  Common c;
  std::string data_path, estimate_path, truth_path, model_path, out_dir;
  double lambda = -1.0;
  bool cv = false, timing = false, no_fs = false;
  int folds = 10;
  long replicates = 0;
  double coupling = 0.5, contamination = 0.1;
  std::string model_kind;

  auto add_common = [&](CLI::App* sub, bool seed_required) {
    sub->add_option("--p", c.p, "Number of variables (table1 accepts a list)");
    sub->add_option("--n", c.n, "Number of observations");
    auto* seed = sub->add_option("--seed", c.seed, "Master random seed");
    if (seed_required) seed->required();
    sub->add_option("--alpha", c.alpha, "Level for the lambda(alpha) penalty")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--rule", c.rule, "Edge rule: and, or (experiments also accept both)");
    sub->add_option("--kernel", c.kernel, "Graph kernel: text or local");
    sub->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", c.out, "Output file (directory for gen)");
  };

  auto* gen = app.add_subcommand("gen", "Generate a model, data CSV and truth edge list");
  add_common(gen, false);

  auto* estimate = app.add_subcommand("estimate", "Estimate the edge set of CSV data");
  add_common(estimate, false);
  estimate->add_option("--data", data_path, "Input CSV")->required();
  auto* lambda_opt = estimate->add_option("--lambda", lambda, "Fixed penalty");
  auto* cv_opt = estimate->add_flag("--cv", cv, "Cross-validated penalty per node");
  estimate->add_option("--folds", folds, "Cross-validation folds");
  lambda_opt->excludes(cv_opt);

  auto* eval = app.add_subcommand("eval", "Compare an estimated edge list with the truth");
  add_common(eval, false);
  eval->add_option("--estimate", estimate_path, "Estimated edge TSV")->required();
  eval->add_option("--truth", truth_path, "True edge TSV");
  eval->add_option("--model", model_path, "Model JSON (supplies p and the truth)");

  std::vector<CLI::App*> experiments;
  for (const char* name : {"table1", "fig1", "prop1", "level", "robust"}) {
    auto* sub = app.add_subcommand(name, std::string("Run the ") + name + " experiment");
    add_common(sub, true);
    sub->add_option("--replicates", replicates, "Monte Carlo replicates");
    sub->add_flag("--timing", timing, "Record wall time in the report");
    if (std::string(name) == "fig1") sub->add_option("--out-dir", out_dir, "Model and edge files");
    if (std::string(name) == "table1") sub->add_flag("--no-fs", no_fs, "Skip forward selection");
    if (std::string(name) == "prop1") {
      sub->add_option("--coupling", coupling, "Covariance of the coupled pair");
      sub->add_option("--folds", folds, "Cross-validation folds");
    }
    if (std::string(name) == "level") sub->add_option("--model", model_kind, "identity or geometric");
    if (std::string(name) == "robust")
      sub->add_option("--contamination", contamination, "Scale of the t2 noise");
    experiments.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return run_gen(c);
    if (estimate->parsed()) return run_estimate(c, data_path, lambda, cv, folds);
    if (eval->parsed()) return run_eval(c, estimate_path, truth_path, model_path);
    for (auto* sub : experiments) {
      if (!sub->parsed()) continue;
      ExperimentConfig config = default_config(sub->get_name());
      config.seed = c.seed;
      if (!c.p.empty()) config.p = c.p;
      if (c.n > 0) config.n = c.n;
      if (replicates > 0) config.replicates = replicates;
      config.alpha = c.alpha;
      if (sub->count("--rule") > 0) config.rule = c.rule;
      else config.rule = "both";
      if (!c.kernel.empty()) config.kernel = parse_kernel(c.kernel);
      config.workers = c.workers;
      config.record_timing = timing;
      config.forward_selection = !no_fs;
      config.coupling = coupling;
      config.cv_folds = folds;
      config.contamination = contamination;
      if (!model_kind.empty()) config.model = model_kind;
      if (!out_dir.empty()) config.output_dir = out_dir;
      const ExperimentReport report = run_experiment(config);
      emit(report_to_json(report), c.out);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
