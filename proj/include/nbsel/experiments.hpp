#ifndef NBSEL_EXPERIMENTS_HPP
#define NBSEL_EXPERIMENTS_HPP

// Seeded Monte Carlo drivers. Every driver returns an ExperimentReport whose
// serialized form depends only on the config (worker count included or not).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nbsel/graph.hpp"
#include "nbsel/synth.hpp"

namespace nbsel {

inline constexpr int kReportFormatVersion = 1;

struct ExperimentConfig {
  std::string experiment;         // table1 | fig1 | prop1 | level | robust
  std::vector<Index> p{10};       // table1 runs every entry, the others use p.front()
  Index n = 40;
  long replicates = 50;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  Kernel kernel = Kernel::Text;
  std::string rule = "both";      // and | or | both
  std::size_t grid_size = 100;    // penalty sweep for table1
  double grid_ratio = 1.0 / 500.0;
  std::vector<long> ks{0, 5, 10};
  bool forward_selection = true;  // table1
  double coupling = 0.5;          // prop1: Sigma_ab
  int cv_folds = 10;
  std::size_t cv_grid_size = 50;
  double cv_grid_ratio = 1e-3;
  std::string model = "identity";  // level: identity | geometric
  double contamination = 0.1;      // robust
  double offdiag = kDefaultOffDiagonal;
  int workers = 1;                 // not part of the report
  bool record_timing = false;
  std::optional<std::filesystem::path> output_dir;  // fig1 model and edge files
};

/// Defaults for one experiment id; throws ConfigError for unknown ids.
ExperimentConfig default_config(const std::string& experiment);
void validate(const ExperimentConfig& config);
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

struct Aggregate {
  std::string name;
  double mean = 0.0;
  double standard_error = 0.0;
};

struct ExperimentReport {
  int format_version = kReportFormatVersion;
  std::string experiment;
  nlohmann::ordered_json config;
  std::vector<std::uint64_t> seeds;  // one per replicate
  // Named per-replicate values, each parallel to `seeds`, in insertion order.
  std::vector<std::pair<std::string, std::vector<double>>> series;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  std::optional<double> wall_time_seconds;

  const std::vector<double>& column(const std::string& name) const;
  bool has(const std::string& name) const;
  double mean(const std::string& name) const;
  std::vector<Aggregate> aggregates() const;
};

Aggregate aggregate_of(const std::string& name, const std::vector<double>& values);

std::string report_to_json(const ExperimentReport& report);
/// Parses a report and checks every aggregate against its series (1e-12).
ExperimentReport report_from_json(const std::string& text);

/// Replicate seeds derived from the master seed.
std::uint64_t replicate_seed(std::uint64_t master, long replicate);

ExperimentReport run_table1(const ExperimentConfig& config);
ExperimentReport run_figure1(const ExperimentConfig& config);
ExperimentReport run_prop1_demo(const ExperimentConfig& config);
ExperimentReport run_level_control(const ExperimentConfig& config);
ExperimentReport run_robustness(const ExperimentConfig& config);

ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace nbsel

#endif  // NBSEL_EXPERIMENTS_HPP
