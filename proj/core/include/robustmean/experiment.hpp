#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "robustmean/config.hpp"
#include "robustmean/dataset.hpp"

namespace robustmean {

/// Reads a decimal CSV (empty cells are missing). With `standardize`, each
/// coordinate is shifted to visible mean 0 and scaled to visible population
/// standard deviation 1; constant coordinates are only centered.
Dataset ingest_csv(std::istream& in, bool standardize, bool has_header = false);
Dataset ingest_csv(const std::filesystem::path& path, bool standardize, bool has_header = false);

/// Error baseline for real data: the empirical mean before any corruption.
Vector reference_mean(const Dataset& clean);

struct ResultRow {
  std::string method;
  double budget = 0.0;
  int trial = 0;
  MetricKind metric = MetricKind::l2;
  std::optional<double> value;  // nullopt: the method failed ("NA")

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct SummaryCell {
  std::string method;
  double budget = 0.0;
  MetricKind metric = MetricKind::l2;
  std::size_t count = 0;  // trials with a value
  double mean = 0.0;      // NaN when count == 0
  double sd = 0.0;        // sample standard deviation; 0 when count < 2
};

struct ExperimentResult {
  /// Ordered by method (config order), budget, trial, metric (config order).
  std::vector<ResultRow> rows;
  std::string config_json;

  std::vector<SummaryCell> summary() const;
  /// Mean of a (method, budget, metric) cell over trials with a value.
  std::optional<double> mean_of(const std::string& method, double budget, MetricKind metric) const;
};

/// Runs every (trial, budget, method, metric) combination. Trial t uses seed
/// cfg.seed + t; the randomness of each method depends only on the trial, the
/// budget index and the method's name, so reordering methods changes nothing.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

void write_results_csv(std::ostream& out, const ExperimentResult& res);
std::vector<ResultRow> read_results_csv(std::istream& in);
std::string summary_json(const ExperimentResult& res);

/// Writes <prefix>.csv and <prefix>.summary.json. Throws Errc::io.
void emit_results(const ExperimentResult& res, const std::filesystem::path& prefix);

}  // namespace robustmean
