#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "robustmean/corruption.hpp"
#include "robustmean/datagen.hpp"
#include "robustmean/estimators.hpp"

namespace robustmean {

struct SyntheticSource {
  StructureSpec structure;
  LatentSpec latent;
  Index N = 1000;
};

struct CsvSource {
  std::filesystem::path path;
  bool has_header = false;
  bool standardize = true;
  /// Structure matrix CSV, needed only by methods that use A.
  std::optional<std::filesystem::path> structure_path;
};

enum class AdversaryStrategy { shift, tail_hiding, concentrate, unrecoverable };

std::string_view to_string(AdversaryStrategy s) noexcept;
AdversaryStrategy parse_adversary_strategy(std::string_view text);

struct AdversarySpec {
  AdversaryKind kind = AdversaryKind::value_fraction;
  AdversaryStrategy strategy = AdversaryStrategy::tail_hiding;
  std::vector<double> budgets;
  Vector shift;             // shift strategy; empty means +10
  std::optional<Index> mA;  // unrecoverable strategy; computed from A when absent
};

struct MethodConfig {
  std::string name;
  EstimatorSpec spec;
};

enum class MetricKind { l2, mahalanobis };

std::string_view to_string(MetricKind m) noexcept;
MetricKind parse_metric_kind(std::string_view text);

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::variant<SyntheticSource, CsvSource> data;
  AdversarySpec adversary;
  std::vector<MethodConfig> methods;
  std::vector<MetricKind> metrics{MetricKind::l2};
  int trials = 5;
  Index ithsvd_rank = 0;
  int threads = 1;
  std::string output = "experiment";
  /// Canonical JSON of the parsed config, echoed into result summaries.
  std::string json;

  /// Throws Errc::config on any inconsistency.
  void validate() const;
  bool synthetic() const { return std::holds_alternative<SyntheticSource>(data); }
};

/// Parses an experiment config. Relative paths resolve against `base_dir`.
/// Throws Errc::config for schema violations and Errc::parse for bad JSON.
ExperimentConfig parse_experiment_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Stand-alone parsers for the JSON fragments used by the CLI subcommands.
EstimatorSpec parse_estimator_spec(std::string_view json_text);
StructureSpec parse_structure_spec(std::string_view json_text, const std::filesystem::path& base_dir = {});
LatentSpec parse_latent_spec(std::string_view json_text, Index r);

/// Canonical JSON of an estimator spec (inverse of parse_estimator_spec).
std::string estimator_spec_json(const EstimatorSpec& spec);

}  // namespace robustmean
