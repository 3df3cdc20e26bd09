#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "robustmean/dataset.hpp"
#include "robustmean/structure.hpp"
#include "robustmean/types.hpp"

namespace robustmean {

enum class EstimatorKind { empirical_mean, coordinate_median, sanitized_mean, tukey_median_small, two_step };

enum class RecoveryMethod {
  known_structure,         // per-sample linear-system imputation (needs A)
  ithsvd,                  // matrix completion, structure unknown
  replacement_randomized,  // randomized row-subset recovery (needs A)
  replacement_bruteforce,  // exhaustive row-subset recovery (needs A)
  sparse_omp,              // parity check + OMP (needs A)
};

std::string_view to_string(EstimatorKind kind) noexcept;
std::string_view to_string(RecoveryMethod method) noexcept;
EstimatorKind parse_estimator_kind(std::string_view text);
RecoveryMethod parse_recovery_method(std::string_view text);

struct RecoverySpec {
  RecoveryMethod method = RecoveryMethod::known_structure;
  // ithsvd
  Index rank = 0;  // 0: use the caller's default (the experiment's ithsvd_rank)
  int max_iter = 500;
  double tol = 1e-9;
  // replacement_randomized
  double c = 2.0;
  // sparse_omp
  Index sparsity = 1;
  Index parity_rows = 0;  // 0: n - rank(A)
  // randomized methods
  std::uint64_t seed = 0;
  /// m_A used to reject replacement recoveries whose residual reaches m_A / 2.
  /// Computed exactly from A when absent.
  std::optional<Index> mA;
};

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::empirical_mean;
  std::optional<RecoverySpec> recovery;  // two_step only
  std::optional<EstimatorKind> inner;    // two_step only
  Index tukey_dim_cap = 2;

  static EstimatorSpec simple(EstimatorKind kind);
  static EstimatorSpec two_step(RecoverySpec recovery, EstimatorKind inner);

  /// Throws Errc::config unless two_step carries both recovery and inner (and
  /// the inner kind is not itself two_step) while every other kind carries
  /// neither.
  void validate() const;
};

/// Per-coordinate mean over visible entries.
Vector empirical_mean(const Dataset& ds);
/// Per-coordinate median over visible entries; an even count averages the
/// two central order statistics.
Vector coordinate_median(const Dataset& ds);
/// Mean over the samples with no missing entry. Throws Errc::no_data when
/// every sample has one.
Vector sanitized_mean(const Dataset& ds);

/// Tukey (halfspace) depth of `point` among the rows of `points`, as a count:
/// the fewest points in any closed halfplane (halfline in 1-D) whose boundary
/// passes through `point`. Dimensions 1 and 2 only.
Index tukey_depth(const Matrix& points, const Vector& point);

/// Exact depth maximizer for n <= dim_cap (at most 2). In 2-D the candidates
/// are the sample points and all intersections of lines through sample pairs;
/// ties go to the lexicographically smallest candidate. Throws Errc::size_cap
/// above the cap and Errc::invalid_argument on masked entries.
Vector tukey_median_small(const Dataset& ds, Index dim_cap = 2);

struct TwoStepResult {
  Vector estimate;
  IndexList recovered;  // samples whose entries were filled or repaired
  IndexList discarded;  // samples judged unrecoverable and dropped
};

/// Recover, drop unrecoverable samples, then apply the inner estimator.
/// Throws Errc::no_data when every sample is discarded and
/// Errc::invalid_argument when the method needs A and none is given.
TwoStepResult two_step_estimate_detailed(const Dataset& ds, const StructureMatrix* a,
                                         const EstimatorSpec& spec);
Vector two_step_estimate(const Dataset& ds, const StructureMatrix* a, const EstimatorSpec& spec);

/// Runs any estimator spec.
Vector estimate(const Dataset& ds, const EstimatorSpec& spec, const StructureMatrix* a = nullptr);

}  // namespace robustmean
