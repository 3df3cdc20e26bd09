#pragma once

#include <optional>
#include <string>

#include "robustmean/dataset.hpp"
#include "robustmean/structure.hpp"
#include "robustmean/types.hpp"

namespace robustmean {

enum class RecoveryStatus { recovered, unchanged, unrecoverable };

std::string_view to_string(RecoveryStatus status) noexcept;

/// Result of recovering one sample.
struct RecoveryOutcome {
  RecoveryStatus status = RecoveryStatus::unrecoverable;
  std::optional<Vector> sample;  // set for recovered / unchanged
  /// ||x_tilde - A z_hat||_0 for replacement recovery, 0 otherwise.
  Index residual_hamming = 0;
  /// Replacement recovery only: false when several distinct points of
  /// range(A) reach the minimal residual, i.e. the answer is not determined.
  bool unique_minimizer = true;

  bool usable() const noexcept { return status != RecoveryStatus::unrecoverable; }
};

/// Number of entries where |a - b| exceeds `tol`.
Index hamming_distance(const Vector& a, const Vector& b, double tol);

/// Default per-entry tolerance used to decide x == A z: 1e-8 * max(1, |x|_inf).
double equality_tolerance(const Vector& x);

/// Least-squares fit of x onto range(A); returns A z.
Vector project_onto_range(const StructureMatrix& a, const Vector& x);

/// True when some z reproduces x entrywise within `tol`.
bool in_range(const StructureMatrix& a, const Vector& x, double tol);

// ---------------------------------------------------------------------------
// Missing values

struct ImputeOptions {
  /// Visible entries must be reproduced within residual_tol * max(1, |x_visible|);
  /// otherwise they are inconsistent with A and the sample is unrecoverable.
  /// A negative value disables the check.
  double residual_tol = 1e-6;
};

/// Known-structure imputation of one sample: solve A_V z = x_V over the
/// visible rows V and return A z. Unrecoverable when rank(A_V) < rank(A).
/// Throws Errc::dimension_mismatch when the lengths disagree with A.
RecoveryOutcome impute_known_structure(const Vector& x, const MaskVector& missing,
                                       const StructureMatrix& a, const ImputeOptions& opts = {});

struct CompletionReport {
  Dataset completed;
  int iterations = 0;
  bool converged = true;
  IndexList recovered_indices;
  IndexList discarded_indices;

  /// {"recovered_indices": [...], "discarded_indices": [...],
  ///  "iterations": k, "converged": bool}
  std::string to_json() const;
};

struct IthsvdOptions {
  Index target_rank = 1;
  int max_iter = 500;
  double tol = 1e-9;
  /// true: each iteration fills a sample's masked cells with the least-squares
  /// fit of its visible cells in the current rank-k row space.
  /// false: masked cells take the entries of the rank-k projection X V V^T.
  /// Both updates have the same fixed points; the projection update can need
  /// tens of thousands of iterations when the masked cells are extreme values.
  bool refit_rows = true;
};

/// Iterative hard-thresholded SVD completion.
///
/// Samples with fewer than target_rank visible entries are discarded up front.
/// The rest start from coordinate-wise medians in their masked cells, then
/// alternate a rank-`target_rank` truncated SVD with re-inserting values
/// consistent with it into the originally masked cells (see
/// IthsvdOptions::refit_rows), until the largest change on those cells is
/// <= tol or max_iter is reached.
///
/// `completed` has the input's shape: recovered samples are fully visible,
/// discarded samples are left as they were. Throws Errc::unrecoverable when a
/// coordinate has no visible entry among the retained samples.
CompletionReport ithsvd_complete(const Dataset& ds, const IthsvdOptions& opts);

/// Greedy certificate for the deterministic-pattern uniqueness conditions of
/// low-rank completion: r+1 disjoint groups of n-r samples in which any k
/// samples jointly leave at least r+k coordinates visible.
///
/// Each group is grown from a hidden pattern with >= r+1 visible coordinates
/// by repeatedly adding a sample that reveals a coordinate not yet in the
/// group's visible set. Sound (true implies the conditions hold) but may give
/// false negatives.
bool check_nowak_conditions(const MaskMatrix& mask, Index r);

// ---------------------------------------------------------------------------
// Replacements

/// Randomized recovery: ceil(r^c) rounds of solving an independent r x r row
/// subsystem, keeping the candidate with the smallest Hamming residual (ties
/// to the lexicographically smallest reconstruction). Returns unchanged when
/// x_tilde already lies in range(A).
RecoveryOutcome recover_replacement_randomized(const StructureMatrix& a, const Vector& x_tilde,
                                               double c, Rng& rng);

/// Exhaustive recovery over every independent r-subset of rows. Exact when
/// fewer than m_A / 2 entries were replaced. Throws Errc::size_cap when
/// C(n, r) > max_work.
RecoveryOutcome recover_replacement_bruteforce(const StructureMatrix& a, const Vector& x_tilde,
                                               std::size_t max_work = 1000000);

// ---------------------------------------------------------------------------
// Sparse decoding (recovery.sparse)

/// Parity-check matrix F (p x n) with F A = 0. Row i is sqrt(u_i / p) v_i^T
/// with v_i uniform on the unit sphere of null(A^T) and u_i ~ chi^2_n.
/// Throws Errc::invalid_argument when p exceeds dim null(A^T).
Matrix build_parity_check_gaussian(const StructureMatrix& a, Index p, Rng& rng);

struct OmpResult {
  Vector estimate;
  /// ||y - F e|| after each completed iteration (index 0 is ||y||).
  std::vector<double> residual_norms;
};

/// Orthogonal matching pursuit with at most K greedy selections (stops early
/// once the residual vanishes). Each step picks the column with the largest
/// |f_j . residual| / |f_j|. Throws Errc::degenerate when a selected support
/// is rank deficient.
OmpResult omp_sparse_recover(const Matrix& f, const Vector& y, Index k);

/// Replacement recovery through sparse decoding of e from y = F x_tilde.
RecoveryOutcome recover_via_sparse(const StructureMatrix& a, const Vector& x_tilde, Index k, Index p,
                                   Rng& rng);

}  // namespace robustmean
