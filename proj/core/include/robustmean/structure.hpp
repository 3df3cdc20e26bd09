#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "robustmean/types.hpp"

namespace robustmean {

inline constexpr double kDefaultRankTol = 1e-10;

/// Numerical rank: the number of singular values above `rel_tol * sigma_max`.
/// A zero (or empty) matrix has rank 0.
Index numerical_rank(const Matrix& m, double rel_tol = kDefaultRankTol);

/// The linear structure A (n ambient coordinates x r latent dimensions) that
/// generates samples x = A z.
///
/// The rank is computed once at construction with a tolerance relative to the
/// largest singular value, so uniformly rescaling A never changes it.
class StructureMatrix {
 public:
  explicit StructureMatrix(Matrix entries, double rank_tol = kDefaultRankTol);

  const Matrix& entries() const noexcept { return entries_; }
  Index n() const noexcept { return entries_.rows(); }
  Index r() const noexcept { return entries_.cols(); }
  double rank_tol() const noexcept { return rank_tol_; }
  Index rank() const noexcept { return rank_; }
  bool full_column_rank() const noexcept { return rank_ == r(); }

  /// Sub-matrix made of the given rows, in the given order.
  Matrix rows(const IndexList& indices) const;

  static StructureMatrix load_csv(const std::filesystem::path& path,
                                  double rank_tol = kDefaultRankTol);
  void save_csv(const std::filesystem::path& path) const;

 private:
  Matrix entries_;
  double rank_tol_;
  Index rank_;
};

struct SubspaceBasis {
  std::vector<Vector> vectors;
  bool orthonormal = false;

  std::size_t size() const noexcept { return vectors.size(); }
  bool empty() const noexcept { return vectors.empty(); }
  /// Basis vectors as the columns of a matrix (dim x size).
  Matrix as_columns(Index dim) const;
};

Index rank(const StructureMatrix& a);

/// Row-space dimension of A once the rows in `removed` are deleted.
Index rank_without_rows(const StructureMatrix& a, const IndexList& removed);

/// m_A: the smallest k such that deleting some k rows strictly lowers the
/// row-space dimension. Exhaustive over subsets by increasing k; throws
/// Errc::size_cap when n > max_n.
Index compute_mA_exact(const StructureMatrix& a, Index max_n = 20);

/// True iff every r-subset of rows is linearly independent (then
/// m_A = n - r + 1). Throws Errc::size_cap when C(n, r) > max_subsets.
bool check_general_position(const StructureMatrix& a, std::size_t max_subsets = 100000);

/// Orthonormal basis of ker(M), empty when the kernel is trivial.
SubspaceBasis null_space_basis(const Matrix& m, double rel_tol = kDefaultRankTol);

/// Draws a uniformly random `count`-subset of row indices whose rows are
/// linearly independent, by rejection. Indices are returned sorted.
/// Throws Errc::degenerate once `max_retries` draws have all been rejected.
IndexList sample_independent_rows(const StructureMatrix& a, Index count, Rng& rng,
                                  int max_retries = 1000);

/// Binomial coefficient saturating at SIZE_MAX.
std::size_t binomial(std::size_t n, std::size_t k);

/// Visits every k-subset of {0..n-1} in lexicographic order. The visitor
/// returns false to stop early; the function returns false iff stopped.
template <typename Visitor>
bool for_each_subset(Index n, Index k, Visitor&& visit) {
  if (k < 0 || k > n) return true;
  IndexList idx(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (;;) {
    if (!visit(static_cast<const IndexList&>(idx))) return false;
    Index i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return true;
    ++idx[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

}  // namespace robustmean
