#include "robustmean/structure.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "robustmean/csv.hpp"
#include "robustmean/error.hpp"

namespace robustmean {

Index numerical_rank(const Matrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  const Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  const double threshold = rel_tol * sv(0);
  return static_cast<Index>((sv.array() > threshold).count());
}

StructureMatrix::StructureMatrix(Matrix entries, double rank_tol)
    : entries_(std::move(entries)), rank_tol_(rank_tol), rank_(0) {
  if (entries_.rows() < 1 || entries_.cols() < 1) {
    throw Error(Errc::invalid_argument, "structure matrix must be at least 1x1");
  }
  if (!(rank_tol_ >= 0.0)) throw Error(Errc::invalid_argument, "rank_tol must be nonnegative");
  if (!entries_.allFinite()) throw Error(Errc::invalid_argument, "structure matrix has non-finite entries");
  rank_ = numerical_rank(entries_, rank_tol_);
}

Matrix StructureMatrix::rows(const IndexList& indices) const {
  Matrix out(static_cast<Index>(indices.size()), r());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.row(static_cast<Index>(i)) = entries_.row(indices[i]);
  }
  return out;
}

StructureMatrix StructureMatrix::load_csv(const std::filesystem::path& path, double rank_tol) {
  return StructureMatrix(csv::read_matrix(path), rank_tol);
}

void StructureMatrix::save_csv(const std::filesystem::path& path) const {
  csv::write_matrix(path, entries_);
}

Matrix SubspaceBasis::as_columns(Index dim) const {
  Matrix m(dim, static_cast<Index>(vectors.size()));
  for (std::size_t k = 0; k < vectors.size(); ++k) m.col(static_cast<Index>(k)) = vectors[k];
  return m;
}

Index rank(const StructureMatrix& a) { return a.rank(); }

Index rank_without_rows(const StructureMatrix& a, const IndexList& removed) {
  std::vector<bool> drop(static_cast<std::size_t>(a.n()), false);
  for (Index i : removed) {
    if (i < 0 || i >= a.n()) throw Error(Errc::invalid_argument, "row index out of range");
    drop[static_cast<std::size_t>(i)] = true;
  }
  IndexList keep;
  for (Index i = 0; i < a.n(); ++i) {
    if (!drop[static_cast<std::size_t>(i)]) keep.push_back(i);
  }
  return numerical_rank(a.rows(keep), a.rank_tol());
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t num = n - k + i;
    if (result > std::numeric_limits<std::size_t>::max() / num) {
      return std::numeric_limits<std::size_t>::max();
    }
    result = result * num / i;
  }
  return result;
}

Index compute_mA_exact(const StructureMatrix& a, Index max_n) {
  if (a.n() > max_n) {
    throw Error(Errc::size_cap, "compute_mA_exact: n = " + std::to_string(a.n()) +
                                    " exceeds the exhaustive-search cap " + std::to_string(max_n));
  }
  const Index full = a.rank();
  if (full == 0) throw Error(Errc::invalid_argument, "m_A is undefined for a zero matrix");
  for (Index k = 1; k <= a.n(); ++k) {
    bool found = false;
    for_each_subset(a.n(), k, [&](const IndexList& removed) {
      found = rank_without_rows(a, removed) < full;
      return !found;
    });
    if (found) return k;
  }
  // Deleting every row always drops the rank to zero.
  return a.n();
}

bool check_general_position(const StructureMatrix& a, std::size_t max_subsets) {
  const Index n = a.n();
  const Index r = a.r();
  if (n < r) return false;
  const std::size_t count = binomial(static_cast<std::size_t>(n), static_cast<std::size_t>(r));
  if (count > max_subsets) {
    throw Error(Errc::size_cap, "check_general_position: C(" + std::to_string(n) + ", " +
                                    std::to_string(r) + ") exceeds the subset cap");
  }
  return for_each_subset(n, r, [&](const IndexList& rows) {
    return numerical_rank(a.rows(rows), a.rank_tol()) == r;
  });
}

SubspaceBasis null_space_basis(const Matrix& m, double rel_tol) {
  SubspaceBasis basis;
  basis.orthonormal = true;
  const Index cols = m.cols();
  if (cols == 0) return basis;
  if (m.rows() == 0) {
    for (Index j = 0; j < cols; ++j) basis.vectors.push_back(Vector::Unit(cols, j));
    return basis;
  }
  const Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double threshold = sv.size() > 0 ? rel_tol * sv(0) : 0.0;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold && sv(i) > 0.0) ++rank;
  }
  for (Index j = rank; j < cols; ++j) basis.vectors.push_back(svd.matrixV().col(j));
  return basis;
}

IndexList sample_independent_rows(const StructureMatrix& a, Index count, Rng& rng,
                                  int max_retries) {
  if (count < 0 || count > a.rank()) {
    throw Error(Errc::invalid_argument, "sample_independent_rows: count must not exceed rank(A)");
  }
  IndexList all(static_cast<std::size_t>(a.n()));
  std::iota(all.begin(), all.end(), Index{0});
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    // Partial Fisher-Yates: uniform over ordered count-prefixes, hence uniform over subsets.
    for (Index i = 0; i < count; ++i) {
      std::uniform_int_distribution<Index> pick(i, a.n() - 1);
      std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(pick(rng))]);
    }
    IndexList chosen(all.begin(), all.begin() + count);
    std::sort(chosen.begin(), chosen.end());
    if (numerical_rank(a.rows(chosen), a.rank_tol()) == count) return chosen;
  }
  throw Error(Errc::degenerate, "sample_independent_rows: no independent subset after " +
                                    std::to_string(max_retries) + " draws");
}

}  // namespace robustmean
