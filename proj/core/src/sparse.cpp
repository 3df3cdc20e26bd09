#include <cmath>

#include "robustmean/error.hpp"
#include "robustmean/recovery.hpp"

namespace robustmean {

Matrix build_parity_check_gaussian(const StructureMatrix& a, Index p, Rng& rng) {
  const Index n = a.n();
  if (p < 0) throw Error(Errc::invalid_argument, "p must be nonnegative");
  if (p == 0) return Matrix(0, n);
  const Matrix kernel = null_space_basis(a.entries().transpose(), a.rank_tol()).as_columns(n);
  const Index dim = kernel.cols();
  if (p > dim) {
    throw Error(Errc::invalid_argument, "p = " + std::to_string(p) + " exceeds dim null(A^T) = " +
                                            std::to_string(dim));
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::chi_squared_distribution<double> chi2(static_cast<double>(n));
  Matrix f(p, n);
  for (Index i = 0; i < p; ++i) {
    Vector g(dim);
    double norm = 0.0;
    do {
      for (Index k = 0; k < dim; ++k) g(k) = gauss(rng);
      norm = g.norm();
    } while (norm == 0.0);
    const Vector v = kernel * (g / norm);
    const double u = chi2(rng);
    f.row(i) = std::sqrt(u / static_cast<double>(p)) * v.transpose();
  }
  return f;
}

OmpResult omp_sparse_recover(const Matrix& f, const Vector& y, Index k) {
  const Index p = f.rows();
  const Index n = f.cols();
  if (y.size() != p) throw Error(Errc::dimension_mismatch, "y length must equal the rows of F");
  if (k < 0 || k > p || k > n) throw Error(Errc::invalid_argument, "OMP sparsity K must satisfy 0 <= K <= min(p, n)");

  OmpResult out;
  out.estimate = Vector::Zero(n);
  Vector residual = y;
  out.residual_norms.push_back(residual.norm());
  const double stop = 1e-12 * std::max(1.0, y.norm());

  const Vector norms = f.colwise().norm().transpose();
  IndexList support;
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  for (Index iter = 0; iter < k; ++iter) {
    if (residual.norm() <= stop) break;
    const Vector corr = f.transpose() * residual;
    Index pick = -1;
    double best = -1.0;
    for (Index j = 0; j < n; ++j) {
      if (chosen[static_cast<std::size_t>(j)] || norms(j) == 0.0) continue;
      const double score = std::abs(corr(j)) / norms(j);
      if (score > best) {
        best = score;
        pick = j;
      }
    }
    if (pick < 0) break;
    chosen[static_cast<std::size_t>(pick)] = true;
    support.push_back(pick);

    Matrix fs(p, static_cast<Index>(support.size()));
    for (std::size_t s = 0; s < support.size(); ++s) fs.col(static_cast<Index>(s)) = f.col(support[s]);
    const Eigen::ColPivHouseholderQR<Matrix> qr(fs);
    if (qr.rank() < fs.cols()) throw Error(Errc::degenerate, "OMP support refit is rank deficient");
    const Vector coef = qr.solve(y);

    out.estimate.setZero();
    for (std::size_t s = 0; s < support.size(); ++s) out.estimate(support[s]) = coef(static_cast<Index>(s));
    residual = y - fs * coef;
    out.residual_norms.push_back(residual.norm());
  }
  return out;
}

RecoveryOutcome recover_via_sparse(const StructureMatrix& a, const Vector& x_tilde, Index k, Index p,
                                   Rng& rng) {
  if (x_tilde.size() != a.n()) throw Error(Errc::dimension_mismatch, "sample length must equal n");
  const double tol = equality_tolerance(x_tilde);
  RecoveryOutcome out;
  if (in_range(a, x_tilde, tol)) {
    out.status = RecoveryStatus::unchanged;
    out.sample = x_tilde;
    return out;
  }
  const Matrix f = build_parity_check_gaussian(a, p, rng);
  const OmpResult omp = omp_sparse_recover(f, f * x_tilde, k);
  const Vector candidate = x_tilde - omp.estimate;
  const Vector projected = project_onto_range(a, candidate);
  const double range_tol = 1e-6 * std::max(1.0, x_tilde.cwiseAbs().maxCoeff());
  if ((projected - candidate).cwiseAbs().maxCoeff() > range_tol) return out;
  out.status = RecoveryStatus::recovered;
  out.sample = projected;
  out.residual_hamming = hamming_distance(x_tilde, projected, tol);
  return out;
}

}  // namespace robustmean
