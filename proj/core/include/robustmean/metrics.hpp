#pragma once

#include <filesystem>
#include <iosfwd>

#include "robustmean/types.hpp"

namespace robustmean {

/// Finite distribution: distinct support points (rows of `support`) with
/// probabilities summing to 1 within 1e-9.
class DiscreteDistribution {
 public:
  DiscreteDistribution(Matrix support, Vector probs);

  const Matrix& support() const noexcept { return support_; }
  const Vector& probs() const noexcept { return probs_; }
  Index size() const noexcept { return support_.rows(); }
  Index dim() const noexcept { return support_.cols(); }

  /// Uniform distribution over the given (distinct) points.
  static DiscreteDistribution uniform(Matrix support);

  /// CSV with columns x1..xn,prob (one atom per line).
  static DiscreteDistribution read_csv(std::istream& in, bool has_header = true);
  static DiscreteDistribution load_csv(const std::filesystem::path& path, bool has_header = true);

 private:
  Matrix support_;
  Vector probs_;
};

/// Joint distribution of a pair (x ~ P, y ~ Q): matrix(i, j) = gamma(x_i, y_j).
struct Coupling {
  Matrix matrix;

  /// True when the marginals reproduce P and Q within `tol`.
  bool has_marginals(const DiscreteDistribution& p, const DiscreteDistribution& q, double tol = 1e-8) const;
};

inline constexpr std::size_t kDefaultEntryWorkCap = 10000;
inline constexpr Index kDefaultEntrySupportCap = 100;

/// 1/2 sum over the union of the supports of |p(x) - q(x)|.
double tv_distance(const DiscreteDistribution& p, const DiscreteDistribution& q);

struct EntryDistance {
  double value = 0.0;
  Coupling coupling;
};

/// Optimal coupling under the cost (1/n) * #{j : x_j != y_j}, solved as a
/// transportation problem. Throws Errc::size_cap when |P| * |Q| > work_cap.
EntryDistance d_entry_1(const DiscreteDistribution& p, const DiscreteDistribution& q,
                        std::size_t work_cap = kDefaultEntryWorkCap);

/// min over couplings of the largest per-coordinate disagreement probability,
/// solved as a linear program. Throws Errc::size_cap when |P| * |Q| > work_cap
/// or either support exceeds support_cap atoms.
double d_entry_inf(const DiscreteDistribution& p, const DiscreteDistribution& q,
                   std::size_t work_cap = kDefaultEntryWorkCap, Index support_cap = kDefaultEntrySupportCap);

/// s(M)_ij = M_ij / sqrt(M_ii M_jj). Throws Errc::invalid_argument when M is
/// not square or has a nonpositive diagonal entry.
Matrix scale_matrix(const Matrix& m);

/// max over x in [-1, 1]^n of sqrt(x^T s(M) x), by enumerating the vertices of
/// the cube in Gray-code order. Throws Errc::size_cap for n > n_cap and
/// Errc::invalid_argument when some vertex gives a negative quadratic form.
double disc(const Matrix& m, Index n_cap = 20);

double l2_error(const Vector& mu_hat, const Vector& mu);

/// sqrt((mu_hat - mu)^T Sigma^+ (mu_hat - mu)). For singular Sigma the
/// difference must lie in range(Sigma) within 1e-6 * max(1, |diff|);
/// otherwise Errc::degenerate is thrown.
double mahalanobis_error(const Vector& mu_hat, const Vector& mu, const Matrix& sigma);

}  // namespace robustmean
