#include "robustmean/simplex.hpp"

#include <cmath>
#include <limits>

#include "robustmean/error.hpp"

namespace robustmean {
namespace {

// Dense tableau. Row m holds reduced costs; the last column holds the
// right-hand side (and minus the objective value in row m).
class Tableau {
 public:
  Tableau(Index rows, Index cols) : t_(Matrix::Zero(rows + 1, cols + 1)), basis_(static_cast<std::size_t>(rows)) {}

  Matrix& t() { return t_; }
  Index rows() const { return t_.rows() - 1; }
  Index cols() const { return t_.cols() - 1; }
  double& rhs(Index i) { return t_(i, cols()); }
  IndexList& basis() { return basis_; }

  void pivot(Index row, Index col) {
    t_.row(row) /= t_(row, col);
    for (Index i = 0; i < t_.rows(); ++i) {
      if (i == row) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(row);
    }
    basis_[static_cast<std::size_t>(row)] = col;
  }

  // Returns false when unbounded. `allowed` bounds the entering columns.
  bool optimize(Index allowed, const std::vector<bool>& active, const LpOptions& opts, int& pivots) {
    const Index obj = rows();
    int degenerate_run = 0;
    for (;;) {
      const bool bland = degenerate_run >= opts.bland_after;
      Index enter = -1;
      double most = -opts.tol;
      for (Index j = 0; j < allowed; ++j) {
        const double d = t_(obj, j);
        if (d < most) {
          enter = j;
          if (bland) break;
          most = d;
        }
      }
      if (enter < 0) return true;

      Index leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < obj; ++i) {
        if (!active[static_cast<std::size_t>(i)]) continue;
        const double a = t_(i, enter);
        if (a <= opts.tol) continue;
        const double q = rhs(i) / a;
        if (leave < 0 || q < ratio - opts.tol) {
          ratio = q;
          leave = i;
        } else if (q <= ratio + opts.tol &&
                   basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]) {
          leave = i;
        }
      }
      if (leave < 0) return false;
      degenerate_run = ratio <= opts.tol ? degenerate_run + 1 : 0;
      pivot(leave, enter);
      if (++pivots > opts.max_pivots) throw Error(Errc::internal, "simplex exceeded its pivot limit");
    }
  }

 private:
  Matrix t_;
  IndexList basis_;
};

}  // namespace

LpResult solve_standard_lp(const Matrix& a, const Vector& b, const Vector& c, const LpOptions& opts) {
  const Index m = a.rows();
  const Index k = a.cols();
  if (b.size() != m || c.size() != k) throw Error(Errc::dimension_mismatch, "LP shapes disagree");

  Tableau tab(m, k + m);
  Matrix& t = tab.t();
  for (Index i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    t.row(i).head(k) = sign * a.row(i);
    t(i, k + i) = 1.0;
    tab.rhs(i) = sign * b(i);
    tab.basis()[static_cast<std::size_t>(i)] = k + i;
  }
  // Phase one: minimize the sum of artificials.
  for (Index i = 0; i < m; ++i) t.row(m) -= t.row(i);
  for (Index i = 0; i < m; ++i) t(m, k + i) = 0.0;

  LpResult result;
  std::vector<bool> active(static_cast<std::size_t>(m), true);
  tab.optimize(k, active, opts, result.pivots);
  const double infeasibility = -tab.rhs(m);
  if (infeasibility > 1e3 * opts.tol * std::max(1.0, b.cwiseAbs().sum())) {
    result.status = LpStatus::infeasible;
    return result;
  }

  // Drive remaining artificials out of the basis; rows where that is
  // impossible are linear combinations of the others.
  for (Index i = 0; i < m; ++i) {
    if (tab.basis()[static_cast<std::size_t>(i)] < k) continue;
    Index col = -1;
    double best = opts.tol;
    for (Index j = 0; j < k; ++j) {
      if (std::abs(t(i, j)) > best) {
        best = std::abs(t(i, j));
        col = j;
      }
    }
    if (col >= 0) {
      tab.pivot(i, col);
    } else {
      active[static_cast<std::size_t>(i)] = false;
    }
  }

  // Phase two.
  t.row(m).setZero();
  t.row(m).head(k) = c.transpose();
  for (Index i = 0; i < m; ++i) {
    if (!active[static_cast<std::size_t>(i)]) continue;
    const Index bj = tab.basis()[static_cast<std::size_t>(i)];
    const double cb = c(bj);
    if (cb != 0.0) t.row(m) -= cb * t.row(i);
  }
  if (!tab.optimize(k, active, opts, result.pivots)) {
    result.status = LpStatus::unbounded;
    return result;
  }

  result.status = LpStatus::optimal;
  result.x = Vector::Zero(k);
  for (Index i = 0; i < m; ++i) {
    if (!active[static_cast<std::size_t>(i)]) continue;
    const Index bj = tab.basis()[static_cast<std::size_t>(i)];
    if (bj < k) result.x(bj) = std::max(0.0, tab.rhs(i));
  }
  result.objective = c.dot(result.x);
  return result;
}

}  // namespace robustmean
