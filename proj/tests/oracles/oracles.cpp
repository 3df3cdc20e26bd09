#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "robustmean/structure.hpp"

namespace oracle {

namespace {

Index hamming(const Matrix& a, Index i, const Matrix& b, Index j) {
  Index d = 0;
  for (Index c = 0; c < a.cols(); ++c) d += a(i, c) != b(j, c) ? 1 : 0;
  return d;
}

}  // namespace

double d_entry_1_vertices(const robustmean::DiscreteDistribution& p, const robustmean::DiscreteDistribution& q) {
  const Index m = p.size();
  const Index k = q.size();
  if (m > 4 || k > 4) throw std::invalid_argument("oracle supports 4 x 4 at most");
  const Index cells = m * k;
  const Index basis = m + k - 1;
  double best = std::numeric_limits<double>::infinity();
  robustmean::for_each_subset(cells, basis, [&](const robustmean::IndexList& chosen) {
    Matrix sys = Matrix::Zero(m + k, basis);
    Vector rhs(m + k);
    rhs << p.probs(), q.probs();
    for (Index s = 0; s < basis; ++s) {
      const Index cell = chosen[static_cast<std::size_t>(s)];
      sys(cell / k, s) = 1.0;
      sys(m + cell % k, s) = 1.0;
    }
    const Eigen::FullPivLU<Matrix> lu(sys);
    if (lu.rank() < basis) return true;
    const Vector flow = lu.solve(rhs);
    if ((sys * flow - rhs).cwiseAbs().maxCoeff() > 1e-12 || flow.minCoeff() < -1e-12) return true;
    double cost = 0.0;
    for (Index s = 0; s < basis; ++s) {
      const Index cell = chosen[static_cast<std::size_t>(s)];
      cost += flow(s) * static_cast<double>(hamming(p.support(), cell / k, q.support(), cell % k));
    }
    best = std::min(best, cost / static_cast<double>(p.dim()));
    return true;
  });
  return best;
}

double lp_min_by_bases(const Matrix& a, const Vector& b, const Vector& c) {
  const Index rows = a.rows();
  double best = std::numeric_limits<double>::infinity();
  robustmean::for_each_subset(a.cols(), rows, [&](const robustmean::IndexList& chosen) {
    Matrix sub(rows, rows);
    for (Index s = 0; s < rows; ++s) sub.col(s) = a.col(chosen[static_cast<std::size_t>(s)]);
    const Eigen::FullPivLU<Matrix> lu(sub);
    if (lu.rank() < rows) return true;
    const Vector xb = lu.solve(b);
    if (xb.minCoeff() < -1e-12) return true;
    double obj = 0.0;
    for (Index s = 0; s < rows; ++s) obj += c(chosen[static_cast<std::size_t>(s)]) * xb(s);
    best = std::min(best, obj);
    return true;
  });
  return best;
}

double d_entry_inf_bases(const robustmean::DiscreteDistribution& p, const robustmean::DiscreteDistribution& q) {
  const Index m = p.size();
  const Index k = q.size();
  const Index n = p.dim();
  if (m > 3 || k > 3) throw std::invalid_argument("oracle supports 3 x 3 at most");
  // Variables: cells, t, one slack per coordinate. The last column-marginal
  // row is dropped because it is implied by the others.
  const Index cells = m * k;
  const Index cols = cells + 1 + n;
  const Index rows = m + (k - 1) + n;
  Matrix a = Matrix::Zero(rows, cols);
  Vector b = Vector::Zero(rows);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < k; ++j) {
      const Index col = i * k + j;
      a(i, col) = 1.0;
      if (j < k - 1) a(m + j, col) = 1.0;
      for (Index c = 0; c < n; ++c) {
        if (p.support()(i, c) != q.support()(j, c)) a(m + k - 1 + c, col) = 1.0;
      }
    }
    b(i) = p.probs()(i);
  }
  for (Index j = 0; j + 1 < k; ++j) b(m + j) = q.probs()(j);
  for (Index c = 0; c < n; ++c) {
    a(m + k - 1 + c, cells) = -1.0;
    a(m + k - 1 + c, cells + 1 + c) = 1.0;
  }
  Vector cost = Vector::Zero(cols);
  cost(cells) = 1.0;
  return lp_min_by_bases(a, b, cost);
}

double disc_plain(const Matrix& m) {
  const Index n = m.rows();
  const Matrix s = robustmean::scale_matrix(m);
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    Vector x(n);
    for (Index i = 0; i < n; ++i) x(i) = (bits >> i) & 1U ? -1.0 : 1.0;
    best = std::max(best, x.dot(s * x));
  }
  return std::sqrt(best);
}

Index tukey_depth_2d(const Matrix& points, const Vector& p) {
  std::vector<Eigen::Vector2d> normals;
  Index at_p = 0;
  for (Index i = 0; i < points.rows(); ++i) {
    const Eigen::Vector2d d(points(i, 0) - p(0), points(i, 1) - p(1));
    if (d.norm() < 1e-12) {
      ++at_p;
      continue;
    }
    const Eigen::Vector2d u = d.normalized();
    normals.emplace_back(-u.y(), u.x());
    normals.emplace_back(u.y(), -u.x());
  }
  // Points within 1e-9 rad of the boundary count as on it, so that p computed
  // as a rounded line intersection keeps its exact depth.
  auto count = [&](const Eigen::Vector2d& dir) {
    const Eigen::Vector2d u = dir.normalized();
    Index c = at_p;
    for (Index i = 0; i < points.rows(); ++i) {
      const Eigen::Vector2d d(points(i, 0) - p(0), points(i, 1) - p(1));
      if (d.norm() >= 1e-12 && u.dot(d) >= -1e-9 * d.norm()) ++c;
    }
    return c;
  };
  Index best = points.rows();
  for (std::size_t a = 0; a < normals.size(); ++a) {
    for (std::size_t b = a + 1; b < normals.size(); ++b) {
      const Eigen::Vector2d mid = normals[a] + normals[b];
      if (mid.norm() < 1e-9) continue;
      best = std::min({best, count(mid), count(-mid)});
    }
  }
  // Directions toward the data points cover arcs whose endpoints are antipodal.
  for (Index i = 0; i < points.rows(); ++i) {
    const Eigen::Vector2d d(points(i, 0) - p(0), points(i, 1) - p(1));
    if (d.norm() < 1e-12) continue;
    best = std::min({best, count(d), count(-d)});
  }
  return best;
}

}  // namespace oracle
