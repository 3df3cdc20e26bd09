#include "robustmean/metrics.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <string>

#include "robustmean/csv.hpp"
#include "robustmean/error.hpp"
#include "robustmean/min_cost_flow.hpp"
#include "robustmean/simplex.hpp"

namespace robustmean {
namespace {

void require_same_dim(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  if (p.dim() != q.dim()) {
    throw Error(Errc::dimension_mismatch, "distributions live in dimensions " + std::to_string(p.dim()) +
                                              " and " + std::to_string(q.dim()));
  }
}

void require_work(const DiscreteDistribution& p, const DiscreteDistribution& q, std::size_t cap) {
  const auto cells = static_cast<std::size_t>(p.size()) * static_cast<std::size_t>(q.size());
  if (cells > cap) {
    throw Error(Errc::size_cap, "coupling has " + std::to_string(cells) + " cells, cap is " + std::to_string(cap));
  }
}

// Number of coordinates where two atoms differ (exact comparison).
Index disagreements(const Matrix& a, Index i, const Matrix& b, Index j) {
  Index count = 0;
  for (Index c = 0; c < a.cols(); ++c) {
    if (a(i, c) != b(j, c)) ++count;
  }
  return count;
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(Matrix support, Vector probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  if (support_.rows() == 0 || support_.cols() == 0) {
    throw Error(Errc::invalid_argument, "a distribution needs at least one atom of dimension >= 1");
  }
  if (probs_.size() != support_.rows()) {
    throw Error(Errc::dimension_mismatch, "one probability per support point is required");
  }
  if (!support_.allFinite() || !probs_.allFinite() || (probs_.array() < 0.0).any()) {
    throw Error(Errc::invalid_argument, "probabilities must be nonnegative and atoms finite");
  }
  if (std::abs(probs_.sum() - 1.0) > 1e-9) {
    throw Error(Errc::invalid_argument, "probabilities sum to " + csv::format_double(probs_.sum()) + ", not 1");
  }
  for (Index i = 0; i < support_.rows(); ++i) {
    for (Index j = i + 1; j < support_.rows(); ++j) {
      if (support_.row(i) == support_.row(j)) {
        throw Error(Errc::invalid_argument,
                    "support points " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
    }
  }
}

DiscreteDistribution DiscreteDistribution::uniform(Matrix support) {
  const Index m = support.rows();
  if (m == 0) throw Error(Errc::invalid_argument, "empty support");
  return DiscreteDistribution(std::move(support), Vector::Constant(m, 1.0 / static_cast<double>(m)));
}

DiscreteDistribution DiscreteDistribution::read_csv(std::istream& in, bool has_header) {
  const csv::Table table = csv::read_table(in, has_header);
  if (table.rows.empty()) throw Error(Errc::parse, "distribution CSV has no atoms");
  const auto width = static_cast<Index>(table.columns());
  if (width < 2) throw Error(Errc::parse, "distribution CSV needs x1..xn and prob columns");
  Matrix support(static_cast<Index>(table.rows.size()), width - 1);
  Vector probs(support.rows());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (Index c = 0; c < width; ++c) {
      const auto& cell = table.rows[r][static_cast<std::size_t>(c)];
      if (!cell) {
        throw ParseError("empty cell in distribution CSV", r + 1 + (has_header ? 1 : 0),
                         static_cast<std::size_t>(c) + 1);
      }
      if (c + 1 < width) {
        support(static_cast<Index>(r), c) = *cell;
      } else {
        probs(static_cast<Index>(r)) = *cell;
      }
    }
  }
  return DiscreteDistribution(std::move(support), std::move(probs));
}

DiscreteDistribution DiscreteDistribution::load_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open " + path.string());
  return read_csv(in, has_header);
}

bool Coupling::has_marginals(const DiscreteDistribution& p, const DiscreteDistribution& q, double tol) const {
  if (matrix.rows() != p.size() || matrix.cols() != q.size()) return false;
  if ((matrix.array() < -tol).any()) return false;
  return (matrix.rowwise().sum() - p.probs()).cwiseAbs().maxCoeff() <= tol &&
         (matrix.colwise().sum().transpose() - q.probs()).cwiseAbs().maxCoeff() <= tol;
}

double tv_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  require_same_dim(p, q);
  double total = 0.0;
  std::vector<bool> q_matched(static_cast<std::size_t>(q.size()), false);
  for (Index i = 0; i < p.size(); ++i) {
    double qi = 0.0;
    for (Index j = 0; j < q.size(); ++j) {
      if (p.support().row(i) == q.support().row(j)) {
        qi = q.probs()(j);
        q_matched[static_cast<std::size_t>(j)] = true;
        break;
      }
    }
    total += std::abs(p.probs()(i) - qi);
  }
  for (Index j = 0; j < q.size(); ++j) {
    if (!q_matched[static_cast<std::size_t>(j)]) total += q.probs()(j);
  }
  return 0.5 * total;
}

EntryDistance d_entry_1(const DiscreteDistribution& p, const DiscreteDistribution& q, std::size_t work_cap) {
  require_same_dim(p, q);
  require_work(p, q, work_cap);
  Matrix cost(p.size(), q.size());
  for (Index i = 0; i < p.size(); ++i) {
    for (Index j = 0; j < q.size(); ++j) {
      cost(i, j) = static_cast<double>(disagreements(p.support(), i, q.support(), j));
    }
  }
  TransportResult t = solve_transport(p.probs(), q.probs(), cost);
  EntryDistance out;
  out.value = t.cost / static_cast<double>(p.dim());
  out.coupling.matrix = std::move(t.flow);
  return out;
}

double d_entry_inf(const DiscreteDistribution& p, const DiscreteDistribution& q, std::size_t work_cap,
                   Index support_cap) {
  require_same_dim(p, q);
  require_work(p, q, work_cap);
  if (p.size() > support_cap || q.size() > support_cap) {
    throw Error(Errc::size_cap, "d_entry_inf supports at most " + std::to_string(support_cap) + " atoms per side");
  }
  const Index m = p.size();
  const Index k = q.size();
  const Index n = p.dim();
  const Index cells = m * k;
  const Index t_col = cells;
  // Columns: gamma cells, t, one slack per coordinate.
  const Index cols = cells + 1 + n;
  const Index rows = m + k + n;
  Matrix a = Matrix::Zero(rows, cols);
  Vector b = Vector::Zero(rows);
  const Vector pp = p.probs() / p.probs().sum();
  const Vector qq = q.probs() / q.probs().sum();
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < k; ++j) {
      const Index col = i * k + j;
      a(i, col) = 1.0;
      a(m + j, col) = 1.0;
      for (Index c = 0; c < n; ++c) {
        if (p.support()(i, c) != q.support()(j, c)) a(m + k + c, col) = 1.0;
      }
    }
    b(i) = pp(i);
  }
  for (Index j = 0; j < k; ++j) b(m + j) = qq(j);
  for (Index c = 0; c < n; ++c) {
    a(m + k + c, t_col) = -1.0;
    a(m + k + c, cells + 1 + c) = 1.0;
  }
  Vector cost = Vector::Zero(cols);
  cost(t_col) = 1.0;

  const LpResult lp = solve_standard_lp(a, b, cost);
  if (lp.status != LpStatus::optimal) throw Error(Errc::internal, "coupling LP reported no optimum");
  return std::max(0.0, lp.objective);
}

Matrix scale_matrix(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw Error(Errc::invalid_argument, "scale_matrix needs a square matrix");
  const Vector d = m.diagonal();
  if ((d.array() <= 0.0).any() || !d.allFinite()) {
    throw Error(Errc::invalid_argument, "scale_matrix needs a strictly positive diagonal");
  }
  const Vector inv = d.cwiseSqrt().cwiseInverse();
  Matrix s = inv.asDiagonal() * m * inv.asDiagonal();
  s.diagonal().setOnes();
  return s;
}

double disc(const Matrix& m, Index n_cap) {
  const Index n = m.rows();
  if (n > n_cap) throw Error(Errc::size_cap, "disc enumerates 2^n vertices; n = " + std::to_string(n) +
                                                 " exceeds the cap " + std::to_string(n_cap));
  const Matrix s = scale_matrix(m);
  // x and -x give the same value, so x_0 stays +1.
  Vector x = Vector::Ones(n);
  Vector sx = s * x;
  double value = x.dot(sx);
  double best = value;
  double worst = value;
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  for (std::uint64_t g = 1; g < count; ++g) {
    const Index k = 1 + std::countr_zero(g);
    const double xk = x(k);
    value += -4.0 * xk * sx(k) + 4.0 * s(k, k);
    sx -= 2.0 * xk * s.col(k);
    x(k) = -xk;
    if ((g & 0xfff) == 0) {
      sx = s * x;
      value = x.dot(sx);
    }
    best = std::max(best, value);
    worst = std::min(worst, value);
  }
  if (worst < -1e-9 * static_cast<double>(n)) {
    throw Error(Errc::invalid_argument, "disc: the matrix is not positive semidefinite");
  }
  return std::sqrt(std::max(0.0, best));
}

double l2_error(const Vector& mu_hat, const Vector& mu) {
  if (mu_hat.size() != mu.size()) throw Error(Errc::dimension_mismatch, "mean vectors differ in length");
  return (mu_hat - mu).norm();
}

double mahalanobis_error(const Vector& mu_hat, const Vector& mu, const Matrix& sigma) {
  if (mu_hat.size() != mu.size() || sigma.rows() != mu.size() || sigma.cols() != mu.size()) {
    throw Error(Errc::dimension_mismatch, "Sigma must be n x n for mean vectors of length n");
  }
  const Vector diff = mu_hat - mu;
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (sigma + sigma.transpose()));
  const Vector& lambda = eig.eigenvalues();
  const double top = lambda.cwiseAbs().maxCoeff();
  if (lambda.minCoeff() < -1e-8 * top) throw Error(Errc::invalid_argument, "Sigma is not positive semidefinite");
  const Vector coords = eig.eigenvectors().transpose() * diff;
  double total = 0.0;
  double outside = 0.0;
  for (Index k = 0; k < lambda.size(); ++k) {
    if (top > 0.0 && lambda(k) > 1e-10 * top) {
      total += coords(k) * coords(k) / lambda(k);
    } else {
      outside += coords(k) * coords(k);
    }
  }
  if (std::sqrt(outside) > 1e-6 * std::max(1.0, diff.norm())) {
    throw Error(Errc::degenerate, "the error vector leaves the range of a singular Sigma");
  }
  return std::sqrt(total);
}

}  // namespace robustmean
