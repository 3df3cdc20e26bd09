#include "robustmean/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "robustmean/error.hpp"

namespace robustmean {
namespace {

bool lexicographically_less(const Vector& a, const Vector& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

double median_of(std::vector<double> values) {
  const std::size_t m = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(m), values.end());
  const double hi = values[m];
  if (values.size() % 2 == 1) return hi;
  const double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(m));
  return 0.5 * (lo + hi);
}

void check_sample_length(const StructureMatrix& a, const Vector& x) {
  if (x.size() != a.n()) {
    throw Error(Errc::dimension_mismatch, "sample length " + std::to_string(x.size()) +
                                              " does not match structure rows " + std::to_string(a.n()));
  }
}

}  // namespace

std::string_view to_string(RecoveryStatus status) noexcept {
  switch (status) {
    case RecoveryStatus::recovered: return "recovered";
    case RecoveryStatus::unchanged: return "unchanged";
    case RecoveryStatus::unrecoverable: return "unrecoverable";
  }
  return "unknown";
}

Index hamming_distance(const Vector& a, const Vector& b, double tol) {
  return static_cast<Index>(((a - b).array().abs() > tol).count());
}

double equality_tolerance(const Vector& x) {
  const double scale = x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0;
  return 1e-8 * std::max(1.0, scale);
}

Vector project_onto_range(const StructureMatrix& a, const Vector& x) {
  check_sample_length(a, x);
  const Vector z = a.entries().completeOrthogonalDecomposition().solve(x);
  return a.entries() * z;
}

bool in_range(const StructureMatrix& a, const Vector& x, double tol) {
  return (project_onto_range(a, x) - x).cwiseAbs().maxCoeff() <= tol;
}

RecoveryOutcome impute_known_structure(const Vector& x, const MaskVector& missing,
                                       const StructureMatrix& a, const ImputeOptions& opts) {
  check_sample_length(a, x);
  if (missing.size() != x.size()) throw Error(Errc::dimension_mismatch, "mask length differs from sample");

  RecoveryOutcome out;
  if (!missing.any()) {
    out.status = RecoveryStatus::unchanged;
    out.sample = x;
    return out;
  }
  IndexList visible;
  for (Index i = 0; i < x.size(); ++i) {
    if (!missing(i)) visible.push_back(i);
  }
  const Matrix a_vis = a.rows(visible);
  if (numerical_rank(a_vis, a.rank_tol()) < a.rank()) return out;

  Vector x_vis(static_cast<Index>(visible.size()));
  for (std::size_t k = 0; k < visible.size(); ++k) x_vis(static_cast<Index>(k)) = x(visible[k]);
  const Vector z = a_vis.completeOrthogonalDecomposition().solve(x_vis);
  if (opts.residual_tol >= 0.0) {
    const double scale = std::max(1.0, x_vis.norm());
    if ((a_vis * z - x_vis).norm() > opts.residual_tol * scale) return out;
  }
  Vector filled = x;
  const Vector fitted = a.entries() * z;
  for (Index i = 0; i < x.size(); ++i) {
    if (missing(i)) filled(i) = fitted(i);
  }
  out.status = RecoveryStatus::recovered;
  out.sample = std::move(filled);
  return out;
}

std::string CompletionReport::to_json() const {
  nlohmann::json j;
  j["recovered_indices"] = recovered_indices;
  j["discarded_indices"] = discarded_indices;
  j["iterations"] = iterations;
  j["converged"] = converged;
  return j.dump(2);
}

CompletionReport ithsvd_complete(const Dataset& ds, const IthsvdOptions& opts) {
  if (opts.target_rank < 1) throw Error(Errc::invalid_argument, "ITHSVD target rank must be >= 1");
  if (opts.max_iter < 0) throw Error(Errc::invalid_argument, "ITHSVD max_iter must be >= 0");

  CompletionReport report;
  report.completed = ds;
  report.iterations = 0;
  report.converged = true;
  if (!ds.has_missing()) return report;

  const Index n = ds.n();
  IndexList retained;
  for (Index i = 0; i < ds.N(); ++i) {
    if (ds.sample_complete(i)) {
      retained.push_back(i);
    } else if (n - ds.missing_in_sample(i) >= opts.target_rank) {
      retained.push_back(i);
      report.recovered_indices.push_back(i);
    } else {
      report.discarded_indices.push_back(i);
    }
  }
  if (report.recovered_indices.empty()) return report;

  const auto rows = static_cast<Index>(retained.size());
  Matrix x(rows, n);
  MaskMatrix masked(rows, n);
  for (Index k = 0; k < rows; ++k) {
    x.row(k) = ds.values().row(retained[static_cast<std::size_t>(k)]);
    masked.row(k) = ds.mask().row(retained[static_cast<std::size_t>(k)]);
  }
  for (Index j = 0; j < n; ++j) {
    std::vector<double> col;
    for (Index k = 0; k < rows; ++k) {
      if (!masked(k, j)) col.push_back(x(k, j));
    }
    if (col.empty()) {
      throw Error(Errc::unrecoverable,
                  "coordinate " + std::to_string(j) + " has no visible entry; it cannot be completed");
    }
    const double med = median_of(std::move(col));
    for (Index k = 0; k < rows; ++k) {
      if (masked(k, j)) x(k, j) = med;
    }
  }

  const Index rank = std::min(opts.target_rank, std::min(rows, n));
  report.converged = false;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    report.iterations = iter;
    const Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinV);
    const Matrix vk = svd.matrixV().leftCols(rank);
    double change = 0.0;
    if (opts.refit_rows) {
      for (Index k = 0; k < rows; ++k) {
        if (!masked.row(k).any()) continue;
        IndexList seen;
        IndexList hidden;
        for (Index j = 0; j < n; ++j) (masked(k, j) ? hidden : seen).push_back(j);
        Matrix v_seen(static_cast<Index>(seen.size()), rank);
        Vector x_seen(v_seen.rows());
        for (std::size_t s = 0; s < seen.size(); ++s) {
          v_seen.row(static_cast<Index>(s)) = vk.row(seen[s]);
          x_seen(static_cast<Index>(s)) = x(k, seen[s]);
        }
        const Vector coef = v_seen.completeOrthogonalDecomposition().solve(x_seen);
        for (Index j : hidden) {
          const double fresh = vk.row(j).dot(coef);
          change = std::max(change, std::abs(fresh - x(k, j)));
          x(k, j) = fresh;
        }
      }
    } else {
      const Matrix projected = (x * vk) * vk.transpose();
      for (Index k = 0; k < rows; ++k) {
        for (Index j = 0; j < n; ++j) {
          if (!masked(k, j)) continue;
          change = std::max(change, std::abs(projected(k, j) - x(k, j)));
          x(k, j) = projected(k, j);
        }
      }
    }
    if (change <= opts.tol) {
      report.converged = true;
      break;
    }
  }

  for (Index k = 0; k < rows; ++k) {
    const Index i = retained[static_cast<std::size_t>(k)];
    for (Index j = 0; j < n; ++j) {
      if (masked(k, j)) report.completed.set(i, j, x(k, j));
    }
  }
  return report;
}

bool check_nowak_conditions(const MaskMatrix& mask, Index r) {
  const Index N = mask.rows();
  const Index n = mask.cols();
  if (r < 1 || r >= n) throw Error(Errc::invalid_argument, "check_nowak_conditions needs 1 <= r < n");
  if (N < (r + 1) * (n - r)) return false;

  // Hidden pattern -> remaining sample count. Patterns with fewer hidden
  // coordinates come first so the greedy prefers the most informative ones.
  struct PatternKey {
    std::vector<bool> hidden;
    Index hidden_count;
    bool operator<(const PatternKey& o) const {
      if (hidden_count != o.hidden_count) return hidden_count < o.hidden_count;
      return hidden < o.hidden;
    }
  };
  std::map<PatternKey, Index> remaining;
  for (Index i = 0; i < N; ++i) {
    PatternKey key{std::vector<bool>(static_cast<std::size_t>(n)), 0};
    for (Index j = 0; j < n; ++j) {
      key.hidden[static_cast<std::size_t>(j)] = mask(i, j);
      key.hidden_count += mask(i, j) ? 1 : 0;
    }
    ++remaining[key];
  }

  const Index group_size = n - r;
  for (Index g = 0; g <= r; ++g) {
    auto start = std::find_if(remaining.begin(), remaining.end(), [&](const auto& kv) {
      return kv.second > 0 && n - kv.first.hidden_count >= r + 1;
    });
    if (start == remaining.end()) return false;
    std::vector<bool> in_visible_set(static_cast<std::size_t>(n), false);
    Index picked = 0;
    for (Index j = 0; j < n && picked < r + 1; ++j) {
      if (!start->first.hidden[static_cast<std::size_t>(j)]) {
        in_visible_set[static_cast<std::size_t>(j)] = true;
        ++picked;
      }
    }
    --start->second;
    for (Index size = 1; size < group_size; ++size) {
      bool extended = false;
      for (auto& [key, count] : remaining) {
        if (count == 0) continue;
        for (Index j = 0; j < n; ++j) {
          const auto uj = static_cast<std::size_t>(j);
          if (!key.hidden[uj] && !in_visible_set[uj]) {
            in_visible_set[uj] = true;
            --count;
            extended = true;
            break;
          }
        }
        if (extended) break;
      }
      if (!extended) return false;
    }
  }
  return true;
}

RecoveryOutcome recover_replacement_randomized(const StructureMatrix& a, const Vector& x_tilde,
                                               double c, Rng& rng) {
  check_sample_length(a, x_tilde);
  if (!(c > 0.0)) throw Error(Errc::invalid_argument, "accuracy parameter c must be positive");
  if (!a.full_column_rank()) throw Error(Errc::invalid_argument, "replacement recovery needs full column rank A");

  const double tol = equality_tolerance(x_tilde);
  RecoveryOutcome out;
  if (in_range(a, x_tilde, tol)) {
    out.status = RecoveryStatus::unchanged;
    out.sample = x_tilde;
    return out;
  }
  const Index r = a.r();
  const auto rounds = static_cast<long>(std::ceil(std::pow(static_cast<double>(r), c) - 1e-9));
  Vector best;
  Index best_h = a.n() + 1;
  for (long round = 0; round < std::max(1L, rounds); ++round) {
    const IndexList rows = sample_independent_rows(a, r, rng);
    Vector x_rows(r);
    for (Index k = 0; k < r; ++k) x_rows(k) = x_tilde(rows[static_cast<std::size_t>(k)]);
    const Vector z = a.rows(rows).partialPivLu().solve(x_rows);
    Vector candidate = a.entries() * z;
    const Index h = hamming_distance(x_tilde, candidate, tol);
    if (h < best_h || (h == best_h && lexicographically_less(candidate, best))) {
      best_h = h;
      best = std::move(candidate);
    }
  }
  out.status = RecoveryStatus::recovered;
  out.sample = std::move(best);
  out.residual_hamming = best_h;
  return out;
}

RecoveryOutcome recover_replacement_bruteforce(const StructureMatrix& a, const Vector& x_tilde,
                                               std::size_t max_work) {
  check_sample_length(a, x_tilde);
  if (!a.full_column_rank()) throw Error(Errc::invalid_argument, "replacement recovery needs full column rank A");
  const Index r = a.r();
  if (binomial(static_cast<std::size_t>(a.n()), static_cast<std::size_t>(r)) > max_work) {
    throw Error(Errc::size_cap, "recover_replacement_bruteforce: C(n, r) exceeds the work cap");
  }

  const double tol = equality_tolerance(x_tilde);
  RecoveryOutcome out;
  if (in_range(a, x_tilde, tol)) {
    out.status = RecoveryStatus::unchanged;
    out.sample = x_tilde;
    return out;
  }

  Index best_h = a.n() + 1;
  std::vector<Vector> minimizers;  // pairwise distinct within tol
  for_each_subset(a.n(), r, [&](const IndexList& rows) {
    const Matrix sub = a.rows(rows);
    if (numerical_rank(sub, a.rank_tol()) < r) return true;
    Vector x_rows(r);
    for (Index k = 0; k < r; ++k) x_rows(k) = x_tilde(rows[static_cast<std::size_t>(k)]);
    Vector candidate = a.entries() * sub.partialPivLu().solve(x_rows);
    const Index h = hamming_distance(x_tilde, candidate, tol);
    if (h < best_h) {
      best_h = h;
      minimizers.clear();
      minimizers.push_back(std::move(candidate));
    } else if (h == best_h) {
      const bool seen = std::any_of(minimizers.begin(), minimizers.end(), [&](const Vector& m) {
        return hamming_distance(m, candidate, tol) == 0;
      });
      if (!seen) {
        minimizers.push_back(std::move(candidate));
      }
    }
    return true;
  });
  if (minimizers.empty()) throw Error(Errc::degenerate, "no independent r-subset of rows exists");

  out.status = RecoveryStatus::recovered;
  out.sample = *std::min_element(minimizers.begin(), minimizers.end(), lexicographically_less);
  out.residual_hamming = best_h;
  out.unique_minimizer = minimizers.size() == 1;
  return out;
}

}  // namespace robustmean
