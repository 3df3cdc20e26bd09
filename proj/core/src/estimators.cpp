#include "robustmean/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "robustmean/error.hpp"
#include "robustmean/recovery.hpp"

namespace robustmean {
namespace {

constexpr std::size_t kMaxTukeyCandidates = 5'000'000;

void require_samples(const Dataset& ds) {
  if (ds.N() == 0) throw Error(Errc::no_data, "dataset has no samples");
}

std::vector<double> visible_or_throw(const Dataset& ds, Index j) {
  auto col = ds.visible_column(j);
  if (col.empty()) {
    throw Error(Errc::no_data, "coordinate " + std::to_string(j) + " has no visible entry");
  }
  return col;
}

double median_sorted(const std::vector<double>& sorted) {
  const std::size_t m = sorted.size() / 2;
  if (sorted.size() % 2 == 1) return sorted[m];
  return 0.5 * (sorted[m - 1] + sorted[m]);
}

Index depth_1d(const Matrix& points, double p) {
  Index below = 0;
  Index above = 0;
  for (Index i = 0; i < points.rows(); ++i) {
    if (points(i, 0) <= p) ++below;
    if (points(i, 0) >= p) ++above;
  }
  return std::min(below, above);
}

Index depth_2d(const Matrix& points, const Vector& p) {
  const double scale = std::max(1.0, points.cwiseAbs().maxCoeff());
  const double eps = 1e-12 * scale;
  Index coincident = 0;
  std::vector<Eigen::Vector2d> offsets;
  std::vector<double> critical;
  for (Index i = 0; i < points.rows(); ++i) {
    const Eigen::Vector2d d(points(i, 0) - p(0), points(i, 1) - p(1));
    if (d.norm() <= eps) {
      ++coincident;
      continue;
    }
    offsets.push_back(d);
    const double phi = std::atan2(d.y(), d.x());
    for (double theta : {phi + std::numbers::pi / 2, phi - std::numbers::pi / 2}) {
      critical.push_back(std::fmod(theta + 4 * std::numbers::pi, 2 * std::numbers::pi));
    }
  }
  if (offsets.empty()) return coincident;
  std::sort(critical.begin(), critical.end());
  Index best = points.rows();
  for (std::size_t k = 0; k < critical.size(); ++k) {
    const double next = k + 1 < critical.size() ? critical[k + 1] : critical.front() + 2 * std::numbers::pi;
    // Arcs this narrow come from rounding in the location of p, not from geometry.
    if (next - critical[k] <= 1e-9) continue;
    const double mid = 0.5 * (critical[k] + next);
    const Eigen::Vector2d u(std::cos(mid), std::sin(mid));
    Index count = coincident;
    for (const auto& d : offsets) {
      if (u.dot(d) >= 0.0) ++count;
    }
    best = std::min(best, count);
  }
  return best;
}

}  // namespace

std::string_view to_string(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::empirical_mean: return "empirical_mean";
    case EstimatorKind::coordinate_median: return "coordinate_median";
    case EstimatorKind::sanitized_mean: return "sanitized_mean";
    case EstimatorKind::tukey_median_small: return "tukey_median";
    case EstimatorKind::two_step: return "two_step";
  }
  return "unknown";
}

std::string_view to_string(RecoveryMethod method) noexcept {
  switch (method) {
    case RecoveryMethod::known_structure: return "known_structure";
    case RecoveryMethod::ithsvd: return "ithsvd";
    case RecoveryMethod::replacement_randomized: return "replacement_randomized";
    case RecoveryMethod::replacement_bruteforce: return "replacement_bruteforce";
    case RecoveryMethod::sparse_omp: return "sparse_omp";
  }
  return "unknown";
}

EstimatorKind parse_estimator_kind(std::string_view text) {
  for (auto k : {EstimatorKind::empirical_mean, EstimatorKind::coordinate_median, EstimatorKind::sanitized_mean,
                 EstimatorKind::tukey_median_small, EstimatorKind::two_step}) {
    if (text == to_string(k)) return k;
  }
  throw Error(Errc::config, "unknown estimator kind '" + std::string(text) + "'");
}

RecoveryMethod parse_recovery_method(std::string_view text) {
  for (auto m : {RecoveryMethod::known_structure, RecoveryMethod::ithsvd, RecoveryMethod::replacement_randomized,
                 RecoveryMethod::replacement_bruteforce, RecoveryMethod::sparse_omp}) {
    if (text == to_string(m)) return m;
  }
  throw Error(Errc::config, "unknown recovery method '" + std::string(text) + "'");
}

EstimatorSpec EstimatorSpec::simple(EstimatorKind kind) {
  EstimatorSpec spec;
  spec.kind = kind;
  return spec;
}

EstimatorSpec EstimatorSpec::two_step(RecoverySpec recovery, EstimatorKind inner) {
  EstimatorSpec spec;
  spec.kind = EstimatorKind::two_step;
  spec.recovery = recovery;
  spec.inner = inner;
  return spec;
}

void EstimatorSpec::validate() const {
  if (kind == EstimatorKind::two_step) {
    if (!recovery || !inner) throw Error(Errc::config, "two_step needs both a recovery method and an inner estimator");
    if (*inner == EstimatorKind::two_step) throw Error(Errc::config, "two_step cannot nest another two_step");
  } else if (recovery || inner) {
    throw Error(Errc::config, std::string(to_string(kind)) + " takes no recovery or inner estimator");
  }
}

Vector empirical_mean(const Dataset& ds) {
  require_samples(ds);
  Vector mu(ds.n());
  for (Index j = 0; j < ds.n(); ++j) {
    const auto col = visible_or_throw(ds, j);
    double sum = 0.0;
    for (double v : col) sum += v;
    mu(j) = sum / static_cast<double>(col.size());
  }
  return mu;
}

Vector coordinate_median(const Dataset& ds) {
  require_samples(ds);
  Vector med(ds.n());
  for (Index j = 0; j < ds.n(); ++j) {
    auto col = visible_or_throw(ds, j);
    std::sort(col.begin(), col.end());
    med(j) = median_sorted(col);
  }
  return med;
}

Vector sanitized_mean(const Dataset& ds) {
  Vector sum = Vector::Zero(ds.n());
  Index clean = 0;
  for (Index i = 0; i < ds.N(); ++i) {
    if (!ds.sample_complete(i)) continue;
    sum += ds.values().row(i).transpose();
    ++clean;
  }
  if (clean == 0) throw Error(Errc::no_data, "sanitized mean: every sample has a missing entry");
  return sum / static_cast<double>(clean);
}

Index tukey_depth(const Matrix& points, const Vector& point) {
  if (points.cols() != point.size()) throw Error(Errc::dimension_mismatch, "point dimension differs from samples");
  if (points.cols() == 1) return depth_1d(points, point(0));
  if (points.cols() == 2) return depth_2d(points, point);
  throw Error(Errc::size_cap, "exact Tukey depth is implemented for dimensions 1 and 2 only");
}

Vector tukey_median_small(const Dataset& ds, Index dim_cap) {
  require_samples(ds);
  if (ds.n() > dim_cap || ds.n() > 2) {
    throw Error(Errc::size_cap, "Tukey median is exact only up to dimension " + std::to_string(std::min<Index>(dim_cap, 2)));
  }
  if (ds.has_missing()) throw Error(Errc::invalid_argument, "Tukey median needs fully observed samples");
  if (ds.n() == 1) return coordinate_median(ds);

  const Matrix& pts = ds.values();
  const Index N = pts.rows();
  struct Line {
    Eigen::Vector2d normal;
    double offset;  // normal . x = offset
  };
  std::vector<Line> lines;
  for (Index i = 0; i < N; ++i) {
    for (Index k = i + 1; k < N; ++k) {
      const Eigen::Vector2d d = (pts.row(k) - pts.row(i)).transpose();
      if (d.norm() == 0.0) continue;
      const Eigen::Vector2d normal(-d.y(), d.x());
      lines.push_back({normal, normal.dot(pts.row(i).transpose())});
    }
  }
  if (lines.size() * lines.size() / 2 > kMaxTukeyCandidates) {
    throw Error(Errc::size_cap, "too many Tukey-median candidates; reduce the sample count");
  }
  std::vector<Eigen::Vector2d> candidates;
  for (Index i = 0; i < N; ++i) candidates.emplace_back(pts(i, 0), pts(i, 1));
  for (std::size_t a = 0; a < lines.size(); ++a) {
    for (std::size_t b = a + 1; b < lines.size(); ++b) {
      Eigen::Matrix2d m;
      m.row(0) = lines[a].normal.transpose();
      m.row(1) = lines[b].normal.transpose();
      const double det = m.determinant();
      if (std::abs(det) <= 1e-12 * lines[a].normal.norm() * lines[b].normal.norm()) continue;
      candidates.push_back(m.inverse() * Eigen::Vector2d(lines[a].offset, lines[b].offset));
    }
  }

  Eigen::Vector2d best = candidates.front();
  Index best_depth = -1;
  for (const auto& c : candidates) {
    const Index d = depth_2d(pts, c);
    if (d > best_depth || (d == best_depth && (c.x() < best.x() || (c.x() == best.x() && c.y() < best.y())))) {
      best_depth = d;
      best = c;
    }
  }
  return Vector(best);
}

TwoStepResult two_step_estimate_detailed(const Dataset& ds, const StructureMatrix* a, const EstimatorSpec& spec) {
  spec.validate();
  if (spec.kind != EstimatorKind::two_step) throw Error(Errc::invalid_argument, "spec is not a two_step estimator");
  const RecoverySpec& rec = *spec.recovery;
  const bool needs_structure = rec.method != RecoveryMethod::ithsvd;
  if (needs_structure && a == nullptr) {
    throw Error(Errc::invalid_argument, std::string(to_string(rec.method)) + " recovery needs the structure matrix");
  }
  if (a != nullptr && a->n() != ds.n()) throw Error(Errc::dimension_mismatch, "structure rows differ from dataset dimension");

  TwoStepResult result;
  Dataset repaired = ds;
  std::vector<bool> drop(static_cast<std::size_t>(ds.N()), false);

  switch (rec.method) {
    case RecoveryMethod::known_structure: {
      for (Index i = 0; i < ds.N(); ++i) {
        if (ds.sample_complete(i)) continue;
        const auto outcome = impute_known_structure(ds.sample(i), ds.sample_mask(i), *a);
        if (!outcome.usable()) {
          drop[static_cast<std::size_t>(i)] = true;
          continue;
        }
        for (Index j = 0; j < ds.n(); ++j) {
          if (ds.missing(i, j)) repaired.set(i, j, (*outcome.sample)(j));
        }
        result.recovered.push_back(i);
      }
      break;
    }
    case RecoveryMethod::ithsvd: {
      IthsvdOptions opts;
      opts.target_rank = rec.rank > 0 ? rec.rank : (a != nullptr ? a->rank() : 0);
      if (opts.target_rank < 1) throw Error(Errc::config, "ithsvd recovery needs a target rank");
      opts.max_iter = rec.max_iter;
      opts.tol = rec.tol;
      CompletionReport report = ithsvd_complete(ds, opts);
      repaired = std::move(report.completed);
      result.recovered = std::move(report.recovered_indices);
      for (Index i : report.discarded_indices) drop[static_cast<std::size_t>(i)] = true;
      break;
    }
    case RecoveryMethod::replacement_randomized:
    case RecoveryMethod::replacement_bruteforce:
    case RecoveryMethod::sparse_omp: {
      if (ds.has_missing()) {
        throw Error(Errc::invalid_argument, "replacement recovery needs fully observed samples");
      }
      const Index mA = rec.mA ? *rec.mA : compute_mA_exact(*a);
      const Index parity = rec.parity_rows > 0 ? rec.parity_rows : a->n() - a->rank();
      Rng rng(rec.seed);
      for (Index i = 0; i < ds.N(); ++i) {
        const Vector x = ds.sample(i);
        RecoveryOutcome outcome;
        if (rec.method == RecoveryMethod::replacement_randomized) {
          outcome = recover_replacement_randomized(*a, x, rec.c, rng);
        } else if (rec.method == RecoveryMethod::replacement_bruteforce) {
          outcome = recover_replacement_bruteforce(*a, x);
        } else {
          outcome = recover_via_sparse(*a, x, rec.sparsity, parity, rng);
        }
        // A residual of m_A / 2 or more cannot certify the original sample.
        if (!outcome.usable() || 2 * outcome.residual_hamming >= mA) {
          drop[static_cast<std::size_t>(i)] = true;
          continue;
        }
        if (outcome.status == RecoveryStatus::recovered) {
          for (Index j = 0; j < ds.n(); ++j) repaired.set(i, j, (*outcome.sample)(j));
          result.recovered.push_back(i);
        }
      }
      break;
    }
  }

  IndexList keep;
  for (Index i = 0; i < ds.N(); ++i) {
    if (drop[static_cast<std::size_t>(i)]) {
      result.discarded.push_back(i);
    } else {
      keep.push_back(i);
    }
  }
  if (keep.empty()) throw Error(Errc::no_data, "two_step: every sample was discarded as unrecoverable");
  const Dataset kept = repaired.select_samples(keep);
  result.estimate = estimate(kept, EstimatorSpec::simple(*spec.inner), a);
  return result;
}

Vector two_step_estimate(const Dataset& ds, const StructureMatrix* a, const EstimatorSpec& spec) {
  return two_step_estimate_detailed(ds, a, spec).estimate;
}

Vector estimate(const Dataset& ds, const EstimatorSpec& spec, const StructureMatrix* a) {
  spec.validate();
  switch (spec.kind) {
    case EstimatorKind::empirical_mean: return empirical_mean(ds);
    case EstimatorKind::coordinate_median: return coordinate_median(ds);
    case EstimatorKind::sanitized_mean: return sanitized_mean(ds);
    case EstimatorKind::tukey_median_small: return tukey_median_small(ds, spec.tukey_dim_cap);
    case EstimatorKind::two_step: return two_step_estimate(ds, a, spec);
  }
  throw Error(Errc::internal, "unhandled estimator kind");
}

}  // namespace robustmean
