#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "robustmean/dataset.hpp"
#include "robustmean/types.hpp"

namespace robustmean {

/// Which adversary a budget belongs to.
///   sample_level        - epsilon: fraction of whole samples (A1)
///   value_fraction      - rho: fraction of values in each coordinate (A2)
///   coordinate_fraction - alpha: fraction of all N*n values (A3)
enum class AdversaryKind { sample_level, value_fraction, coordinate_fraction };

std::string_view to_string(AdversaryKind kind) noexcept;
AdversaryKind parse_adversary_kind(std::string_view text);

struct Budget {
  AdversaryKind kind = AdversaryKind::sample_level;
  double value = 0.0;

  Budget() = default;
  Budget(AdversaryKind k, double v);
};

struct CorruptionCell {
  enum class Action { hide, replace };

  Index sample = 0;
  Index coord = 0;
  Action action = Action::hide;
  double value = 0.0;  // replacement value; unused for hide

  static CorruptionCell hide(Index i, Index j) { return {i, j, Action::hide, 0.0}; }
  static CorruptionCell replace(Index i, Index j, double v) { return {i, j, Action::replace, v}; }
};

/// The cells an adversary chose, applied atomically by apply_plan.
struct CorruptionPlan {
  std::vector<CorruptionCell> cells;
  AdversaryKind source_kind = AdversaryKind::sample_level;

  bool empty() const noexcept { return cells.empty(); }
  std::size_t size() const noexcept { return cells.size(); }
  /// Number of cells touching each sample (delta per sample).
  std::vector<Index> cells_per_sample(Index N) const;
  bool has_duplicates() const;

  void write_csv(std::ostream& out) const;
  void write_csv(const std::filesystem::path& path) const;
  static CorruptionPlan read_csv(std::istream& in);
};

/// floor(fraction * total), clamped to [0, floor(total)]. A 1e-9 guard
/// absorbs representation error, e.g. 0.29 * 100.
Index budget_count(double fraction, double total);

/// A1: the floor(eps*N) samples with the largest first coordinate (ties to the
/// lower index) have every visible coordinate replaced by value + shift.
/// An empty `shift` means +10 on every coordinate.
CorruptionPlan plan_A1(const Dataset& ds, double epsilon, Rng& rng, const Vector& shift = {});

/// A2 tail hiding: per coordinate, hide the floor(rho*N) smallest visible
/// values (ties to the lower sample index).
CorruptionPlan plan_A2_tail_hiding(const Dataset& ds, double rho);

/// A3 concentration: hide the min(floor(alpha*n*N), N) smallest entries of the
/// coordinate with the largest empirical variance.
CorruptionPlan plan_A3_concentrate(const Dataset& ds, double alpha);

/// A3 spending its whole budget on unrecoverable samples: hides a random
/// mA-subset of coordinates in each of floor(alpha*n*N/mA) victims, chosen by
/// largest first coordinate.
CorruptionPlan plan_A3_unrecoverable(const Dataset& ds, double alpha, Index mA, Rng& rng);

/// Applies the plan to a copy of `ds`. Hide masks the cell (value -> NaN);
/// Replace overwrites the value and marks it visible. Throws
/// Errc::invalid_argument on out-of-range or duplicate cells.
Dataset apply_plan(const Dataset& ds, const CorruptionPlan& plan);

/// Budget actually spent by a plan, measured in the given adversary's units.
double budget_of_plan(const CorruptionPlan& plan, AdversaryKind kind, Index N, Index n);

/// Sufficient conditions under which adversary `a` can perform every
/// corruption adversary `b` can. Returns false whenever no such condition is
/// established (which does not mean simulation is impossible).
bool can_simulate(const Budget& a, const Budget& b, Index n);

}  // namespace robustmean
