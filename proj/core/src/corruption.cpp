#include "robustmean/corruption.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "robustmean/csv.hpp"
#include "robustmean/error.hpp"

namespace robustmean {
namespace {

constexpr double kFractionGuard = 1e-9;

void check_fraction(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(Errc::invalid_argument, std::string(what) + " must lie in [0, 1]");
  }
}

/// Sample indices ordered by descending first coordinate; masked first
/// coordinates sort last; ties go to the lower index.
IndexList by_largest_first_coordinate(const Dataset& ds) {
  IndexList order(static_cast<std::size_t>(ds.N()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const bool ma = ds.missing(a, 0);
    const bool mb = ds.missing(b, 0);
    if (ma != mb) return mb;
    if (ma) return false;
    return ds.value(a, 0) > ds.value(b, 0);
  });
  return order;
}

/// Visible sample indices of coordinate j ordered by ascending value.
IndexList ascending_visible(const Dataset& ds, Index j) {
  IndexList order;
  for (Index i = 0; i < ds.N(); ++i) {
    if (!ds.missing(i, j)) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return ds.value(a, j) < ds.value(b, j); });
  return order;
}

}  // namespace

std::string_view to_string(AdversaryKind kind) noexcept {
  switch (kind) {
    case AdversaryKind::sample_level: return "sample_level";
    case AdversaryKind::value_fraction: return "value_fraction";
    case AdversaryKind::coordinate_fraction: return "coordinate_fraction";
  }
  return "unknown";
}

AdversaryKind parse_adversary_kind(std::string_view text) {
  if (text == "sample_level" || text == "A1") return AdversaryKind::sample_level;
  if (text == "value_fraction" || text == "A2") return AdversaryKind::value_fraction;
  if (text == "coordinate_fraction" || text == "A3") return AdversaryKind::coordinate_fraction;
  throw Error(Errc::invalid_argument, "unknown adversary kind '" + std::string(text) + "'");
}

Budget::Budget(AdversaryKind k, double v) : kind(k), value(v) { check_fraction(v, "budget"); }

std::vector<Index> CorruptionPlan::cells_per_sample(Index N) const {
  std::vector<Index> counts(static_cast<std::size_t>(N), 0);
  for (const auto& c : cells) {
    if (c.sample >= 0 && c.sample < N) ++counts[static_cast<std::size_t>(c.sample)];
  }
  return counts;
}

bool CorruptionPlan::has_duplicates() const {
  std::set<std::pair<Index, Index>> seen;
  for (const auto& c : cells) {
    if (!seen.emplace(c.sample, c.coord).second) return true;
  }
  return false;
}

void CorruptionPlan::write_csv(std::ostream& out) const {
  out << "sample,coord,action,value\n";
  for (const auto& c : cells) {
    out << c.sample << ',' << c.coord << ',';
    if (c.action == CorruptionCell::Action::hide) {
      out << "hide,\n";
    } else {
      out << "replace," << csv::format_double(c.value) << '\n';
    }
  }
}

void CorruptionPlan::write_csv(const std::filesystem::path& path) const {
  auto out = csv::open_output(path);
  write_csv(out);
  if (!out) throw Error(Errc::io, "write to '" + path.string() + "' failed");
}

CorruptionPlan CorruptionPlan::read_csv(std::istream& in) {
  CorruptionPlan plan;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (row == 1 && line.rfind("sample", 0) == 0) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 4) throw ParseError("plan rows need 4 cells", row, cells.size());
    try {
      const Index i = std::stoll(cells[0]);
      const Index j = std::stoll(cells[1]);
      if (cells[2] == "hide") {
        plan.cells.push_back(CorruptionCell::hide(i, j));
      } else if (cells[2] == "replace") {
        plan.cells.push_back(CorruptionCell::replace(i, j, std::stod(cells[3])));
      } else {
        throw ParseError("action must be hide or replace", row, 3);
      }
    } catch (const std::logic_error&) {
      throw ParseError("malformed plan row", row, 1);
    }
  }
  return plan;
}

Index budget_count(double fraction, double total) {
  if (!(fraction >= 0.0)) return 0;
  const double raw = std::floor(fraction * total + kFractionGuard);
  const double cap = std::floor(total + kFractionGuard);
  return static_cast<Index>(std::clamp(raw, 0.0, std::max(cap, 0.0)));
}

CorruptionPlan plan_A1(const Dataset& ds, double epsilon, Rng& /*rng*/, const Vector& shift) {
  check_fraction(epsilon, "epsilon");
  CorruptionPlan plan;
  plan.source_kind = AdversaryKind::sample_level;
  const Vector delta = shift.size() == 0 ? Vector::Constant(ds.n(), 10.0) : shift;
  if (delta.size() != ds.n()) throw Error(Errc::dimension_mismatch, "shift length must equal n");
  const Index victims = budget_count(epsilon, static_cast<double>(ds.N()));
  if (victims == 0 || ds.n() == 0) return plan;
  const IndexList order = by_largest_first_coordinate(ds);
  for (Index k = 0; k < victims; ++k) {
    const Index i = order[static_cast<std::size_t>(k)];
    for (Index j = 0; j < ds.n(); ++j) {
      if (!ds.missing(i, j)) plan.cells.push_back(CorruptionCell::replace(i, j, ds.value(i, j) + delta(j)));
    }
  }
  return plan;
}

CorruptionPlan plan_A2_tail_hiding(const Dataset& ds, double rho) {
  check_fraction(rho, "rho");
  CorruptionPlan plan;
  plan.source_kind = AdversaryKind::value_fraction;
  const Index per_coord = budget_count(rho, static_cast<double>(ds.N()));
  if (per_coord == 0) return plan;
  for (Index j = 0; j < ds.n(); ++j) {
    const IndexList order = ascending_visible(ds, j);
    const auto take = std::min<std::size_t>(order.size(), static_cast<std::size_t>(per_coord));
    for (std::size_t k = 0; k < take; ++k) plan.cells.push_back(CorruptionCell::hide(order[k], j));
  }
  return plan;
}

CorruptionPlan plan_A3_concentrate(const Dataset& ds, double alpha) {
  check_fraction(alpha, "alpha");
  CorruptionPlan plan;
  plan.source_kind = AdversaryKind::coordinate_fraction;
  const auto N = static_cast<double>(ds.N());
  const Index count = std::min(budget_count(alpha, static_cast<double>(ds.n()) * N), ds.N());
  if (count == 0 || ds.n() == 0) return plan;

  Index target = 0;
  double best = -1.0;
  for (Index j = 0; j < ds.n(); ++j) {
    const auto col = ds.visible_column(j);
    if (col.empty()) continue;
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size());
    double var = 0.0;
    for (double v : col) var += (v - mean) * (v - mean);
    var /= static_cast<double>(col.size());
    if (var > best) {
      best = var;
      target = j;
    }
  }
  const IndexList order = ascending_visible(ds, target);
  const auto take = std::min<std::size_t>(order.size(), static_cast<std::size_t>(count));
  for (std::size_t k = 0; k < take; ++k) plan.cells.push_back(CorruptionCell::hide(order[k], target));
  return plan;
}

CorruptionPlan plan_A3_unrecoverable(const Dataset& ds, double alpha, Index mA, Rng& rng) {
  check_fraction(alpha, "alpha");
  if (mA < 1 || mA > ds.n()) throw Error(Errc::invalid_argument, "mA must lie in [1, n]");
  CorruptionPlan plan;
  plan.source_kind = AdversaryKind::coordinate_fraction;
  const double total = alpha * static_cast<double>(ds.n()) * static_cast<double>(ds.N());
  const Index victims = std::min(budget_count(1.0, total / static_cast<double>(mA)), ds.N());
  if (victims == 0) return plan;
  const IndexList order = by_largest_first_coordinate(ds);
  IndexList coords(static_cast<std::size_t>(ds.n()));
  std::iota(coords.begin(), coords.end(), Index{0});
  for (Index k = 0; k < victims; ++k) {
    const Index i = order[static_cast<std::size_t>(k)];
    for (Index c = 0; c < mA; ++c) {
      std::uniform_int_distribution<Index> pick(c, ds.n() - 1);
      std::swap(coords[static_cast<std::size_t>(c)], coords[static_cast<std::size_t>(pick(rng))]);
    }
    IndexList chosen(coords.begin(), coords.begin() + mA);
    std::sort(chosen.begin(), chosen.end());
    for (Index j : chosen) plan.cells.push_back(CorruptionCell::hide(i, j));
  }
  return plan;
}

Dataset apply_plan(const Dataset& ds, const CorruptionPlan& plan) {
  for (const auto& c : plan.cells) {
    if (c.sample < 0 || c.sample >= ds.N() || c.coord < 0 || c.coord >= ds.n()) {
      throw Error(Errc::invalid_argument, "plan cell (" + std::to_string(c.sample) + ", " +
                                              std::to_string(c.coord) + ") is out of bounds");
    }
  }
  if (plan.has_duplicates()) throw Error(Errc::invalid_argument, "plan contains duplicate cells");
  Dataset out = ds;
  for (const auto& c : plan.cells) {
    if (c.action == CorruptionCell::Action::hide) {
      out.hide(c.sample, c.coord);
    } else {
      out.set(c.sample, c.coord, c.value);
    }
  }
  return out;
}

double budget_of_plan(const CorruptionPlan& plan, AdversaryKind kind, Index N, Index n) {
  if (N <= 0 || n <= 0) return 0.0;
  switch (kind) {
    case AdversaryKind::sample_level: {
      std::set<Index> touched;
      for (const auto& c : plan.cells) touched.insert(c.sample);
      return static_cast<double>(touched.size()) / static_cast<double>(N);
    }
    case AdversaryKind::value_fraction: {
      std::vector<std::set<Index>> per_coord(static_cast<std::size_t>(n));
      for (const auto& c : plan.cells) {
        if (c.coord >= 0 && c.coord < n) per_coord[static_cast<std::size_t>(c.coord)].insert(c.sample);
      }
      std::size_t worst = 0;
      for (const auto& s : per_coord) worst = std::max(worst, s.size());
      return static_cast<double>(worst) / static_cast<double>(N);
    }
    case AdversaryKind::coordinate_fraction: {
      std::set<std::pair<Index, Index>> touched;
      for (const auto& c : plan.cells) touched.emplace(c.sample, c.coord);
      return static_cast<double>(touched.size()) / (static_cast<double>(N) * static_cast<double>(n));
    }
  }
  return 0.0;
}

bool can_simulate(const Budget& a, const Budget& b, Index n) {
  using K = AdversaryKind;
  if (n < 1) throw Error(Errc::invalid_argument, "can_simulate needs n >= 1");
  check_fraction(a.value, "budget");
  check_fraction(b.value, "budget");
  const double dn = static_cast<double>(n);
  // Budgets such as 0.3 / 6 and 0.05 differ only by rounding.
  const auto at_most = [](double x, double y) { return x <= y * (1.0 + 1e-12); };
  if (a.kind == b.kind) return at_most(b.value, a.value);
  switch (a.kind) {
    case K::sample_level:
      // A1 with eps covers A2 / A3 once their budget is at most eps / n.
      return at_most(b.value, a.value / dn);
    case K::value_fraction:
      if (b.kind == K::coordinate_fraction) return at_most(b.value, a.value / dn);
      return at_most(b.value, a.value);  // A2 covers A1 when rho >= eps
    case K::coordinate_fraction:
      return at_most(b.value, a.value);  // A3 covers A1 and A2 when alpha >= eps, rho
  }
  return false;
}

}  // namespace robustmean
