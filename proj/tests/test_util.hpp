#pragma once

#include <cmath>
#include <limits>

#include "robustmean/datagen.hpp"
#include "robustmean/dataset.hpp"
#include "robustmean/structure.hpp"

namespace testutil {

using namespace robustmean;

/// Standard-normal n x r matrix, redrawn until every r-subset of rows is
/// independent.
inline StructureMatrix general_position(Index n, Index r, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    Matrix a(n, r);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < r; ++j) a(i, j) = g(rng);
    }
    StructureMatrix s(a);
    if (check_general_position(s)) return s;
  }
}

inline Vector gaussian_vector(Index n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

inline Dataset from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const auto N = static_cast<Index>(rows.size());
  const auto n = static_cast<Index>(rows.begin()->size());
  Matrix values(N, n);
  MaskMatrix mask = MaskMatrix::Constant(N, n, false);
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (double v : row) {
      values(i, j) = v;
      mask(i, j) = std::isnan(v);
      ++j;
    }
    ++i;
  }
  return Dataset(values, mask);
}

inline constexpr double NA = std::numeric_limits<double>::quiet_NaN();

}  // namespace testutil
