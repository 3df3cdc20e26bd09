#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>

#include "robustmean/types.hpp"

namespace robustmean {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// N samples x n coordinates plus a missing-mask (true = entry missing).
///
/// A masked entry always stores NaN; consumers never read it.
class Dataset {
 public:
  Dataset() = default;
  /// Fully observed dataset.
  explicit Dataset(Matrix values);
  /// Values at masked positions are overwritten with NaN.
  Dataset(Matrix values, MaskMatrix mask);

  Index N() const noexcept { return values_.rows(); }
  Index n() const noexcept { return values_.cols(); }

  const Matrix& values() const noexcept { return values_; }
  const MaskMatrix& mask() const noexcept { return mask_; }

  bool missing(Index i, Index j) const { return mask_(i, j); }
  double value(Index i, Index j) const { return values_(i, j); }

  void hide(Index i, Index j);
  /// Overwrites an entry and marks it visible.
  void set(Index i, Index j, double v);

  Index missing_count() const { return static_cast<Index>(mask_.count()); }
  Index missing_in_sample(Index i) const { return static_cast<Index>(mask_.row(i).count()); }
  bool sample_complete(Index i) const { return !mask_.row(i).any(); }
  bool has_missing() const { return mask_.any(); }

  Vector sample(Index i) const { return values_.row(i).transpose(); }
  MaskVector sample_mask(Index i) const { return mask_.row(i).transpose(); }

  /// Visible values of one coordinate, in sample order.
  std::vector<double> visible_column(Index j) const;

  /// New dataset keeping only the listed samples, in order.
  Dataset select_samples(const IndexList& indices) const;

  /// CSV with one sample per line; missing entries are empty cells.
  static Dataset read_csv(std::istream& in, bool has_header = false);
  static Dataset read_csv(const std::filesystem::path& path, bool has_header = false);
  void write_csv(std::ostream& out) const;
  void write_csv(const std::filesystem::path& path) const;

  /// Bit-exact equality of shapes, masks and visible values.
  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  Matrix values_;
  MaskMatrix mask_;
};

}  // namespace robustmean
