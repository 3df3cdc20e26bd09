#include "robustmean/dataset.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "robustmean/csv.hpp"
#include "robustmean/error.hpp"

namespace robustmean {

Dataset::Dataset(Matrix values)
    : values_(std::move(values)), mask_(MaskMatrix::Constant(values_.rows(), values_.cols(), false)) {}

Dataset::Dataset(Matrix values, MaskMatrix mask) : values_(std::move(values)), mask_(std::move(mask)) {
  if (values_.rows() != mask_.rows() || values_.cols() != mask_.cols()) {
    throw Error(Errc::dimension_mismatch, "dataset values and mask differ in shape");
  }
  for (Index i = 0; i < values_.rows(); ++i) {
    for (Index j = 0; j < values_.cols(); ++j) {
      if (mask_(i, j)) values_(i, j) = kMissing;
    }
  }
}

void Dataset::hide(Index i, Index j) {
  mask_(i, j) = true;
  values_(i, j) = kMissing;
}

void Dataset::set(Index i, Index j, double v) {
  mask_(i, j) = false;
  values_(i, j) = v;
}

std::vector<double> Dataset::visible_column(Index j) const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(N()));
  for (Index i = 0; i < N(); ++i) {
    if (!mask_(i, j)) out.push_back(values_(i, j));
  }
  return out;
}

Dataset Dataset::select_samples(const IndexList& indices) const {
  Matrix v(static_cast<Index>(indices.size()), n());
  MaskMatrix m(static_cast<Index>(indices.size()), n());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    v.row(static_cast<Index>(k)) = values_.row(indices[k]);
    m.row(static_cast<Index>(k)) = mask_.row(indices[k]);
  }
  return Dataset(std::move(v), std::move(m));
}

Dataset Dataset::read_csv(std::istream& in, bool has_header) {
  const csv::Table table = csv::read_table(in, has_header);
  const auto rows = static_cast<Index>(table.rows.size());
  const auto cols = static_cast<Index>(table.columns());
  Matrix v(rows, cols);
  MaskMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const auto& cell = table.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      m(i, j) = !cell.has_value();
      v(i, j) = cell.value_or(kMissing);
    }
  }
  return Dataset(std::move(v), std::move(m));
}

Dataset Dataset::read_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open '" + path.string() + "' for reading");
  return read_csv(in, has_header);
}

void Dataset::write_csv(std::ostream& out) const {
  for (Index i = 0; i < N(); ++i) {
    for (Index j = 0; j < n(); ++j) {
      if (j) out << ',';
      if (!mask_(i, j)) out << csv::format_double(values_(i, j));
    }
    out << '\n';
  }
}

void Dataset::write_csv(const std::filesystem::path& path) const {
  auto out = csv::open_output(path);
  write_csv(out);
  if (!out) throw Error(Errc::io, "write to '" + path.string() + "' failed");
}

bool operator==(const Dataset& a, const Dataset& b) {
  if (a.N() != b.N() || a.n() != b.n()) return false;
  if ((a.mask_ != b.mask_).any()) return false;
  for (Index i = 0; i < a.N(); ++i) {
    for (Index j = 0; j < a.n(); ++j) {
      if (a.mask_(i, j)) continue;
      const double x = a.values_(i, j);
      const double y = b.values_(i, j);
      if (std::memcmp(&x, &y, sizeof(double)) != 0) return false;
    }
  }
  return true;
}

}  // namespace robustmean
