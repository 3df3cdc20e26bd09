#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "robustmean/types.hpp"

namespace robustmean::csv {

/// A rectangular table of decimal cells; empty cells are std::nullopt.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<double>>> rows;

  std::size_t columns() const;
};

/// Parses comma-separated decimal numbers. Empty cells are kept as nullopt.
/// Blank lines are skipped, except in a table already known to have one
/// column, where they are rows holding a single empty cell.
/// Throws ParseError (1-based row/column) on malformed numbers or ragged rows.
Table read_table(std::istream& in, bool has_header = false);
Table read_table(const std::filesystem::path& path, bool has_header = false);

/// Shortest-exact formatting: 17 significant digits, so a parse of the text
/// reproduces the double bit for bit.
std::string format_double(double value);

/// Reads a dense real matrix (no header, no empty cells).
Matrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Matrix& m);

/// Opens `path` for writing, creating parent directories. Throws Errc::io.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace robustmean::csv
