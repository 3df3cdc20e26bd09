#include "robustmean/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "robustmean/error.hpp"

namespace robustmean::csv {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

}  // namespace

std::size_t Table::columns() const {
  if (!rows.empty()) return rows.front().size();
  return header.size();
}

Table read_table(std::istream& in, bool has_header) {
  Table table;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> width;
  while (std::getline(in, line)) {
    ++line_no;
    // In a one-column table a blank line is a row with one empty cell.
    if (trim(line).empty() && width != 1u) continue;
    const auto cells = split(line);
    if (has_header && table.header.empty() && table.rows.empty()) {
      for (auto c : cells) table.header.emplace_back(c);
      width = cells.size();
      continue;
    }
    if (width && cells.size() != *width) {
      throw ParseError("ragged row: expected " + std::to_string(*width) + " cells, found " +
                           std::to_string(cells.size()),
                       line_no, std::min(cells.size(), *width) + 1);
    }
    width = cells.size();
    std::vector<std::optional<double>> row;
    row.reserve(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const auto cell = cells[j];
      if (cell.empty()) {
        row.emplace_back(std::nullopt);
        continue;
      }
      double value = 0.0;
      const char* first = cell.data();
      if (*first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), value);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ParseError("not a decimal number: '" + std::string(cell) + "'", line_no, j + 1);
      }
      row.emplace_back(value);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table read_table(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open '" + path.string() + "' for reading");
  return read_table(in, has_header);
}

std::string format_double(double value) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

Matrix read_matrix(const std::filesystem::path& path) {
  const Table table = read_table(path);
  if (table.rows.empty()) throw Error(Errc::parse, "'" + path.string() + "' holds no rows");
  Matrix m(static_cast<Index>(table.rows.size()), static_cast<Index>(table.columns()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < table.rows[i].size(); ++j) {
      if (!table.rows[i][j]) throw ParseError("empty cell in dense matrix", i + 1, j + 1);
      m(static_cast<Index>(i), static_cast<Index>(j)) = *table.rows[i][j];
    }
  }
  return m;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(Errc::io, "cannot create directory '" + path.parent_path().string() + "'");
  }
  std::ofstream out(path);
  if (!out) throw Error(Errc::io, "cannot open '" + path.string() + "' for writing");
  return out;
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_output(path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw Error(Errc::io, "write to '" + path.string() + "' failed");
}

}  // namespace robustmean::csv
