#include "robustmean/error.hpp"

namespace robustmean {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::size_cap: return "size_cap";
    case Errc::degenerate: return "degenerate";
    case Errc::unrecoverable: return "unrecoverable";
    case Errc::no_data: return "no_data";
    case Errc::parse: return "parse";
    case Errc::io: return "io";
    case Errc::config: return "config";
    case Errc::internal: return "internal";
  }
  return "unknown";
}

ParseError::ParseError(const std::string& what, std::size_t row, std::size_t column)
    : Error(Errc::parse,
            what + " (row " + std::to_string(row) + ", column " + std::to_string(column) + ")"),
      row_(row),
      column_(column) {}

}  // namespace robustmean
