#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace robustmean {

enum class Errc {
  invalid_argument,
  dimension_mismatch,
  size_cap,         // an exact (exponential) search exceeded its configured cap
  degenerate,       // e.g. no independent row subset found within the retry budget
  unrecoverable,
  no_data,          // an estimator has nothing to average
  parse,
  io,
  config,
  internal,
};

std::string_view to_string(Errc code) noexcept;

/// Library-wide exception. Every throwing operation in robustmean throws this
/// type (never a bare std::runtime_error), so callers can switch on `code()`.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Parse failure carrying a 1-based source location.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column);

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

}  // namespace robustmean
