#pragma once

#include <stdexcept>
#include <string>

namespace vset {

/// Base class for all library errors.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An operation would enumerate a space beyond its built-in bound.
struct size_limit_error : error {
  using error::error;
};

/// Requested expansion depth exceeds the guard.
struct depth_limit_error : error {
  using error::error;
};

/// Structural validation failure: dangling states, arity mismatches,
/// unbound variables, map domain mismatches.
struct validation_error : error {
  using error::error;
};

/// Syntax error in the equation-system language, with source position.
struct parse_error : error {
  parse_error(const std::string& msg, int line, int col)
      : error(msg + " (line " + std::to_string(line) + ", column " +
              std::to_string(col) + ")"),
        line(line),
        col(col) {}
  int line;
  int col;
};

}  // namespace vset
