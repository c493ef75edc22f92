#ifndef IETIDP_ERRORS_HPP
#define IETIDP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ietidp {

/// Invalid argument passed to a library routine (bad degree, parameter out of range, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent multi-patch topology or non-matching discretizations.
class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Geometry map with a nonpositive Jacobian determinant.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure of a direct factorization (not SPD, singular, ...).
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Breakdown of the conjugate gradient iteration (p^T A p <= 0).
class IndefiniteOperatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed domain document; carries the 1-based line and column of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                           ": " + what),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Raised when a solve exceeds its wall-time budget.
class TimeBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ietidp

#endif  // IETIDP_ERRORS_HPP
