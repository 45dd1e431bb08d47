#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gridjac {

using index_t = std::int32_t;
using cplx = std::complex<double>;

/// Malformed input text; carries the 1-based line number of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Structurally or semantically invalid case data (missing block, duplicate
/// bus id, branch referencing an unknown bus, singular in-service branch).
class CaseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precomputed plan no longer matches the matrix it was built for.
class PlanStaleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A required coordinate is absent from a frozen sparsity pattern.
class PatternError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense reference computation refused (system too large for O(n^2) work).
class OracleCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cross-method equivalence check failed.
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gridjac
