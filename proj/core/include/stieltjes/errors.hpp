#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace stieltjes {

using Complex = std::complex<double>;

// Base of every error raised by the library. `code` is the machine-readable
// tag used by the command-line tool.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error("DOMAIN", w) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error("MEASURE_PARSE", w) {}
};

struct IterationLimitError : Error {
  IterationLimitError(const std::string& w, double last_residual)
      : Error("ITERATION_LIMIT", w), residual(last_residual) {}
  double residual;
};

struct NumericError : Error {
  explicit NumericError(const std::string& w) : Error("NUMERIC", w) {}
};

struct DegeneracyError : Error {
  explicit DegeneracyError(const std::string& w) : Error("DEGENERACY", w) {}
};

// det(M) and the conjugate form of the characteristic function disagree.
struct ConsistencyError : Error {
  explicit ConsistencyError(const std::string& w) : Error("CONSISTENCY", w) {}
};

// Winding number not close to an integer after retries.
struct ResolutionError : Error {
  explicit ResolutionError(const std::string& w) : Error("RESOLUTION", w) {}
};

// Root lost, left its disc, or missing from a bracket.
struct TrackingError : Error {
  explicit TrackingError(const std::string& w) : Error("EIG_TRACKING", w) {}
};

// Scan count disagrees with the argument principle.
struct InconsistencyError : Error {
  explicit InconsistencyError(const std::string& w) : Error("INCONSISTENT_COUNT", w) {}
};

struct UnsupportedMultiplicityError : Error {
  explicit UnsupportedMultiplicityError(const std::string& w)
      : Error("UNSUPPORTED_MULTIPLICITY", w) {}
};

}  // namespace stieltjes
