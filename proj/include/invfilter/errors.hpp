#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace invfilter {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad call arguments (dimension mismatches and the like).
struct ArgumentError : Error {
  using Error::Error;
};

// Invalid configuration: non-positive gains, malformed tables, empty boxes.
struct ConfigError : Error {
  using Error::Error;
};

// Identifies one scalar constraint of a min-norm problem.
struct ConstraintId {
  enum class Kind { halfspace, box_lower, box_upper };
  Kind kind{Kind::halfspace};
  int index{0};  // halfspace position or box axis

  std::string describe() const;
};

// Empty feasible region. Carries the mutually unsatisfiable subset found
// while proving emptiness.
struct InfeasibleError : Error {
  InfeasibleError(const std::string& what, std::vector<ConstraintId> cert)
      : Error(what), certificate(std::move(cert)) {}
  std::vector<ConstraintId> certificate;
};

// Non-finite state encountered during integration.
struct DivergenceError : Error {
  using Error::Error;
};

// Residual series unusable for a log-linear fit.
struct FitDomainError : Error {
  using Error::Error;
};

// Scenario file rejected; `location` names the offending key or path.
struct ParseError : Error {
  ParseError(const std::string& what, std::string loc)
      : Error(what + " (at " + loc + ")"), location(std::move(loc)) {}
  std::string location;
};

}  // namespace invfilter
