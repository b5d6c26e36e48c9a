#pragma once

#include <vector>

#include "invfilter/core.hpp"

namespace invfilter {

// Sparse multivariate polynomial as a monomial list; the scenario format
// describes barrier and objective functions this way and gradients are
// derived term by term.
struct Monomial {
  double coeff{0.0};
  std::vector<int> powers;  // one exponent per state variable

  bool operator==(const Monomial&) const = default;
};

class Polynomial {
 public:
  Polynomial(std::vector<Monomial> terms, int vars);  // throws ConfigError

  int vars() const { return vars_; }
  const std::vector<Monomial>& terms() const { return terms_; }

  double eval(const Vector& x) const;
  Vector gradient(const Vector& x) const;

  std::function<double(const Vector&)> evaluator() const;
  std::function<Vector(const Vector&)> gradient_evaluator() const;

 private:
  std::vector<Monomial> terms_;
  int vars_;
};

}  // namespace invfilter
