#include "invfilter/poly.hpp"

#include <cmath>

namespace invfilter {
namespace {

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

}  // namespace

Polynomial::Polynomial(std::vector<Monomial> terms, int vars)
    : terms_(std::move(terms)), vars_(vars) {
  if (vars_ < 1) throw ConfigError("polynomial needs at least one variable");
  for (const Monomial& m : terms_) {
    if (!std::isfinite(m.coeff)) {
      throw ConfigError("monomial coefficient must be finite");
    }
    if (static_cast<int>(m.powers.size()) != vars_) {
      throw ConfigError("monomial power list must have one entry per variable");
    }
    for (int p : m.powers) {
      if (p < 0) throw ConfigError("monomial powers must be nonnegative");
    }
  }
}

double Polynomial::eval(const Vector& x) const {
  if (x.size() != vars_) throw ArgumentError("polynomial arity mismatch");
  double sum = 0.0;
  for (const Monomial& m : terms_) {
    double term = m.coeff;
    for (int v = 0; v < vars_; ++v) term *= ipow(x[v], m.powers[v]);
    sum += term;
  }
  return sum;
}

Vector Polynomial::gradient(const Vector& x) const {
  if (x.size() != vars_) throw ArgumentError("polynomial arity mismatch");
  Vector g = Vector::Zero(vars_);
  for (const Monomial& m : terms_) {
    for (int v = 0; v < vars_; ++v) {
      if (m.powers[v] == 0) continue;
      double term = m.coeff * m.powers[v] * ipow(x[v], m.powers[v] - 1);
      for (int w = 0; w < vars_; ++w) {
        if (w != v) term *= ipow(x[w], m.powers[w]);
      }
      g[v] += term;
    }
  }
  return g;
}

std::function<double(const Vector&)> Polynomial::evaluator() const {
  return [p = *this](const Vector& x) { return p.eval(x); };
}

std::function<Vector(const Vector&)> Polynomial::gradient_evaluator() const {
  return [p = *this](const Vector& x) { return p.gradient(x); };
}

}  // namespace invfilter
