#pragma once

#include <Eigen/Dense>

#include "invfilter/core.hpp"

// shared fixtures for the test suites

namespace testutil {

using invfilter::ControlAffineSystem;
using invfilter::Matrix;
using invfilter::Vector;

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<long>(values.size()));
  long i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

// xdot = u
inline ControlAffineSystem single_integrator_1d() {
  ControlAffineSystem s;
  s.state_dim = 1;
  s.control_dim = 1;
  s.drift = [](const Vector& x) { return Vector::Zero(x.size()); };
  s.input_matrix = [](const Vector&) { return Matrix::Identity(1, 1); };
  return s;
}

// x1dot = x2, x2dot = u
inline ControlAffineSystem double_integrator_drift() {
  ControlAffineSystem s;
  s.state_dim = 2;
  s.control_dim = 1;
  s.drift = [](const Vector& x) {
    Vector f(2);
    f << x[1], 0.0;
    return f;
  };
  s.input_matrix = [](const Vector&) {
    Matrix g(2, 1);
    g << 0.0, 1.0;
    return g;
  };
  return s;
}

// xdot = -x, no control effect on the first axis beyond g
inline ControlAffineSystem decaying_1d() {
  ControlAffineSystem s;
  s.state_dim = 1;
  s.control_dim = 1;
  s.drift = [](const Vector& x) { return Vector(-x); };
  s.input_matrix = [](const Vector&) { return Matrix::Identity(1, 1); };
  return s;
}

}  // namespace testutil
