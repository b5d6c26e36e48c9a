#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "invfilter/errors.hpp"

namespace invfilter {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Sense { LE, GE };

std::string to_string(Sense s);

// Affine scalar constraint on the control, a.u <= c or a.u >= c.
// The common currency of every admissible-set construction here.
struct Halfspace {
  Vector normal;
  double offset{0.0};
  Sense sense{Sense::GE};

  // Signed satisfaction margin; >= 0 means the constraint holds.
  double slack(const Vector& u) const;
  bool satisfied(const Vector& u, double tol = 1e-9) const {
    return slack(u) >= -tol;
  }

  // Zero-normal constraints degenerate to "0 {<=,>=} offset".
  bool has_zero_normal(double tol = 1e-14) const;
  // For a zero-normal constraint: true when no control can satisfy it.
  bool vacuously_infeasible(double tol = 1e-9) const;
};

// Axis-aligned box, used both for admissible control sets and for the
// state-domain sampling regions of the validity checkers.
class Box {
 public:
  Box() = default;
  Box(Vector lower, Vector upper);  // throws ConfigError if empty/unbounded

  int dim() const { return static_cast<int>(lower_.size()); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  Vector center() const { return 0.5 * (lower_ + upper_); }
  double width(int axis) const { return upper_[axis] - lower_[axis]; }
  bool contains(const Vector& p, double tol = 0.0) const;

 private:
  Vector lower_, upper_;
};

using ControlBox = Box;

// Evaluators for xdot = f(x) + g(x) u.
struct ControlAffineSystem {
  int state_dim{0};
  int control_dim{0};
  std::function<Vector(const Vector&)> drift;         // f: n -> n
  std::function<Matrix(const Vector&)> input_matrix;  // g: n -> n x m
};

Vector eval_dynamics(const ControlAffineSystem& system, const Vector& x,
                     const Vector& u);

struct LieDerivatives {
  double along_drift{0.0};  // grad . f(x)
  Vector along_input;       // g(x)^T grad, length m
};

LieDerivatives lie_derivatives(
    const std::function<Vector(const Vector&)>& grad,
    const ControlAffineSystem& system, const Vector& x);

// Linear extended class-K function y / k_gain.
double class_kappa(double k_gain, double y);

// Scalar function with superlevel safe set {x : h(x) >= 0}, linear
// class-K gain, and the box over which validity is sampled.
struct BarrierSpec {
  std::function<double(const Vector&)> h;
  std::function<Vector(const Vector&)> grad_h;
  double k_gain{1.0};
  Box domain;

  void validate() const;  // throws ConfigError
};

// Scalar objective canonicalized to <= sense. A >= objective is stored
// negated so every downstream bound comparison reads V <= b.
class Objective {
 public:
  static Objective less_equal(std::function<double(const Vector&)> value,
                              std::function<Vector(const Vector&)> gradient,
                              std::string label = {});
  static Objective greater_equal(std::function<double(const Vector&)> value,
                                 std::function<Vector(const Vector&)> gradient,
                                 std::string label = {});

  double value(const Vector& x) const { return value_(x); }
  Vector gradient(const Vector& x) const { return gradient_(x); }
  Sense original_sense() const { return original_sense_; }
  const std::string& label() const { return label_; }

 private:
  Objective() = default;
  std::function<double(const Vector&)> value_;
  std::function<Vector(const Vector&)> gradient_;
  std::string label_;
  Sense original_sense_{Sense::LE};
};

// A priority-table entry: either a finite <= bound or unbounded. The
// unbounded marker never enters arithmetic; V <= unbounded is always true.
class Bound {
 public:
  static Bound unbounded() { return Bound(); }
  static Bound of(double value);

  bool is_unbounded() const { return unbounded_; }
  double value() const;  // throws ArgumentError when unbounded
  bool satisfied_by(double v) const { return unbounded_ || v <= value_; }
  // True when `other` is at least as tight (table columns must tighten).
  bool tightened_by(const Bound& other) const;

  // Sign flip for GE-row canonicalization; -unbounded stays unbounded in
  // the opposite direction, which this table shape never needs.
  Bound negated() const;

  std::string describe() const;

 private:
  Bound() = default;
  bool unbounded_{true};
  double value_{0.0};
};

// Bound matrix b_ij, rows = objectives, columns = priority levels 0..J.
// Column 0 is unbounded everywhere and rows tighten left to right.
class PriorityTable {
 public:
  explicit PriorityTable(std::vector<std::vector<Bound>> rows);

  int objectives() const { return static_cast<int>(rows_.size()); }
  int top_level() const { return static_cast<int>(rows_[0].size()) - 1; }
  const Bound& at(int objective, int level) const;

 private:
  std::vector<std::vector<Bound>> rows_;
};

// Central finite-difference check of a user-supplied gradient. Used only
// at validation time, never in the control path.
struct GradientCheck {
  bool pass{true};
  double worst_relative_error{0.0};
  Vector worst_point;
};

GradientCheck check_gradient(const std::function<double(const Vector&)>& f,
                             const std::function<Vector(const Vector&)>& grad,
                             const std::vector<Vector>& points,
                             double rel_tol = 1e-4, double step = 1e-6);

// Uniform grid over a box with roughly `budget` points total (at least
// two per axis, endpoints included). Deterministic ordering; the grid is
// laid out row-major with the last axis fastest. Optionally reports the
// per-axis point count.
std::vector<Vector> grid_points(const Box& box, int budget,
                                int* per_axis_out = nullptr);

}  // namespace invfilter
