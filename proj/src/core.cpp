#include "invfilter/core.hpp"

#include <cmath>

namespace invfilter {

std::string to_string(Sense s) { return s == Sense::LE ? "LE" : "GE"; }

double Halfspace::slack(const Vector& u) const {
  if (u.size() != normal.size()) {
    throw ArgumentError("halfspace/control dimension mismatch");
  }
  const double lhs = normal.dot(u);
  return sense == Sense::GE ? lhs - offset : offset - lhs;
}

bool Halfspace::has_zero_normal(double tol) const {
  return normal.size() == 0 || normal.lpNorm<Eigen::Infinity>() <= tol;
}

bool Halfspace::vacuously_infeasible(double tol) const {
  if (!has_zero_normal()) return false;
  // 0 >= offset (GE) or 0 <= offset (LE)
  const double s = sense == Sense::GE ? -offset : offset;
  return s < -tol;
}

Box::Box(Vector lower, Vector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size() || lower_.size() == 0) {
    throw ConfigError("box bounds must be nonempty and of equal dimension");
  }
  for (int i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i])) {
      throw ConfigError("box bounds must be finite");
    }
    if (lower_[i] > upper_[i]) {
      throw ConfigError("box is empty: lower > upper on axis " +
                        std::to_string(i));
    }
  }
}

bool Box::contains(const Vector& p, double tol) const {
  if (p.size() != lower_.size()) {
    throw ArgumentError("point/box dimension mismatch");
  }
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] < lower_[i] - tol || p[i] > upper_[i] + tol) return false;
  }
  return true;
}

Vector eval_dynamics(const ControlAffineSystem& system, const Vector& x,
                     const Vector& u) {
  if (x.size() != system.state_dim) {
    throw ArgumentError("state dimension mismatch");
  }
  if (u.size() != system.control_dim) {
    throw ArgumentError("control dimension mismatch");
  }
  Vector f = system.drift(x);
  if (f.size() != system.state_dim) {
    throw ArgumentError("drift evaluator returned wrong dimension");
  }
  Matrix g = system.input_matrix(x);
  if (g.rows() != system.state_dim || g.cols() != system.control_dim) {
    throw ArgumentError("input-matrix evaluator returned wrong shape");
  }
  return f + g * u;
}

LieDerivatives lie_derivatives(
    const std::function<Vector(const Vector&)>& grad,
    const ControlAffineSystem& system, const Vector& x) {
  if (x.size() != system.state_dim) {
    throw ArgumentError("state dimension mismatch");
  }
  Vector dg = grad(x);
  if (dg.size() != system.state_dim) {
    throw ArgumentError("gradient evaluator returned wrong dimension");
  }
  Vector f = system.drift(x);
  Matrix g = system.input_matrix(x);
  if (f.size() != system.state_dim || g.rows() != system.state_dim ||
      g.cols() != system.control_dim) {
    throw ArgumentError("system evaluator returned wrong shape");
  }
  LieDerivatives out;
  out.along_drift = dg.dot(f);
  out.along_input = g.transpose() * dg;
  return out;
}

double class_kappa(double k_gain, double y) {
  if (k_gain <= 0.0) throw ConfigError("class-K gain must be positive");
  return y / k_gain;
}

void BarrierSpec::validate() const {
  if (!h || !grad_h) throw ConfigError("barrier evaluators missing");
  if (k_gain <= 0.0) throw ConfigError("barrier k_gain must be positive");
  if (domain.dim() == 0) throw ConfigError("barrier sampling domain missing");
}

Objective Objective::less_equal(std::function<double(const Vector&)> value,
                                std::function<Vector(const Vector&)> gradient,
                                std::string label) {
  Objective o;
  o.value_ = std::move(value);
  o.gradient_ = std::move(gradient);
  o.label_ = std::move(label);
  o.original_sense_ = Sense::LE;
  return o;
}

Objective Objective::greater_equal(
    std::function<double(const Vector&)> value,
    std::function<Vector(const Vector&)> gradient, std::string label) {
  Objective o;
  o.value_ = [v = std::move(value)](const Vector& x) { return -v(x); };
  o.gradient_ = [g = std::move(gradient)](const Vector& x) -> Vector {
    return -g(x);
  };
  o.label_ = std::move(label);
  o.original_sense_ = Sense::GE;
  return o;
}

Bound Bound::of(double value) {
  if (!std::isfinite(value)) {
    throw ConfigError("finite bound expected; use Bound::unbounded()");
  }
  Bound b;
  b.unbounded_ = false;
  b.value_ = value;
  return b;
}

double Bound::value() const {
  if (unbounded_) throw ArgumentError("unbounded entry has no value");
  return value_;
}

bool Bound::tightened_by(const Bound& other) const {
  if (other.unbounded_) return unbounded_;  // finite -> unbounded loosens
  if (unbounded_) return true;
  return other.value_ <= value_;
}

Bound Bound::negated() const {
  if (unbounded_) {
    throw ArgumentError("cannot negate an unbounded entry");
  }
  return Bound::of(-value_);
}

std::string Bound::describe() const {
  return unbounded_ ? "inf" : std::to_string(value_);
}

PriorityTable::PriorityTable(std::vector<std::vector<Bound>> rows)
    : rows_(std::move(rows)) {
  if (rows_.empty()) throw ConfigError("priority table has no rows");
  const size_t cols = rows_[0].size();
  if (cols < 1) throw ConfigError("priority table has no columns");
  for (size_t i = 0; i < rows_.size(); ++i) {
    const auto& row = rows_[i];
    if (row.size() != cols) {
      throw ConfigError("priority table rows must have equal length");
    }
    if (!row[0].is_unbounded()) {
      throw ConfigError("level-0 bound must be unbounded (row " +
                        std::to_string(i) + ")");
    }
    for (size_t j = 0; j + 1 < cols; ++j) {
      if (!row[j].tightened_by(row[j + 1])) {
        throw ConfigError("bounds must tighten with the level: row " +
                          std::to_string(i) + " loosens at column " +
                          std::to_string(j + 1));
      }
    }
  }
}

const Bound& PriorityTable::at(int objective, int level) const {
  if (objective < 0 || objective >= objectives() || level < 0 ||
      level > top_level()) {
    throw ArgumentError("priority table index out of range");
  }
  return rows_[objective][level];
}

GradientCheck check_gradient(const std::function<double(const Vector&)>& f,
                             const std::function<Vector(const Vector&)>& grad,
                             const std::vector<Vector>& points, double rel_tol,
                             double step) {
  GradientCheck report;
  for (const Vector& x : points) {
    const Vector g = grad(x);
    Vector fd(x.size());
    for (int i = 0; i < x.size(); ++i) {
      Vector xp = x, xm = x;
      xp[i] += step;
      xm[i] -= step;
      fd[i] = (f(xp) - f(xm)) / (2.0 * step);
    }
    const double scale = std::max(1.0, g.lpNorm<Eigen::Infinity>());
    const double err = (g - fd).lpNorm<Eigen::Infinity>() / scale;
    if (err > report.worst_relative_error) {
      report.worst_relative_error = err;
      report.worst_point = x;
    }
  }
  report.pass = report.worst_relative_error <= rel_tol;
  return report;
}

std::vector<Vector> grid_points(const Box& box, int budget,
                                int* per_axis_out) {
  if (budget < 1) throw ArgumentError("sample budget must be >= 1");
  const int n = box.dim();
  int per_axis = std::max(
      2, static_cast<int>(std::llround(std::pow(double(budget), 1.0 / n))));
  if (per_axis_out) *per_axis_out = per_axis;
  std::vector<Vector> pts;
  std::vector<int> idx(n, 0);
  const auto coord = [&](int axis, int i) {
    if (box.width(axis) == 0.0) return box.lower()[axis];
    return box.lower()[axis] + box.width(axis) * i / double(per_axis - 1);
  };
  while (true) {
    Vector p(n);
    for (int a = 0; a < n; ++a) p[a] = coord(a, idx[a]);
    pts.push_back(std::move(p));
    int a = n - 1;
    while (a >= 0 && ++idx[a] == per_axis) idx[a--] = 0;
    if (a < 0) break;
  }
  return pts;
}

std::string ConstraintId::describe() const {
  switch (kind) {
    case Kind::halfspace:
      return "halfspace[" + std::to_string(index) + "]";
    case Kind::box_lower:
      return "box lower bound, axis " + std::to_string(index);
    case Kind::box_upper:
      return "box upper bound, axis " + std::to_string(index);
  }
  return "?";
}

}  // namespace invfilter
