#include "invfilter/cbf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace invfilter {

CbfConstraint cbf_constraint(const BarrierSpec& barrier,
                             const ControlAffineSystem& system,
                             const Vector& x) {
  barrier.validate();
  CbfConstraint c;
  c.h_value = barrier.h(x);
  const LieDerivatives lie = lie_derivatives(barrier.grad_h, system, x);
  c.lie_drift = lie.along_drift;
  c.lie_input = lie.along_input;
  c.k_gain = barrier.k_gain;
  c.halfspace.normal = c.lie_input;
  c.halfspace.offset = -(c.lie_drift + class_kappa(c.k_gain, c.h_value));
  c.halfspace.sense = Sense::GE;
  return c;
}

bool in_k_cbf(const BarrierSpec& barrier, const ControlAffineSystem& system,
              const Vector& x, const Vector& u, double tol) {
  return cbf_constraint(barrier, system, x).residual_at(u) >= -tol;
}

namespace {

// Exact sup over the box of the affine residual: each control axis
// contributes its sign-selected vertex.
double residual_sup(const CbfConstraint& c, const Box& box) {
  double r = c.lie_drift + class_kappa(c.k_gain, c.h_value);
  for (int a = 0; a < box.dim(); ++a) {
    r += c.lie_input[a] >= 0.0 ? c.lie_input[a] * box.upper()[a]
                               : c.lie_input[a] * box.lower()[a];
  }
  return r;
}

Vector residual_argsup(const CbfConstraint& c, const Box& box) {
  Vector u(box.dim());
  for (int a = 0; a < box.dim(); ++a) {
    u[a] = c.lie_input[a] >= 0.0 ? box.upper()[a] : box.lower()[a];
  }
  return u;
}

// Refines toward the h = 0 crossing between two states; both interval
// ends are appended so the checker sees samples on each side.
void append_boundary_bias(const std::function<double(const Vector&)>& h,
                          Vector a, Vector b, std::vector<Vector>* out) {
  double ha = h(a), hb = h(b);
  if (ha == 0.0 || hb == 0.0 || (ha > 0) == (hb > 0)) return;
  for (int iter = 0; iter < 20; ++iter) {
    Vector mid = 0.5 * (a + b);
    double hm = h(mid);
    if (hm == 0.0) break;
    if ((hm > 0) == (ha > 0)) {
      a = std::move(mid);
      ha = hm;
    } else {
      b = std::move(mid);
      hb = hm;
    }
  }
  out->push_back(a);
  out->push_back(b);
}

}  // namespace

ValidityReport is_cbf(const BarrierSpec& barrier,
                      const ControlAffineSystem& system, const Box& control_box,
                      int state_samples, int /*control_grid*/, double tol) {
  barrier.validate();
  if (state_samples < 1) throw ArgumentError("state sample count must be >= 1");
  if (control_box.dim() != system.control_dim) {
    throw ArgumentError("control box dimension mismatch");
  }

  int per_axis = 0;
  std::vector<Vector> samples =
      grid_points(barrier.domain, state_samples, &per_axis);

  // bias extra samples toward the h = 0 boundary: walk axis-aligned
  // neighbors of the grid and bisect every sign change
  const int n = barrier.domain.dim();
  const size_t grid_total = samples.size();
  std::vector<long> stride(n, 1);
  for (int a = n - 2; a >= 0; --a) stride[a] = stride[a + 1] * per_axis;
  for (size_t i = 0; i < grid_total; ++i) {
    for (int a = 0; a < n; ++a) {
      const long pos = (static_cast<long>(i) / stride[a]) % per_axis;
      if (pos + 1 < per_axis) {
        append_boundary_bias(barrier.h, samples[i], samples[i + stride[a]],
                             &samples);
      }
    }
  }

  ValidityReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (const Vector& x : samples) {
    const CbfConstraint c = cbf_constraint(barrier, system, x);
    const double sup = residual_sup(c, control_box);
    if (sup < report.worst_margin) {
      report.worst_margin = sup;
      report.worst_state = x;
      report.worst_control = residual_argsup(c, control_box);
    }
  }
  report.states_checked = static_cast<long>(samples.size());
  report.pass = report.worst_margin >= -tol;
  if (!report.pass) {
    report.note = "residual supremum drops below zero; h is not a valid "
                  "barrier for this control box";
  }
  return report;
}

Vector cbf_filter(const Vector& nominal_u,
                  const std::vector<CbfConstraint>& constraints,
                  const Box& control_box) {
  MinNormProblem problem;
  problem.target = nominal_u;
  problem.box = control_box;
  problem.halfspaces.reserve(constraints.size());
  for (const CbfConstraint& c : constraints) {
    problem.halfspaces.push_back(c.halfspace);
  }
  SolveResult r = solve_min_norm(problem);
  if (r.status != SolveStatus::optimal) {
    throw InfeasibleError(
        "barrier constraints admit no control in the box (validity "
        "condition fails here)",
        r.certificate);
  }
  return r.point;
}

}  // namespace invfilter
