#pragma once

#include <vector>

#include "invfilter/core.hpp"
#include "invfilter/solver.hpp"

namespace invfilter {

// The admissible-control halfspace of a barrier at one state:
// Lgh(x).u >= -(Lfh(x) + h(x)/k).
struct CbfConstraint {
  Halfspace halfspace;  // sense GE
  double h_value{0.0};
  double lie_drift{0.0};  // Lf h
  Vector lie_input;       // Lg h
  double k_gain{1.0};

  double residual_at(const Vector& u) const {
    return lie_drift + lie_input.dot(u) + class_kappa(k_gain, h_value);
  }
};

CbfConstraint cbf_constraint(const BarrierSpec& barrier,
                             const ControlAffineSystem& system,
                             const Vector& x);

bool in_k_cbf(const BarrierSpec& barrier, const ControlAffineSystem& system,
              const Vector& x, const Vector& u, double tol = 1e-9);

// Sampling-based validity verdict, shared by the CBF and BCLF checkers.
struct ValidityReport {
  bool pass{false};
  bool vacuous{false};   // sampled region was empty
  double worst_margin{0.0};  // see the producing checker for the convention
  Vector worst_state;
  Vector worst_control;
  long states_checked{0};
  std::string note;
};

// Checks sup_{u in box} [Lfh + Lgh.u + h/k] >= -tol over a grid of the
// barrier domain plus boundary-biased refinements where h changes sign.
// The supremum of the affine residual is taken exactly at the box vertex
// selected by the signs of Lgh, so no control gridding is needed;
// `control_grid` is accepted for interface parity and ignored.
ValidityReport is_cbf(const BarrierSpec& barrier,
                      const ControlAffineSystem& system, const Box& control_box,
                      int state_samples, int control_grid = 0,
                      double tol = 1e-9);

// Min-norm safety filter: the feasible control closest to the nominal.
// Throws InfeasibleError when the constraints and box exclude each other,
// which certifies that h fails the validity condition on this box.
Vector cbf_filter(const Vector& nominal_u,
                  const std::vector<CbfConstraint>& constraints,
                  const Box& control_box);

}  // namespace invfilter
