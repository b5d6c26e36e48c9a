#pragma once

#include <vector>

#include "invfilter/cbf.hpp"
#include "invfilter/core.hpp"
#include "invfilter/solver.hpp"

namespace invfilter {

// A family of canonicalized objectives with their priority-level bounds,
// the derivative-budget gain k, and the improvement rate epsilon.
class BclfProblem {
 public:
  BclfProblem(std::vector<Objective> objectives, PriorityTable table,
              double k_gain, double epsilon);

  const std::vector<Objective>& objectives() const { return objectives_; }
  const PriorityTable& table() const { return table_; }
  double k_gain() const { return k_gain_; }
  double epsilon() const { return epsilon_; }

 private:
  std::vector<Objective> objectives_;
  PriorityTable table_;
  double k_gain_;
  double epsilon_;
};

struct CplReport {
  int level{0};                 // rightmost all-satisfied column
  std::vector<bool> satisfied;  // per-objective V_i <= b_i,level
  std::vector<double> values;   // V_i(x)
};

CplReport current_priority_level(const BclfProblem& problem, const Vector& x);

// One derivative-budget halfspace for a finite table entry:
// gradV.g(x).u <= (b - V)/k - gradV.f(x).
Halfspace sat_row_halfspace(const BclfProblem& problem,
                            const ControlAffineSystem& system, const Vector& x,
                            int objective, int level);

// Halfspaces of the level-preserving set at the current priority level.
// Unbounded entries contribute nothing.
std::vector<Halfspace> u_sat_constraints(const BclfProblem& problem,
                                         const ControlAffineSystem& system,
                                         const Vector& x);

bool in_u_sat(const BclfProblem& problem, const ControlAffineSystem& system,
              const Vector& x, const Vector& u, double tol = 1e-9);

// Objectives whose next-level bound is not yet met (empty at the top
// level). Indices are zero-based.
std::vector<int> i_next(const BclfProblem& problem, const Vector& x);

// Halfspaces demanding descent at rate epsilon for every objective in
// i_next: gradV.g(x).u <= -epsilon - gradV.f(x). A zero-gradient
// objective yields an unsatisfiable zero-normal halfspace, which the
// solver flags rather than drops.
std::vector<Halfspace> u_inc_constraints(const BclfProblem& problem,
                                         const ControlAffineSystem& system,
                                         const Vector& x);

// General dynamics xdot = f(x, u), for the validity checker only.
struct GeneralSystem {
  int state_dim{0};
  int control_dim{0};
  std::function<Vector(const Vector&, const Vector&)> dynamics;
};

// Checks min_{u in box} gradV.f(x,u) <= -epsilon + tol over sampled
// states with V(x) >= bound. The minimum is taken over a control grid of
// `control_grid` points per axis. Empty region: vacuous pass with a note.
ValidityReport is_bclf(const Objective& objective, const GeneralSystem& system,
                       const Box& control_box, const Box& domain, double bound,
                       double epsilon, int state_samples, int control_grid,
                       double tol = 1e-9);

// Control-affine overload: the minimum over the box is exact (vertex
// rule), no control gridding.
ValidityReport is_bclf(const Objective& objective,
                       const ControlAffineSystem& system,
                       const Box& control_box, const Box& domain, double bound,
                       double epsilon, int state_samples, double tol = 1e-9);

enum class ControllerTier { sat_inc, sat_only };

std::string to_string(ControllerTier tier);  // "sat+inc" / "sat-only"

struct BclfControl {
  Vector u;
  ControllerTier tier{ControllerTier::sat_inc};
  int level{0};
  int sat_count{0};
  int inc_count{0};
  double min_sat_slack{0.0};  // worst margin among the sat halfspaces at u
};

// Priority-respecting min-norm controller: projects the nominal onto
// U_sat n U_inc n box, and onto U_sat n box when the improvement
// constraints conflict. Throws InfeasibleError when even U_sat n box is
// empty, which contradicts the problem's validity premises.
BclfControl bclf_controller(const BclfProblem& problem,
                            const ControlAffineSystem& system, const Vector& x,
                            const Vector& nominal_u, const Box& control_box);

}  // namespace invfilter
