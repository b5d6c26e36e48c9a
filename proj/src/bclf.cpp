#include "invfilter/bclf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace invfilter {

BclfProblem::BclfProblem(std::vector<Objective> objectives,
                         PriorityTable table, double k_gain, double epsilon)
    : objectives_(std::move(objectives)),
      table_(std::move(table)),
      k_gain_(k_gain),
      epsilon_(epsilon) {
  if (static_cast<int>(objectives_.size()) != table_.objectives()) {
    throw ConfigError("table row count must equal objective count");
  }
  if (k_gain_ <= 0.0) throw ConfigError("k_gain must be positive");
  if (epsilon_ <= 0.0) throw ConfigError("epsilon must be positive");
}

CplReport current_priority_level(const BclfProblem& problem, const Vector& x) {
  const int n = static_cast<int>(problem.objectives().size());
  CplReport report;
  report.values.resize(n);
  for (int i = 0; i < n; ++i) report.values[i] = problem.objectives()[i].value(x);

  // columns tighten, so the satisfied columns are a prefix; scan from the
  // right and stop at the first column where every row holds
  const int top = problem.table().top_level();
  for (int j = top; j >= 0; --j) {
    bool all = true;
    for (int i = 0; i < n; ++i) {
      if (!problem.table().at(i, j).satisfied_by(report.values[i])) {
        all = false;
        break;
      }
    }
    if (all) {
      report.level = j;
      break;
    }
  }
  report.satisfied.resize(n);
  for (int i = 0; i < n; ++i) {
    report.satisfied[i] =
        problem.table().at(i, report.level).satisfied_by(report.values[i]);
  }
  return report;
}

Halfspace sat_row_halfspace(const BclfProblem& problem,
                            const ControlAffineSystem& system, const Vector& x,
                            int objective, int level) {
  const Objective& obj = problem.objectives().at(objective);
  const Bound& bound = problem.table().at(objective, level);
  if (bound.is_unbounded()) {
    throw ArgumentError("no constraint for an unbounded table entry");
  }
  const auto grad = [&obj](const Vector& p) { return obj.gradient(p); };
  const LieDerivatives lie = lie_derivatives(grad, system, x);
  Halfspace hs;
  hs.normal = lie.along_input;
  hs.offset = class_kappa(problem.k_gain(), bound.value() - obj.value(x)) -
              lie.along_drift;
  hs.sense = Sense::LE;
  return hs;
}

std::vector<Halfspace> u_sat_constraints(const BclfProblem& problem,
                                         const ControlAffineSystem& system,
                                         const Vector& x) {
  const CplReport cpl = current_priority_level(problem, x);
  std::vector<Halfspace> out;
  for (int i = 0; i < static_cast<int>(problem.objectives().size()); ++i) {
    if (problem.table().at(i, cpl.level).is_unbounded()) continue;
    out.push_back(sat_row_halfspace(problem, system, x, i, cpl.level));
  }
  return out;
}

bool in_u_sat(const BclfProblem& problem, const ControlAffineSystem& system,
              const Vector& x, const Vector& u, double tol) {
  for (const Halfspace& hs : u_sat_constraints(problem, system, x)) {
    if (!hs.satisfied(u, tol)) return false;
  }
  return true;
}

std::vector<int> i_next(const BclfProblem& problem, const Vector& x) {
  const CplReport cpl = current_priority_level(problem, x);
  std::vector<int> out;
  if (cpl.level >= problem.table().top_level()) return out;
  for (int i = 0; i < static_cast<int>(problem.objectives().size()); ++i) {
    const Bound& next = problem.table().at(i, cpl.level + 1);
    if (next.is_unbounded()) continue;  // V >= unbounded never holds
    if (cpl.values[i] >= next.value()) out.push_back(i);
  }
  // below the top level some next-column bound must be unmet, otherwise
  // the level computation would have chosen that column
  if (out.empty()) {
    throw Error("internal inconsistency: level below top but next column "
                "fully satisfied");
  }
  return out;
}

std::vector<Halfspace> u_inc_constraints(const BclfProblem& problem,
                                         const ControlAffineSystem& system,
                                         const Vector& x) {
  const CplReport cpl = current_priority_level(problem, x);
  std::vector<Halfspace> out;
  if (cpl.level >= problem.table().top_level()) return out;
  for (int i : i_next(problem, x)) {
    const Objective& obj = problem.objectives()[i];
    const auto grad = [&obj](const Vector& p) { return obj.gradient(p); };
    const LieDerivatives lie = lie_derivatives(grad, system, x);
    Halfspace hs;
    hs.normal = lie.along_input;
    hs.offset = -problem.epsilon() - lie.along_drift;
    hs.sense = Sense::LE;
    out.push_back(hs);
  }
  return out;
}

namespace {

ValidityReport check_descent(
    const Objective& objective, const Box& control_box, const Box& domain,
    double bound, double epsilon, int state_samples, double tol,
    const std::function<double(const Vector&, Vector*)>& min_descent) {
  if (state_samples < 1) throw ArgumentError("state sample count must be >= 1");
  ValidityReport report;
  report.worst_margin = -std::numeric_limits<double>::infinity();
  long in_region = 0;
  for (const Vector& x : grid_points(domain, state_samples)) {
    if (objective.value(x) < bound) continue;
    ++in_region;
    Vector minimizer(control_box.dim());
    const double vdot_min = min_descent(x, &minimizer);
    if (vdot_min > report.worst_margin) {
      report.worst_margin = vdot_min;
      report.worst_state = x;
      report.worst_control = minimizer;
    }
  }
  report.states_checked = in_region;
  if (in_region == 0) {
    report.pass = true;
    report.vacuous = true;
    report.note = "no sampled state satisfies V(x) >= bound; condition "
                  "vacuously holds on this domain";
    return report;
  }
  report.pass = report.worst_margin <= -epsilon + tol;
  if (!report.pass) {
    report.note = "descent rate epsilon unreachable at the worst state";
  }
  return report;
}

}  // namespace

ValidityReport is_bclf(const Objective& objective, const GeneralSystem& system,
                       const Box& control_box, const Box& domain, double bound,
                       double epsilon, int state_samples, int control_grid,
                       double tol) {
  if (control_grid < 1) throw ArgumentError("control grid must be >= 1");
  if (control_box.dim() != system.control_dim) {
    throw ArgumentError("control box dimension mismatch");
  }
  const auto controls = grid_points(control_box, control_grid);
  const auto min_descent = [&](const Vector& x, Vector* minimizer) {
    const Vector grad = objective.gradient(x);
    double best = std::numeric_limits<double>::infinity();
    for (const Vector& u : controls) {
      const double vdot = grad.dot(system.dynamics(x, u));
      if (vdot < best) {
        best = vdot;
        *minimizer = u;
      }
    }
    return best;
  };
  return check_descent(objective, control_box, domain, bound, epsilon,
                       state_samples, tol, min_descent);
}

ValidityReport is_bclf(const Objective& objective,
                       const ControlAffineSystem& system,
                       const Box& control_box, const Box& domain, double bound,
                       double epsilon, int state_samples, double tol) {
  if (control_box.dim() != system.control_dim) {
    throw ArgumentError("control box dimension mismatch");
  }
  const auto grad = [&objective](const Vector& p) {
    return objective.gradient(p);
  };
  const auto min_descent = [&](const Vector& x, Vector* minimizer) {
    const LieDerivatives lie = lie_derivatives(grad, system, x);
    double vdot = lie.along_drift;
    for (int a = 0; a < control_box.dim(); ++a) {
      if (lie.along_input[a] >= 0.0) {
        vdot += lie.along_input[a] * control_box.lower()[a];
        (*minimizer)[a] = control_box.lower()[a];
      } else {
        vdot += lie.along_input[a] * control_box.upper()[a];
        (*minimizer)[a] = control_box.upper()[a];
      }
    }
    return vdot;
  };
  return check_descent(objective, control_box, domain, bound, epsilon,
                       state_samples, tol, min_descent);
}

std::string to_string(ControllerTier tier) {
  return tier == ControllerTier::sat_inc ? "sat+inc" : "sat-only";
}

BclfControl bclf_controller(const BclfProblem& problem,
                            const ControlAffineSystem& system, const Vector& x,
                            const Vector& nominal_u, const Box& control_box) {
  const CplReport cpl = current_priority_level(problem, x);
  std::vector<Halfspace> sat = u_sat_constraints(problem, system, x);
  std::vector<Halfspace> inc = u_inc_constraints(problem, system, x);

  MinNormProblem qp;
  qp.target = nominal_u;
  qp.box = control_box;
  qp.halfspaces = sat;
  qp.halfspaces.insert(qp.halfspaces.end(), inc.begin(), inc.end());

  BclfControl out;
  out.level = cpl.level;
  out.sat_count = static_cast<int>(sat.size());
  out.inc_count = static_cast<int>(inc.size());

  SolveResult r = solve_min_norm(qp);
  if (r.status == SolveStatus::optimal) {
    out.tier = ControllerTier::sat_inc;
  } else {
    // improvement constraints conflict: drop them all and fall back to
    // the level-preserving set, which still forbids any CPL decrease
    qp.halfspaces = sat;
    r = solve_min_norm(qp);
    if (r.status != SolveStatus::optimal) {
      throw InfeasibleError(
          "U_sat excludes every control in the box; the (V, b, k) "
          "configuration violates its validity premises at this state",
          r.certificate);
    }
    out.tier = ControllerTier::sat_only;
  }
  out.u = r.point;
  out.min_sat_slack = std::numeric_limits<double>::infinity();
  for (const Halfspace& hs : sat) {
    out.min_sat_slack = std::min(out.min_sat_slack, hs.slack(out.u));
  }
  if (sat.empty()) out.min_sat_slack = 0.0;
  return out;
}

}  // namespace invfilter
