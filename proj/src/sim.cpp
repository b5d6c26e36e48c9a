#include "invfilter/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "invfilter/log.hpp"

namespace invfilter {

std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::cbf: return "cbf";
    case ControllerKind::bclf: return "bclf";
    case ControllerKind::saturating: return "saturating";
  }
  return "?";
}

double Scenario::k_gain() const {
  if (barrier) return barrier->k_gain;
  if (problem) return problem->k_gain();
  throw ConfigError("scenario has neither barrier nor objectives");
}

void Scenario::validate() const {
  if (system.state_dim < 1 || system.control_dim < 1) {
    throw ConfigError("system dimensions must be positive");
  }
  if (x0.size() != system.state_dim) {
    throw ConfigError("x0 dimension mismatch");
  }
  if (control_box.dim() != system.control_dim) {
    throw ConfigError("control box dimension mismatch");
  }
  if (!nominal) throw ConfigError("nominal policy missing");
  if (dt <= 0.0) throw ConfigError("dt must be positive");
  if (horizon < dt) throw ConfigError("horizon must be at least one step");
  // resolution guard: the step must resolve the slowest constraint time
  // constant
  if (dt > k_gain() / 100.0) {
    throw ConfigError("dt too coarse: require dt <= k/100");
  }
  switch (controller) {
    case ControllerKind::cbf:
      if (!barrier) throw ConfigError("cbf controller needs a barrier");
      break;
    case ControllerKind::bclf:
    case ControllerKind::saturating:
      if (!problem) throw ConfigError("priority controller needs objectives");
      break;
  }
}

double TrajectoryLog::min_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : margin) m = std::min(m, v);
  return m;
}

Vector step_rk4(const ControlAffineSystem& system, const Vector& u,
                const Vector& x, double dt) {
  if (dt <= 0.0) throw ArgumentError("dt must be positive");
  const auto deriv = [&](const Vector& state) {
    return eval_dynamics(system, state, u);
  };
  const Vector k1 = deriv(x);
  const Vector k2 = deriv(x + 0.5 * dt * k1);
  const Vector k3 = deriv(x + 0.5 * dt * k2);
  const Vector k4 = deriv(x + dt * k3);
  Vector next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) {
    throw DivergenceError("non-finite state after integration step");
  }
  return next;
}

namespace {

struct StepDecision {
  Vector u;
  std::vector<double> outputs;
  int cpl{0};
  std::string tier;
  double min_residual{0.0};
  double margin{0.0};
};

// Collects the finite rows of the given level once; the invariance
// margin tracks the worst of their slacks b - V.
std::vector<int> finite_rows(const BclfProblem& problem, int level) {
  std::vector<int> rows;
  for (int i = 0; i < static_cast<int>(problem.objectives().size()); ++i) {
    if (!problem.table().at(i, level).is_unbounded()) rows.push_back(i);
  }
  return rows;
}

double bound_margin(const BclfProblem& problem, const std::vector<int>& rows,
                    int level, const std::vector<double>& values) {
  if (rows.empty()) return 0.0;
  double m = std::numeric_limits<double>::infinity();
  for (int i : rows) {
    m = std::min(m, problem.table().at(i, level).value() - values[i]);
  }
  return m;
}

class StepController {
 public:
  explicit StepController(const Scenario& scenario) : scenario_(scenario) {
    if (scenario_.controller != ControllerKind::cbf) {
      const auto& problem = *scenario_.problem;
      initial_level_ = current_priority_level(problem, scenario_.x0).level;
      initial_rows_ = finite_rows(problem, initial_level_);
    }
  }

  int initial_level() const { return initial_level_; }

  StepDecision decide(const Vector& x) {
    switch (scenario_.controller) {
      case ControllerKind::cbf: return decide_cbf(x);
      case ControllerKind::bclf: return decide_bclf(x);
      case ControllerKind::saturating: return decide_saturating(x);
    }
    throw ConfigError("unknown controller kind");
  }

  long flat_gradient_hits{0};
  long first_flat_gradient_step{-1};
  long step_index{0};

 private:
  StepDecision decide_cbf(const Vector& x) {
    const auto& barrier = *scenario_.barrier;
    const CbfConstraint c = cbf_constraint(barrier, scenario_.system, x);
    // Near the boundary a vanishing gradient voids the safety theorem's
    // hypotheses; worth surfacing but not fatal.
    if (std::abs(c.h_value) < 1e-3 &&
        barrier.grad_h(x).norm() < 1e-6) {
      if (flat_gradient_hits++ == 0) first_flat_gradient_step = step_index;
    }
    StepDecision d;
    d.u = cbf_filter(scenario_.nominal(x), {c}, scenario_.control_box);
    d.outputs = {c.h_value};
    d.cpl = c.h_value >= 0.0 ? 1 : 0;
    d.tier = "filter";
    d.min_residual = c.residual_at(d.u);
    d.margin = c.h_value;
    return d;
  }

  StepDecision decide_bclf(const Vector& x) {
    const auto& problem = *scenario_.problem;
    const BclfControl c = bclf_controller(problem, scenario_.system, x,
                                          scenario_.nominal(x),
                                          scenario_.control_box);
    const CplReport cpl = current_priority_level(problem, x);
    StepDecision d;
    d.u = c.u;
    d.outputs = cpl.values;
    d.cpl = c.level;
    d.tier = to_string(c.tier);
    d.min_residual = c.min_sat_slack;
    d.margin = bound_margin(problem, initial_rows_, initial_level_, cpl.values);
    return d;
  }

  StepDecision decide_saturating(const Vector& x) {
    const auto& problem = *scenario_.problem;
    const CplReport cpl = current_priority_level(problem, x);
    const std::vector<int> rows = finite_rows(problem, cpl.level);
    if (rows.size() != 1) {
      throw ConfigError(
          "saturating controller requires exactly one finite bound at the "
          "current level, found " +
          std::to_string(rows.size()));
    }
    const Halfspace hs =
        sat_row_halfspace(problem, scenario_.system, x, rows[0], cpl.level);
    if (hs.has_zero_normal()) {
      throw ConfigError(
          "saturating controller needs a control-dependent constraint");
    }
    // minimum-norm control achieving equality in the active constraint
    Vector u = hs.normal * (hs.offset / hs.normal.squaredNorm());
    if (!scenario_.control_box.contains(u, 1e-9)) {
      throw InfeasibleError(
          "equality control leaves the admissible box",
          {ConstraintId{ConstraintId::Kind::halfspace, rows[0]}});
    }
    StepDecision d;
    d.u = std::move(u);
    d.outputs = cpl.values;
    d.cpl = cpl.level;
    d.tier = "saturating";
    d.min_residual = hs.slack(d.u);
    d.margin = bound_margin(problem, initial_rows_, initial_level_, cpl.values);
    return d;
  }

  const Scenario& scenario_;
  int initial_level_{0};
  std::vector<int> initial_rows_;
};

std::vector<std::string> output_names_for(const Scenario& scenario) {
  if (scenario.controller == ControllerKind::cbf) return {"h"};
  std::vector<std::string> names;
  const auto& objectives = scenario.problem->objectives();
  for (size_t i = 0; i < objectives.size(); ++i) {
    names.push_back("V_" + std::to_string(i + 1));
  }
  return names;
}

}  // namespace

TrajectoryLog simulate(const Scenario& scenario) {
  scenario.validate();
  const long steps = std::llround(scenario.horizon / scenario.dt);

  TrajectoryLog log;
  log.output_names = output_names_for(scenario);
  log.top_level = scenario.controller == ControllerKind::cbf
                      ? 1
                      : scenario.problem->table().top_level();

  StepController controller(scenario);
  log.initial_level = scenario.controller == ControllerKind::cbf
                          ? (scenario.barrier->h(scenario.x0) >= 0.0 ? 1 : 0)
                          : controller.initial_level();

  Vector x = scenario.x0;
  for (long i = 0; i <= steps; ++i) {
    controller.step_index = i;
    StepDecision d;
    try {
      d = controller.decide(x);
    } catch (const InfeasibleError& err) {
      log.completed = false;
      log.failure = err.what();
      log_msg(LogLevel::error,
              "run terminated at step " + std::to_string(i) + ": " +
                  log.failure);
      break;
    }
    log.t.push_back(i * scenario.dt);
    log.x.push_back(x);
    log.u.push_back(d.u);
    log.outputs.push_back(std::move(d.outputs));
    log.cpl.push_back(d.cpl);
    log.tier.push_back(std::move(d.tier));
    log.min_residual.push_back(d.min_residual);
    log.margin.push_back(d.margin);
    if (i < steps) x = step_rk4(scenario.system, d.u, x, scenario.dt);
  }

  if (controller.flat_gradient_hits > 0) {
    log.warnings.push_back(
        "gradient of h nearly vanished on the safe-set boundary (first at "
        "step " +
        std::to_string(controller.first_flat_gradient_step) + ", " +
        std::to_string(controller.flat_gradient_hits) + " samples)");
    log_msg(LogLevel::info, log.warnings.back());
  }
  return log;
}

MonitorReport monitor_invariance(const TrajectoryLog& log, double tol) {
  MonitorReport report;
  report.value = log.min_margin();
  report.pass = report.value >= -tol;
  std::ostringstream os;
  os << "min margin " << report.value << " against tolerance " << -tol;
  report.detail = os.str();
  return report;
}

CplMonitorReport monitor_cpl(const TrajectoryLog& log) {
  CplMonitorReport report;
  report.top_level = log.top_level;
  report.tier_always_sat_inc = !log.tier.empty();
  for (size_t i = 0; i < log.cpl.size(); ++i) {
    if (log.tier[i] != "sat+inc") report.tier_always_sat_inc = false;
    if (i == 0) continue;
    if (log.cpl[i] < log.cpl[i - 1]) {
      ++report.decreases;
      if (report.first_decrease_step < 0) {
        report.first_decrease_step = static_cast<long>(i);
      }
    } else if (log.cpl[i] > log.cpl[i - 1]) {
      report.increases.emplace_back(log.t[i], log.cpl[i]);
    }
  }
  if (!log.cpl.empty()) {
    report.reached_top = log.cpl.back() >= log.top_level;
  }
  report.pass = report.decreases == 0;
  return report;
}

double fit_exponential_rate(
    const std::vector<std::pair<double, double>>& series) {
  if (series.size() < 3) throw FitDomainError("series too short to fit");
  const size_t start = series.size() / 20;  // skip the initial transient
  double st = 0, sy = 0, stt = 0, sty = 0;
  size_t count = 0;
  for (size_t i = start; i < series.size(); ++i) {
    const auto& [t, r] = series[i];
    if (!(r > 0.0)) {
      throw FitDomainError("non-positive residual in fit window");
    }
    const double y = std::log(r);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++count;
  }
  const double denom = count * stt - st * st;
  if (denom <= 0.0) throw FitDomainError("degenerate time axis");
  const double slope = (count * sty - st * sy) / denom;
  if (std::abs(slope) < 1e-12) {
    return std::numeric_limits<double>::infinity();  // flat series
  }
  if (slope > 0.0) throw FitDomainError("residuals grow over the fit window");
  return -1.0 / slope;
}

namespace {

void append_float(std::string* out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  *out += buf;
}

}  // namespace

std::string to_csv(const TrajectoryLog& log) {
  std::string out;
  out += "t";
  const int n = log.x.empty() ? 0 : static_cast<int>(log.x[0].size());
  const int m = log.u.empty() ? 0 : static_cast<int>(log.u[0].size());
  for (int i = 1; i <= n; ++i) out += ",x_" + std::to_string(i);
  for (int i = 1; i <= m; ++i) out += ",u_" + std::to_string(i);
  for (const auto& name : log.output_names) out += "," + name;
  out += ",cpl,tier,min_residual\n";
  for (size_t r = 0; r < log.records(); ++r) {
    append_float(&out, log.t[r]);
    for (int i = 0; i < n; ++i) {
      out += ',';
      append_float(&out, log.x[r][i]);
    }
    for (int i = 0; i < m; ++i) {
      out += ',';
      append_float(&out, log.u[r][i]);
    }
    for (double v : log.outputs[r]) {
      out += ',';
      append_float(&out, v);
    }
    out += ',' + std::to_string(log.cpl[r]);
    out += ',' + log.tier[r];
    out += ',';
    append_float(&out, log.min_residual[r]);
    out += '\n';
  }
  return out;
}

void write_csv(const TrajectoryLog& log, std::ostream& os) {
  os << to_csv(log);
}

}  // namespace invfilter
