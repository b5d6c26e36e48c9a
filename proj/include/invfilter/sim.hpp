#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "invfilter/bclf.hpp"
#include "invfilter/cbf.hpp"
#include "invfilter/core.hpp"

namespace invfilter {

enum class ControllerKind { cbf, bclf, saturating };

std::string to_string(ControllerKind kind);

// A closed-loop run: system, one controller, its admissible-set
// specification, and the integration grid.
struct Scenario {
  std::string name;
  ControlAffineSystem system;
  ControllerKind controller{ControllerKind::cbf};
  std::optional<BarrierSpec> barrier;   // cbf runs
  std::optional<BclfProblem> problem;   // bclf and saturating runs
  Vector x0;
  double dt{1e-3};
  double horizon{1.0};
  Box control_box;
  std::function<Vector(const Vector&)> nominal;
  std::uint64_t seed{0};

  double k_gain() const;
  void validate() const;  // throws ConfigError
};

// Per-step closed-loop record plus run summary. `outputs` holds h for
// barrier runs and every V_i for priority runs; `margin` is the
// invariance quantity the monitors inspect (h, or the worst finite-bound
// slack at the initial priority level).
struct TrajectoryLog {
  std::vector<std::string> output_names;
  std::vector<double> t;
  std::vector<Vector> x;
  std::vector<Vector> u;
  std::vector<std::vector<double>> outputs;
  std::vector<int> cpl;
  std::vector<std::string> tier;
  std::vector<double> min_residual;
  std::vector<double> margin;

  int initial_level{0};
  int top_level{0};
  bool completed{true};
  std::string failure;
  std::vector<std::string> warnings;

  std::size_t records() const { return t.size(); }
  double min_margin() const;
};

// One classical RK4 step of xdot = f(x) + g(x) u with the control held
// constant. Throws DivergenceError on non-finite results.
Vector step_rk4(const ControlAffineSystem& system, const Vector& u,
                const Vector& x, double dt);

// Closed-loop rollout with zero-order-hold control (the controller is
// evaluated once per step, at the step's initial state). Controller
// infeasibility terminates the run with a partial log and failure note.
TrajectoryLog simulate(const Scenario& scenario);

struct MonitorReport {
  bool pass{false};
  double value{0.0};
  std::string detail;
};

// Forward-invariance check: min margin over the run >= -tol.
MonitorReport monitor_invariance(const TrajectoryLog& log, double tol);

struct CplMonitorReport {
  bool pass{false};            // zero decrease events
  int decreases{0};
  long first_decrease_step{-1};
  std::vector<std::pair<double, int>> increases;  // (time, new level)
  bool reached_top{false};
  bool tier_always_sat_inc{false};
  int top_level{0};
};

CplMonitorReport monitor_cpl(const TrajectoryLog& log);

// Least-squares fit of log(residual) against t after dropping the first
// 5% of samples; returns the time constant -1/slope, or +infinity for a
// flat series. Throws FitDomainError on non-positive or growing series.
double fit_exponential_rate(
    const std::vector<std::pair<double, double>>& series);

// CSV with header t,x_1..x_n,u_1..u_m,<outputs>,cpl,tier,min_residual and
// floats at 17 significant digits.
void write_csv(const TrajectoryLog& log, std::ostream& os);
std::string to_csv(const TrajectoryLog& log);

}  // namespace invfilter
