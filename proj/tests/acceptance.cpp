// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Everything here is closed-form-derived at desk scale; tolerances are
// pinned in the checks themselves.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "invfilter/equivalence.hpp"
#include "invfilter/scenario.hpp"
#include "invfilter/sim.hpp"
#include "solver_instances.hpp"
#include "test_util.hpp"

using namespace invfilter;
using testutil::vec;

namespace {

int g_failures = 0;

void criterion(int id, const std::string& name,
               const std::function<bool(std::ostringstream&)>& body) {
  std::ostringstream detail;
  bool ok = false;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    ok = body(detail);
  } catch (const std::exception& err) {
    detail << "exception: " << err.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (!ok) ++g_failures;
  std::printf("[%s] criterion %d: %s (%.2fs) %s\n", ok ? "PASS" : "FAIL", id,
              name.c_str(), seconds, detail.str().c_str());
  std::fflush(stdout);
}

BarrierSpec make_barrier(std::function<double(const Vector&)> h,
                         std::function<Vector(const Vector&)> grad, double k,
                         Box domain) {
  BarrierSpec b;
  b.h = std::move(h);
  b.grad_h = std::move(grad);
  b.k_gain = k;
  b.domain = std::move(domain);
  return b;
}

Scenario saturated_benchmark(double x0, double dt) {
  Scenario s;
  s.name = "saturated";
  s.system = testutil::single_integrator_1d();
  s.controller = ControllerKind::cbf;
  s.barrier = make_barrier(
      [](const Vector& x) { return x[0]; },
      [](const Vector& x) { return Vector(Vector::Ones(x.size())); }, 1.0,
      Box(vec({-2.0}), vec({2.0})));
  s.x0 = vec({x0});
  s.dt = dt;
  s.horizon = 10.0;
  s.control_box = Box(vec({-10.0}), vec({10.0}));
  s.nominal = [](const Vector&) { return vec({-5.0}); };
  return s;
}

Scenario saturating_approach(double k) {
  Scenario s;
  s.name = "saturating approach";
  s.system = testutil::single_integrator_1d();
  s.controller = ControllerKind::saturating;
  std::vector<Objective> objectives;
  objectives.push_back(Objective::less_equal(
      [](const Vector& x) { return x[0]; },
      [](const Vector& x) { return Vector(Vector::Ones(x.size())); }));
  s.problem = BclfProblem(std::move(objectives),
                          PriorityTable({{Bound::unbounded(), Bound::of(2.0)}}),
                          k, 1e-2);
  s.x0 = vec({0.0});
  s.dt = 1e-3;
  s.horizon = 10.0;
  s.control_box = Box(vec({-10.0}), vec({10.0}));
  s.nominal = [](const Vector&) { return vec({0.0}); };
  return s;
}

bool check_equivalence(std::ostringstream& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  struct Case {
    std::string name;
    ControlAffineSystem system;
    BarrierSpec barrier;
    Box ubox;
  };
  std::vector<Case> cases;
  cases.push_back({"single_integrator_1d", testutil::single_integrator_1d(),
                   make_barrier(
                       [](const Vector& x) { return x[0]; },
                       [](const Vector& x) {
                         return Vector(Vector::Ones(x.size()));
                       },
                       2.0, Box(vec({-2.0}), vec({2.0}))),
                   Box(vec({-2.0}), vec({2.0}))});
  cases.push_back({"double_integrator_drift",
                   testutil::double_integrator_drift(),
                   make_barrier(
                       [](const Vector& x) { return x[0] + x[1]; },
                       [](const Vector& x) {
                         return Vector(Vector::Ones(x.size()));
                       },
                       1.0, Box(vec({-2, -2}), vec({2, 2}))),
                   Box(vec({-2.0}), vec({2.0}))});
  ControlAffineSystem unicycle;
  unicycle.state_dim = 3;
  unicycle.control_dim = 2;
  unicycle.drift = [](const Vector& x) { return Vector::Zero(x.size()); };
  unicycle.input_matrix = [](const Vector& x) {
    Matrix g(3, 2);
    g << 1.0, 0.0, x[2], 0.0, 0.0, 1.0;
    return g;
  };
  cases.push_back({"unicycle_linearized", unicycle,
                   make_barrier(
                       [](const Vector& x) { return 4.0 - x[0] - x[1]; },
                       [](const Vector& x) {
                         Vector g(3);
                         g << -1.0, -1.0, 0.0;
                         return g;
                       },
                       1.0,
                       Box(vec({-2, -2, -0.5}), vec({2, 2, 0.5}))),
                   Box(vec({-2.0, -1.0}), vec({2.0, 1.0}))});

  bool ok = true;
  for (const Case& c : cases) {
    const AgreementReport r = sets_agree(c.barrier, c.system, c.ubox, 100, 100,
                                         1e-9, SatRowMode::row_active, 123);
    detail << c.name << ": " << r.pairs << " pairs, " << r.disagreements
           << " disagreements, gap " << r.max_residual_gap << "; ";
    ok = ok && r.pairs >= 10000 && r.disagreements == 0 &&
         r.max_residual_gap <= 1e-12;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  detail << "total " << seconds << "s";
  return ok && seconds < 5.0;
}

bool check_invariance(std::ostringstream& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  const TrajectoryLog coarse = simulate(saturated_benchmark(1.0, 1e-3));
  const double min_h = coarse.min_margin();
  const double v_coarse = std::max(0.0, -min_h);
  const double v_fine =
      std::max(0.0, -simulate(saturated_benchmark(1.0, 5e-4)).min_margin());
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  detail << "min h " << min_h << ", violation " << v_coarse << " at dt, "
         << v_fine << " at dt/2, " << seconds << "s";
  const bool scaling_ok =
      (v_coarse <= 1e-12 && v_fine <= 1e-12) || v_coarse / v_fine >= 1.8;
  return coarse.completed && min_h >= -1e-3 && scaling_ok && seconds < 1.0;
}

bool check_stability(std::ostringstream& detail) {
  const TrajectoryLog log = simulate(saturated_benchmark(-1.0, 1e-3));
  double worst_gap = 0.0;
  for (size_t i = 0; i < log.records(); ++i) {
    worst_gap = std::max(
        worst_gap, std::abs(log.outputs[i][0] - (-std::exp(-log.t[i]))));
  }
  const double h_at_5 = log.outputs[5000][0];
  detail << "max |h + e^-t| = " << worst_gap << ", |h(5)| = "
         << std::abs(h_at_5);
  return log.completed && worst_gap <= 2e-3 && std::abs(h_at_5) <= 1e-2;
}

bool check_cpl(std::ostringstream& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioConfig config =
      load_scenario_file(std::string(SCENARIO_DIR) + "/table1_mission.json");
  const TrajectoryLog log = simulate(compile_scenario(config));
  const CplMonitorReport cpl = monitor_cpl(log);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  detail << cpl.decreases << " decreases, reached top "
         << (cpl.reached_top ? "yes" : "no") << ", tier sat+inc throughout "
         << (cpl.tier_always_sat_inc ? "yes" : "no") << ", " << seconds << "s";
  return log.completed && cpl.decreases == 0 && cpl.reached_top &&
         cpl.tier_always_sat_inc && seconds < 2.0;
}

bool check_exponential(std::ostringstream& detail) {
  bool ok = true;
  for (double k : {0.5, 1.0, 2.0}) {
    const TrajectoryLog log = simulate(saturating_approach(k));
    std::vector<std::pair<double, double>> series;
    for (size_t i = 0; i < log.records(); ++i) {
      series.emplace_back(log.t[i], 2.0 - log.outputs[i][0]);
    }
    const double tc = fit_exponential_rate(series);
    detail << "k=" << k << ": fitted " << tc << "; ";
    ok = ok && std::abs(tc - k) / k <= 0.02;
  }
  return ok;
}

bool check_solver(std::ostringstream& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto instances = testutil::random_min_norm_instances(20240901);
  int status_mismatches = 0, point_mismatches = 0, kkt_failures = 0;
  for (const MinNormProblem& p : instances) {
    const SolveResult got = solve_min_norm(p);
    const OracleResult ref = oracle_min_norm(p, 201);
    if (got.status != ref.status) {
      ++status_mismatches;
      continue;
    }
    if (got.status != SolveStatus::optimal) continue;
    if ((got.point - ref.point).lpNorm<Eigen::Infinity>() > 1e-3) {
      ++point_mismatches;
    }
    Vector stationarity = got.point - p.target;
    bool multipliers_ok = true;
    for (size_t a = 0; a < got.active_set.size(); ++a) {
      if (got.multipliers[a] < -1e-9) multipliers_ok = false;
      stationarity -=
          got.multipliers[a] * testutil::constraint_normal(p, got.active_set[a]);
    }
    if (!multipliers_ok ||
        stationarity.lpNorm<Eigen::Infinity>() > 1e-8) {
      ++kkt_failures;
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  detail << instances.size() << " instances, " << status_mismatches
         << " status mismatches, " << point_mismatches << " point mismatches, "
         << kkt_failures << " KKT failures, " << seconds << "s";
  return status_mismatches == 0 && point_mismatches == 0 && kkt_failures == 0 &&
         seconds < 2.0;
}

bool check_validity_thresholds(std::ostringstream& detail) {
  const auto system = testutil::single_integrator_1d();
  // sup_u residual = 1 + x/k on u in [-1,1], x in [-2,2]: boundary k = 2
  const Box ubox(vec({-1.0}), vec({1.0}));
  double first_passing_k = -1.0;
  for (double k = 1.90; k <= 2.104; k += 0.01) {
    const BarrierSpec b = make_barrier(
        [](const Vector& x) { return x[0]; },
        [](const Vector& x) { return Vector(Vector::Ones(x.size())); }, k,
        Box(vec({-2.0}), vec({2.0})));
    if (is_cbf(b, system, ubox, 201).pass) {
      first_passing_k = k;
      break;
    }
  }
  detail << "is_cbf flips at k = " << first_passing_k;
  const bool cbf_ok = std::abs(first_passing_k - 2.0) <= 0.0101;

  // min_u gradV.(f + g u) = -1 on u in [-1,1]: boundary epsilon = 1
  const Objective v = Objective::less_equal(
      [](const Vector& x) { return -x[0]; },
      [](const Vector& x) { return Vector(-Vector::Ones(x.size())); });
  double last_passing_eps = -1.0;
  for (double eps = 0.90; eps <= 1.104; eps += 0.01) {
    if (is_bclf(v, system, ubox, Box(vec({-2.0}), vec({2.0})), 0.0, eps, 201)
            .pass) {
      last_passing_eps = eps;
    }
  }
  detail << ", is_bclf last passing epsilon = " << last_passing_eps;
  const bool bclf_ok = std::abs(last_passing_eps - 1.0) <= 0.0101;
  return cbf_ok && bclf_ok;
}

bool check_determinism(std::ostringstream& detail) {
  const std::string dir = SCENARIO_DIR;
  bool ok = true;
  for (const std::string name : {"cbf_1d.json", "table1_mission.json",
                                 "saturating_k2.json"}) {
    const ScenarioConfig config = load_scenario_file(dir + "/" + name);
    const std::string a = to_csv(simulate(compile_scenario(config)));
    const std::string b = to_csv(simulate(compile_scenario(config)));
    ok = ok && a == b;
    detail << name << (a == b ? " identical; " : " DIFFERS; ");
  }
  return ok;
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion(1, "admissible-set equivalence on three systems",
            check_equivalence);
  criterion(2, "forward invariance of the saturated benchmark",
            check_invariance);
  criterion(3, "asymptotic approach from outside the set", check_stability);
  criterion(4, "priority level monotone and reaches the top", check_cpl);
  criterion(5, "exponential approach with time constant k", check_exponential);
  criterion(6, "min-norm solver against the grid oracle", check_solver);
  criterion(7, "validity checkers flip at the analytic thresholds",
            check_validity_thresholds);
  criterion(8, "repeated runs emit byte-identical trajectories",
            check_determinism);
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
