#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "invfilter/equivalence.hpp"
#include "invfilter/log.hpp"
#include "invfilter/scenario.hpp"
#include "invfilter/sim.hpp"

namespace fs = std::filesystem;
using namespace invfilter;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

std::string verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// Residual series b - V_i for the finite rows at the run's initial level;
// feeds the exponential-rate fit on saturating runs.
std::vector<std::pair<double, double>> bound_residual_series(
    const TrajectoryLog& log, const BclfProblem& problem, int objective,
    int level) {
  std::vector<std::pair<double, double>> series;
  const double b = problem.table().at(objective, level).value();
  for (size_t i = 0; i < log.records(); ++i) {
    series.emplace_back(log.t[i], b - log.outputs[i][objective]);
  }
  return series;
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir) {
  const ScenarioConfig config = load_scenario_file(scenario_path);
  const Scenario scenario = compile_scenario(config);
  const TrajectoryLog log = simulate(scenario);

  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "trajectory.csv", to_csv(log));

  std::ostringstream report;
  report << "scenario: " << scenario.name << " (" << to_string(scenario.controller)
         << ", " << config.system.name << ")\n";
  report << "records: " << log.records() << " (dt=" << fmt(scenario.dt)
         << ", horizon=" << fmt(scenario.horizon) << ")\n";
  report << "status: " << (log.completed ? "completed" : "terminated early")
         << "\n";
  if (!log.completed) report << "failure: " << log.failure << "\n";
  report << "\n";

  bool all_pass = log.completed;

  // the invariance claim only covers runs that start inside the set
  const bool started_inside = log.margin.empty() || log.margin.front() >= 0.0;
  const double tol = scenario.dt;  // zero-order-hold error band
  if (started_inside) {
    const MonitorReport inv = monitor_invariance(log, tol);
    all_pass = all_pass && inv.pass;
    report << "invariance monitor: " << verdict(inv.pass) << " (" << inv.detail
           << ")\n";
  } else {
    report << "invariance monitor: skipped (started outside the set; "
              "approach run)\n";
    if (!log.margin.empty()) {
      report << "  initial margin " << fmt(log.margin.front())
             << ", final margin " << fmt(log.margin.back()) << "\n";
    }
  }
  if (scenario.controller == ControllerKind::cbf && !log.outputs.empty()) {
    double min_h = log.outputs[0][0];
    for (const auto& row : log.outputs) min_h = std::min(min_h, row[0]);
    report << "min h over run: " << fmt(min_h) << "\n";
  }

  if (scenario.controller != ControllerKind::cbf) {
    const CplMonitorReport cpl = monitor_cpl(log);
    all_pass = all_pass && cpl.pass;
    report << "cpl monitor: " << verdict(cpl.pass) << " (" << cpl.decreases
           << " decreases)\n";
    report << "cpl trace: level " << log.initial_level << " at t=0";
    for (const auto& [t, level] : cpl.increases) {
      report << " -> " << level << " at t=" << fmt(t);
    }
    report << "\n";
    report << "reached top level: " << (cpl.reached_top ? "yes" : "no")
           << " (top=" << cpl.top_level << ")\n";
  }

  if (scenario.controller == ControllerKind::saturating && log.completed) {
    const auto& problem = *scenario.problem;
    for (int i = 0; i < static_cast<int>(problem.objectives().size()); ++i) {
      if (problem.table().at(i, log.initial_level).is_unbounded()) continue;
      try {
        const double tc = fit_exponential_rate(
            bound_residual_series(log, problem, i, log.initial_level));
        report << "fitted time constant (objective " << i + 1
               << "): " << fmt(tc) << " (k=" << fmt(problem.k_gain())
               << ")\n";
      } catch (const FitDomainError& err) {
        report << "fitted time constant (objective " << i + 1
               << "): unavailable (" << err.what() << ")\n";
      }
    }
  }

  if (log.warnings.empty()) {
    report << "warnings: none\n";
  } else {
    for (const auto& w : log.warnings) report << "warning: " << w << "\n";
  }
  report << "\noverall: " << verdict(all_pass) << "\n";
  write_file(fs::path(out_dir) / "report.txt", report.str());
  std::cout << report.str();

  if (!log.completed) return 3;
  return all_pass ? 0 : 1;
}

int cmd_check_equivalence(const std::string& scenario_path, long samples,
                          const std::string& out_dir, double bclf_k,
                          const std::string& mode_name) {
  const ScenarioConfig config = load_scenario_file(scenario_path);
  const Scenario scenario = compile_scenario(config);
  if (!scenario.barrier) {
    throw ConfigError("check-equivalence needs a barrier scenario");
  }
  const SatRowMode mode = mode_name == "cpl-literal" ? SatRowMode::cpl_literal
                                                     : SatRowMode::row_active;
  const int state_samples =
      std::max(1, static_cast<int>(std::ceil(std::sqrt(double(samples)))));
  const int control_samples = std::max(
      1, static_cast<int>(std::ceil(double(samples) / state_samples)));

  const AgreementReport agree =
      sets_agree(*scenario.barrier, scenario.system, scenario.control_box,
                 state_samples, control_samples, 1e-9, mode, scenario.seed,
                 bclf_k);

  std::ostringstream report;
  report << "scenario: " << scenario.name << " (" << config.system.name
         << ")\n";
  report << "mode: "
         << (mode == SatRowMode::row_active ? "row-active" : "cpl-literal")
         << "\n";
  if (bclf_k > 0.0) report << "bclf-side k override: " << fmt(bclf_k) << "\n";
  report << "pairs compared: " << agree.pairs << "\n";
  report << "disagreements: " << agree.disagreements << "\n";
  report << "boundary-excluded pairs: " << agree.boundary_excluded << "\n";
  report << "pairs below the safe set: " << agree.negative_h_pairs << "\n";
  if (mode == SatRowMode::cpl_literal) {
    report << "asymmetric pairs below the safe set (U_sat free, K_cbf "
              "constrained): "
           << agree.negative_h_asymmetric << "\n";
  }
  report << "max |K_cbf residual - U_sat slack|: "
         << fmt(agree.max_residual_gap) << "\n";
  report << "overall: " << verdict(agree.pass) << "\n";

  std::string csv = "x,u,cbf_residual,sat_slack\n";
  for (const auto& d : agree.disagreement_samples) {
    std::ostringstream line;
    line.precision(17);
    for (int i = 0; i < d.x.size(); ++i) line << (i ? ";" : "") << d.x[i];
    line << ",";
    for (int i = 0; i < d.u.size(); ++i) line << (i ? ";" : "") << d.u[i];
    line << "," << d.cbf_residual << "," << d.sat_slack << "\n";
    csv += line.str();
  }

  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "agreement_report.txt", report.str());
  write_file(fs::path(out_dir) / "disagreements.csv", csv);
  std::cout << report.str();
  return agree.pass ? 0 : 1;
}

std::string describe_vector(const Vector& v) {
  std::ostringstream os;
  os.precision(12);
  os << "(";
  for (int i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ")";
  return os.str();
}

int cmd_validate(const std::string& scenario_path, int samples) {
  const ScenarioConfig config = load_scenario_file(scenario_path);
  const Scenario scenario = compile_scenario(config);
  const Box domain = scenario_domain(config);
  bool all_pass = true;

  if (scenario.barrier) {
    const BarrierSpec& barrier = *scenario.barrier;
    const GradientCheck grad =
        check_gradient(barrier.h, barrier.grad_h, grid_points(domain, 128));
    std::cout << "gradient check (h): " << verdict(grad.pass)
              << " (worst relative error " << fmt(grad.worst_relative_error)
              << ")\n";
    all_pass = all_pass && grad.pass;

    const ValidityReport report = is_cbf(barrier, scenario.system,
                                         scenario.control_box, samples);
    std::cout << "barrier validity: " << verdict(report.pass) << "\n";
    std::cout << "  states checked: " << report.states_checked << "\n";
    std::cout << "  worst residual sup " << fmt(report.worst_margin)
              << " at x=" << describe_vector(report.worst_state) << "\n";
    all_pass = all_pass && report.pass;
  } else {
    const BclfProblem& problem = *scenario.problem;
    for (int i = 0; i < static_cast<int>(problem.objectives().size()); ++i) {
      const Objective& objective = problem.objectives()[i];
      const std::string name = objective.label().empty()
                                   ? "objective " + std::to_string(i + 1)
                                   : objective.label();
      const auto value = [&objective](const Vector& x) {
        return objective.value(x);
      };
      const auto gradient = [&objective](const Vector& x) {
        return objective.gradient(x);
      };
      const GradientCheck grad =
          check_gradient(value, gradient, grid_points(domain, 128));
      std::cout << "gradient check (" << name << "): " << verdict(grad.pass)
                << " (worst relative error " << fmt(grad.worst_relative_error)
                << ")\n";
      all_pass = all_pass && grad.pass;

      // check descent against the tightest finite bound of the row
      const Bound& tightest =
          problem.table().at(i, problem.table().top_level());
      if (tightest.is_unbounded()) {
        std::cout << name << ": no finite bound, nothing to check\n";
        continue;
      }
      const ValidityReport report =
          is_bclf(objective, scenario.system, scenario.control_box, domain,
                  tightest.value(), problem.epsilon(), samples);
      std::cout << name << " validity: " << verdict(report.pass);
      if (report.vacuous) std::cout << " (vacuous: " << report.note << ")";
      std::cout << "\n";
      if (!report.vacuous) {
        std::cout << "  states checked: " << report.states_checked << "\n";
        std::cout << "  worst min-descent " << fmt(report.worst_margin)
                  << " (need <= " << fmt(-problem.epsilon())
                  << ") at x=" << describe_vector(report.worst_state) << "\n";
      }
      all_pass = all_pass && report.pass;
    }
  }
  std::cout << "overall: " << verdict(all_pass) << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"admissible-set control library driver"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "out";
  long samples = 10000;
  int validate_samples = 2001;
  double bclf_k = 0.0;
  std::string mode = "row-active";

  CLI::App* run = app.add_subcommand("run", "simulate a scenario file");
  run->add_option("file", scenario_path, "scenario JSON")->required();
  run->add_option("--out", out_dir, "output directory");

  CLI::App* check = app.add_subcommand(
      "check-equivalence",
      "compare the barrier admissible set against its reduced priority form");
  check->add_option("file", scenario_path, "scenario JSON")->required();
  check->add_option("--samples", samples, "number of (x,u) pairs");
  check->add_option("--out", out_dir, "output directory");
  check->add_option("--bclf-k", bclf_k,
                    "override k on the priority side (mismatch demo)");
  check->add_option("--mode", mode, "row-active | cpl-literal")
      ->check(CLI::IsMember({"row-active", "cpl-literal"}));

  CLI::App* validate =
      app.add_subcommand("validate", "run the sampling validity checkers");
  validate->add_option("file", scenario_path, "scenario JSON")->required();
  validate->add_option("--samples", validate_samples, "state sample budget");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(scenario_path, out_dir);
    if (check->parsed()) {
      return cmd_check_equivalence(scenario_path, samples, out_dir, bclf_k,
                                   mode);
    }
    return cmd_validate(scenario_path, validate_samples);
  } catch (const ParseError& err) {
    std::cerr << "parse error: " << err.what() << "\n";
    return 2;
  } catch (const InfeasibleError& err) {
    std::cerr << "infeasible: " << err.what() << "\n";
    for (const ConstraintId& id : err.certificate) {
      std::cerr << "  certificate: " << id.describe() << "\n";
    }
    return 3;
  } catch (const ConfigError& err) {
    std::cerr << "configuration error: " << err.what() << "\n";
    return 2;
  } catch (const ArgumentError& err) {
    std::cerr << "argument error: " << err.what() << "\n";
    return 2;
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "unexpected error: " << err.what() << "\n";
    return 2;
  }
}
