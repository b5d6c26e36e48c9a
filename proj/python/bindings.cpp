#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "invfilter/equivalence.hpp"
#include "invfilter/scenario.hpp"
#include "invfilter/sim.hpp"

namespace py = pybind11;
using namespace invfilter;

PYBIND11_MODULE(_core, m) {
  m.doc() = "admissible-control-set constructions: barrier and priority "
            "forms, min-norm filters, and the simulation harness";

  py::register_exception<ArgumentError>(m, "ArgumentError");
  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<InfeasibleError>(m, "InfeasibleError");
  py::register_exception<DivergenceError>(m, "DivergenceError");
  py::register_exception<FitDomainError>(m, "FitDomainError");
  py::register_exception<ParseError>(m, "ParseError");

  py::enum_<Sense>(m, "Sense")
      .value("LE", Sense::LE)
      .value("GE", Sense::GE);

  py::class_<Halfspace>(m, "Halfspace")
      .def(py::init([](Vector normal, double offset, Sense sense) {
             return Halfspace{std::move(normal), offset, sense};
           }),
           py::arg("normal"), py::arg("offset"), py::arg("sense"))
      .def_readwrite("normal", &Halfspace::normal)
      .def_readwrite("offset", &Halfspace::offset)
      .def_readwrite("sense", &Halfspace::sense)
      .def("slack", &Halfspace::slack)
      .def("satisfied", &Halfspace::satisfied, py::arg("u"),
           py::arg("tol") = 1e-9);

  py::class_<Box>(m, "Box")
      .def(py::init<Vector, Vector>(), py::arg("lower"), py::arg("upper"))
      .def_property_readonly("lower", &Box::lower)
      .def_property_readonly("upper", &Box::upper)
      .def("dim", &Box::dim)
      .def("center", &Box::center)
      .def("contains", &Box::contains, py::arg("point"), py::arg("tol") = 0.0);

  py::class_<ControlAffineSystem>(m, "ControlAffineSystem")
      .def(py::init([](int state_dim, int control_dim,
                       std::function<Vector(const Vector&)> drift,
                       std::function<Matrix(const Vector&)> input_matrix) {
             return ControlAffineSystem{state_dim, control_dim,
                                        std::move(drift),
                                        std::move(input_matrix)};
           }),
           py::arg("state_dim"), py::arg("control_dim"), py::arg("drift"),
           py::arg("input_matrix"))
      .def_readonly("state_dim", &ControlAffineSystem::state_dim)
      .def_readonly("control_dim", &ControlAffineSystem::control_dim);

  py::class_<GeneralSystem>(m, "GeneralSystem")
      .def(py::init([](int state_dim, int control_dim,
                       std::function<Vector(const Vector&, const Vector&)> f) {
             return GeneralSystem{state_dim, control_dim, std::move(f)};
           }),
           py::arg("state_dim"), py::arg("control_dim"), py::arg("dynamics"));

  py::class_<BarrierSpec>(m, "BarrierSpec")
      .def(py::init([](std::function<double(const Vector&)> h,
                       std::function<Vector(const Vector&)> grad_h,
                       double k_gain, Box domain) {
             BarrierSpec b{std::move(h), std::move(grad_h), k_gain,
                           std::move(domain)};
             b.validate();
             return b;
           }),
           py::arg("h"), py::arg("grad_h"), py::arg("k_gain"),
           py::arg("domain"))
      .def_readonly("k_gain", &BarrierSpec::k_gain)
      .def_readonly("domain", &BarrierSpec::domain);

  py::class_<Objective>(m, "Objective")
      .def_static("less_equal", &Objective::less_equal, py::arg("value"),
                  py::arg("gradient"), py::arg("label") = std::string())
      .def_static("greater_equal", &Objective::greater_equal, py::arg("value"),
                  py::arg("gradient"), py::arg("label") = std::string())
      .def("value", &Objective::value)
      .def("gradient", &Objective::gradient)
      .def_property_readonly("label", &Objective::label)
      .def_property_readonly("original_sense", &Objective::original_sense);

  py::class_<Bound>(m, "Bound")
      .def_static("unbounded", &Bound::unbounded)
      .def_static("of", &Bound::of, py::arg("value"))
      .def("is_unbounded", &Bound::is_unbounded)
      .def("value", &Bound::value)
      .def("satisfied_by", &Bound::satisfied_by);

  py::class_<PriorityTable>(m, "PriorityTable")
      .def(py::init<std::vector<std::vector<Bound>>>(), py::arg("rows"))
      .def("objectives", &PriorityTable::objectives)
      .def("top_level", &PriorityTable::top_level)
      .def("at", &PriorityTable::at, py::arg("objective"), py::arg("level"));

  py::class_<BclfProblem>(m, "BclfProblem")
      .def(py::init<std::vector<Objective>, PriorityTable, double, double>(),
           py::arg("objectives"), py::arg("table"), py::arg("k_gain"),
           py::arg("epsilon"))
      .def_property_readonly("k_gain", &BclfProblem::k_gain)
      .def_property_readonly("epsilon", &BclfProblem::epsilon);

  m.def("eval_dynamics", &eval_dynamics, py::arg("system"), py::arg("x"),
        py::arg("u"));
  m.def(
      "lie_derivatives",
      [](const std::function<Vector(const Vector&)>& grad,
         const ControlAffineSystem& system, const Vector& x) {
        const LieDerivatives lie = lie_derivatives(grad, system, x);
        return py::make_tuple(lie.along_drift, lie.along_input);
      },
      py::arg("grad"), py::arg("system"), py::arg("x"));
  m.def("class_kappa", &class_kappa, py::arg("k_gain"), py::arg("y"));

  // solver
  py::class_<ConstraintId>(m, "ConstraintId")
      .def("describe", &ConstraintId::describe);
  py::enum_<SolveStatus>(m, "SolveStatus")
      .value("optimal", SolveStatus::optimal)
      .value("infeasible", SolveStatus::infeasible);
  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("status", &SolveResult::status)
      .def_readonly("point", &SolveResult::point)
      .def_readonly("max_violation", &SolveResult::max_violation)
      .def_readonly("multipliers", &SolveResult::multipliers);
  m.def(
      "solve_min_norm",
      [](const Vector& target, const std::vector<Halfspace>& halfspaces,
         const Box& box) {
        return solve_min_norm({target, halfspaces, box});
      },
      py::arg("target"), py::arg("halfspaces"), py::arg("box"));
  m.def(
      "feasible",
      [](const std::vector<Halfspace>& halfspaces, const Box& box) {
        const FeasibilityResult r = feasible(halfspaces, box);
        return py::make_tuple(r.feasible,
                              r.feasible ? py::cast(r.witness) : py::none());
      },
      py::arg("halfspaces"), py::arg("box"));
  m.def(
      "oracle_min_norm",
      [](const Vector& target, const std::vector<Halfspace>& halfspaces,
         const Box& box, int grid) {
        const OracleResult r = oracle_min_norm({target, halfspaces, box}, grid);
        return r.status == SolveStatus::optimal
                   ? py::object(py::cast(r.point))
                   : py::object(py::none());
      },
      py::arg("target"), py::arg("halfspaces"), py::arg("box"),
      py::arg("grid_points_per_axis"));

  // barrier form
  py::class_<CbfConstraint>(m, "CbfConstraint")
      .def_readonly("halfspace", &CbfConstraint::halfspace)
      .def_readonly("h_value", &CbfConstraint::h_value)
      .def_readonly("lie_drift", &CbfConstraint::lie_drift)
      .def_readonly("lie_input", &CbfConstraint::lie_input)
      .def("residual_at", &CbfConstraint::residual_at);
  py::class_<ValidityReport>(m, "ValidityReport")
      .def_readonly("passed", &ValidityReport::pass)
      .def_readonly("vacuous", &ValidityReport::vacuous)
      .def_readonly("worst_margin", &ValidityReport::worst_margin)
      .def_readonly("worst_state", &ValidityReport::worst_state)
      .def_readonly("worst_control", &ValidityReport::worst_control)
      .def_readonly("states_checked", &ValidityReport::states_checked)
      .def_readonly("note", &ValidityReport::note);
  m.def("cbf_constraint", &cbf_constraint, py::arg("barrier"),
        py::arg("system"), py::arg("x"));
  m.def("in_k_cbf", &in_k_cbf, py::arg("barrier"), py::arg("system"),
        py::arg("x"), py::arg("u"), py::arg("tol") = 1e-9);
  m.def("is_cbf", &is_cbf, py::arg("barrier"), py::arg("system"),
        py::arg("control_box"), py::arg("state_samples"),
        py::arg("control_grid") = 0, py::arg("tol") = 1e-9);
  m.def("cbf_filter", &cbf_filter, py::arg("nominal_u"), py::arg("constraints"),
        py::arg("control_box"));

  // priority form
  py::class_<CplReport>(m, "CplReport")
      .def_readonly("level", &CplReport::level)
      .def_readonly("satisfied", &CplReport::satisfied)
      .def_readonly("values", &CplReport::values);
  py::enum_<ControllerTier>(m, "ControllerTier")
      .value("sat_inc", ControllerTier::sat_inc)
      .value("sat_only", ControllerTier::sat_only);
  py::class_<BclfControl>(m, "BclfControl")
      .def_readonly("u", &BclfControl::u)
      .def_readonly("tier", &BclfControl::tier)
      .def_readonly("level", &BclfControl::level)
      .def_readonly("min_sat_slack", &BclfControl::min_sat_slack);
  m.def("current_priority_level", &current_priority_level, py::arg("problem"),
        py::arg("x"));
  m.def("u_sat_constraints", &u_sat_constraints, py::arg("problem"),
        py::arg("system"), py::arg("x"));
  m.def("in_u_sat", &in_u_sat, py::arg("problem"), py::arg("system"),
        py::arg("x"), py::arg("u"), py::arg("tol") = 1e-9);
  m.def("i_next", &i_next, py::arg("problem"), py::arg("x"));
  m.def("u_inc_constraints", &u_inc_constraints, py::arg("problem"),
        py::arg("system"), py::arg("x"));
  m.def("is_bclf",
        py::overload_cast<const Objective&, const ControlAffineSystem&,
                          const Box&, const Box&, double, double, int, double>(
            &is_bclf),
        py::arg("objective"), py::arg("system"), py::arg("control_box"),
        py::arg("domain"), py::arg("bound"), py::arg("epsilon"),
        py::arg("state_samples"), py::arg("tol") = 1e-9);
  m.def("is_bclf_general",
        py::overload_cast<const Objective&, const GeneralSystem&, const Box&,
                          const Box&, double, double, int, int, double>(
            &is_bclf),
        py::arg("objective"), py::arg("system"), py::arg("control_box"),
        py::arg("domain"), py::arg("bound"), py::arg("epsilon"),
        py::arg("state_samples"), py::arg("control_grid"),
        py::arg("tol") = 1e-9);
  m.def("bclf_controller", &bclf_controller, py::arg("problem"),
        py::arg("system"), py::arg("x"), py::arg("nominal_u"),
        py::arg("control_box"));

  // equivalence
  py::enum_<SatRowMode>(m, "SatRowMode")
      .value("row_active", SatRowMode::row_active)
      .value("cpl_literal", SatRowMode::cpl_literal);
  py::class_<AgreementReport>(m, "AgreementReport")
      .def_readonly("pairs", &AgreementReport::pairs)
      .def_readonly("disagreements", &AgreementReport::disagreements)
      .def_readonly("boundary_excluded", &AgreementReport::boundary_excluded)
      .def_readonly("negative_h_pairs", &AgreementReport::negative_h_pairs)
      .def_readonly("max_residual_gap", &AgreementReport::max_residual_gap)
      .def_readonly("passed", &AgreementReport::pass);
  m.def("reduce_cbf_to_bclf", &reduce_cbf_to_bclf, py::arg("barrier"),
        py::arg("epsilon") = 1e-2);
  m.def("sets_agree", &sets_agree, py::arg("barrier"), py::arg("system"),
        py::arg("control_box"), py::arg("state_samples"),
        py::arg("control_samples"), py::arg("tol") = 1e-9,
        py::arg("mode") = SatRowMode::row_active, py::arg("seed") = 0,
        py::arg("bclf_k") = 0.0);

  // simulation
  py::enum_<ControllerKind>(m, "ControllerKind")
      .value("cbf", ControllerKind::cbf)
      .value("bclf", ControllerKind::bclf)
      .value("saturating", ControllerKind::saturating);
  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("name", &Scenario::name)
      .def_readwrite("system", &Scenario::system)
      .def_readwrite("controller", &Scenario::controller)
      .def_readwrite("barrier", &Scenario::barrier)
      .def_readwrite("problem", &Scenario::problem)
      .def_readwrite("x0", &Scenario::x0)
      .def_readwrite("dt", &Scenario::dt)
      .def_readwrite("horizon", &Scenario::horizon)
      .def_readwrite("control_box", &Scenario::control_box)
      .def_readwrite("nominal", &Scenario::nominal)
      .def_readwrite("seed", &Scenario::seed);
  py::class_<TrajectoryLog>(m, "TrajectoryLog")
      .def_readonly("t", &TrajectoryLog::t)
      .def_readonly("x", &TrajectoryLog::x)
      .def_readonly("u", &TrajectoryLog::u)
      .def_readonly("outputs", &TrajectoryLog::outputs)
      .def_readonly("cpl", &TrajectoryLog::cpl)
      .def_readonly("tier", &TrajectoryLog::tier)
      .def_readonly("min_residual", &TrajectoryLog::min_residual)
      .def_readonly("margin", &TrajectoryLog::margin)
      .def_readonly("completed", &TrajectoryLog::completed)
      .def_readonly("failure", &TrajectoryLog::failure)
      .def_readonly("warnings", &TrajectoryLog::warnings)
      .def_readonly("initial_level", &TrajectoryLog::initial_level)
      .def_readonly("top_level", &TrajectoryLog::top_level)
      .def("min_margin", &TrajectoryLog::min_margin)
      .def("to_csv", [](const TrajectoryLog& log) { return to_csv(log); });
  py::class_<MonitorReport>(m, "MonitorReport")
      .def_readonly("passed", &MonitorReport::pass)
      .def_readonly("value", &MonitorReport::value)
      .def_readonly("detail", &MonitorReport::detail);
  py::class_<CplMonitorReport>(m, "CplMonitorReport")
      .def_readonly("passed", &CplMonitorReport::pass)
      .def_readonly("decreases", &CplMonitorReport::decreases)
      .def_readonly("increases", &CplMonitorReport::increases)
      .def_readonly("reached_top", &CplMonitorReport::reached_top)
      .def_readonly("tier_always_sat_inc",
                    &CplMonitorReport::tier_always_sat_inc);
  m.def("step_rk4", &step_rk4, py::arg("system"), py::arg("u"), py::arg("x"),
        py::arg("dt"));
  m.def("simulate", &simulate, py::arg("scenario"));
  m.def("monitor_invariance", &monitor_invariance, py::arg("log"),
        py::arg("tol"));
  m.def("monitor_cpl", &monitor_cpl, py::arg("log"));
  m.def("fit_exponential_rate", &fit_exponential_rate, py::arg("series"));

  // scenario files
  m.def(
      "load_scenario",
      [](const std::string& path) {
        return compile_scenario(load_scenario_file(path));
      },
      py::arg("path"), "compile a scenario JSON file into a runnable Scenario");
  m.def(
      "scenario_from_json",
      [](const std::string& text) {
        return compile_scenario(parse_scenario_text(text, "<string>"));
      },
      py::arg("text"));
}
