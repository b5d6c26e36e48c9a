#include "invfilter/scenario.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace invfilter {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg, const std::string& loc) {
  throw ParseError(msg, loc);
}

void expect_object(const json& j, const std::string& loc) {
  if (!j.is_object()) fail("expected an object", loc);
}

void expect_keys(const json& obj, const std::vector<std::string>& allowed,
                 const std::string& loc) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail("unknown key '" + key + "'", loc);
    }
  }
}

const json& require(const json& obj, const char* key, const std::string& loc) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(std::string("missing key '") + key + "'", loc);
  return *it;
}

double as_number(const json& j, const std::string& loc) {
  if (!j.is_number()) fail("expected a number", loc);
  return j.get<double>();
}

std::string as_string(const json& j, const std::string& loc) {
  if (!j.is_string()) fail("expected a string", loc);
  return j.get<std::string>();
}

std::vector<double> as_vector(const json& j, const std::string& loc) {
  if (!j.is_array()) fail("expected an array of numbers", loc);
  std::vector<double> out;
  for (size_t i = 0; i < j.size(); ++i) {
    out.push_back(as_number(j[i], loc + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<Monomial> parse_monomials(const json& j, const std::string& loc) {
  if (!j.is_array() || j.empty()) fail("expected a monomial list", loc);
  std::vector<Monomial> terms;
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string mloc = loc + "[" + std::to_string(i) + "]";
    expect_object(j[i], mloc);
    expect_keys(j[i], {"coeff", "powers"}, mloc);
    Monomial m;
    m.coeff = as_number(require(j[i], "coeff", mloc), mloc + ".coeff");
    const json& powers = require(j[i], "powers", mloc);
    if (!powers.is_array()) fail("expected an array", mloc + ".powers");
    for (size_t p = 0; p < powers.size(); ++p) {
      const std::string ploc = mloc + ".powers[" + std::to_string(p) + "]";
      if (!powers[p].is_number_integer()) fail("expected an integer", ploc);
      const long v = powers[p].get<long>();
      if (v < 0) fail("powers must be nonnegative", ploc);
      m.powers.push_back(static_cast<int>(v));
    }
    terms.push_back(std::move(m));
  }
  return terms;
}

BoundEntry parse_bound_entry(const json& j, const std::string& loc) {
  BoundEntry e;
  if (j.is_number()) {
    e.kind = BoundEntry::Kind::finite;
    e.value = j.get<double>();
    return e;
  }
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") {
      e.kind = BoundEntry::Kind::pos_inf;
      return e;
    }
    if (s == "-inf") {
      e.kind = BoundEntry::Kind::neg_inf;
      return e;
    }
  }
  fail("expected a number, \"inf\", or \"-inf\"", loc);
}

std::pair<std::vector<double>, std::vector<double>> parse_box(
    const json& j, const std::string& loc) {
  expect_object(j, loc);
  expect_keys(j, {"lower", "upper"}, loc);
  return {as_vector(require(j, "lower", loc), loc + ".lower"),
          as_vector(require(j, "upper", loc), loc + ".upper")};
}

json box_to_json(const std::vector<double>& lower,
                 const std::vector<double>& upper) {
  return json{{"lower", lower}, {"upper", upper}};
}

json monomials_to_json(const std::vector<Monomial>& terms) {
  json out = json::array();
  for (const Monomial& m : terms) {
    out.push_back(json{{"coeff", m.coeff}, {"powers", m.powers}});
  }
  return out;
}

json bound_entry_to_json(const BoundEntry& e) {
  switch (e.kind) {
    case BoundEntry::Kind::finite: return json(e.value);
    case BoundEntry::Kind::pos_inf: return json("inf");
    case BoundEntry::Kind::neg_inf: return json("-inf");
  }
  return json();
}

}  // namespace

bool semantically_equal(const ScenarioConfig& a, const ScenarioConfig& b) {
  const auto objectives_equal = [&] {
    if (a.objectives.size() != b.objectives.size()) return false;
    for (size_t i = 0; i < a.objectives.size(); ++i) {
      const auto& x = a.objectives[i];
      const auto& y = b.objectives[i];
      if (x.label != y.label || x.sense != y.sense || x.v != y.v) return false;
    }
    return true;
  };
  return a.name == b.name && a.system.name == b.system.name &&
         a.system.params == b.system.params && a.controller == b.controller &&
         a.barrier_h == b.barrier_h && objectives_equal() &&
         a.table == b.table && a.k == b.k && a.epsilon == b.epsilon &&
         a.x0 == b.x0 && a.dt == b.dt && a.horizon == b.horizon &&
         a.box_lower == b.box_lower && a.box_upper == b.box_upper &&
         a.domain_lower == b.domain_lower && a.domain_upper == b.domain_upper &&
         a.nominal.is_builtin == b.nominal.is_builtin &&
         a.nominal.builtin == b.nominal.builtin &&
         a.nominal.constant == b.nominal.constant && a.seed == b.seed;
}

ScenarioConfig parse_scenario_text(const std::string& text,
                                   const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    fail(err.what(), origin + ":byte " + std::to_string(err.byte));
  }
  expect_object(root, origin);
  expect_keys(root,
              {"name", "system", "controller", "barrier", "objectives",
               "table", "k", "epsilon", "x0", "dt", "horizon", "control_box",
               "domain", "nominal", "seed"},
              origin);

  ScenarioConfig cfg;
  if (root.contains("name")) {
    cfg.name = as_string(root["name"], origin + ".name");
  }

  const json& system = require(root, "system", origin);
  if (system.is_string()) {
    cfg.system.name = system.get<std::string>();
  } else {
    expect_object(system, origin + ".system");
    expect_keys(system, {"name", "params"}, origin + ".system");
    cfg.system.name =
        as_string(require(system, "name", origin + ".system"),
                  origin + ".system.name");
    if (system.contains("params")) {
      expect_object(system["params"], origin + ".system.params");
      for (const auto& [key, value] : system["params"].items()) {
        cfg.system.params[key] =
            as_number(value, origin + ".system.params." + key);
      }
    }
  }

  cfg.controller =
      as_string(require(root, "controller", origin), origin + ".controller");
  if (cfg.controller != "cbf" && cfg.controller != "bclf" &&
      cfg.controller != "saturating") {
    fail("controller must be cbf, bclf, or saturating", origin + ".controller");
  }

  const bool has_barrier = root.contains("barrier");
  const bool has_objectives = root.contains("objectives");
  if (has_barrier == has_objectives) {
    fail("exactly one of 'barrier' or 'objectives' is required", origin);
  }
  if (has_barrier) {
    const std::string loc = origin + ".barrier";
    expect_object(root["barrier"], loc);
    expect_keys(root["barrier"], {"h"}, loc);
    cfg.barrier_h = parse_monomials(require(root["barrier"], "h", loc),
                                    loc + ".h");
    if (root.contains("table")) fail("'table' requires 'objectives'", origin);
    if (cfg.controller != "cbf") {
      fail("barrier scenarios use the cbf controller", origin + ".controller");
    }
  } else {
    const std::string loc = origin + ".objectives";
    const json& objectives = root["objectives"];
    if (!objectives.is_array() || objectives.empty()) {
      fail("expected a nonempty array", loc);
    }
    for (size_t i = 0; i < objectives.size(); ++i) {
      const std::string oloc = loc + "[" + std::to_string(i) + "]";
      expect_object(objectives[i], oloc);
      expect_keys(objectives[i], {"label", "sense", "V"}, oloc);
      ObjectiveConfig oc;
      if (objectives[i].contains("label")) {
        oc.label = as_string(objectives[i]["label"], oloc + ".label");
      }
      const std::string sense =
          as_string(require(objectives[i], "sense", oloc), oloc + ".sense");
      if (sense == "LE") {
        oc.sense = Sense::LE;
      } else if (sense == "GE") {
        oc.sense = Sense::GE;
      } else {
        fail("sense must be LE or GE", oloc + ".sense");
      }
      oc.v = parse_monomials(require(objectives[i], "V", oloc), oloc + ".V");
      cfg.objectives.push_back(std::move(oc));
    }
    const std::string tloc = origin + ".table";
    const json& table = require(root, "table", origin);
    if (!table.is_array() || table.size() != cfg.objectives.size()) {
      fail("table must have one row per objective", tloc);
    }
    for (size_t i = 0; i < table.size(); ++i) {
      const std::string rloc = tloc + "[" + std::to_string(i) + "]";
      if (!table[i].is_array() || table[i].empty()) {
        fail("expected a nonempty row", rloc);
      }
      std::vector<BoundEntry> row;
      for (size_t j = 0; j < table[i].size(); ++j) {
        row.push_back(parse_bound_entry(
            table[i][j], rloc + "[" + std::to_string(j) + "]"));
      }
      cfg.table.push_back(std::move(row));
    }
    if (cfg.controller == "cbf") {
      fail("objective scenarios use the bclf or saturating controller",
           origin + ".controller");
    }
  }

  if (root.contains("k")) cfg.k = as_number(root["k"], origin + ".k");
  if (root.contains("epsilon")) {
    cfg.epsilon = as_number(root["epsilon"], origin + ".epsilon");
  }
  cfg.x0 = as_vector(require(root, "x0", origin), origin + ".x0");
  cfg.dt = as_number(require(root, "dt", origin), origin + ".dt");
  cfg.horizon = as_number(require(root, "horizon", origin), origin + ".horizon");
  std::tie(cfg.box_lower, cfg.box_upper) =
      parse_box(require(root, "control_box", origin), origin + ".control_box");
  std::tie(cfg.domain_lower, cfg.domain_upper) =
      parse_box(require(root, "domain", origin), origin + ".domain");

  const json& nominal = require(root, "nominal", origin);
  if (nominal.is_array()) {
    cfg.nominal.is_builtin = false;
    cfg.nominal.constant = as_vector(nominal, origin + ".nominal");
  } else {
    expect_object(nominal, origin + ".nominal");
    expect_keys(nominal, {"name"}, origin + ".nominal");
    cfg.nominal.is_builtin = true;
    cfg.nominal.builtin = as_string(require(nominal, "name", origin),
                                    origin + ".nominal.name");
  }

  if (root.contains("seed")) {
    const json& seed = root["seed"];
    if (!seed.is_number_integer() || seed.get<long long>() < 0) {
      fail("seed must be a nonnegative integer", origin + ".seed");
    }
    cfg.seed = seed.get<std::uint64_t>();
  }
  return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open scenario file", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
  json out;
  out["name"] = cfg.name;
  json system{{"name", cfg.system.name}};
  if (!cfg.system.params.empty()) {
    json params;
    for (const auto& [key, value] : cfg.system.params) params[key] = value;
    system["params"] = params;
  }
  out["system"] = system;
  out["controller"] = cfg.controller;
  if (cfg.barrier_h) {
    out["barrier"] = json{{"h", monomials_to_json(*cfg.barrier_h)}};
  } else {
    json objectives = json::array();
    for (const ObjectiveConfig& oc : cfg.objectives) {
      objectives.push_back(json{{"label", oc.label},
                                {"sense", oc.sense == Sense::LE ? "LE" : "GE"},
                                {"V", monomials_to_json(oc.v)}});
    }
    out["objectives"] = objectives;
    json table = json::array();
    for (const auto& row : cfg.table) {
      json jrow = json::array();
      for (const BoundEntry& e : row) jrow.push_back(bound_entry_to_json(e));
      table.push_back(jrow);
    }
    out["table"] = table;
  }
  out["k"] = cfg.k;
  out["epsilon"] = cfg.epsilon;
  out["x0"] = cfg.x0;
  out["dt"] = cfg.dt;
  out["horizon"] = cfg.horizon;
  out["control_box"] = box_to_json(cfg.box_lower, cfg.box_upper);
  out["domain"] = box_to_json(cfg.domain_lower, cfg.domain_upper);
  if (cfg.nominal.is_builtin) {
    out["nominal"] = json{{"name", cfg.nominal.builtin}};
  } else {
    out["nominal"] = cfg.nominal.constant;
  }
  out["seed"] = cfg.seed;
  return out.dump(2) + "\n";
}

std::vector<std::string> builtin_system_names() {
  return {"single_integrator_1d", "double_integrator_drift",
          "unicycle_linearized"};
}

ControlAffineSystem make_builtin_system(const SystemConfig& config) {
  const auto reject_unknown_params =
      [&](const std::vector<std::string>& allowed) {
        for (const auto& [key, value] : config.params) {
          if (std::find(allowed.begin(), allowed.end(), key) ==
              allowed.end()) {
            fail("unknown parameter '" + key + "'",
                 "system '" + config.name + "'");
          }
        }
      };
  const auto param_or = [&](const std::string& key, double fallback) {
    auto it = config.params.find(key);
    return it == config.params.end() ? fallback : it->second;
  };

  ControlAffineSystem s;
  if (config.name == "single_integrator_1d") {
    reject_unknown_params({});
    s.state_dim = 1;
    s.control_dim = 1;
    s.drift = [](const Vector& x) { return Vector::Zero(x.size()); };
    s.input_matrix = [](const Vector&) { return Matrix::Identity(1, 1); };
    return s;
  }
  if (config.name == "double_integrator_drift") {
    reject_unknown_params({"drift_gain"});
    const double gain = param_or("drift_gain", 1.0);
    s.state_dim = 2;
    s.control_dim = 1;
    s.drift = [gain](const Vector& x) {
      Vector f(2);
      f << gain * x[1], 0.0;
      return f;
    };
    s.input_matrix = [](const Vector&) {
      Matrix g(2, 1);
      g << 0.0, 1.0;
      return g;
    };
    return s;
  }
  if (config.name == "unicycle_linearized") {
    // small-heading linearization: position driven by speed, the cross
    // axis picks up heading * speed, heading driven directly
    reject_unknown_params({});
    s.state_dim = 3;
    s.control_dim = 2;
    s.drift = [](const Vector& x) { return Vector::Zero(x.size()); };
    s.input_matrix = [](const Vector& x) {
      Matrix g(3, 2);
      g << 1.0, 0.0, x[2], 0.0, 0.0, 1.0;
      return g;
    };
    return s;
  }
  fail("unknown builtin system '" + config.name + "'", "system");
}

std::function<Vector(const Vector&)> make_nominal_policy(
    const NominalConfig& config, int control_dim) {
  if (config.is_builtin) {
    if (config.builtin == "zero") {
      return [control_dim](const Vector&) {
        return Vector::Zero(control_dim);
      };
    }
    fail("unknown builtin nominal policy '" + config.builtin + "'", "nominal");
  }
  if (static_cast<int>(config.constant.size()) != control_dim) {
    throw ConfigError("nominal constant has wrong dimension");
  }
  Vector u(control_dim);
  for (int i = 0; i < control_dim; ++i) u[i] = config.constant[i];
  return [u](const Vector&) { return u; };
}

Box scenario_domain(const ScenarioConfig& config) {
  Vector lo(config.domain_lower.size()), hi(config.domain_upper.size());
  for (size_t i = 0; i < config.domain_lower.size(); ++i) {
    lo[static_cast<long>(i)] = config.domain_lower[i];
  }
  for (size_t i = 0; i < config.domain_upper.size(); ++i) {
    hi[static_cast<long>(i)] = config.domain_upper[i];
  }
  return Box(lo, hi);
}

namespace {

Bound canonical_bound(const BoundEntry& entry, Sense sense, int row, int col) {
  const std::string loc =
      "table[" + std::to_string(row) + "][" + std::to_string(col) + "]";
  if (sense == Sense::LE) {
    switch (entry.kind) {
      case BoundEntry::Kind::pos_inf: return Bound::unbounded();
      case BoundEntry::Kind::finite: return Bound::of(entry.value);
      case BoundEntry::Kind::neg_inf:
        fail("a LE objective cannot have a -inf bound", loc);
    }
  } else {
    switch (entry.kind) {
      case BoundEntry::Kind::neg_inf: return Bound::unbounded();
      case BoundEntry::Kind::finite: return Bound::of(-entry.value);
      case BoundEntry::Kind::pos_inf:
        fail("a GE objective cannot have an +inf bound", loc);
    }
  }
  fail("unreachable", loc);
}

}  // namespace

Scenario compile_scenario(const ScenarioConfig& config) {
  Scenario s;
  s.name = config.name;
  s.system = make_builtin_system(config.system);
  const int n = s.system.state_dim;
  const int m = s.system.control_dim;

  if (config.controller == "cbf") {
    s.controller = ControllerKind::cbf;
  } else if (config.controller == "bclf") {
    s.controller = ControllerKind::bclf;
  } else {
    s.controller = ControllerKind::saturating;
  }

  if (config.barrier_h) {
    Polynomial h(*config.barrier_h, n);
    BarrierSpec barrier;
    barrier.h = h.evaluator();
    barrier.grad_h = h.gradient_evaluator();
    barrier.k_gain = config.k;
    barrier.domain = scenario_domain(config);
    barrier.validate();
    s.barrier = std::move(barrier);
  } else {
    std::vector<Objective> objectives;
    std::vector<std::vector<Bound>> rows;
    for (size_t i = 0; i < config.objectives.size(); ++i) {
      const ObjectiveConfig& oc = config.objectives[i];
      Polynomial p(oc.v, n);
      objectives.push_back(
          oc.sense == Sense::LE
              ? Objective::less_equal(p.evaluator(), p.gradient_evaluator(),
                                      oc.label)
              : Objective::greater_equal(p.evaluator(),
                                         p.gradient_evaluator(), oc.label));
      std::vector<Bound> row;
      for (size_t j = 0; j < config.table[i].size(); ++j) {
        row.push_back(canonical_bound(config.table[i][j], oc.sense,
                                      static_cast<int>(i),
                                      static_cast<int>(j)));
      }
      rows.push_back(std::move(row));
    }
    s.problem = BclfProblem(std::move(objectives), PriorityTable(rows),
                            config.k, config.epsilon);
  }

  Vector x0(static_cast<long>(config.x0.size()));
  for (size_t i = 0; i < config.x0.size(); ++i) {
    x0[static_cast<long>(i)] = config.x0[i];
  }
  s.x0 = std::move(x0);
  s.dt = config.dt;
  s.horizon = config.horizon;

  Vector lo(static_cast<long>(config.box_lower.size()));
  Vector hi(static_cast<long>(config.box_upper.size()));
  for (size_t i = 0; i < config.box_lower.size(); ++i) {
    lo[static_cast<long>(i)] = config.box_lower[i];
  }
  for (size_t i = 0; i < config.box_upper.size(); ++i) {
    hi[static_cast<long>(i)] = config.box_upper[i];
  }
  s.control_box = Box(lo, hi);
  s.nominal = make_nominal_policy(config.nominal, m);
  s.seed = config.seed;
  s.validate();
  return s;
}

}  // namespace invfilter
