#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "invfilter/poly.hpp"
#include "invfilter/sim.hpp"

namespace invfilter {

// Raw document model of a scenario file. Parsing is strict: unknown keys
// and malformed sections are rejected with the offending location.
// Compilation turns the document into executable evaluators.

struct BoundEntry {
  enum class Kind { finite, pos_inf, neg_inf };
  Kind kind{Kind::finite};
  double value{0.0};

  bool operator==(const BoundEntry&) const = default;
};

struct ObjectiveConfig {
  std::string label;
  Sense sense{Sense::LE};
  std::vector<Monomial> v;
};

struct SystemConfig {
  std::string name;
  std::map<std::string, double> params;
};

struct NominalConfig {
  bool is_builtin{false};
  std::string builtin;            // when is_builtin
  std::vector<double> constant;   // otherwise
};

struct ScenarioConfig {
  std::string name;
  SystemConfig system;
  std::string controller;  // cbf | bclf | saturating
  std::optional<std::vector<Monomial>> barrier_h;
  std::vector<ObjectiveConfig> objectives;
  std::vector<std::vector<BoundEntry>> table;  // original-sense entries
  double k{1.0};
  double epsilon{1e-2};
  std::vector<double> x0;
  double dt{0.0};
  double horizon{0.0};
  std::vector<double> box_lower, box_upper;
  std::vector<double> domain_lower, domain_upper;
  NominalConfig nominal;
  std::uint64_t seed{0};
};

bool semantically_equal(const ScenarioConfig& a, const ScenarioConfig& b);

ScenarioConfig parse_scenario_text(const std::string& text,
                                   const std::string& origin);
ScenarioConfig load_scenario_file(const std::string& path);

// Canonical JSON rendering with defaults materialized; numbers use the
// shortest round-trip form, so parse(serialize(c)) == c exactly.
std::string serialize_scenario(const ScenarioConfig& config);

// Builtin systems selectable by name in scenario files.
std::vector<std::string> builtin_system_names();
ControlAffineSystem make_builtin_system(const SystemConfig& config);

std::function<Vector(const Vector&)> make_nominal_policy(
    const NominalConfig& config, int control_dim);

Scenario compile_scenario(const ScenarioConfig& config);

// Sampling domain of the scenario (state box D).
Box scenario_domain(const ScenarioConfig& config);

}  // namespace invfilter
