#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainsem/invariants.hpp"
#include "chainsem/node.hpp"
#include "chainsem/scheduler.hpp"
#include "json.hpp"

namespace chainsem {

/// A scenario file that cannot be turned into a configuration at all
/// (bad JSON shape, unknown stub, unresolved `@name`).
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  std::string name;
  Config config;
  /// Declared literal names: "alice" -> "puk_alice", "auction" -> "puh_...".
  std::map<std::string, std::string> bindings;
  std::uint64_t seed = 0;
  Policy policy = Policy::Uniform;
  std::size_t max_steps = 1000;
  CheckSet asserts = CheckSet::all();
};

/// Accepts two shapes. The authoring shape lists `managers`, `contracts`
/// and `nodes`, and may refer to accounts and contracts as "@name" inside
/// program literals and initial storages. The snapshot shape carries an
/// `initial_chain` instead, as written by serialize_scenario.
Scenario load_scenario(const nlohmann::json& j);
Scenario load_scenario_file(const std::string& path);

/// Snapshot shape; loading it back gives an identical configuration.
nlohmann::json serialize_scenario(const Scenario& s);

struct Diagnostic {
  std::string check;  // "well-formed", "typing", "references", "contract", ...
  std::string where;
  std::string message;

  nlohmann::json to_json() const;
};

/// Everything that must hold before a run: well-formed configuration and
/// chain, literals resolve, contracts type, programs type at Unit.
std::vector<Diagnostic> validate_scenario(const Scenario& s);

}  // namespace chainsem
