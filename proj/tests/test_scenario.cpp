#include <fstream>
#include <sstream>

#include "chainsem/scenario.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace chainsem;
using nlohmann::json;

namespace {

std::string diagnostics_checks(const Scenario& s) {
  std::string out;
  for (const auto& d : validate_scenario(s)) out += d.check + ";";
  return out;
}

json minimal() {
  return json{{"name", "tiny"},
              {"managers", {{"alice", 10}}},
              {"nodes", json::array({{{"accounts", {"alice"}}, {"programs", json::array({expr_to_json(ex::unit())})}}})}};
}

}  // namespace

TEST_CASE("bundled scenarios validate and round-trip") {
  for (const auto& name : bundled_names()) {
    CAPTURE(name);
    const Scenario s = testing::bundled(name);
    CHECK(validate_scenario(s).empty());
    const json snapshot = serialize_scenario(s);
    const Scenario back = load_scenario(json::parse(snapshot.dump()));
    CHECK(config_equal(back.config, s.config));
    CHECK(back.name == s.name);
    CHECK(back.seed == s.seed);
    CHECK(back.policy == s.policy);
    CHECK(back.max_steps == s.max_steps);
    CHECK(back.asserts.to_string() == s.asserts.to_string());
    CHECK(back.bindings == s.bindings);
    CHECK(serialize_scenario(back) == snapshot);
  }
}

TEST_CASE("scenario files on disk match the generator") {
  for (const auto& name : bundled_names()) {
    CAPTURE(name);
    std::ifstream in(std::string(CHAINSEM_SCENARIO_DIR) + "/" + name + ".json");
    REQUIRE(in);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(json::parse(text.str()) == bundled_scenario(name));
  }
}

TEST_CASE("names resolve to keys and hashes") {
  const Scenario s = testing::bundled("auction");
  CHECK(s.bindings.at("owner") == "puk_owner");
  CHECK(s.bindings.at("auction").rfind("puh_", 0) == 0);
  CHECK(s.config.chain.contractors.count(s.bindings.at("auction")) == 1);
  CHECK(s.config.chain.contractors.at(s.bindings.at("auction")).storage == "(true,(puk_owner,puk_owner))");
}

TEST_CASE("duplicate accounts across nodes fail well-formedness") {
  json j = minimal();
  j["nodes"].push_back({{"accounts", {"alice"}}, {"programs", json::array()}});
  CHECK(diagnostics_checks(load_scenario(j)).find("well-formed") != std::string::npos);
}

TEST_CASE("programs must type at Unit") {
  json j = minimal();
  j["nodes"][0]["programs"].push_back(expr_to_json(ex::integer(3)));
  CHECK(diagnostics_checks(load_scenario(j)) == "typing;");
}

TEST_CASE("unresolvable scenarios are refused outright") {
  json unknown_name = minimal();
  unknown_name["nodes"][0]["programs"].push_back(
      expr_to_json(ex::seq(Ty::oph_transfer(),
                           ex::transfer(ex::tz(1), ex::puk("@alice"), ex::puk("@nobody"), ex::unit(), ex::tz(1)),
                           ex::unit())));
  CHECK_THROWS_AS(load_scenario(unknown_name), ScenarioError);

  json unknown_stub = minimal();
  unknown_stub["contracts"] = json::array({{{"name", "c"}, {"stub", "oracle"}, {"init", "()"}}});
  CHECK_THROWS_AS(load_scenario(unknown_stub), ScenarioError);

  json bad_policy = minimal();
  bad_policy["policy"] = "starve";
  CHECK_THROWS_AS(load_scenario(bad_policy), ScenarioError);

  CHECK_THROWS_AS(load_scenario(json::array()), ScenarioError);
}

TEST_CASE("ill-typed initial storage is a diagnostic") {
  json j = minimal();
  j["contracts"] = json::array({{{"name", "c"},
                                 {"stub", "identity"},
                                 {"param", "Int"},
                                 {"storage", "Int"},
                                 {"init", "true"}}});
  const Scenario s = load_scenario(j);
  CHECK_FALSE(validate_scenario(s).empty());
}

TEST_CASE("assertion toggles") {
  json j = minimal();
  j["asserts"] = "references,progress";
  const Scenario s = load_scenario(j);
  CHECK(s.asserts.has(Check::References));
  CHECK(s.asserts.has(Check::Progress));
  CHECK_FALSE(s.asserts.has(Check::Preservation));
  CHECK(CheckSet::parse("all").to_string() == CheckSet::all().to_string());
  CHECK_THROWS(CheckSet::parse("references,nonsense"));
}

TEST_CASE("pending operations are injected at their times") {
  const Scenario s = testing::bundled("timeout");
  CHECK(s.config.chain.pool.size() == 63);
  const std::string v = s.bindings.at("v");
  CHECK(s.config.chain.pool.at(v).t == 0);
  CHECK(s.config.chain.managers.at("puk_victim").cnt.busy);
}
