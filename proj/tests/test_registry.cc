// Copyright 2026 The POTMMCP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "potmmcp/registry.h"

#include <functional>
#include <string>

#include "doctest.h"
#include "test_util.h"

namespace potmmcp {
namespace {

using nlohmann::json;

std::string ErrorOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

TEST_CASE("shipped manifests load against their environments") {
  struct Case {
    json env;
    const char* manifest;
  };
  const Case cases[] = {
      {{{"id", "pursuit_evasion"}, {"layout", "pe8"}}, "data/policies/pursuit_evasion.json"},
      {{{"id", "predator_prey"}, {"predators", 2}, {"strength", 2}, {"prey", 3}, {"layout", "pp10"}},
       "data/policies/predator_prey.json"},
      {{{"id", "driving"}, {"width", 7}, {"height", 7}, {"layout", "driving7"}, {"agents", 2}},
       "data/policies/driving.json"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.manifest);
    auto model = MakeEnvironment(c.env);
    auto set = LoadPolicySet(model, ReadJsonFile(testing::SourcePath(c.manifest)));
    CHECK(set->num_joints() > 1);
    CHECK(set->planner_policies().size() > 1);
  }
}

TEST_CASE("every tiny manifest loads") {
  for (const auto& id : TinyInstanceIds()) {
    CAPTURE(id);
    CHECK_NOTHROW(testing::LoadTiny(id));
  }
}

TEST_CASE("manifest errors name the field") {
  auto model = MakeEnvironment({{"id", "pursuit_evasion"}, {"layout", "pe8"}});
  json m = ReadJsonFile(testing::SourcePath("data/policies/pursuit_evasion.json"));
  json bad = m;
  bad["policies"][1]["family"] = "nonsense";
  CHECK(ErrorOf([&] { LoadPolicySet(model, bad); }).find("manifest.policies[1]") !=
        std::string::npos);
  bad = m;
  bad.erase("prior");
  CHECK(ErrorOf([&] { LoadPolicySet(model, bad); }).find("manifest.prior") !=
        std::string::npos);
  bad = m;
  bad["planner_policies"] = json::array({"missing_policy"});
  CHECK_THROWS_AS(LoadPolicySet(model, bad), ConfigError);
}

TEST_CASE("policy families must fit the environment") {
  auto pe = MakeEnvironment({{"id", "pursuit_evasion"}, {"layout", "pe8"}});
  const json driving_policy = {{"id", "d"},
                               {"family", "driving_shortest_path"},
                               {"params", {{"target_speed", 1}}}};
  CHECK_THROWS_AS(MakePolicy(pe, driving_policy), ConfigError);
  const json uniform = {{"id", "u"}, {"family", "uniform_random"}};
  CHECK(MakePolicy(pe, uniform)->num_actions() == pe->NumActions(0));
}

TEST_CASE("environment errors") {
  CHECK_THROWS_AS(MakeEnvironment({{"id", "pursuit_evasion"}, {"layout", "no_such"}}), ConfigError);
  CHECK_THROWS_AS(MakeEnvironment({{"id", "predator_prey"}, {"predators", 9}}), ConfigError);
  CHECK_THROWS_AS(ReadJsonFile("/nonexistent/file.json"), ConfigError);
}

}  // namespace
}  // namespace potmmcp
