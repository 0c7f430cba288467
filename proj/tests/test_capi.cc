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

#include "potmmcp/potmmcp.h"

#include <cstdio>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

using nlohmann::json;

std::string Config(const std::string& name) {
  return std::string(POTMMCP_SOURCE_DIR) + "/configs/" + name + ".json";
}

struct Context {
  potmmcp_context* ctx = nullptr;
  Context() { REQUIRE(potmmcp_context_create(&ctx) == POTMMCP_OK); }
  ~Context() { potmmcp_context_destroy(ctx); }
};

TEST_CASE("version and status names") {
  CHECK(std::string(potmmcp_version()).size() > 0);
  CHECK(std::string(potmmcp_status_name(POTMMCP_OK)) == "ok");
  CHECK(std::string(potmmcp_status_name(POTMMCP_ERR_DEPLETION)) == "belief depletion");
  CHECK(std::string(potmmcp_status_name(static_cast<potmmcp_status>(99))) ==
        "unknown status");
}

TEST_CASE("null arguments are rejected without crashing") {
  CHECK(potmmcp_context_create(nullptr) == POTMMCP_ERR_ARGUMENT);
  CHECK(potmmcp_validate_config(nullptr, "x", nullptr) == POTMMCP_ERR_ARGUMENT);
  CHECK(potmmcp_planner_search(nullptr, nullptr) == POTMMCP_ERR_ARGUMENT);
  CHECK(potmmcp_planner_reset(nullptr, 0, 0) == POTMMCP_ERR_ARGUMENT);
  CHECK(std::string(potmmcp_planner_info(nullptr)).empty());
  potmmcp_planner_destroy(nullptr);
  potmmcp_context_destroy(nullptr);
  Context c;
  CHECK(potmmcp_validate_config(c.ctx, nullptr, nullptr) == POTMMCP_ERR_VALIDATION);
}

TEST_CASE("validate-config returns the resolved config") {
  Context c;
  REQUIRE(potmmcp_validate_config(c.ctx, Config("smoke").c_str(), nullptr) == POTMMCP_OK);
  const json r = json::parse(potmmcp_last_result(c.ctx));
  CHECK(r.dump().find("smoke") != std::string::npos);
}

TEST_CASE("errors map to status codes with a message") {
  Context c;
  CHECK(potmmcp_validate_config(c.ctx, "/nonexistent.json", nullptr) != POTMMCP_OK);
  CHECK(std::string(potmmcp_last_error(c.ctx)).size() > 0);
  CHECK(potmmcp_validate_config(c.ctx, Config("smoke").c_str(), "{not json") ==
        POTMMCP_ERR_VALIDATION);
  CHECK(potmmcp_validate_config(c.ctx, Config("smoke").c_str(), R"({"episodes": 0})") ==
        POTMMCP_ERR_VALIDATION);
  CHECK(std::string(potmmcp_last_error(c.ctx)).rfind("episodes", 0) == 0);
  CHECK(potmmcp_validate_config(c.ctx, Config("smoke").c_str(), R"({"bogus": 1})") ==
        POTMMCP_ERR_VALIDATION);
}

TEST_CASE("evaluate through the C interface") {
  Context c;
  const auto dir = std::filesystem::temp_directory_path() / "potmmcp_capi_eval";
  std::filesystem::remove_all(dir);
  const json ov = {{"episodes", 2},
                   {"simulations", 30},
                   {"methods", {"potmmcp", "metapolicy"}},
                   {"output_dir", dir.string()}};
  REQUIRE(potmmcp_evaluate(c.ctx, Config("tiny_reveal").c_str(), ov.dump().c_str()) ==
          POTMMCP_OK);
  CHECK(std::filesystem::exists(dir / "manifest.json"));
  CHECK(std::filesystem::exists(dir / "summary_tiny_reveal.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("interactive planner lifecycle") {
  Context c;
  potmmcp_planner* p = nullptr;
  const char* ov = R"({"simulations": 200})";
  CHECK(potmmcp_planner_create(c.ctx, Config("tiny_reveal").c_str(), ov, "nope", 1, &p) ==
        POTMMCP_ERR_VALIDATION);
  CHECK(p == nullptr);
  CHECK(potmmcp_planner_create(c.ctx, Config("tiny_reveal").c_str(), ov, "metapolicy", 1,
                               &p) == POTMMCP_ERR_VALIDATION);
  REQUIRE(potmmcp_planner_create(c.ctx, Config("tiny_reveal").c_str(), ov, "potmmcp", 1,
                                 &p) == POTMMCP_OK);
  int32_t action = -1;
  CHECK(potmmcp_planner_search(p, &action) == POTMMCP_ERR_CONTRACT);
  CHECK(std::string(potmmcp_planner_last_error(p)).size() > 0);

  // Find an initial observation with support.
  bool reset = false;
  for (uint64_t o = 0; o < 8 && !reset; ++o) {
    reset = potmmcp_planner_reset(p, 1, o) == POTMMCP_OK;
  }
  REQUIRE(reset);
  REQUIRE(potmmcp_planner_search(p, &action) == POTMMCP_OK);
  CHECK(action >= 0);
  double value = 0.0;
  CHECK(potmmcp_planner_root_value(p, &value) == POTMMCP_OK);
  const json info = json::parse(potmmcp_planner_info(p));
  CHECK(info["simulations"] == 200);
  CHECK(info["belief"]["size"].get<int>() > 0);

  // Take a step with an observation the belief can explain.
  bool stepped = false;
  for (uint64_t o = 0; o < 8 && !stepped; ++o) {
    const potmmcp_status s = potmmcp_planner_update(p, action, o);
    stepped = s == POTMMCP_OK;
    if (!stepped) {
      CHECK((s == POTMMCP_ERR_DEPLETION || s == POTMMCP_ERR_CONTRACT));
    }
  }
  CHECK(stepped);
  CHECK(potmmcp_planner_search(p, &action) == POTMMCP_OK);
  potmmcp_planner_destroy(p);
}

}  // namespace
