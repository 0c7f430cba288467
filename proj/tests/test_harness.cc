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

#include "potmmcp/harness.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "doctest.h"
#include "potmmcp/registry.h"
#include "test_util.h"

namespace potmmcp {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json TinyConfig() {
  return json::parse(R"({
    "name": "unit",
    "environment": {"id": "tiny", "spec": "tiny_reveal"},
    "episodes": 6,
    "seed": 5,
    "max_steps": 6,
    "payoffs": {"episodes_per_cell": 40},
    "value_tables": {"episodes": 100, "min_count": 1},
    "planner": {"simulations": 60, "epsilon": 0.1, "num_particles": 50},
    "methods": [
      {"name": "potmmcp", "kind": "planner", "variant": "potmmcp", "tau": 0.25},
      {"name": "ipomcp_pf_random", "kind": "planner", "variant": "ipomcp_pf",
       "search_policy": "uniform"},
      {"name": "metapolicy", "kind": "metapolicy_only", "tau": "inf"},
      {"name": "best_response", "kind": "best_response"}
    ]
  })");
}

std::string ErrorOf(const json& j, const Overrides& ov = {}) {
  try {
    ParseRunConfig(j, ".", ov);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path TempDir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("potmmcp_test_" + name);
  fs::remove_all(p);
  return p;
}

TEST_CASE("parse fills defaults and layers planner settings") {
  const RunConfig c = ParseRunConfig(TinyConfig(), ".");
  CHECK(c.episodes == 6);
  CHECK(c.max_steps == 6);
  REQUIRE(c.methods.size() == 4);
  CHECK(c.methods[0].planner.variant == Variant::kPotmmcp);
  CHECK(c.methods[0].planner.simulations == 60);
  CHECK(c.methods[1].planner.variant == Variant::kIpomcpPf);
  CHECK(c.methods[1].planner.c == doctest::Approx(std::sqrt(2.0)));
  CHECK(c.methods[1].planner.leaf == LeafEval::kRollout);
  CHECK(c.methods[1].search_policy == "uniform");
  CHECK(std::isinf(c.methods[2].tau));
  CHECK(c.methods[2].kind == MethodKind::kMetaPolicyOnly);
  CHECK(c.hash.size() == 16);
}

TEST_CASE("validation errors carry the field path") {
  json j = TinyConfig();
  j["methods"][1]["bogus"] = 1;
  CHECK(ErrorOf(j).rfind("methods[1].bogus", 0) == 0);
  j = TinyConfig();
  j["methods"][0]["tau"] = -1;
  CHECK(ErrorOf(j).rfind("methods[0].tau", 0) == 0);
  j = TinyConfig();
  j["planner"]["lambda"] = 2;
  CHECK(ErrorOf(j).rfind("planner.lambda", 0) == 0);
  j = TinyConfig();
  j["episodes"] = 0;
  CHECK(ErrorOf(j).rfind("episodes", 0) == 0);
  j = TinyConfig();
  j["methods"][1]["name"] = "potmmcp";
  CHECK_FALSE(ErrorOf(j).empty());
  j = TinyConfig();
  j.erase("environment");
  CHECK(ErrorOf(j).rfind("environment", 0) == 0);
  Overrides ov;
  ov.methods = std::vector<std::string>{"nope"};
  CHECK_FALSE(ErrorOf(TinyConfig(), ov).empty());
  CHECK_THROWS_AS(Overrides::FromJson(json{{"sed", 1}}), ValidationError);
}

TEST_CASE("every shipped config validates") {
  for (const char* name : {"pursuit_evasion", "predator_prey", "driving", "tiny_reveal",
                           "smoke", "oracle"}) {
    CAPTURE(name);
    CHECK_NOTHROW(LoadRunConfig(testing::SourcePath(std::string("configs/") + name + ".json")));
  }
}

TEST_CASE("overrides apply and the hash ignores output location") {
  const RunConfig base = ParseRunConfig(TinyConfig(), ".");
  Overrides ov;
  ov.output_dir = "/tmp/elsewhere";
  ov.workers = 3;
  const RunConfig moved = ParseRunConfig(TinyConfig(), ".", ov);
  CHECK(moved.hash == base.hash);
  CHECK(moved.workers == 3);
  ov.seed = 99;
  ov.simulations = 10;
  ov.methods = std::vector<std::string>{"potmmcp"};
  const RunConfig changed = ParseRunConfig(TinyConfig(), ".", ov);
  CHECK(changed.hash != base.hash);
  CHECK(changed.seed == 99);
  REQUIRE(changed.methods.size() == 1);
  CHECK(changed.methods[0].planner.simulations == 10);
}

TEST_CASE("format double") {
  CHECK(FormatDouble(0.1) == "0.1");
  CHECK(FormatDouble(-2.5) == "-2.5");
  CHECK(FormatDouble(0.0) == "0");
  CHECK(FormatDouble(std::numeric_limits<double>::quiet_NaN()).empty());
  CHECK(std::stod(FormatDouble(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("summaries and quartiles on synthetic episodes") {
  std::vector<EpisodeRecord> eps(4);
  const double returns[4] = {1.0, 0.0, 1.0, 0.0};
  for (int e = 0; e < 4; ++e) {
    eps[e].episode = e;
    eps[e].discounted = {returns[e], 0.0};
    eps[e].undiscounted = {returns[e], 0.0};
    eps[e].steps = 8;
    for (int t = 0; t < 8; ++t) {
      StepRecord s;
      s.t = t;
      s.prob_true_type = t < 2 ? 0.2 : (t >= 6 ? 0.9 : 0.5);
      s.max_depth = 3;
      s.simulations = 100;
      s.generative_steps = 10;
      eps[e].step_records.push_back(s);
    }
  }
  const MethodSummary m = Summarize("x", eps, 0);
  CHECK(m.mean_return == doctest::Approx(0.5));
  // Sample standard deviation sqrt(1/3), divided by sqrt(4).
  CHECK(m.stderr_return == doctest::Approx(std::sqrt(1.0 / 3.0) / 2.0));
  CHECK(m.ci_low == doctest::Approx(0.5 - 1.96 * m.stderr_return));
  CHECK(m.mean_max_depth == doctest::Approx(3.0));
  CHECK(m.mean_generative_steps == doctest::Approx(10.0));
  const auto [q1, q4] = QuartileBelief(eps);
  CHECK(q1 == doctest::Approx(0.2));
  CHECK(q4 == doctest::Approx(0.9));
  const auto rows = BeliefTable(eps);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0].prob_mean == doctest::Approx(0.2));
  CHECK(rows[0].count == 4);
}

TEST_CASE("evaluation is deterministic and independent of workers") {
  const RunConfig one = ParseRunConfig(TinyConfig(), ".");
  Overrides ov;
  ov.workers = 3;
  const RunConfig three = ParseRunConfig(TinyConfig(), ".", ov);
  const Experiment ea = Prepare(one);
  const Experiment eb = Prepare(three);
  CHECK(ea.payoffs == eb.payoffs);
  const EvaluationResult a = RunEvaluation(ea);
  const EvaluationResult b = RunEvaluation(eb);
  REQUIRE(a.methods.size() == b.methods.size());
  for (std::size_t m = 0; m < a.methods.size(); ++m) {
    CAPTURE(a.methods[m].summary.method);
    REQUIRE(a.methods[m].episodes.size() == 6);
    CHECK(a.methods[m].summary.mean_return == b.methods[m].summary.mean_return);
    for (std::size_t e = 0; e < 6; ++e) {
      const auto& x = a.methods[m].episodes[e];
      const auto& y = b.methods[m].episodes[e];
      CHECK(x.seed == y.seed);
      CHECK(x.discounted == y.discounted);
      CHECK(x.steps == y.steps);
      CHECK(x.true_joint == y.true_joint);
    }
  }
  // Baselines keep no belief.
  const auto& meta = a.methods[2];
  CHECK(std::isnan(meta.episodes[0].step_records[0].prob_true_type));
  CHECK(meta.episodes[0].played_policy >= 0);
}

TEST_CASE("commands write identical files on repeated runs") {
  const fs::path d1 = TempDir("a");
  const fs::path d2 = TempDir("b");
  Overrides o1;
  o1.output_dir = d1.string();
  Overrides o2;
  o2.output_dir = d2.string();
  const json r1 = CommandEvaluate(ParseRunConfig(TinyConfig(), ".", o1));
  const json r2 = CommandEvaluate(ParseRunConfig(TinyConfig(), ".", o2));
  CHECK(fs::exists(d1 / "manifest.json"));
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(d1)) {
    if (entry.path().extension() != ".csv") continue;
    CAPTURE(entry.path().filename().string());
    CHECK(Slurp(entry.path()) == Slurp(d2 / entry.path().filename()));
    ++compared;
  }
  CHECK(compared >= 9);
  const json manifest = ReadJsonFile((d1 / "manifest.json").string());
  CHECK(manifest.contains("config"));
  CHECK(manifest.contains("files"));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("payoffs and belief-stats commands") {
  const fs::path d = TempDir("c");
  Overrides o;
  o.output_dir = d.string();
  o.methods = std::vector<std::string>{"potmmcp"};
  CommandPayoffs(ParseRunConfig(TinyConfig(), ".", o));
  CHECK(fs::exists(d / "payoffs_tiny_reveal.csv"));
  CHECK(fs::exists(d / "payoffs_tiny_reveal.json"));
  CommandBeliefStats(ParseRunConfig(TinyConfig(), ".", o));
  CHECK(fs::exists(d / "belief_tiny_reveal_potmmcp.csv"));
  CHECK(fs::exists(d / "belief_summary_tiny_reveal.csv"));
  const std::string header = Slurp(d / "belief_tiny_reveal_potmmcp.csv");
  CHECK(header.rfind("config_hash,seed,environment,method,step,", 0) == 0);
  fs::remove_all(d);
}

TEST_CASE("oracle check on a small budget") {
  OracleCheckConfig c;
  c.budgets = {2000};
  c.runs = 3;
  c.num_particles = 2000;
  c.payoff_episodes = 50;
  const OracleInstanceResult r = OracleCheckInstance("tiny_signal", c, 1);
  CHECK(r.horizon == 4);
  CHECK(r.tolerance == doctest::Approx(0.1 / 0.5 + 0.05));
  CHECK(r.runs.size() == 3);
  for (const auto& run : r.runs) {
    CHECK(std::abs(run.value - run.v_star) <= r.tolerance);
  }
}

}  // namespace
}  // namespace potmmcp
