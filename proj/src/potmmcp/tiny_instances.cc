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

#include "potmmcp/tiny_instances.h"

#include <algorithm>
#include <numeric>

#include "potmmcp/rng.h"

namespace potmmcp {
namespace {

using Row = std::vector<double>;
using json = nlohmann::json;

constexpr double kTinyDiscount = 0.5;

TinyTables Blank(int ns, int na0, int na1, int no0, int no1) {
  TinyTables t;
  t.num_states = ns;
  t.num_actions = {na0, na1};
  t.num_observations = {no0, no1};
  t.discount = kTinyDiscount;
  t.initial.assign(static_cast<std::size_t>(ns), 0.0);
  t.transition.assign(
      static_cast<std::size_t>(ns),
      std::vector<std::vector<Row>>(
          static_cast<std::size_t>(na0),
          std::vector<Row>(static_cast<std::size_t>(na1),
                           Row(static_cast<std::size_t>(ns), 0.0))));
  const std::array<int, 2> no = {no0, no1};
  for (int k = 0; k < 2; ++k) {
    const auto width = static_cast<std::size_t>(no[k]);
    t.initial_obs[k].assign(static_cast<std::size_t>(ns), Row(width, 0.0));
    t.observation[k].assign(
        static_cast<std::size_t>(ns),
        std::vector<std::vector<Row>>(
            static_cast<std::size_t>(na0),
            std::vector<Row>(static_cast<std::size_t>(na1), Row(width, 0.0))));
    t.reward[k].assign(static_cast<std::size_t>(ns),
                       std::vector<Row>(static_cast<std::size_t>(na0),
                                        Row(static_cast<std::size_t>(na1), 0.0)));
    t.reward_range[k] = {-1.0, 1.0};
  }
  return t;
}

// Distribution over n outcomes supported on `support` of them, with small
// integer weights so the tables stay readable.
Row SparseRow(int n, int support, Rng& rng) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int k = n - 1; k > 0; --k) std::swap(order[k], order[rng.UniformInt(k + 1)]);
  Row row(static_cast<std::size_t>(n), 0.0);
  double total = 0.0;
  for (int k = 0; k < std::min(support, n); ++k) {
    const double w = 1.0 + rng.UniformInt(4);
    row[order[k]] = w;
    total += w;
  }
  for (double& p : row) p /= total;
  return row;
}

double RandomReward(Rng& rng) {
  static constexpr std::array<double, 5> kLevels = {-1.0, -0.5, 0.0, 0.5, 1.0};
  return kLevels[rng.UniformInt(5)];
}

json TabularSpec(const std::string& id, int num_observations,
                 const std::vector<Row>& table) {
  return {{"id", id},
          {"family", "tabular"},
          {"params", {{"num_observations", num_observations}, {"table", table}}}};
}

std::vector<Row> RandomPolicyTable(int num_actions, int num_observations,
                                   Rng& rng) {
  static constexpr std::array<double, 4> kBias = {0.1, 0.25, 0.75, 0.9};
  std::vector<Row> table;
  for (int r = 0; r <= num_observations; ++r) {
    if (num_actions == 2) {
      const double p = kBias[rng.UniformInt(4)];
      table.push_back({p, 1.0 - p});
    } else {
      table.push_back(SparseRow(num_actions, 2, rng));
    }
  }
  return table;
}

// Random sparse tables; every row has at most two outcomes.
TinyTables RandomTables(int ns, int na0, int na1, int no0, int no1,
                        std::uint64_t seed) {
  Rng rng(seed);
  TinyTables t = Blank(ns, na0, na1, no0, no1);
  t.initial = SparseRow(ns, ns, rng);
  for (int s = 0; s < ns; ++s) {
    for (int k = 0; k < 2; ++k) {
      t.initial_obs[k][s] = SparseRow(t.num_observations[k], 2, rng);
    }
    for (int a0 = 0; a0 < na0; ++a0) {
      for (int a1 = 0; a1 < na1; ++a1) {
        t.transition[s][a0][a1] = SparseRow(ns, 2, rng);
        for (int k = 0; k < 2; ++k) {
          t.observation[k][s][a0][a1] = SparseRow(t.num_observations[k], 2, rng);
          t.reward[k][s][a0][a1] = RandomReward(rng);
        }
      }
    }
  }
  return t;
}

// Hidden coin s. The other agent sees s and reports it through its action;
// the planner sees that action plus a 75%-accurate hint of s, and may wait
// (coin kept) or guess (+1 / -1, coin redrawn).
TinyTables RevealTables() {
  TinyTables t = Blank(2, 3, 2, 4, 2);
  t.initial = {0.5, 0.5};
  for (int s = 0; s < 2; ++s) {
    t.initial_obs[0][s] = s == 0 ? Row{0.75, 0.25, 0, 0} : Row{0.25, 0.75, 0, 0};
    t.initial_obs[1][s] = s == 0 ? Row{1, 0} : Row{0, 1};
    for (int a0 = 0; a0 < 3; ++a0) {
      for (int a1 = 0; a1 < 2; ++a1) {
        t.transition[s][a0][a1] =
            a0 == 0 ? (s == 0 ? Row{1, 0} : Row{0, 1}) : Row{0.5, 0.5};
        // Observation of the next coin.
        Row z(4, 0.0);
        z[2 * a1 + s] = 0.75;
        z[2 * a1 + (1 - s)] = 0.25;
        t.observation[0][s][a0][a1] = z;
        t.observation[1][s][a0][a1] = s == 0 ? Row{1, 0} : Row{0, 1};
        t.reward[0][s][a0][a1] = a0 == 0 ? 0.0 : (a0 - 1 == s ? 1.0 : -1.0);
        t.reward[1][s][a0][a1] = 0.0;
      }
    }
  }
  t.reward_range[1] = {0.0, 0.0};
  return t;
}

// The state records the other agent's last action. Types are constant, so
// the planner's first real observation identifies the type exactly. The
// planner is rewarded for matching the other agent's action.
TinyTables SignalTables() {
  TinyTables t = Blank(2, 2, 2, 3, 1);
  t.initial = {0.5, 0.5};
  for (int s = 0; s < 2; ++s) {
    t.initial_obs[0][s] = {0, 0, 1};
    t.initial_obs[1][s] = {1};
    for (int a0 = 0; a0 < 2; ++a0) {
      for (int a1 = 0; a1 < 2; ++a1) {
        t.transition[s][a0][a1] = a1 == 0 ? Row{1, 0} : Row{0, 1};
        t.observation[0][s][a0][a1] = s == 0 ? Row{1, 0, 0} : Row{0, 1, 0};
        t.observation[1][s][a0][a1] = {1};
        t.reward[0][s][a0][a1] = a0 == a1 ? 1.0 : 0.0;
        t.reward[1][s][a0][a1] = a0 == a1 ? 1.0 : 0.0;
      }
    }
  }
  t.reward_range[0] = {0.0, 1.0};
  t.reward_range[1] = {0.0, 1.0};
  return t;
}

// Generator seeds chosen so the optimal root action is unique with a clear
// margin at the default planning horizon.
constexpr std::uint64_t kRandomSeed = 12;
constexpr std::uint64_t kSingleSeed = 4;
constexpr std::uint64_t kDegenerateSeed = 3;

}  // namespace

std::vector<std::string> TinyInstanceIds() {
  return {"tiny_reveal", "tiny_signal", "tiny_random", "tiny_single",
          "tiny_degenerate"};
}

std::shared_ptr<const TinyPosgModel> MakeTinyPosg(const std::string& spec_id) {
  TinyTables t;
  if (spec_id == "tiny_reveal") {
    t = RevealTables();
  } else if (spec_id == "tiny_signal") {
    t = SignalTables();
  } else if (spec_id == "tiny_random") {
    t = RandomTables(3, 2, 2, 3, 2, kRandomSeed);
  } else if (spec_id == "tiny_single") {
    t = RandomTables(3, 2, 2, 2, 1, kSingleSeed);
  } else if (spec_id == "tiny_degenerate") {
    t = RandomTables(2, 1, 2, 2, 2, kDegenerateSeed);
  } else {
    throw ConfigError("unknown tiny instance '" + spec_id + "'");
  }
  return std::make_shared<TinyPosgModel>(spec_id, std::move(t));
}

json TinyManifest(const std::string& spec_id) {
  json m;
  m["planner_agent"] = 0;
  json& policies = m["policies"];
  policies = json::array();
  if (spec_id == "tiny_reveal") {
    // Other agent: rows for o = 0, 1 and the empty history.
    policies.push_back(TabularSpec("honest", 2, {{1, 0}, {0, 1}, {0.5, 0.5}}));
    policies.push_back(TabularSpec("liar", 2, {{0, 1}, {1, 0}, {0.5, 0.5}}));
    policies.push_back(
        TabularSpec("noisy", 2, {{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}}));
    // Planner: rows for o = 2 * a_other + hint and the empty history.
    policies.push_back(TabularSpec("trust_hint", 4,
                                   {{0.2, 0.8, 0},
                                    {0.2, 0, 0.8},
                                    {0.2, 0.8, 0},
                                    {0.2, 0, 0.8},
                                    {1, 0, 0}}));
    policies.push_back(TabularSpec("trust_action", 4,
                                   {{0.2, 0.8, 0},
                                    {0.2, 0.8, 0},
                                    {0.2, 0, 0.8},
                                    {0.2, 0, 0.8},
                                    {1, 0, 0}}));
    policies.push_back(TabularSpec("distrust_action", 4,
                                   {{0.2, 0, 0.8},
                                    {0.2, 0, 0.8},
                                    {0.2, 0.8, 0},
                                    {0.2, 0.8, 0},
                                    {1, 0, 0}}));
    m["planner_policies"] = {"trust_hint", "trust_action", "distrust_action"};
    m["prior"] = {{{"joint", {"honest"}}, {"weight", 0.4}},
                  {{"joint", {"liar"}}, {"weight", 0.4}},
                  {{"joint", {"noisy"}}, {"weight", 0.2}}};
  } else if (spec_id == "tiny_signal") {
    policies.push_back(TabularSpec("left", 1, {{1, 0}, {1, 0}}));
    policies.push_back(TabularSpec("right", 1, {{0, 1}, {0, 1}}));
    policies.push_back(
        TabularSpec("copy", 3, {{1, 0}, {0, 1}, {0.5, 0.5}, {0.5, 0.5}}));
    policies.push_back(TabularSpec("always_left", 3, {{1, 0}, {1, 0}, {1, 0}, {1, 0}}));
    policies.push_back(
        TabularSpec("always_right", 3, {{0, 1}, {0, 1}, {0, 1}, {0, 1}}));
    m["planner_policies"] = {"copy", "always_left", "always_right"};
    m["prior"] = {{{"joint", {"left"}}, {"weight", 0.7}},
                  {{"joint", {"right"}}, {"weight", 0.3}}};
  } else if (spec_id == "tiny_random" || spec_id == "tiny_single" ||
             spec_id == "tiny_degenerate") {
    const auto model = MakeTinyPosg(spec_id);
    const int na0 = model->NumActions(0);
    const int na1 = model->NumActions(1);
    const int no0 = model->NumObservations(0);
    const int no1 = model->NumObservations(1);
    Rng rng(DeriveSeed(HashTag(spec_id), {stream::kTruePolicies}));
    std::vector<std::string> others;
    if (spec_id == "tiny_single") {
      policies.push_back(TabularSpec(
          "uniform", no1, std::vector<Row>(static_cast<std::size_t>(no1 + 1),
                                           Row{0.5, 0.5})));
      others.push_back("uniform");
    } else {
      for (const char* id : {"type_a", "type_b"}) {
        policies.push_back(
            TabularSpec(id, no1, RandomPolicyTable(na1, no1, rng)));
        others.push_back(id);
      }
    }
    std::vector<std::string> planner;
    if (na0 == 1) {
      policies.push_back(TabularSpec(
          "only", no0,
          std::vector<Row>(static_cast<std::size_t>(no0 + 1), Row{1.0})));
      planner.push_back("only");
    } else {
      for (const char* id : {"plan_a", "plan_b"}) {
        policies.push_back(
            TabularSpec(id, no0, RandomPolicyTable(na0, no0, rng)));
        planner.push_back(id);
      }
    }
    m["planner_policies"] = planner;
    json prior = json::array();
    for (std::size_t k = 0; k < others.size(); ++k) {
      prior.push_back({{"joint", {others[k]}}, {"weight", k == 0 ? 0.6 : 0.4}});
    }
    m["prior"] = prior;
  } else {
    throw ConfigError("unknown tiny instance '" + spec_id + "'");
  }
  return m;
}

}  // namespace potmmcp
