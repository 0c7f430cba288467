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

#include "potmmcp/planner.h"

#include <cmath>
#include <numeric>

#include "doctest.h"
#include "test_util.h"

namespace potmmcp {
namespace {

struct Rig {
  testing::TinyFixture f;
  BoundMetaPolicy meta;
  std::vector<SearchPolicy> search;
};

// Meta-policy from a synthetic payoff table: row r gets payoff
// (r + k) mod rows against joint k, so every joint prefers a different mix.
Rig MakeRig(const std::string& id, double tau = 0.25) {
  Rig r;
  r.f = testing::LoadTiny(id);
  std::vector<std::string> rows;
  for (int p : r.f.set->planner_policies()) rows.push_back(r.f.set->policy(p).id());
  std::vector<std::string> cols;
  for (int k = 0; k < r.f.set->num_joints(); ++k) cols.push_back(r.f.set->JointName(k));
  PayoffTable t(rows, cols);
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    for (int k = 0; k < static_cast<int>(cols.size()); ++k) {
      t.cell(i, k).mean = 0.25 * ((i + k) % static_cast<int>(rows.size()));
    }
  }
  r.meta = BoundMetaPolicy::Bind(MakeMetaPolicy(t, tau), *r.f.set);
  r.search = SearchPoliciesFor(*r.f.set, r.meta);
  return r;
}

Planner MakePlanner(const Rig& r, PlannerConfig c, std::uint64_t seed) {
  return Planner(r.f.model, r.f.set, r.search, r.meta, c, seed);
}

TEST_CASE("puct selection follows the exploration term") {
  Rig r = MakeRig("tiny_reveal");
  PlannerConfig c;
  c.normalize_q = false;
  Planner p = MakePlanner(r, c, 1);
  SearchNode node;
  node.expanded = true;
  node.visits = 10;
  node.edges.assign(3, Edge{});
  node.edges[0] = {5, 0.2, 2.5, 0.5};
  node.edges[1] = {5, 0.7, 2.5, 0.5};
  node.edges[2] = {5, 0.1, 2.5, 0.5};
  node.visits = 15;
  Rng rng(1);
  // Equal Q and n: the larger prior wins.
  CHECK(p.PuctSelect(node, rng) == 1);
  // A large Q gap dominates.
  node.edges[0].q = 5.0;
  CHECK(p.PuctSelect(node, rng) == 0);
  // Score check against the closed form.
  const double sqrt_n = std::sqrt(15.0);
  auto score = [&](const Edge& e) {
    const double q = e.n == 0 ? 0.0 : e.q;
    return q + c.c * (e.p * (1 - c.lambda) + c.lambda / 3.0) * sqrt_n / (1.0 + e.n);
  };
  node.edges[0].q = 0.1;
  node.edges[1].q = 0.1;
  node.edges[2] = {0, 0.1, 0.0, 0.0};
  int best = 0;
  for (int a = 1; a < 3; ++a) {
    if (score(node.edges[a]) > score(node.edges[best])) best = a;
  }
  CHECK(p.PuctSelect(node, rng) == best);
}

TEST_CASE("ucb tries every action before using the bound") {
  Rig r = MakeRig("tiny_reveal");
  PlannerConfig c = PlannerConfig::IpomcpPf();
  c.normalize_q = false;
  Planner p(r.f.model, r.f.set, UniformSearchPolicy(3), std::nullopt, c, 1);
  SearchNode node;
  node.expanded = true;
  node.visits = 20;
  node.edges.assign(3, Edge{});
  node.edges[0] = {10, 1.0 / 3, 10.0, 1.0};
  node.edges[1] = {10, 1.0 / 3, 10.0, 1.0};
  Rng rng(2);
  CHECK(p.UcbSelect(node, rng) == 2);
  node.edges[2] = {1, 1.0 / 3, 0.0, 0.0};
  node.visits = 21;
  // sqrt(2 ln 21 / 1) * ... : the rarely tried action still wins.
  CHECK(p.UcbSelect(node, rng) == 2);
  node.edges[2].n = 10;
  node.edges[0].q = 2.0;
  CHECK(p.UcbSelect(node, rng) == 0);
}

TEST_CASE("root prior converges to the belief-weighted meta-policy mixture") {
  Rig r = MakeRig("tiny_reveal");
  PlannerConfig c;
  c.simulations = 10000;
  c.num_particles = 1000;
  Planner p = MakePlanner(r, c, 7);
  Rng rng(3);
  const Observation o0 = r.f.model->SampleInitial(rng).joint_obs[0];
  p.Reset(o0);
  // Fixed two-type belief: 30% joint 0, 70% joint 1.
  const ParticleBelief pool = InitialBelief(*r.f.model, *r.f.set, 5000, o0, rng);
  ParticleBelief two;
  int n0 = 0, n1 = 0;
  for (const auto& w : pool.particles) {
    if (w.joint == 0 && n0 < 300) { two.particles.push_back(w); ++n0; }
    if (w.joint == 1 && n1 < 700) { two.particles.push_back(w); ++n1; }
  }
  REQUIRE(n0 == 300);
  REQUIRE(n1 == 700);
  p.SetBelief(two);
  p.Search();
  const SearchNode& root = p.root();
  REQUIRE(root.visits >= 9999);
  const int actions = r.f.model->NumActions(0);
  std::vector<double> expect(static_cast<std::size_t>(actions), 0.0);
  const double b[2] = {0.3, 0.7};
  for (int k = 0; k < 2; ++k) {
    for (std::size_t m = 0; m < r.search.size(); ++m) {
      const auto pi = ActionDistForHistory(*r.search[m].policy, p.history());
      for (int a = 0; a < actions; ++a) {
        expect[static_cast<std::size_t>(a)] +=
            b[k] * r.meta.row(k)[m] * pi[static_cast<std::size_t>(a)];
      }
    }
  }
  for (int a = 0; a < actions; ++a) {
    CHECK(std::abs(root.edges[static_cast<std::size_t>(a)].p -
                   expect[static_cast<std::size_t>(a)]) <= 0.02);
  }
}

TEST_CASE("search bookkeeping") {
  for (Variant v : {Variant::kPotmmcp, Variant::kIpomcpPf}) {
    Rig r = MakeRig("tiny_single");
    PlannerConfig c = v == Variant::kPotmmcp ? PlannerConfig{} : PlannerConfig::IpomcpPf();
    c.simulations = 500;
    c.epsilon = 0.1;
    Planner p = v == Variant::kPotmmcp
                    ? MakePlanner(r, c, 5)
                    : Planner(r.f.model, r.f.set, UniformSearchPolicy(r.f.model->NumActions(0)),
                              std::nullopt, c, 5);
    CHECK_THROWS_AS(p.Search(), ContractViolation);
    Rng rng(4);
    p.Reset(r.f.model->SampleInitial(rng).joint_obs[0]);
    const Action a = p.Search();
    CHECK(a >= 0);
    CHECK(a < r.f.model->NumActions(0));
    const auto visits = p.RootVisits();
    CHECK(std::accumulate(visits.begin(), visits.end(), std::int64_t{0}) ==
          c.simulations - 1);
    CHECK(p.diagnostics().simulations == c.simulations);
    CHECK(p.diagnostics().max_depth <= p.horizon());
    CHECK(p.horizon() == 4);
    if (v == Variant::kIpomcpPf) {
      for (const Edge& e : p.root().edges) {
        CHECK(e.p == doctest::Approx(1.0 / r.f.model->NumActions(0)));
      }
      CHECK(p.diagnostics().meta_queries == 0);
    } else {
      CHECK(p.diagnostics().meta_queries == c.simulations);
    }
  }
}

TEST_CASE("search is deterministic in the seed") {
  Rig r = MakeRig("tiny_random");
  PlannerConfig c;
  c.simulations = 300;
  auto run = [&](std::uint64_t seed) {
    Planner p = MakePlanner(r, c, seed);
    Rng rng(1);
    p.Reset(r.f.model->SampleInitial(rng).joint_obs[0]);
    std::vector<std::int64_t> trace;
    for (int t = 0; t < 3; ++t) {
      const Action a = p.Search();
      const auto v = p.RootVisits();
      trace.insert(trace.end(), v.begin(), v.end());
      // Follow the child with the most particles so the update succeeds.
      const SearchNode::ChildEntry* best = nullptr;
      for (const auto& ch : p.root().children) {
        if (ch.action == a && (!best || ch.node->particles.size() > best->node->particles.size())) {
          best = &ch;
        }
      }
      REQUIRE(best != nullptr);
      p.Update(a, best->obs);
      trace.push_back(p.belief().size());
    }
    return trace;
  };
  CHECK(run(11) == run(11));
  CHECK(run(11) != run(12));
}

TEST_CASE("update promotes the child and tops up the belief") {
  Rig r = MakeRig("tiny_reveal");
  PlannerConfig c;
  c.simulations = 400;
  c.num_particles = 200;
  Planner p = MakePlanner(r, c, 9);
  Rng rng(2);
  p.Reset(r.f.model->SampleInitial(rng).joint_obs[0]);
  const Action a = p.Search();
  const SearchNode::ChildEntry* child = nullptr;
  for (const auto& ch : p.root().children) {
    if (ch.action == a) child = &ch;
  }
  REQUIRE(child != nullptr);
  const Observation o = child->obs;
  p.Update(a, o);
  CHECK(p.history().size() == 1);
  CHECK(p.belief().size() >= TopUpTarget(200));
  for (const auto& w : p.belief().particles) {
    const int s = TinyPosgModel::Decode(w.state);
    CHECK(s >= 0);
    CHECK(s < r.f.model->NumStates());
  }
}

TEST_CASE("value tables replace rollouts at leaves") {
  Rig r = MakeRig("tiny_signal");
  for (std::size_t m = 0; m < r.search.size(); ++m) {
    const int idx = r.meta.policy_index()[m];
    r.f.set->SetValueTable(idx, BuildValueTable(*r.f.model, *r.f.set, idx, 300, 8, 8, 3));
  }
  r.search = SearchPoliciesFor(*r.f.set, r.meta);
  PlannerConfig c;
  c.simulations = 200;
  Planner p = MakePlanner(r, c, 1);
  Rng rng(3);
  p.Reset(r.f.model->SampleInitial(rng).joint_obs[0]);
  p.Search();
  CHECK(p.diagnostics().value_lookups > 0);
  CHECK(p.diagnostics().rollouts < p.diagnostics().simulations);
}

TEST_CASE("invalid configs are rejected") {
  Rig r = MakeRig("tiny_reveal");
  PlannerConfig c;
  c.lambda = 1.5;
  CHECK_THROWS_AS(MakePlanner(r, c, 1), ConfigError);
  c = PlannerConfig{};
  c.num_particles = 0;
  CHECK_THROWS_AS(MakePlanner(r, c, 1), ConfigError);
}

}  // namespace
}  // namespace potmmcp
