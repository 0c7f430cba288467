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

#include "potmmcp/belief.h"

#include <algorithm>
#include <map>
#include <memory>

#include "doctest.h"
#include "test_util.h"

namespace potmmcp {
namespace {

// tiny_reveal with the planner always observing 0.
testing::TinyFixture DeterministicObs() {
  TinyTables t = MakeTinyPosg("tiny_reveal")->tables();
  for (auto& row : t.initial_obs[0]) {
    std::fill(row.begin(), row.end(), 0.0);
    row[0] = 1.0;
  }
  for (auto& by_a0 : t.observation[0]) {
    for (auto& by_a1 : by_a0) {
      for (auto& row : by_a1) {
        std::fill(row.begin(), row.end(), 0.0);
        row[0] = 1.0;
      }
    }
  }
  testing::TinyFixture f;
  f.model = std::make_shared<TinyPosgModel>("tiny_reveal_blind", t);
  f.set = LoadPolicySet(f.model, TinyManifest("tiny_reveal"));
  return f;
}

TEST_CASE("top-up target") {
  CHECK(TopUpTarget(100) == 107);
  CHECK(TopUpTarget(16) == 17);
  CHECK(TopUpTarget(1) == 2);
  CHECK(TopUpTarget(0) == 0);
}

TEST_CASE("total variation over sparse maps") {
  std::map<int, double> p{{0, 0.5}, {1, 0.5}};
  std::map<int, double> q{{1, 0.5}, {2, 0.5}};
  CHECK(TotalVariation(p, q) == doctest::Approx(0.5));
  CHECK(TotalVariation(p, p) == 0.0);
  CHECK(TotalVariation(p, std::map<int, double>{}) == doctest::Approx(0.5));
}

TEST_CASE("initial belief agrees with the planner's first observation") {
  auto f = testing::LoadTiny("tiny_signal");
  Rng rng(2);
  const Observation o = f.model->SampleInitial(rng).joint_obs[0];
  const ParticleBelief b = InitialBelief(*f.model, *f.set, 4000, o, rng);
  CHECK(b.size() == 4000);
  const auto exact =
      KeyDistribution(ExactPosterior(*f.model, *f.set, History::ObservationFirst(o)),
                      *f.set);
  CHECK(TotalVariation(KeyDistribution(b, *f.set), exact) < 0.05);
}

TEST_CASE("exact posterior is normalized and rejects impossible histories") {
  for (const auto& id : TinyInstanceIds()) {
    CAPTURE(id);
    auto f = testing::LoadTiny(id);
    Rng rng(8);
    const auto h = testing::SampleHistory(*f.model, *f.set, 3, rng).history;
    const ExactBelief e = ExactPosterior(*f.model, *f.set, h);
    double total = 0.0;
    for (const auto& [w, p] : e) total += p;
    CHECK(total == doctest::Approx(1.0));
  }
  auto f = testing::LoadTiny("tiny_reveal");
  History out_of_range = History::ObservationFirst(0);
  out_of_range.Append(0, 999);
  CHECK_THROWS_AS(ExactPosterior(*f.model, *f.set, out_of_range),
                  ContractViolation);
  auto d = DeterministicObs();
  CHECK_THROWS_AS(ExactPosterior(*d.model, *d.set, History::ObservationFirst(1)),
                  DepletionError);
}

TEST_CASE("rejection replay converges to the exact posterior") {
  for (const auto& id : TinyInstanceIds()) {
    CAPTURE(id);
    auto f = testing::LoadTiny(id);
    Rng rng(21);
    for (int rep = 0; rep < 3; ++rep) {
      const auto h = testing::SampleHistory(*f.model, *f.set, 2, rng).history;
      ParticleBelief b;
      b.particles = ReplayHistory(*f.model, *f.set, h, 6000, 5000000, rng);
      REQUIRE(b.size() == 6000);
      const auto exact = KeyDistribution(ExactPosterior(*f.model, *f.set, h), *f.set);
      CHECK(TotalVariation(KeyDistribution(b, *f.set), exact) < 0.05);
    }
  }
}

TEST_CASE("belief update tops up from the root and flags depletion") {
  auto f = testing::LoadTiny("tiny_random");
  Rng rng(4);
  const auto sample = testing::SampleHistory(*f.model, *f.set, 1, rng);
  const History root_h = sample.history.Prefix(0);
  const ParticleBelief root =
      InitialBelief(*f.model, *f.set, 200, root_h.initial(), rng);
  const auto [a, o] = sample.history.steps()[0];
  const ParticleBelief next = UpdateRootBelief({}, root.particles, *f.model, *f.set,
                                               a, o, 200, sample.history, rng);
  CHECK(next.size() == TopUpTarget(200));
  CHECK_FALSE(next.depleted);
  CHECK_THROWS_AS(InitialBelief(*f.model, *f.set, 10, 999, rng), DepletionError);
  auto d = DeterministicObs();
  const ParticleBelief droot = InitialBelief(*d.model, *d.set, 50, 0, rng);
  History blind = History::ObservationFirst(0);
  blind.Append(0, 1);
  CHECK_THROWS_AS(UpdateRootBelief({}, droot.particles, *d.model, *d.set, 0, 1,
                                   50, blind, rng),
                  DepletionError);
}

TEST_CASE("belief metrics on a belief concentrated on the truth") {
  auto f = testing::LoadTiny("tiny_reveal");
  Rng rng(6);
  const Observation o = f.model->SampleInitial(rng).joint_obs[0];
  ParticleBelief b = InitialBelief(*f.model, *f.set, 500, o, rng);
  const int truth = b.particles.front().joint;
  ParticleBelief only;
  for (const auto& w : b.particles) {
    if (w.joint == truth && w.memory[1] == b.particles.front().memory[1]) {
      only.particles.push_back(w);
    }
  }
  const auto m = ComputeBeliefMetrics(only, *f.set, truth, only.particles.front().memory);
  CHECK(m.prob_true_type == 1.0);
  CHECK(m.action_distance == doctest::Approx(0.0));
  const auto all = ComputeBeliefMetrics(b, *f.set, truth, only.particles.front().memory);
  CHECK(all.prob_true_type < 1.0);
  CHECK(all.prob_true_type > 0.0);
}

TEST_CASE("snapshot lists joint-policy weights") {
  auto f = testing::LoadTiny("tiny_reveal");
  Rng rng(1);
  const ParticleBelief b = InitialBelief(*f.model, *f.set, 100, std::nullopt, rng);
  const auto snap = BeliefSnapshot(b, *f.set, *f.model);
  CHECK(snap.is_object());
  CHECK_FALSE(snap.dump().empty());
}

}  // namespace
}  // namespace potmmcp
