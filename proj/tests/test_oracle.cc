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

#include "potmmcp/oracle.h"

#include <cmath>

#include "doctest.h"
#include "potmmcp/belief.h"
#include "test_util.h"

namespace potmmcp {
namespace {

using testing::LoadTiny;

TEST_CASE("derived and direct policy values agree") {
  for (const std::string& id : TinyInstanceIds()) {
    auto f = LoadTiny(id);
    oracle::DerivedPomdp derived(f.model, f.set, 3);
    std::vector<std::shared_ptr<const Policy>> policies;
    for (int k : f.set->planner_policies()) policies.push_back(f.set->policy_ptr(k));
    policies.push_back(std::make_shared<UniformRandomPolicy>(
        "u", f.model->NumActions(0)));
    for (const auto& pi : policies) {
      auto a = oracle::DerivedPolicyValue(derived, *pi);
      auto b = oracle::DirectPolicyValue(*f.model, *f.set, *pi, 3);
      REQUIRE(a.size() == b.size());
      REQUIRE_FALSE(a.empty());
      for (const auto& [o, v] : a) {
        CAPTURE(id);
        CHECK(std::abs(v - b.at(o)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("optimal value dominates every fixed policy") {
  for (const std::string& id : TinyInstanceIds()) {
    auto f = LoadTiny(id);
    oracle::DerivedPomdp derived(f.model, f.set, 3);
    for (const auto& r : oracle::OptimalValues(derived)) {
      CAPTURE(id);
      CHECK(r.root_prob > 0.0);
      CHECK_FALSE(r.optimal_actions.empty());
      for (int k : f.set->planner_policies()) {
        auto v = oracle::DerivedPolicyValue(derived, f.set->policy(k));
        CHECK(v.at(r.root_obs) <= r.value + 1e-9);
      }
    }
  }
}

TEST_CASE("backward induction matches exhaustive policy trees") {
  for (const std::string& id : {"tiny_single", "tiny_degenerate", "tiny_signal"}) {
    auto f = LoadTiny(id);
    const int h = 3;
    oracle::DerivedPomdp derived(f.model, f.set, h);
    for (const auto& r : oracle::OptimalValues(derived)) {
      CAPTURE(id);
      const double brute =
          oracle::ExhaustiveOptimalValue(*f.model, *f.set, r.root_obs, h);
      CHECK(std::abs(brute - r.value) <= 1e-9);
    }
  }
}

TEST_CASE("exact value table reproduces the root policy value") {
  auto f = LoadTiny("tiny_reveal");
  oracle::DerivedPomdp derived(f.model, f.set, 3);
  for (int k : f.set->planner_policies()) {
    const Policy& pi = f.set->policy(k);
    auto table = oracle::ExactValueTable(derived, pi);
    auto values = oracle::DerivedPolicyValue(derived, pi);
    for (const auto& [o, v] : values) {
      auto feature = pi.ValueFeature(pi.InitialState(o));
      REQUIRE(feature);
      auto got = table->Lookup(*feature);
      REQUIRE(got);
      CHECK(std::abs(*got - v) <= 1e-9);
    }
  }
}

TEST_CASE("sampled rollout distribution converges to the exact one") {
  auto f = LoadTiny("tiny_random");
  oracle::DerivedPomdp derived(f.model, f.set, 3);
  UniformRandomPolicy pi("u", f.model->NumActions(0));
  const Observation o = oracle::OptimalValues(derived).front().root_obs;
  auto exact = oracle::ExactRolloutDistribution(derived, pi, o, 2);
  double mass = 0.0;
  for (const auto& [h, p] : exact) mass += p;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  auto sampled =
      oracle::SampledRolloutDistribution(*f.model, *f.set, pi, o, 2, 20000, 7);
  CHECK(TotalVariation(exact, sampled) < 0.05);
}

TEST_CASE("layer cap is enforced") {
  auto f = LoadTiny("tiny_reveal");
  CHECK_THROWS_AS(oracle::DerivedPomdp(f.model, f.set, 40), CapacityError);
}

}  // namespace
}  // namespace potmmcp
