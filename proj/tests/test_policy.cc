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

#include "potmmcp/policy.h"

#include <vector>

#include "doctest.h"
#include "test_util.h"

namespace potmmcp {
namespace {

TEST_CASE("uniform and constant policies") {
  UniformRandomPolicy u("u", 4);
  std::vector<double> d(4);
  u.ActionDist(u.InitialState(std::nullopt), d);
  for (double p : d) CHECK(p == doctest::Approx(0.25));
  ConstantPolicy c("c", 3, 2);
  std::vector<double> e(3);
  c.ActionDist(c.InitialState(std::nullopt), e);
  CHECK(e == std::vector<double>{0.0, 0.0, 1.0});
  CHECK_THROWS(ConstantPolicy("bad", 3, 3));
}

TEST_CASE("tabular policy conditions on the latest observation") {
  // Rows: obs 0, obs 1, then the "no observation" row.
  TabularPolicy t("t", 2, 2, {{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}});
  CHECK(ActionDistForHistory(t, History::ActionFirst()) ==
        std::vector<double>{0.5, 0.5});
  History h = History::ObservationFirst(1);
  CHECK(ActionDistForHistory(t, h) == std::vector<double>{0.0, 1.0});
  CHECK(ActionDistForHistory(t, h.Extended(1, 0)) ==
        std::vector<double>{1.0, 0.0});
  const auto f1 = t.ValueFeature(StateForHistory(t, h));
  const auto f2 = t.ValueFeature(StateForHistory(t, h.Extended(1, 0)));
  REQUIRE(f1.has_value());
  REQUIRE(f2.has_value());
  CHECK(*f1 != *f2);
}

TEST_CASE("behaviour state merges histories with the same future play") {
  TabularPolicy t("t", 2, 2, {{0.9, 0.1}, {0.2, 0.8}, {0.5, 0.5}});
  const History a = History::ObservationFirst(0).Extended(0, 1);
  const History b = History::ObservationFirst(1).Extended(1, 1);
  const PolicyState sa = StateForHistory(t, a);
  const PolicyState sb = StateForHistory(t, b);
  CHECK_FALSE(sa == sb);
  CHECK(t.BehaviourState(sa) == t.BehaviourState(sb));
  CHECK_FALSE(t.BehaviourState(sa) ==
              t.BehaviourState(StateForHistory(t, a.Extended(0, 0))));
  for (Action x = 0; x < 2; ++x) {
    for (Observation o = 0; o < 2; ++o) {
      CHECK(ActionDistForHistory(t, a.Extended(x, o)) ==
            ActionDistForHistory(t, b.Extended(x, o)));
    }
  }
  UniformRandomPolicy u("u", 2);
  const PolicyState su = u.InitialState(std::nullopt);
  CHECK(u.BehaviourState(su) == su);
}

TEST_CASE("value table honours its minimum count and round-trips") {
  ValueTable v(2);
  v.Add(7, 1.0);
  CHECK_FALSE(v.Lookup(7).has_value());
  v.Add(7, 3.0);
  REQUIRE(v.Lookup(7).has_value());
  CHECK(*v.Lookup(7) == doctest::Approx(2.0));
  CHECK_FALSE(v.Lookup(8).has_value());
  ValueTable back = ValueTable::FromJson(v.ToJson());
  CHECK(*back.Lookup(7) == doctest::Approx(2.0));
}

TEST_CASE("policy set indexes joints and normalizes the prior") {
  auto f = testing::LoadTiny("tiny_reveal");
  const PolicySet& set = *f.set;
  CHECK(set.num_joints() >= 2);
  double total = 0.0;
  for (double p : set.prior()) total += p;
  CHECK(total == doctest::Approx(1.0));
  for (int k = 0; k < set.num_joints(); ++k) {
    CHECK(set.joint(k).per_agent[static_cast<std::size_t>(set.planner_agent())] == -1);
  }
  CHECK_FALSE(set.Contains("definitely_missing"));
  CHECK_THROWS(set.IndexOf("definitely_missing"));
  CHECK_FALSE(set.planner_policies().empty());
}

TEST_CASE("sampled joint policies follow the prior") {
  auto f = testing::LoadTiny("tiny_random");
  Rng rng(5);
  std::vector<int> count(static_cast<std::size_t>(f.set->num_joints()), 0);
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++count[static_cast<std::size_t>(SampleJointPolicy(*f.set, rng))];
  for (int k = 0; k < f.set->num_joints(); ++k) {
    CHECK(count[static_cast<std::size_t>(k)] / double(n) ==
          doctest::Approx(f.set->prior()[static_cast<std::size_t>(k)]).epsilon(0.05));
  }
}

TEST_CASE("monte-carlo value table is deterministic in its seed") {
  auto f = testing::LoadTiny("tiny_signal");
  const int pi = f.set->planner_policies().front();
  auto a = BuildValueTable(*f.model, *f.set, pi, 200, 6, 6, 11);
  auto b = BuildValueTable(*f.model, *f.set, pi, 200, 6, 6, 11);
  CHECK(a->ToJson() == b->ToJson());
  CHECK(a->size() > 0);
}

}  // namespace
}  // namespace potmmcp
