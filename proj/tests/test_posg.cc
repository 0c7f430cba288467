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

#include "potmmcp/posg.h"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "test_util.h"

namespace potmmcp {
namespace {

TEST_CASE("histories extend, compare and print") {
  History h = History::ObservationFirst(3);
  CHECK(h.observation_first());
  CHECK(h.empty());
  CHECK(h.last_observation() == Observation{3});
  History g = h.Extended(1, 5);
  CHECK(h.size() == 0);
  CHECK(g.size() == 1);
  CHECK(g.action(0) == 1);
  CHECK(g.observation(0) == 5);
  CHECK(g.Prefix(0) == h);
  CHECK(h < g);
  History a = History::ActionFirst();
  CHECK_FALSE(a.observation_first());
  CHECK_FALSE(a.last_observation().has_value());
  CHECK_FALSE(g.ToString().empty());
}

TEST_CASE("horizon for epsilon is the smallest d with gamma^d < epsilon") {
  CHECK(HorizonForEpsilon(0.5, 0.1) == 4);
  CHECK(HorizonForEpsilon(0.5, 0.01) == 7);
  CHECK(HorizonForEpsilon(0.0, 0.01) == 1);
  for (double g : {0.3, 0.9, 0.95, 0.99}) {
    for (double e : {0.1, 0.01, 0.001}) {
      const int d = HorizonForEpsilon(g, e);
      CHECK(std::pow(g, d) < e);
      CHECK(std::pow(g, d - 1) >= e);
    }
  }
}

TEST_CASE("discounted return") {
  std::vector<double> r{1.0, 2.0, 3.0};
  CHECK(DiscountedReturn(r, 0.5) == doctest::Approx(1.0 + 1.0 + 0.75));
  CHECK(DiscountedReturn({}, 0.9) == 0.0);
}

TEST_CASE("step rejects malformed joint actions") {
  auto f = testing::LoadTiny("tiny_reveal");
  Rng rng(1);
  const State s = f.model->SampleInitial(rng).state;
  CHECK_THROWS_AS(f.model->Step(s, JointAction(1), rng), ContractViolation);
  JointAction bad(2);
  bad[0] = 3;  // only 3 actions
  CHECK_THROWS_AS(f.model->Step(s, bad, rng), ContractViolation);
  JointAction ok(2);
  CHECK_NOTHROW(f.model->Step(s, ok, rng));
}

}  // namespace
}  // namespace potmmcp
