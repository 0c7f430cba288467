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

#include "potmmcp/tiny_posg.h"

#include <cmath>

#include "doctest.h"
#include "potmmcp/tiny_instances.h"

namespace potmmcp {
namespace {

double RowSum(const std::vector<double>& row) {
  double s = 0.0;
  for (double p : row) s += p;
  return s;
}

TEST_CASE("every shipped instance has stochastic tables") {
  for (const auto& id : TinyInstanceIds()) {
    CAPTURE(id);
    auto m = MakeTinyPosg(id);
    const auto& t = m->tables();
    CHECK(RowSum(t.initial) == doctest::Approx(1.0));
    for (int s = 0; s < t.num_states; ++s) {
      for (int a0 = 0; a0 < t.num_actions[0]; ++a0) {
        for (int a1 = 0; a1 < t.num_actions[1]; ++a1) {
          CHECK(RowSum(t.transition[s][a0][a1]) == doctest::Approx(1.0));
          for (int k = 0; k < 2; ++k) {
            CHECK(RowSum(t.observation[k][s][a0][a1]) == doctest::Approx(1.0));
          }
        }
      }
    }
    CHECK(m->Discount() == doctest::Approx(0.5));
  }
}

TEST_CASE("json round trip preserves the tables") {
  auto m = MakeTinyPosg("tiny_random");
  auto back = TinyPosgModel::FromJson(m->ToJson());
  CHECK(back->ToJson() == m->ToJson());
}

TEST_CASE("validation names the broken row") {
  TinyTables t = MakeTinyPosg("tiny_single")->tables();
  t.transition[0][0][0][0] += 0.5;
  try {
    ValidateTinyTables(t);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("transition") != std::string::npos);
  }
  TinyTables u = MakeTinyPosg("tiny_single")->tables();
  u.initial.push_back(0.0);
  CHECK_THROWS_AS(ValidateTinyTables(u), ValidationError);
}

TEST_CASE("empirical transition frequencies match the table") {
  auto m = MakeTinyPosg("tiny_random");
  Rng rng(9);
  const State s = TinyPosgModel::Encode(0);
  JointAction a(2);
  a[0] = 1;
  a[1] = 0;
  std::vector<int> count(static_cast<std::size_t>(m->NumStates()), 0);
  const int n = 50000;
  for (int k = 0; k < n; ++k) {
    ++count[static_cast<std::size_t>(
        TinyPosgModel::Decode(m->Step(s, a, rng).next_state))];
  }
  for (int next = 0; next < m->NumStates(); ++next) {
    CHECK(count[static_cast<std::size_t>(next)] / double(n) ==
          doctest::Approx(m->Transition(0, 1, 0, next)).epsilon(0.03).scale(1));
  }
}

TEST_CASE("unknown instance id is rejected") {
  CHECK_THROWS(MakeTinyPosg("tiny_nope"));
}

}  // namespace
}  // namespace potmmcp
