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

#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "potmmcp/driving.h"
#include "potmmcp/predator_prey.h"
#include "potmmcp/pursuit_evasion.h"
#include "potmmcp/registry.h"

namespace potmmcp {
namespace {

std::vector<std::shared_ptr<const PosgModel>> AllModels() {
  return {pe::MakePursuitEvasion("pe8"),
          pp::MakePredatorPrey(2, 2, 3, "pp10"),
          driving::MakeDriving(7, 7, "driving7", 2)};
}

// Random rollout; returns the concatenated observation and reward trace.
std::vector<double> Trace(const PosgModel& m, std::uint64_t seed) {
  Rng rng(seed);
  InitialSample init = m.SampleInitial(rng);
  State s = init.state;
  std::vector<double> trace;
  for (int t = 0; t < m.StepLimit() + 5 && !m.IsTerminal(s); ++t) {
    JointAction a(m.NumAgents());
    for (AgentId i = 0; i < m.NumAgents(); ++i) {
      a[i] = rng.UniformInt(m.NumActions(i));
    }
    GenerativeStep g = m.Step(s, a, rng);
    for (AgentId i = 0; i < m.NumAgents(); ++i) {
      trace.push_back(g.joint_reward[i]);
      trace.push_back(static_cast<double>(g.joint_obs[i]));
    }
    s = g.next_state;
  }
  return trace;
}

TEST_CASE("random play respects reward ranges and terminates") {
  for (const auto& m : AllModels()) {
    CAPTURE(m->Id());
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      Rng rng(seed);
      State s = m->SampleInitial(rng).state;
      int t = 0;
      while (!m->IsTerminal(s)) {
        JointAction a(m->NumAgents());
        for (AgentId i = 0; i < m->NumAgents(); ++i) {
          a[i] = rng.UniformInt(m->NumActions(i));
        }
        GenerativeStep g = m->Step(s, a, rng);
        for (AgentId i = 0; i < m->NumAgents(); ++i) {
          const RewardRange r = m->Rewards(i);
          REQUIRE(g.joint_reward[i] >= r.min - 1e-12);
          REQUIRE(g.joint_reward[i] <= r.max + 1e-12);
        }
        s = g.next_state;
        ++t;
        REQUIRE(t <= m->StepLimit());
      }
      CHECK(m->StepCount(s) <= m->StepLimit());
    }
  }
}

TEST_CASE("terminal states absorb with zero reward") {
  for (const auto& m : AllModels()) {
    CAPTURE(m->Id());
    Rng rng(1);
    State s = m->SampleInitial(rng).state;
    while (!m->IsTerminal(s)) {
      JointAction a(m->NumAgents());
      s = m->Step(s, a, rng).next_state;
    }
    JointAction a(m->NumAgents());
    GenerativeStep g = m->Step(s, a, rng);
    CHECK(g.next_state == s);
    for (AgentId i = 0; i < m->NumAgents(); ++i) CHECK(g.joint_reward[i] == 0.0);
  }
}

TEST_CASE("models are deterministic in the seed") {
  for (const auto& m : AllModels()) {
    CAPTURE(m->Id());
    CHECK(Trace(*m, 17) == Trace(*m, 17));
    CHECK(Trace(*m, 17) != Trace(*m, 18));
  }
}

TEST_CASE("pursuit-evasion initial observation carries the goal") {
  auto m = pe::MakePursuitEvasion("pe8");
  CHECK(m->goals().size() == 3);
  std::vector<int> seen(3, 0);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    InitialSample init = m->SampleInitial(rng);
    const auto st = init.state.Unpack<pe::PeState>();
    const int goal = pe::GoalFromInitialObs(init.joint_obs[pe::kEvader]);
    CHECK(goal == st.goal);
    ++seen[static_cast<std::size_t>(goal)];
  }
  for (int c : seen) CHECK(c > 0);
}

TEST_CASE("pursuit-evasion vision is blocked by walls") {
  auto m = pe::MakePursuitEvasion("pe8");
  // Looking east from (0,1): (1,1) is a wall, so nothing beyond it shows.
  CHECK_FALSE(m->Sees({0, 1}, kEast, {3, 1}));
  // Looking south along column 0 from (0,3) reaches (0,5).
  CHECK(m->Sees({0, 3}, kSouth, {0, 5}));
  CHECK_FALSE(m->Sees({0, 3}, kNorth, {0, 5}));
}

TEST_CASE("predator-prey capture needs the configured strength") {
  auto m = pp::MakePredatorPrey(2, 2, 1, "pp10");
  Rng rng(3);
  auto st = m->SampleInitial(rng).state.Unpack<pp::PpState>();
  // Put the prey in the open centre with one predator adjacent.
  st.prey_x[0] = 5;
  st.prey_y[0] = 5;
  st.prey_alive[0] = 1;
  st.pred_x[0] = 4;
  st.pred_y[0] = 5;
  st.pred_x[1] = 8;
  st.pred_y[1] = 8;
  pp::PpState one = st;
  CHECK(m->ResolveCaptures(one) == 0);
  st.pred_x[1] = 6;
  st.pred_y[1] = 5;
  CHECK(m->ResolveCaptures(st) == 1);
  CHECK(st.prey_alive[0] == 0);
}

TEST_CASE("driving observation codec round-trips") {
  driving::DrivingObs o;
  for (int k = 0; k < 25; ++k) o.view[static_cast<std::size_t>(k)] = k % 4;
  o.cell = 37;
  o.speed = 2;
  o.heading = 3;
  o.dest_index = 1;
  o.arrived = false;
  o.crashed = true;
  const driving::DrivingObs back = driving::DecodeObs(driving::EncodeObs(o));
  CHECK(back.view == o.view);
  CHECK(back.cell == o.cell);
  CHECK(back.speed == o.speed);
  CHECK(back.heading == o.heading);
  CHECK(back.dest_index == o.dest_index);
  CHECK(back.arrived == o.arrived);
  CHECK(back.crashed == o.crashed);
}

TEST_CASE("registry builds each environment and rejects unknown ids") {
  using nlohmann::json;
  CHECK(MakeEnvironment(json{{"id", "pursuit_evasion"}, {"layout", "pe8"}})->Id() ==
        "pursuit_evasion");
  CHECK(MakeEnvironment(json{{"id", "tiny"}, {"spec", "tiny_reveal"}})->NumAgents() == 2);
  CHECK_THROWS(MakeEnvironment(json{{"id", "chess"}}));
}

}  // namespace
}  // namespace potmmcp
