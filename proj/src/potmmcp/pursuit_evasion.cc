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

#include "potmmcp/pursuit_evasion.h"

#include <algorithm>
#include <sstream>

namespace potmmcp {
namespace pe {
namespace {

Coord Offset(Coord from, int facing, int depth, int lateral) {
  const int right = (facing + 1) % 4;
  return {from.x + kDx[facing] * depth + kDx[right] * lateral,
          from.y + kDy[facing] * depth + kDy[right] * lateral};
}

}  // namespace

PursuitEvasionModel::PursuitEvasionModel(GridLayout layout)
    : layout_(std::move(layout)) {
  const auto evaders = layout_.Find('E');
  const auto pursuers = layout_.Find('P');
  goals_ = layout_.Find('G');
  if (evaders.size() != 1 || pursuers.size() != 1) {
    throw ConfigError("layout '" + layout_.name() +
                      "' needs exactly one 'E' and one 'P'");
  }
  if (goals_.size() < 2 || goals_.size() > 4) {
    throw ConfigError("layout '" + layout_.name() +
                      "' needs 2 to 4 safe cells 'G'");
  }
  if (layout_.width() > 127 || layout_.height() > 127) {
    throw ConfigError("pursuit-evasion layout too large");
  }
  evader_start_ = evaders.front();
  pursuer_start_ = pursuers.front();
  for (const Coord& g : goals_) {
    goal_distance_.push_back(layout_.DistancesTo(g));
    if (goal_distance_.back()[layout_.Index(evader_start_)] < 0) {
      throw ConfigError("safe cell unreachable from the evader start");
    }
  }
}

RewardRange PursuitEvasionModel::Rewards(AgentId agent) const {
  if (agent == kEvader) return {kCaughtReward, kEscapeReward + kProgressReward};
  return {-kEscapeReward - kProgressReward, -kCaughtReward};
}

std::vector<Coord> PursuitEvasionModel::VisibleCells(Coord from,
                                                     int facing) const {
  std::vector<Coord> out;
  const Coord d1 = Offset(from, facing, 1, 0);
  if (layout_.IsWall(d1)) return out;
  out.push_back(d1);
  for (int lateral = -1; lateral <= 1; ++lateral) {
    const Coord d2 = Offset(from, facing, 2, lateral);
    if (layout_.IsWall(d2)) continue;
    out.push_back(d2);
    const Coord d3 = Offset(from, facing, 3, lateral);
    if (!layout_.IsWall(d3)) out.push_back(d3);
  }
  return out;
}

bool PursuitEvasionModel::Sees(Coord from, int facing, Coord target) const {
  if (from == target) return true;
  const Coord d1 = Offset(from, facing, 1, 0);
  if (layout_.IsWall(d1)) return false;
  if (d1 == target) return true;
  for (int lateral = -1; lateral <= 1; ++lateral) {
    const Coord d2 = Offset(from, facing, 2, lateral);
    if (layout_.IsWall(d2)) continue;
    if (d2 == target) return true;
    const Coord d3 = Offset(from, facing, 3, lateral);
    if (d3 == target && !layout_.IsWall(d3)) return true;
  }
  return false;
}

Observation PursuitEvasionModel::WallBits(Coord cell) const {
  Observation bits = 0;
  for (int d = 0; d < 4; ++d) {
    if (layout_.IsWall(cell.Step(d))) bits |= Observation{1} << d;
  }
  return bits;
}

Observation PursuitEvasionModel::ObservationFor(const PeState& s,
                                                AgentId agent) const {
  const Coord e{s.ex, s.ey};
  const Coord p{s.px, s.py};
  Observation obs = 0;
  if (agent == kEvader) {
    obs = WallBits(e);
    if (Sees(e, s.efacing, p)) obs |= kSeenBit;
  } else {
    obs = WallBits(p);
    if (Sees(p, s.pfacing, e)) obs |= kSeenBit;
  }
  if (Manhattan(e, p) <= kHearingDistance) obs |= kHeardBit;
  return obs;
}

State PursuitEvasionModel::SampleInitialState(Rng& rng) const {
  PeState s{};
  s.ex = static_cast<std::int8_t>(evader_start_.x);
  s.ey = static_cast<std::int8_t>(evader_start_.y);
  s.px = static_cast<std::int8_t>(pursuer_start_.x);
  s.py = static_cast<std::int8_t>(pursuer_start_.y);
  s.efacing = kNorth;
  s.pfacing = kNorth;
  s.goal = static_cast<std::int8_t>(
      rng.UniformInt(static_cast<int>(goals_.size())));
  s.status = kRunning;
  s.min_dist = static_cast<std::int16_t>(DistanceToGoal(s.goal, evader_start_));
  s.step = 0;
  return State::Pack(s);
}

JointObservation PursuitEvasionModel::SampleInitialObservations(
    const State& state, Rng&) const {
  const auto s = state.Unpack<PeState>();
  JointObservation obs(2);
  obs[kEvader] = ObservationFor(s, kEvader) |
                 (static_cast<Observation>(s.goal) << 6);
  obs[kPursuer] = ObservationFor(s, kPursuer);
  return obs;
}

bool PursuitEvasionModel::IsTerminal(const State& state) const {
  const auto s = state.Unpack<PeState>();
  return s.status != kRunning || s.step >= kStepLimit;
}

GenerativeStep PursuitEvasionModel::DoStep(const State& state,
                                           const JointAction& action,
                                           Rng&) const {
  auto s = state.Unpack<PeState>();
  GenerativeStep out;
  out.joint_reward = JointReward(2, 0.0);
  out.joint_obs = JointObservation(2);
  if (s.status == kRunning && s.step < kStepLimit) {
    const Coord e_next = Coord{s.ex, s.ey}.Step(action[kEvader]);
    if (!layout_.IsWall(e_next)) {
      s.ex = static_cast<std::int8_t>(e_next.x);
      s.ey = static_cast<std::int8_t>(e_next.y);
    }
    s.efacing = static_cast<std::int8_t>(action[kEvader]);
    const Coord p_next = Coord{s.px, s.py}.Step(action[kPursuer]);
    if (!layout_.IsWall(p_next)) {
      s.px = static_cast<std::int8_t>(p_next.x);
      s.py = static_cast<std::int8_t>(p_next.y);
    }
    s.pfacing = static_cast<std::int8_t>(action[kPursuer]);
    s.step = static_cast<std::int16_t>(s.step + 1);

    const Coord e{s.ex, s.ey};
    double evader_reward = 0.0;
    const int dist = DistanceToGoal(s.goal, e);
    if (dist < s.min_dist) {
      s.min_dist = static_cast<std::int16_t>(dist);
      evader_reward += kProgressReward;
    }
    // A capture outranks reaching the safe cell in the same step.
    if (Sees({s.px, s.py}, s.pfacing, e)) {
      s.status = kCaught;
      evader_reward += kCaughtReward;
    } else if (e == goals_[s.goal]) {
      s.status = kEscaped;
      evader_reward += kEscapeReward;
    }
    out.joint_reward[kEvader] = evader_reward;
    out.joint_reward[kPursuer] = -evader_reward;
  }
  out.joint_obs[kEvader] = ObservationFor(s, kEvader);
  out.joint_obs[kPursuer] = ObservationFor(s, kPursuer);
  out.next_state = State::Pack(s);
  return out;
}

std::string PursuitEvasionModel::StateToString(const State& state) const {
  const auto s = state.Unpack<PeState>();
  std::ostringstream out;
  out << "step " << s.step << " evader (" << int{s.ex} << "," << int{s.ey}
      << ") f" << int{s.efacing} << " pursuer (" << int{s.px} << ","
      << int{s.py} << ") f" << int{s.pfacing} << " goal " << int{s.goal}
      << " status " << int{s.status};
  return out.str();
}

std::shared_ptr<const PursuitEvasionModel> MakePursuitEvasion(
    const std::string& layout_id) {
  return std::make_shared<PursuitEvasionModel>(GridLayout::Load(layout_id));
}

}  // namespace pe
}  // namespace potmmcp
