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

#include "potmmcp/driving.h"

#include <algorithm>
#include <sstream>

namespace potmmcp {
namespace driving {

Observation EncodeObs(const DrivingObs& obs) {
  Observation code = 0;
  for (int k = 0; k < 25; ++k) {
    code |= static_cast<Observation>(obs.view[k] & 3) << (2 * k);
  }
  code |= static_cast<Observation>(obs.cell & 63) << 50;
  code |= static_cast<Observation>(obs.speed & 3) << 56;
  code |= static_cast<Observation>(obs.heading & 3) << 58;
  code |= static_cast<Observation>(obs.dest_index & 3) << 60;
  code |= static_cast<Observation>(obs.arrived ? 1 : 0) << 62;
  code |= static_cast<Observation>(obs.crashed ? 1 : 0) << 63;
  return code;
}

DrivingObs DecodeObs(Observation code) {
  DrivingObs obs;
  for (int k = 0; k < 25; ++k) obs.view[k] = static_cast<int>((code >> (2 * k)) & 3);
  obs.cell = static_cast<int>((code >> 50) & 63);
  obs.speed = static_cast<int>((code >> 56) & 3);
  obs.heading = static_cast<int>((code >> 58) & 3);
  obs.dest_index = static_cast<int>((code >> 60) & 3);
  obs.arrived = ((code >> 62) & 1) != 0;
  obs.crashed = ((code >> 63) & 1) != 0;
  return obs;
}

DrivingModel::DrivingModel(GridLayout layout, int num_agents)
    : layout_(std::move(layout)), num_agents_(num_agents) {
  if (num_agents < 2 || num_agents > kMaxAgents) {
    throw ConfigError("driving supports 2 to 4 agents");
  }
  if (layout_.NumCells() > 64) {
    throw ConfigError("driving layouts are limited to 64 cells");
  }
  starts_.resize(static_cast<std::size_t>(num_agents));
  choices_.resize(static_cast<std::size_t>(num_agents));
  for (AgentId i = 0; i < num_agents; ++i) {
    starts_[i] = layout_.Find(static_cast<char>('0' + i));
    const auto dests = layout_.Find(static_cast<char>('A' + i));
    if (starts_[i].empty() || dests.empty()) {
      throw ConfigError("layout '" + layout_.name() +
                        "' has no start or destination for agent " +
                        std::to_string(i));
    }
    for (const Coord& d : dests) {
      choices_[i].push_back(static_cast<int>(destinations_.size()));
      destinations_.push_back(d);
      distance_.push_back(layout_.DistancesTo(d));
      for (const Coord& s : starts_[i]) {
        if (distance_.back()[layout_.Index(s)] < 0) {
          throw ConfigError("destination unreachable in layout '" +
                            layout_.name() + "'");
        }
      }
    }
  }
  if (destinations_.size() > 4) {
    throw ConfigError("driving layouts support at most 4 destinations");
  }
}

RewardRange DrivingModel::Rewards(AgentId) const {
  return {kCrashReward + kWallReward, kArriveReward + kProgressReward};
}

State DrivingModel::SampleInitialState(Rng& rng) const {
  DrivingState s{};
  for (AgentId i = 0; i < num_agents_; ++i) {
    Coord start;
    // Distinct start cells.
    for (int attempt = 0;; ++attempt) {
      start = starts_[i][rng.UniformInt(static_cast<int>(starts_[i].size()))];
      bool clash = false;
      for (AgentId j = 0; j < i; ++j) {
        clash |= s.vehicles[j].x == start.x && s.vehicles[j].y == start.y;
      }
      if (!clash) break;
      if (attempt > 100) throw ConfigError("cannot place vehicles");
    }
    const int dest = choices_[i][rng.UniformInt(
        static_cast<int>(choices_[i].size()))];
    Vehicle& v = s.vehicles[i];
    v.x = static_cast<std::int8_t>(start.x);
    v.y = static_cast<std::int8_t>(start.y);
    v.speed = 0;
    v.dest_index = static_cast<std::int8_t>(dest);
    v.dest_x = static_cast<std::int8_t>(destinations_[dest].x);
    v.dest_y = static_cast<std::int8_t>(destinations_[dest].y);
    v.status = kDriving;
    // Face along a shortest path.
    v.heading = kNorth;
    int best = 1 << 30;
    for (int d = 0; d < 4; ++d) {
      const Coord n = start.Step(d);
      if (layout_.IsWall(n)) continue;
      const int dist = distance_[dest][layout_.Index(n)];
      if (dist >= 0 && dist < best) {
        best = dist;
        v.heading = static_cast<std::int8_t>(d);
      }
    }
  }
  s.step = 0;
  return State::Pack(s);
}

Observation DrivingModel::ObservationFor(const DrivingState& s,
                                         AgentId agent) const {
  const Vehicle& me = s.vehicles[agent];
  DrivingObs obs;
  int k = 0;
  for (int dy = -kViewRadius; dy <= kViewRadius; ++dy) {
    for (int dx = -kViewRadius; dx <= kViewRadius; ++dx, ++k) {
      const Coord c{me.x + dx, me.y + dy};
      if (layout_.IsWall(c)) {
        obs.view[k] = kWall;
        continue;
      }
      obs.view[k] = kEmpty;
      if (dx == 0 && dy == 0) continue;
      for (AgentId j = 0; j < num_agents_; ++j) {
        const Vehicle& v = s.vehicles[j];
        if (j != agent && v.status == kDriving && v.x == c.x && v.y == c.y) {
          obs.view[k] = kVehicle;
        }
      }
    }
  }
  obs.cell = layout_.Index({me.x, me.y});
  obs.speed = me.speed;
  obs.heading = me.heading;
  obs.dest_index = me.dest_index;
  obs.arrived = me.status == kArrived;
  obs.crashed = me.status == kCrashed;
  return EncodeObs(obs);
}

JointObservation DrivingModel::SampleInitialObservations(const State& state,
                                                         Rng&) const {
  const auto s = state.Unpack<DrivingState>();
  JointObservation obs(num_agents_);
  for (AgentId i = 0; i < num_agents_; ++i) obs[i] = ObservationFor(s, i);
  return obs;
}

bool DrivingModel::IsTerminal(const State& state) const {
  const auto s = state.Unpack<DrivingState>();
  if (s.step >= kStepLimit) return true;
  for (AgentId i = 0; i < num_agents_; ++i) {
    if (s.vehicles[i].status == kDriving) return false;
  }
  return true;
}

bool DrivingModel::IsAgentDone(const State& state, AgentId agent) const {
  const auto s = state.Unpack<DrivingState>();
  return s.step >= kStepLimit || s.vehicles[agent].status != kDriving;
}

GenerativeStep DrivingModel::DoStep(const State& state,
                                    const JointAction& action, Rng&) const {
  auto s = state.Unpack<DrivingState>();
  const int n = num_agents_;
  GenerativeStep out;
  out.joint_reward = JointReward(n, 0.0);
  out.joint_obs = JointObservation(n);
  if (s.step >= kStepLimit) {
    for (AgentId i = 0; i < n; ++i) out.joint_obs[i] = ObservationFor(s, i);
    out.next_state = State::Pack(s);
    return out;
  }

  std::array<int, kMaxAgents> start_dist{};
  std::array<bool, kMaxAgents> stopped{};
  std::array<bool, kMaxAgents> active{};
  for (AgentId i = 0; i < n; ++i) {
    Vehicle& v = s.vehicles[i];
    active[i] = v.status == kDriving;
    if (!active[i]) continue;
    start_dist[i] = DistanceToDestination(v.dest_index, {v.x, v.y});
    switch (action[i]) {
      case kAccelerate:
        v.speed = static_cast<std::int8_t>(std::min(kMaxSpeed, v.speed + 1));
        break;
      case kDecelerate:
        v.speed = static_cast<std::int8_t>(std::max(0, v.speed - 1));
        break;
      case kTurnLeft:
        v.heading = static_cast<std::int8_t>((v.heading + 3) % 4);
        break;
      case kTurnRight:
        v.heading = static_cast<std::int8_t>((v.heading + 1) % 4);
        break;
      default:
        break;
    }
  }

  for (int sub = 1; sub <= kMaxSpeed; ++sub) {
    std::array<Coord, kMaxAgents> before{};
    for (AgentId i = 0; i < n; ++i) {
      Vehicle& v = s.vehicles[i];
      before[i] = {v.x, v.y};
      if (v.status != kDriving || stopped[i] || v.speed < sub) continue;
      const Coord next = before[i].Step(v.heading);
      if (layout_.IsWall(next)) {
        stopped[i] = true;
        v.speed = 0;
        out.joint_reward[i] += kWallReward;
        continue;
      }
      v.x = static_cast<std::int8_t>(next.x);
      v.y = static_cast<std::int8_t>(next.y);
    }
    std::array<bool, kMaxAgents> crash{};
    for (AgentId i = 0; i < n; ++i) {
      const Vehicle& a = s.vehicles[i];
      if (a.status != kDriving) continue;
      for (AgentId j = i + 1; j < n; ++j) {
        const Vehicle& b = s.vehicles[j];
        if (b.status != kDriving) continue;
        const bool same = a.x == b.x && a.y == b.y;
        const bool swap = Coord{a.x, a.y} == before[j] &&
                          Coord{b.x, b.y} == before[i] &&
                          !(before[i] == before[j]);
        if (same || swap) crash[i] = crash[j] = true;
      }
    }
    for (AgentId i = 0; i < n; ++i) {
      Vehicle& v = s.vehicles[i];
      if (v.status != kDriving) continue;
      if (crash[i]) {
        v.status = kCrashed;
        v.speed = 0;
        out.joint_reward[i] += kCrashReward;
      } else if (v.x == v.dest_x && v.y == v.dest_y) {
        v.status = kArrived;
        v.speed = 0;
        out.joint_reward[i] += kArriveReward;
      }
    }
  }

  for (AgentId i = 0; i < n; ++i) {
    const Vehicle& v = s.vehicles[i];
    if (!active[i] || v.status == kCrashed) continue;
    const int end_dist = DistanceToDestination(v.dest_index, {v.x, v.y});
    if (end_dist < start_dist[i]) out.joint_reward[i] += kProgressReward;
  }
  s.step = static_cast<std::int16_t>(s.step + 1);
  for (AgentId i = 0; i < n; ++i) out.joint_obs[i] = ObservationFor(s, i);
  out.next_state = State::Pack(s);
  return out;
}

std::string DrivingModel::StateToString(const State& state) const {
  const auto s = state.Unpack<DrivingState>();
  std::ostringstream out;
  out << "step " << s.step;
  for (AgentId i = 0; i < num_agents_; ++i) {
    const Vehicle& v = s.vehicles[i];
    out << " | v" << i << " (" << int{v.x} << "," << int{v.y} << ") h"
        << int{v.heading} << " s" << int{v.speed} << " st" << int{v.status};
  }
  return out.str();
}

std::shared_ptr<const DrivingModel> MakeDriving(int width, int height,
                                                const std::string& layout_id,
                                                int num_agents) {
  GridLayout layout = GridLayout::Load(layout_id);
  if (layout.width() != width || layout.height() != height) {
    throw ConfigError("layout '" + layout_id + "' is " +
                      std::to_string(layout.width()) + "x" +
                      std::to_string(layout.height()) + ", requested " +
                      std::to_string(width) + "x" + std::to_string(height));
  }
  return std::make_shared<DrivingModel>(std::move(layout), num_agents);
}

}  // namespace driving
}  // namespace potmmcp
