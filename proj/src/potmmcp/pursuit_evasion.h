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

#ifndef POTMMCP_PURSUIT_EVASION_H_
#define POTMMCP_PURSUIT_EVASION_H_

#include <memory>
#include <string>
#include <vector>

#include "potmmcp/grid.h"
#include "potmmcp/posg.h"

namespace potmmcp {

// Zero-sum two-agent chase on a grid. Agent 0 is the evader, agent 1 the
// pursuer. Both move one cell per step in an absolute direction (N, E, S, W)
// and face the direction they tried to move, even when a wall blocked them.
// The evader wins by reaching its (privately known) safe cell; it is caught
// as soon as it stands inside the pursuer's vision cone.
//
// Layout alphabet: '#' wall, '.' free, 'E' evader start, 'P' pursuer start,
// 'G' candidate safe cell (2 to 4 of them).
namespace pe {

inline constexpr AgentId kEvader = 0;
inline constexpr AgentId kPursuer = 1;
inline constexpr int kNumActions = 4;
inline constexpr int kStepLimit = 100;
inline constexpr int kHearingDistance = 2;
inline constexpr double kEscapeReward = 1.0;
inline constexpr double kCaughtReward = -1.0;
inline constexpr double kProgressReward = 0.01;

enum PeStatus : std::int8_t { kRunning = 0, kCaught = 1, kEscaped = 2 };

struct PeState {
  std::int8_t ex, ey, efacing;
  std::int8_t px, py, pfacing;
  std::int8_t goal, status;
  std::int16_t min_dist, step;
};

// Observation bits: 0-3 wall to the N/E/S/W, 4 the other agent is in the
// observer's vision cone, 5 the other agent is within Manhattan distance 2.
// The evader's initial observation also carries its goal index in bits 6-7.
inline constexpr Observation kSeenBit = 1u << 4;
inline constexpr Observation kHeardBit = 1u << 5;
inline int GoalFromInitialObs(Observation o) {
  return static_cast<int>((o >> 6) & 3);
}

class PursuitEvasionModel final : public PosgModel {
 public:
  explicit PursuitEvasionModel(GridLayout layout);

  std::string Id() const override { return "pursuit_evasion"; }
  int NumAgents() const override { return 2; }
  int NumActions(AgentId) const override { return kNumActions; }
  RewardRange Rewards(AgentId agent) const override;
  double Discount() const override { return 0.99; }

  State SampleInitialState(Rng& rng) const override;
  JointObservation SampleInitialObservations(const State& state,
                                             Rng& rng) const override;
  bool IsTerminal(const State& state) const override;
  int StepCount(const State& state) const override {
    return state.Unpack<PeState>().step;
  }
  int StepLimit() const override { return kStepLimit; }
  std::string StateToString(const State& state) const override;

  const GridLayout& layout() const { return layout_; }
  Coord evader_start() const { return evader_start_; }
  Coord pursuer_start() const { return pursuer_start_; }
  const std::vector<Coord>& goals() const { return goals_; }
  int DistanceToGoal(int goal, Coord cell) const {
    return goal_distance_[goal][layout_.Index(cell)];
  }
  const std::vector<int>& GoalDistances(int goal) const {
    return goal_distance_[goal];
  }
  // Cells of the depth-3 cone in front of (from, facing) that are not hidden
  // behind walls. The observer's own cell is not included.
  std::vector<Coord> VisibleCells(Coord from, int facing) const;
  bool Sees(Coord from, int facing, Coord target) const;
  Observation WallBits(Coord cell) const;

 protected:
  GenerativeStep DoStep(const State& state, const JointAction& action,
                        Rng& rng) const override;

 private:
  Observation ObservationFor(const PeState& s, AgentId agent) const;

  GridLayout layout_;
  Coord evader_start_;
  Coord pursuer_start_;
  std::vector<Coord> goals_;
  std::vector<std::vector<int>> goal_distance_;
};

std::shared_ptr<const PursuitEvasionModel> MakePursuitEvasion(
    const std::string& layout_id);

}  // namespace pe
}  // namespace potmmcp

#endif  // POTMMCP_PURSUIT_EVASION_H_
