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

#ifndef POTMMCP_DRIVING_H_
#define POTMMCP_DRIVING_H_

#include <memory>
#include <string>
#include <vector>

#include "potmmcp/grid.h"
#include "potmmcp/posg.h"

namespace potmmcp {

// General-sum grid navigation. Each vehicle has a heading and a speed in
// {0, 1, 2}; every step it first applies its action, then advances `speed`
// cells along its heading one cell at a time. Walls stop a vehicle (speed
// drops to 0). Two vehicles entering the same cell, or swapping cells, in
// the same sub-step both crash.
//
// Layout alphabet: '#' wall, '.' road, '0'-'3' start cell of that agent,
// 'A'-'D' destination of agent 0-3.
namespace driving {

enum DrivingAction : int {
  kNoop = 0,
  kAccelerate = 1,
  kDecelerate = 2,
  kTurnLeft = 3,
  kTurnRight = 4,
};
inline constexpr int kNumActions = 5;
inline constexpr int kMaxSpeed = 2;
inline constexpr int kStepLimit = 50;
inline constexpr int kViewRadius = 2;  // 5x5 local view

inline constexpr double kArriveReward = 1.0;
inline constexpr double kCrashReward = -1.0;
inline constexpr double kWallReward = -0.05;
inline constexpr double kProgressReward = 0.05;

enum VehicleStatus : std::int8_t { kDriving = 0, kArrived = 1, kCrashed = 2 };

// View cell codes.
enum ViewCell : int { kEmpty = 0, kWall = 1, kVehicle = 2 };

struct Vehicle {
  std::int8_t x, y, heading, speed;
  std::int8_t dest_x, dest_y, dest_index, status;
};

struct DrivingState {
  Vehicle vehicles[kMaxAgents];
  std::int16_t step;
};

// Decoded per-agent observation:
//   bits  0-49  5x5 view, 2 bits per cell, row-major from the top-left
//   bits 50-55  own cell index (y * width + x)
//   bits 56-57  speed       bits 58-59  heading
//   bits 60-61  destination index (into destinations())
//   bit  62     arrived     bit 63      crashed
struct DrivingObs {
  std::array<int, 25> view{};
  int cell = 0;
  int speed = 0;
  int heading = 0;
  int dest_index = 0;
  bool arrived = false;
  bool crashed = false;
};
Observation EncodeObs(const DrivingObs& obs);
DrivingObs DecodeObs(Observation code);

class DrivingModel final : public PosgModel {
 public:
  DrivingModel(GridLayout layout, int num_agents);

  std::string Id() const override { return "driving"; }
  int NumAgents() const override { return num_agents_; }
  int NumActions(AgentId) const override { return kNumActions; }
  RewardRange Rewards(AgentId) const override;
  double Discount() const override { return 0.99; }
  bool IsSymmetric() const override { return true; }

  State SampleInitialState(Rng& rng) const override;
  JointObservation SampleInitialObservations(const State& state,
                                             Rng& rng) const override;
  bool IsTerminal(const State& state) const override;
  bool IsAgentDone(const State& state, AgentId agent) const override;
  int StepCount(const State& state) const override {
    return state.Unpack<DrivingState>().step;
  }
  int StepLimit() const override { return kStepLimit; }
  std::string StateToString(const State& state) const override;

  const GridLayout& layout() const { return layout_; }
  // Every destination cell in the layout; observations carry an index
  // into this list.
  const std::vector<Coord>& destinations() const { return destinations_; }
  // Shortest-path distance from `cell` to destination `dest_index`.
  int DistanceToDestination(int dest_index, Coord cell) const {
    return distance_[dest_index][layout_.Index(cell)];
  }

  Observation ObservationFor(const DrivingState& state, AgentId agent) const;

 protected:
  GenerativeStep DoStep(const State& state, const JointAction& action,
                        Rng& rng) const override;

 private:
  GridLayout layout_;
  int num_agents_;
  std::vector<std::vector<Coord>> starts_;
  // Destination indices each agent may be assigned.
  std::vector<std::vector<int>> choices_;
  std::vector<Coord> destinations_;
  // distance_[dest_index][cell]
  std::vector<std::vector<int>> distance_;
};

// Checks width/height against the layout file and the agent count against
// its start markers.
std::shared_ptr<const DrivingModel> MakeDriving(int width, int height,
                                                const std::string& layout_id,
                                                int num_agents);

}  // namespace driving
}  // namespace potmmcp

#endif  // POTMMCP_DRIVING_H_
