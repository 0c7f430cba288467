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

#ifndef POTMMCP_HEURISTICS_H_
#define POTMMCP_HEURISTICS_H_

#include <memory>
#include <string>

#include "potmmcp/driving.h"
#include "potmmcp/policy.h"
#include "potmmcp/predator_prey.h"
#include "potmmcp/pursuit_evasion.h"

// Hand-written policy families for the grid worlds. Each member is fully
// determined by its family name and parameters. All of them are functions of
// the agent's own history only.
namespace potmmcp {

// Shortest-path driver. Turns toward the next cell of a shortest path,
// keeps its speed at min(target_speed, straight run ahead) and, when another
// vehicle is within two cells of its path, yields (slows or waits) with
// probability yield_prob. `noise` mixes in a uniform distribution.
class DrivingPolicy final : public Policy {
 public:
  struct Config {
    int target_speed = 2;
    double yield_prob = 0.5;
    double noise = 0.05;
  };
  DrivingPolicy(std::string id,
                std::shared_ptr<const driving::DrivingModel> model,
                Config config);

  PolicyState InitialState(std::optional<Observation> initial) const override;
  PolicyState NextState(const PolicyState& state, Action action,
                        Observation obs) const override;
  void ActionDist(const PolicyState& state,
                  std::span<double> out) const override;
  std::optional<std::uint64_t> ValueFeature(
      const PolicyState& state) const override;
  bool IsTerminalState(const PolicyState& state) const override;
  nlohmann::json Params() const override;

 private:
  struct Memory {
    Observation obs;
    std::int16_t step;
  };
  std::shared_ptr<const driving::DrivingModel> model_;
  Config config_;
};

// Pursuit-evasion roles. Both track their own cell by dead reckoning: the
// start cell is known and a move succeeds unless the previous observation
// reported a wall in that direction.
class PursuitEvasionPolicy final : public Policy {
 public:
  enum class Kind {
    kEvaderDirect,    // shortest path to the safe cell
    kEvaderCautious,  // direct, but backs off after hearing the pursuer
    kEvaderWaypoint,  // via a waypoint cell, then to the safe cell
    kEvaderRandom,    // uniform over open directions
    kPursuerAmbush,   // hovers within `radius` of safe cell `goal`
    kPursuerPatrol,   // visits the safe cells in order (or reverse order)
  };
  struct Config {
    double noise = 0.1;
    double retreat = 0.6;
    int waypoint_x = 0;
    int waypoint_y = 0;
    int goal = 0;
    int radius = 2;
    bool reverse = false;
  };
  PursuitEvasionPolicy(std::string id, Kind kind,
                       std::shared_ptr<const pe::PursuitEvasionModel> model,
                       Config config);

  PolicyState InitialState(std::optional<Observation> initial) const override;
  PolicyState NextState(const PolicyState& state, Action action,
                        Observation obs) const override;
  void ActionDist(const PolicyState& state,
                  std::span<double> out) const override;
  std::optional<std::uint64_t> ValueFeature(
      const PolicyState& state) const override;
  nlohmann::json Params() const override;

  static Kind KindFromFamily(const std::string& family);
  static std::string FamilyName(Kind kind);

 private:
  struct Memory {
    std::int8_t x, y, facing, walls, target, mode, heard;
    std::int16_t step;
  };
  bool is_evader() const;
  // Puts (1 - noise) on the open directions minimizing `dist`, the rest
  // uniformly over open directions.
  void TowardCell(const Memory& m, const std::vector<int>& dist,
                  std::span<double> out) const;

  Kind kind_;
  std::shared_ptr<const pe::PursuitEvasionModel> model_;
  Config config_;
  std::vector<int> waypoint_distance_;
};

// Predator working from its 5x5 view. With prey in view it closes in on the
// nearest prey (kNearest), on the prey-adjacent cell farthest from a
// visible teammate (kFlank), or does the same but otherwise walks toward a
// visible teammate (kFollow). Without prey it explores: keeps its heading
// and turns clockwise (turn = 1) or counter-clockwise (turn = -1) at walls.
class PredatorPolicy final : public Policy {
 public:
  enum class Mode { kNearest, kFlank, kFollow };
  struct Config {
    Mode mode = Mode::kNearest;
    int turn = 1;
    int start_heading = 0;
    double noise = 0.1;
  };
  PredatorPolicy(std::string id,
                 std::shared_ptr<const pp::PredatorPreyModel> model,
                 Config config);

  PolicyState InitialState(std::optional<Observation> initial) const override;
  PolicyState NextState(const PolicyState& state, Action action,
                        Observation obs) const override;
  void ActionDist(const PolicyState& state,
                  std::span<double> out) const override;
  std::optional<std::uint64_t> ValueFeature(
      const PolicyState& state) const override;
  nlohmann::json Params() const override;

 private:
  struct Memory {
    Observation obs;
    std::int8_t heading;
    std::int16_t step;
  };
  int ExploreHeading(Observation obs, int heading) const;

  std::shared_ptr<const pp::PredatorPreyModel> model_;
  Config config_;
};

}  // namespace potmmcp

#endif  // POTMMCP_HEURISTICS_H_
