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

#ifndef POTMMCP_PREDATOR_PREY_H_
#define POTMMCP_PREDATOR_PREY_H_

#include <memory>
#include <string>
#include <vector>

#include "potmmcp/grid.h"
#include "potmmcp/posg.h"

namespace potmmcp {

// Cooperative pursuit: predators share the reward for every prey they
// capture. A prey is captured when at least `prey_strength` predators stand
// on its four neighbouring cells.
//
// Step order: predators move one at a time in index order (walls, other
// predators and live prey block), captures are resolved, prey move one at a
// time in index order, captures are resolved again.
//
// Prey are deterministic. Each considers staying or moving N, E, S, W to a
// free cell and picks the candidate maximizing (min Manhattan distance to
// predators it can see, min Manhattan distance to other prey it can see),
// compared lexicographically, with unseen groups scoring +inf. Ties keep
// the first candidate in the order stay, N, E, S, W. A prey sees cells
// within Chebyshev distance 2.
//
// Layout alphabet: '#' wall, '.' free, 'p' prey start. Predators start on
// distinct free perimeter cells drawn uniformly.
namespace pp {

inline constexpr int kNumActions = 5;  // stay, N, E, S, W
inline constexpr int kStepLimit = 50;
inline constexpr int kViewRadius = 2;
inline constexpr int kMaxPrey = 4;

enum ViewCell : int { kEmpty = 0, kWall = 1, kPredator = 2, kPrey = 3 };

struct PpState {
  std::int8_t pred_x[kMaxAgents], pred_y[kMaxAgents];
  std::int8_t prey_x[kMaxPrey], prey_y[kMaxPrey];
  std::int8_t prey_alive[kMaxPrey];
  std::int16_t step;
};

// Observation: 5x5 view centred on the predator, 2 bits per cell, row-major
// from the top-left (50 bits).
inline int ViewAt(Observation obs, int dx, int dy) {
  const int k = (dy + kViewRadius) * (2 * kViewRadius + 1) + dx + kViewRadius;
  return static_cast<int>((obs >> (2 * k)) & 3);
}

class PredatorPreyModel final : public PosgModel {
 public:
  PredatorPreyModel(GridLayout layout, int num_predators, int prey_strength,
                    int num_prey, int prey_move_period);

  std::string Id() const override { return "predator_prey"; }
  int NumAgents() const override { return num_predators_; }
  int NumActions(AgentId) const override { return kNumActions; }
  RewardRange Rewards(AgentId) const override { return {0.0, 1.0}; }
  double Discount() const override { return 0.99; }
  bool IsSymmetric() const override { return true; }

  State SampleInitialState(Rng& rng) const override;
  JointObservation SampleInitialObservations(const State& state,
                                             Rng& rng) const override;
  bool IsTerminal(const State& state) const override;
  int StepCount(const State& state) const override {
    return state.Unpack<PpState>().step;
  }
  int StepLimit() const override { return kStepLimit; }
  std::string StateToString(const State& state) const override;

  const GridLayout& layout() const { return layout_; }
  int num_prey() const { return num_prey_; }
  int prey_strength() const { return prey_strength_; }
  Observation ObservationFor(const PpState& s, AgentId agent) const;
  // Exposed for tests: moves prey k of `s` in place.
  void MovePrey(PpState& s, int k) const;
  // Resolves captures in place; returns the number of prey captured.
  int ResolveCaptures(PpState& s) const;

 protected:
  GenerativeStep DoStep(const State& state, const JointAction& action,
                        Rng& rng) const override;

 private:
  bool Occupied(const PpState& s, Coord c) const;

  GridLayout layout_;
  int num_predators_;
  int prey_strength_;
  int num_prey_;
  int prey_move_period_;
  std::vector<Coord> perimeter_;
  std::vector<Coord> prey_starts_;
};

std::shared_ptr<const PredatorPreyModel> MakePredatorPrey(
    int num_predators, int prey_strength, int num_prey,
    const std::string& layout_id = "pp10", int prey_move_period = 1);

}  // namespace pp
}  // namespace potmmcp

#endif  // POTMMCP_PREDATOR_PREY_H_
