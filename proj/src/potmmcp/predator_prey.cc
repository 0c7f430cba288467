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

#include "potmmcp/predator_prey.h"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace potmmcp {
namespace pp {
namespace {

int Chebyshev(Coord a, Coord b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

}  // namespace

PredatorPreyModel::PredatorPreyModel(GridLayout layout, int num_predators,
                                     int prey_strength, int num_prey,
                                     int prey_move_period)
    : layout_(std::move(layout)),
      num_predators_(num_predators),
      prey_strength_(prey_strength),
      num_prey_(num_prey),
      prey_move_period_(prey_move_period) {
  if (num_predators != 2 && num_predators != 4) {
    throw ConfigError("predator-prey supports 2 or 4 predators");
  }
  if (prey_strength < 1 || prey_strength > num_predators ||
      prey_strength > 4) {
    throw ConfigError("prey strength must lie in [1, min(4, predators)]");
  }
  prey_starts_ = layout_.Find('p');
  if (num_prey < 1 || num_prey > kMaxPrey ||
      num_prey > static_cast<int>(prey_starts_.size())) {
    throw ConfigError("layout '" + layout_.name() + "' has " +
                      std::to_string(prey_starts_.size()) +
                      " prey starts; requested " + std::to_string(num_prey));
  }
  if (prey_move_period < 1) {
    throw ConfigError("prey move period must be >= 1");
  }
  prey_starts_.resize(static_cast<std::size_t>(num_prey));
  for (int k = 0; k < layout_.NumCells(); ++k) {
    const Coord c = layout_.FromIndex(k);
    const bool edge = c.x == 0 || c.y == 0 || c.x == layout_.width() - 1 ||
                      c.y == layout_.height() - 1;
    if (edge && layout_.At(c) == '.') perimeter_.push_back(c);
  }
  if (static_cast<int>(perimeter_.size()) < num_predators) {
    throw ConfigError("not enough free perimeter cells for the predators");
  }
}

State PredatorPreyModel::SampleInitialState(Rng& rng) const {
  PpState s{};
  std::vector<int> taken;
  for (AgentId i = 0; i < num_predators_; ++i) {
    int k;
    do {
      k = rng.UniformInt(static_cast<int>(perimeter_.size()));
    } while (std::find(taken.begin(), taken.end(), k) != taken.end());
    taken.push_back(k);
    s.pred_x[i] = static_cast<std::int8_t>(perimeter_[k].x);
    s.pred_y[i] = static_cast<std::int8_t>(perimeter_[k].y);
  }
  for (int k = 0; k < num_prey_; ++k) {
    s.prey_x[k] = static_cast<std::int8_t>(prey_starts_[k].x);
    s.prey_y[k] = static_cast<std::int8_t>(prey_starts_[k].y);
    s.prey_alive[k] = 1;
  }
  s.step = 0;
  return State::Pack(s);
}

Observation PredatorPreyModel::ObservationFor(const PpState& s,
                                              AgentId agent) const {
  const Coord me{s.pred_x[agent], s.pred_y[agent]};
  Observation obs = 0;
  int k = 0;
  for (int dy = -kViewRadius; dy <= kViewRadius; ++dy) {
    for (int dx = -kViewRadius; dx <= kViewRadius; ++dx, ++k) {
      const Coord c{me.x + dx, me.y + dy};
      int code = kEmpty;
      if (layout_.IsWall(c)) {
        code = kWall;
      } else if (dx != 0 || dy != 0) {
        for (AgentId j = 0; j < num_predators_; ++j) {
          if (s.pred_x[j] == c.x && s.pred_y[j] == c.y) code = kPredator;
        }
        for (int p = 0; p < num_prey_; ++p) {
          if (s.prey_alive[p] && s.prey_x[p] == c.x && s.prey_y[p] == c.y) {
            code = kPrey;
          }
        }
      }
      obs |= static_cast<Observation>(code) << (2 * k);
    }
  }
  return obs;
}

JointObservation PredatorPreyModel::SampleInitialObservations(
    const State& state, Rng&) const {
  const auto s = state.Unpack<PpState>();
  JointObservation obs(num_predators_);
  for (AgentId i = 0; i < num_predators_; ++i) obs[i] = ObservationFor(s, i);
  return obs;
}

bool PredatorPreyModel::IsTerminal(const State& state) const {
  const auto s = state.Unpack<PpState>();
  if (s.step >= kStepLimit) return true;
  for (int k = 0; k < num_prey_; ++k) {
    if (s.prey_alive[k]) return false;
  }
  return true;
}

bool PredatorPreyModel::Occupied(const PpState& s, Coord c) const {
  for (AgentId j = 0; j < num_predators_; ++j) {
    if (s.pred_x[j] == c.x && s.pred_y[j] == c.y) return true;
  }
  for (int p = 0; p < num_prey_; ++p) {
    if (s.prey_alive[p] && s.prey_x[p] == c.x && s.prey_y[p] == c.y) {
      return true;
    }
  }
  return false;
}

int PredatorPreyModel::ResolveCaptures(PpState& s) const {
  int captured = 0;
  for (int p = 0; p < num_prey_; ++p) {
    if (!s.prey_alive[p]) continue;
    const Coord prey{s.prey_x[p], s.prey_y[p]};
    int adjacent = 0;
    for (AgentId j = 0; j < num_predators_; ++j) {
      if (Manhattan(prey, {s.pred_x[j], s.pred_y[j]}) == 1) ++adjacent;
    }
    if (adjacent >= prey_strength_) {
      s.prey_alive[p] = 0;
      ++captured;
    }
  }
  return captured;
}

void PredatorPreyModel::MovePrey(PpState& s, int k) const {
  constexpr int kUnseen = std::numeric_limits<int>::max();
  const Coord here{s.prey_x[k], s.prey_y[k]};
  // Candidate order: stay, N, E, S, W.
  Coord best = here;
  std::pair<int, int> best_score{-1, -1};
  for (int m = 0; m < 5; ++m) {
    const Coord c = m == 0 ? here : here.Step(m - 1);
    if (m != 0 && (layout_.IsWall(c) || Occupied(s, c))) continue;
    int to_pred = kUnseen;
    for (AgentId j = 0; j < num_predators_; ++j) {
      const Coord pred{s.pred_x[j], s.pred_y[j]};
      if (Chebyshev(here, pred) <= kViewRadius) {
        to_pred = std::min(to_pred, Manhattan(c, pred));
      }
    }
    int to_prey = kUnseen;
    for (int q = 0; q < num_prey_; ++q) {
      if (q == k || !s.prey_alive[q]) continue;
      const Coord other{s.prey_x[q], s.prey_y[q]};
      if (Chebyshev(here, other) <= kViewRadius) {
        to_prey = std::min(to_prey, Manhattan(c, other));
      }
    }
    const std::pair<int, int> score{to_pred, to_prey};
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  s.prey_x[k] = static_cast<std::int8_t>(best.x);
  s.prey_y[k] = static_cast<std::int8_t>(best.y);
}

GenerativeStep PredatorPreyModel::DoStep(const State& state,
                                         const JointAction& action,
                                         Rng&) const {
  auto s = state.Unpack<PpState>();
  const int n = num_predators_;
  GenerativeStep out;
  out.joint_reward = JointReward(n, 0.0);
  out.joint_obs = JointObservation(n);
  if (!IsTerminal(State::Pack(s))) {
    for (AgentId i = 0; i < n; ++i) {
      if (action[i] == 0) continue;
      const Coord c = Coord{s.pred_x[i], s.pred_y[i]}.Step(action[i] - 1);
      if (layout_.IsWall(c) || Occupied(s, c)) continue;
      s.pred_x[i] = static_cast<std::int8_t>(c.x);
      s.pred_y[i] = static_cast<std::int8_t>(c.y);
    }
    int captured = ResolveCaptures(s);
    if (s.step % prey_move_period_ == 0) {
      for (int k = 0; k < num_prey_; ++k) {
        if (s.prey_alive[k]) MovePrey(s, k);
      }
      captured += ResolveCaptures(s);
    }
    s.step = static_cast<std::int16_t>(s.step + 1);
    const double reward =
        static_cast<double>(captured) / static_cast<double>(num_prey_);
    for (AgentId i = 0; i < n; ++i) out.joint_reward[i] = reward;
  }
  for (AgentId i = 0; i < n; ++i) out.joint_obs[i] = ObservationFor(s, i);
  out.next_state = State::Pack(s);
  return out;
}

std::string PredatorPreyModel::StateToString(const State& state) const {
  const auto s = state.Unpack<PpState>();
  std::ostringstream out;
  out << "step " << s.step;
  for (AgentId i = 0; i < num_predators_; ++i) {
    out << " pred" << i << " (" << int{s.pred_x[i]} << "," << int{s.pred_y[i]}
        << ")";
  }
  for (int k = 0; k < num_prey_; ++k) {
    out << " prey" << k << (s.prey_alive[k] ? " (" : " x(")
        << int{s.prey_x[k]} << "," << int{s.prey_y[k]} << ")";
  }
  return out.str();
}

std::shared_ptr<const PredatorPreyModel> MakePredatorPrey(
    int num_predators, int prey_strength, int num_prey,
    const std::string& layout_id, int prey_move_period) {
  return std::make_shared<PredatorPreyModel>(GridLayout::Load(layout_id),
                                             num_predators, prey_strength,
                                             num_prey, prey_move_period);
}

}  // namespace pp
}  // namespace potmmcp
