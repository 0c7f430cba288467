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

#include "potmmcp/heuristics.h"

#include <algorithm>
#include <climits>
#include <cstdlib>

namespace potmmcp {
namespace {

void MixUniform(std::span<double> out, double noise) {
  const double share = noise / static_cast<double>(out.size());
  for (double& p : out) p = (1.0 - noise) * p + share;
}

// Spreads `mass` uniformly over the flagged entries.
void Spread(std::span<double> out, const std::array<bool, 5>& flags,
            int count, int offset, double mass) {
  if (count == 0) return;
  for (int k = 0; k < 5; ++k) {
    if (flags[k]) out[static_cast<std::size_t>(k + offset)] += mass / count;
  }
}

}  // namespace

// --- Driving -----------------------------------------------------------

DrivingPolicy::DrivingPolicy(
    std::string id, std::shared_ptr<const driving::DrivingModel> model,
    Config config)
    : Policy(std::move(id), "driving_shortest_path", driving::kNumActions),
      model_(std::move(model)),
      config_(config) {
  if (config_.target_speed < 1 || config_.target_speed > driving::kMaxSpeed) {
    throw ConfigError("driving target_speed must be 1 or 2");
  }
  if (!(config_.yield_prob >= 0 && config_.yield_prob <= 1 &&
        config_.noise >= 0 && config_.noise <= 1)) {
    throw ConfigError("driving yield_prob and noise must lie in [0, 1]");
  }
}

PolicyState DrivingPolicy::InitialState(
    std::optional<Observation> initial) const {
  return PolicyState::Pack(Memory{initial.value_or(0), 0});
}

PolicyState DrivingPolicy::NextState(const PolicyState& state, Action,
                                     Observation obs) const {
  Memory m = state.Unpack<Memory>();
  m.obs = obs;
  m.step = static_cast<std::int16_t>(m.step + 1);
  return PolicyState::Pack(m);
}

bool DrivingPolicy::IsTerminalState(const PolicyState& state) const {
  const auto o = driving::DecodeObs(state.Unpack<Memory>().obs);
  return o.arrived || o.crashed;
}

void DrivingPolicy::ActionDist(const PolicyState& state,
                               std::span<double> out) const {
  using namespace driving;
  std::fill(out.begin(), out.end(), 0.0);
  const DrivingObs o = DecodeObs(state.Unpack<Memory>().obs);
  if (o.arrived || o.crashed) {
    out[kNoop] = 1.0;
    return;
  }
  const GridLayout& layout = model_->layout();
  const Coord here = layout.FromIndex(o.cell);
  auto dist = [&](Coord c) {
    return model_->DistanceToDestination(o.dest_index, c);
  };
  const int h = o.heading;
  int best = -1;
  int best_dist = INT_MAX;
  for (int k = 0; k < 4; ++k) {
    const int d = (h + k) % 4;  // current heading wins ties
    const Coord n = here.Step(d);
    if (layout.IsWall(n)) continue;
    const int nd = dist(n);
    if (nd >= 0 && nd < best_dist) {
      best_dist = nd;
      best = d;
    }
  }
  std::array<double, kNumActions> intent{};
  if (best < 0) {
    intent[kNoop] = 1.0;
  } else if (best != h) {
    if (best == (h + 1) % 4) {
      intent[kTurnRight] = 1.0;
    } else if (best == (h + 3) % 4) {
      intent[kTurnLeft] = 1.0;
    } else {
      intent[o.speed > 0 ? kDecelerate : kTurnRight] = 1.0;
    }
  } else {
    int run = 0;
    const int d0 = dist(here);
    for (int k = 1; k <= kMaxSpeed; ++k) {
      const Coord c{here.x + kDx[h] * k, here.y + kDy[h] * k};
      if (layout.IsWall(c) || dist(c) != d0 - k) break;
      run = k;
    }
    const int want = std::min(config_.target_speed, std::max(run, 1));
    const int normal = o.speed < want   ? kAccelerate
                       : o.speed > want ? kDecelerate
                                        : kNoop;
    // Another vehicle on or beside the next two cells of the path.
    bool conflict = false;
    const int right = (h + 1) % 4;
    for (int k = 1; k <= 2 && !conflict; ++k) {
      for (int lat = -1; lat <= 1; ++lat) {
        const int dx = kDx[h] * k + kDx[right] * lat;
        const int dy = kDy[h] * k + kDy[right] * lat;
        const int idx = (dy + kViewRadius) * 5 + (dx + kViewRadius);
        if (o.view[idx] == kVehicle) conflict = true;
      }
    }
    if (conflict) {
      const int yield = o.speed > 0 ? kDecelerate : kNoop;
      intent[yield] += config_.yield_prob;
      intent[normal] += 1.0 - config_.yield_prob;
    } else {
      intent[normal] = 1.0;
    }
  }
  std::copy(intent.begin(), intent.end(), out.begin());
  MixUniform(out, config_.noise);
}

std::optional<std::uint64_t> DrivingPolicy::ValueFeature(
    const PolicyState& state) const {
  const Memory m = state.Unpack<Memory>();
  const auto o = driving::DecodeObs(m.obs);
  bool vehicle = false;
  for (int v : o.view) vehicle |= v == driving::kVehicle;
  const std::uint64_t bucket = std::min<std::uint64_t>(m.step / 5, 15);
  return static_cast<std::uint64_t>(o.cell) |
         static_cast<std::uint64_t>(o.heading) << 6 |
         static_cast<std::uint64_t>(o.speed) << 8 |
         static_cast<std::uint64_t>(vehicle) << 10 | bucket << 11 |
         static_cast<std::uint64_t>(o.dest_index) << 15;
}

nlohmann::json DrivingPolicy::Params() const {
  return {{"target_speed", config_.target_speed},
          {"yield_prob", config_.yield_prob},
          {"noise", config_.noise}};
}

// --- Pursuit-evasion ---------------------------------------------------

PursuitEvasionPolicy::PursuitEvasionPolicy(
    std::string id, Kind kind,
    std::shared_ptr<const pe::PursuitEvasionModel> model, Config config)
    : Policy(std::move(id), FamilyName(kind), pe::kNumActions),
      kind_(kind),
      model_(std::move(model)),
      config_(config) {
  const int goals = static_cast<int>(model_->goals().size());
  if (kind_ == Kind::kPursuerAmbush &&
      (config_.goal < 0 || config_.goal >= goals)) {
    throw ConfigError("ambush goal index out of range");
  }
  if (kind_ == Kind::kEvaderWaypoint) {
    const Coord w{config_.waypoint_x, config_.waypoint_y};
    if (model_->layout().IsWall(w)) {
      throw ConfigError("waypoint lies on a wall");
    }
    waypoint_distance_ = model_->layout().DistancesTo(w);
  }
  if (!(config_.noise >= 0 && config_.noise <= 1 && config_.retreat >= 0 &&
        config_.retreat <= 1)) {
    throw ConfigError("noise and retreat must lie in [0, 1]");
  }
}

PursuitEvasionPolicy::Kind PursuitEvasionPolicy::KindFromFamily(
    const std::string& family) {
  if (family == "pe_evader_direct") return Kind::kEvaderDirect;
  if (family == "pe_evader_cautious") return Kind::kEvaderCautious;
  if (family == "pe_evader_waypoint") return Kind::kEvaderWaypoint;
  if (family == "pe_evader_random") return Kind::kEvaderRandom;
  if (family == "pe_pursuer_ambush") return Kind::kPursuerAmbush;
  if (family == "pe_pursuer_patrol") return Kind::kPursuerPatrol;
  throw ConfigError("unknown pursuit-evasion family '" + family + "'");
}

std::string PursuitEvasionPolicy::FamilyName(Kind kind) {
  switch (kind) {
    case Kind::kEvaderDirect:
      return "pe_evader_direct";
    case Kind::kEvaderCautious:
      return "pe_evader_cautious";
    case Kind::kEvaderWaypoint:
      return "pe_evader_waypoint";
    case Kind::kEvaderRandom:
      return "pe_evader_random";
    case Kind::kPursuerAmbush:
      return "pe_pursuer_ambush";
    case Kind::kPursuerPatrol:
      return "pe_pursuer_patrol";
  }
  return "?";
}

bool PursuitEvasionPolicy::is_evader() const {
  return kind_ == Kind::kEvaderDirect || kind_ == Kind::kEvaderCautious ||
         kind_ == Kind::kEvaderWaypoint || kind_ == Kind::kEvaderRandom;
}

PolicyState PursuitEvasionPolicy::InitialState(
    std::optional<Observation> initial) const {
  const Observation o = initial.value_or(0);
  const Coord start =
      is_evader() ? model_->evader_start() : model_->pursuer_start();
  Memory m{};
  m.x = static_cast<std::int8_t>(start.x);
  m.y = static_cast<std::int8_t>(start.y);
  m.facing = kNorth;
  m.walls = static_cast<std::int8_t>(o & 15);
  m.heard = static_cast<std::int8_t>((o & pe::kHeardBit) != 0);
  m.mode = 0;
  m.step = 0;
  const int goals = static_cast<int>(model_->goals().size());
  if (is_evader()) {
    m.target = static_cast<std::int8_t>(pe::GoalFromInitialObs(o) % goals);
  } else if (kind_ == Kind::kPursuerAmbush) {
    m.target = static_cast<std::int8_t>(config_.goal);
  } else {
    m.target = static_cast<std::int8_t>(config_.reverse ? goals - 1 : 0);
  }
  return PolicyState::Pack(m);
}

PolicyState PursuitEvasionPolicy::NextState(const PolicyState& state,
                                            Action action,
                                            Observation obs) const {
  Memory m = state.Unpack<Memory>();
  if (((m.walls >> action) & 1) == 0) {
    m.x = static_cast<std::int8_t>(m.x + kDx[action]);
    m.y = static_cast<std::int8_t>(m.y + kDy[action]);
  }
  m.facing = static_cast<std::int8_t>(action);
  m.walls = static_cast<std::int8_t>(obs & 15);
  m.heard = static_cast<std::int8_t>((obs & pe::kHeardBit) != 0);
  m.step = static_cast<std::int16_t>(m.step + 1);
  const Coord here{m.x, m.y};
  const int goals = static_cast<int>(model_->goals().size());
  if (kind_ == Kind::kPursuerPatrol && here == model_->goals()[m.target]) {
    const int step = config_.reverse ? goals - 1 : 1;
    m.target = static_cast<std::int8_t>((m.target + step) % goals);
  }
  if (kind_ == Kind::kEvaderWaypoint && m.mode == 0 &&
      here == Coord{config_.waypoint_x, config_.waypoint_y}) {
    m.mode = 1;
  }
  return PolicyState::Pack(m);
}

void PursuitEvasionPolicy::TowardCell(const Memory& m,
                                      const std::vector<int>& dist,
                                      std::span<double> out) const {
  const GridLayout& layout = model_->layout();
  const Coord here{m.x, m.y};
  std::array<bool, 5> open{};
  std::array<bool, 5> best{};
  int n_open = 0;
  int best_dist = INT_MAX;
  for (int d = 0; d < 4; ++d) {
    if ((m.walls >> d) & 1) continue;
    open[d] = true;
    ++n_open;
    const Coord n = here.Step(d);
    const int nd = layout.InBounds(n) ? dist[layout.Index(n)] : -1;
    if (nd >= 0 && nd < best_dist) best_dist = nd;
  }
  int n_best = 0;
  for (int d = 0; d < 4; ++d) {
    if (!open[d]) continue;
    const Coord n = here.Step(d);
    if (layout.InBounds(n) && dist[layout.Index(n)] == best_dist) {
      best[d] = true;
      ++n_best;
    }
  }
  std::fill(out.begin(), out.end(), 0.0);
  if (n_best == 0) {
    Spread(out, open, n_open, 0, 1.0);
  } else {
    Spread(out, best, n_best, 0, 1.0 - config_.noise);
    Spread(out, open, n_open, 0, config_.noise);
  }
  if (n_open == 0) std::fill(out.begin(), out.end(), 0.25);
}

void PursuitEvasionPolicy::ActionDist(const PolicyState& state,
                                      std::span<double> out) const {
  const Memory m = state.Unpack<Memory>();
  const GridLayout& layout = model_->layout();
  const Coord here{m.x, m.y};
  std::array<bool, 5> open{};
  int n_open = 0;
  for (int d = 0; d < 4; ++d) {
    if (((m.walls >> d) & 1) == 0) {
      open[d] = true;
      ++n_open;
    }
  }
  auto goal_distances = [&](int g) -> const std::vector<int>& {
    return model_->GoalDistances(g);
  };
  switch (kind_) {
    case Kind::kEvaderDirect:
    case Kind::kPursuerPatrol:
      TowardCell(m, goal_distances(m.target), out);
      break;
    case Kind::kEvaderCautious: {
      TowardCell(m, goal_distances(m.target), out);
      const int back = (m.facing + 2) % 4;
      if (m.heard && open[back]) {
        for (double& p : out) p *= 1.0 - config_.retreat;
        out[back] += config_.retreat;
      }
      break;
    }
    case Kind::kEvaderWaypoint:
      TowardCell(m, m.mode == 0 ? waypoint_distance_ : goal_distances(m.target),
                 out);
      break;
    case Kind::kEvaderRandom:
      std::fill(out.begin(), out.end(), 0.0);
      Spread(out, open, n_open, 0, 1.0);
      if (n_open == 0) std::fill(out.begin(), out.end(), 0.25);
      break;
    case Kind::kPursuerAmbush: {
      const auto& dist = goal_distances(m.target);
      if (dist[layout.Index(here)] > config_.radius) {
        TowardCell(m, dist, out);
        break;
      }
      std::array<bool, 5> inside{};
      int n_inside = 0;
      for (int d = 0; d < 4; ++d) {
        if (!open[d]) continue;
        const Coord n = here.Step(d);
        if (dist[layout.Index(n)] <= config_.radius) {
          inside[d] = true;
          ++n_inside;
        }
      }
      std::fill(out.begin(), out.end(), 0.0);
      Spread(out, inside, n_inside, 0, 1.0);
      if (n_inside == 0) Spread(out, open, n_open, 0, 1.0);
      if (n_open == 0) std::fill(out.begin(), out.end(), 0.25);
      break;
    }
  }
}

std::optional<std::uint64_t> PursuitEvasionPolicy::ValueFeature(
    const PolicyState& state) const {
  const Memory m = state.Unpack<Memory>();
  const std::uint64_t bucket = std::min<std::uint64_t>(m.step / 10, 15);
  return static_cast<std::uint64_t>(m.x) |
         static_cast<std::uint64_t>(m.y) << 4 |
         static_cast<std::uint64_t>(m.target) << 8 |
         static_cast<std::uint64_t>(m.mode) << 10 |
         static_cast<std::uint64_t>(m.heard) << 11 | bucket << 12;
}

nlohmann::json PursuitEvasionPolicy::Params() const {
  nlohmann::json j = {{"noise", config_.noise}};
  switch (kind_) {
    case Kind::kEvaderCautious:
      j["retreat"] = config_.retreat;
      break;
    case Kind::kEvaderWaypoint:
      j["waypoint"] = {config_.waypoint_x, config_.waypoint_y};
      break;
    case Kind::kPursuerAmbush:
      j["goal"] = config_.goal;
      j["radius"] = config_.radius;
      break;
    case Kind::kPursuerPatrol:
      j["reverse"] = config_.reverse;
      break;
    default:
      break;
  }
  return j;
}

// --- Predator-prey -----------------------------------------------------

PredatorPolicy::PredatorPolicy(std::string id,
                               std::shared_ptr<const pp::PredatorPreyModel> model,
                               Config config)
    : Policy(std::move(id), "pp_predator", pp::kNumActions),
      model_(std::move(model)),
      config_(config) {
  if (config_.turn != 1 && config_.turn != -1) {
    throw ConfigError("predator turn must be 1 or -1");
  }
  if (config_.start_heading < 0 || config_.start_heading > 3) {
    throw ConfigError("predator start_heading must lie in [0, 3]");
  }
  if (!(config_.noise >= 0 && config_.noise <= 1)) {
    throw ConfigError("predator noise must lie in [0, 1]");
  }
}

PolicyState PredatorPolicy::InitialState(
    std::optional<Observation> initial) const {
  Memory m{};
  m.obs = initial.value_or(0);
  m.heading = static_cast<std::int8_t>(config_.start_heading);
  m.step = 0;
  return PolicyState::Pack(m);
}

PolicyState PredatorPolicy::NextState(const PolicyState& state, Action action,
                                      Observation obs) const {
  Memory m = state.Unpack<Memory>();
  if (action > 0) m.heading = static_cast<std::int8_t>(action - 1);
  m.obs = obs;
  m.step = static_cast<std::int16_t>(m.step + 1);
  return PolicyState::Pack(m);
}

int PredatorPolicy::ExploreHeading(Observation obs, int heading) const {
  const int turn = config_.turn == 1 ? 1 : 3;
  for (int h : {heading, (heading + turn) % 4, (heading + 4 - turn) % 4,
                (heading + 2) % 4}) {
    if (pp::ViewAt(obs, kDx[h], kDy[h]) == pp::kEmpty) return h;
  }
  return -1;
}

void PredatorPolicy::ActionDist(const PolicyState& state,
                                std::span<double> out) const {
  using namespace pp;
  const Memory m = state.Unpack<Memory>();
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<Coord> prey;
  std::vector<Coord> mates;
  for (int dy = -kViewRadius; dy <= kViewRadius; ++dy) {
    for (int dx = -kViewRadius; dx <= kViewRadius; ++dx) {
      const int code = ViewAt(m.obs, dx, dy);
      if (code == kPrey) prey.push_back({dx, dy});
      if (code == kPredator) mates.push_back({dx, dy});
    }
  }
  const Coord me{0, 0};
  auto nearest = [&](const std::vector<Coord>& cells) {
    Coord best = cells.front();
    for (const Coord& c : cells) {
      if (Manhattan(me, c) < Manhattan(me, best)) best = c;
    }
    return best;
  };
  // Moves (action index) that strictly reduce the distance to `goal`.
  auto approach = [&](Coord goal) {
    std::array<bool, 5> good{};
    int count = 0;
    for (int d = 0; d < 4; ++d) {
      const Coord n{kDx[d], kDy[d]};
      if (ViewAt(m.obs, n.x, n.y) != kEmpty) continue;
      if (Manhattan(n, goal) < Manhattan(me, goal)) {
        good[d + 1] = true;
        ++count;
      }
    }
    if (count == 0) {
      good[0] = true;
      count = 1;
    }
    Spread(out, good, count, 0, 1.0);
  };

  if (!prey.empty()) {
    const Coord target = nearest(prey);
    Coord goal = target;
    if (config_.mode == Mode::kFlank && !mates.empty()) {
      // The free side of the prey farthest from the teammate.
      const Coord mate = nearest(mates);
      int best = -1;
      for (int d = 0; d < 4; ++d) {
        const Coord side = target.Step(d);
        const bool visible = std::abs(side.x) <= kViewRadius &&
                             std::abs(side.y) <= kViewRadius;
        if (visible && ViewAt(m.obs, side.x, side.y) == kWall) continue;
        if (best < 0 || Manhattan(side, mate) > Manhattan(goal, mate)) {
          best = d;
          goal = side;
        }
      }
    }
    const bool at_goal = goal == target ? Manhattan(me, target) == 1
                                        : goal == me;
    if (at_goal) {
      out[0] = 1.0;
    } else {
      approach(goal);
    }
  } else if (config_.mode == Mode::kFollow && !mates.empty() &&
             Manhattan(me, nearest(mates)) > 2) {
    approach(nearest(mates));
  } else {
    const int h = ExploreHeading(m.obs, m.heading);
    out[h < 0 ? 0 : h + 1] = 1.0;
  }
  MixUniform(out, config_.noise);
}

std::optional<std::uint64_t> PredatorPolicy::ValueFeature(
    const PolicyState& state) const {
  using namespace pp;
  const Memory m = state.Unpack<Memory>();
  std::uint64_t nearest = 25;
  int best = INT_MAX;
  std::uint64_t n_prey = 0;
  std::uint64_t mate = 0;
  for (int dy = -kViewRadius; dy <= kViewRadius; ++dy) {
    for (int dx = -kViewRadius; dx <= kViewRadius; ++dx) {
      const int code = ViewAt(m.obs, dx, dy);
      if (code == kPredator) mate = 1;
      if (code != kPrey) continue;
      ++n_prey;
      const int d = std::abs(dx) + std::abs(dy);
      if (d < best) {
        best = d;
        nearest = static_cast<std::uint64_t>((dy + 2) * 5 + dx + 2);
      }
    }
  }
  const std::uint64_t bucket = std::min<std::uint64_t>(m.step / 5, 15);
  return nearest | mate << 5 | std::min<std::uint64_t>(n_prey, 3) << 6 |
         bucket << 8;
}

nlohmann::json PredatorPolicy::Params() const {
  const char* mode = config_.mode == Mode::kNearest ? "nearest"
                     : config_.mode == Mode::kFlank ? "flank"
                                                    : "follow";
  return {{"mode", mode},
          {"turn", config_.turn},
          {"start_heading", config_.start_heading},
          {"noise", config_.noise}};
}

}  // namespace potmmcp
