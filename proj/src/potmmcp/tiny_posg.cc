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
#include <sstream>

namespace potmmcp {
namespace {

constexpr double kRowTolerance = 1e-9;

void CheckRow(const std::vector<double>& row, std::size_t expected_size,
              const std::string& name) {
  if (row.size() != expected_size) {
    throw ValidationError(name + " has " + std::to_string(row.size()) +
                          " entries, expected " +
                          std::to_string(expected_size));
  }
  double total = 0.0;
  for (double p : row) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw ValidationError(name + " has a negative or non-finite entry");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kRowTolerance) {
    std::ostringstream msg;
    msg.precision(12);
    msg << name << " sums to " << total << ", not 1";
    throw ValidationError(msg.str());
  }
}

int SampleRow(const std::vector<double>& row, Rng& rng) {
  return rng.Categorical(row);
}

}  // namespace

void ValidateTinyTables(const TinyTables& t) {
  const int ns = t.num_states;
  if (ns < 1) throw ValidationError("num_states must be >= 1");
  for (int k = 0; k < 2; ++k) {
    if (t.num_actions[k] < 1) {
      throw ValidationError("agent " + std::to_string(k) +
                            " needs at least one action");
    }
    if (t.num_observations[k] < 1) {
      throw ValidationError("agent " + std::to_string(k) +
                            " needs at least one observation");
    }
  }
  if (!(t.discount >= 0.0 && t.discount < 1.0)) {
    throw ValidationError("discount must lie in [0, 1)");
  }
  CheckRow(t.initial, static_cast<std::size_t>(ns), "initial");
  const int na0 = t.num_actions[0];
  const int na1 = t.num_actions[1];
  if (static_cast<int>(t.transition.size()) != ns) {
    throw ValidationError("transition must have one block per state");
  }
  for (int s = 0; s < ns; ++s) {
    if (static_cast<int>(t.transition[s].size()) != na0) {
      throw ValidationError("transition[" + std::to_string(s) +
                            "] has wrong action count");
    }
    for (int a0 = 0; a0 < na0; ++a0) {
      if (static_cast<int>(t.transition[s][a0].size()) != na1) {
        throw ValidationError("transition[" + std::to_string(s) + "][" +
                              std::to_string(a0) +
                              "] has wrong action count");
      }
      for (int a1 = 0; a1 < na1; ++a1) {
        CheckRow(t.transition[s][a0][a1], static_cast<std::size_t>(ns),
                 "transition[" + std::to_string(s) + "][" +
                     std::to_string(a0) + "][" + std::to_string(a1) + "]");
      }
    }
  }
  for (int k = 0; k < 2; ++k) {
    const std::string agent = std::to_string(k);
    const auto no = static_cast<std::size_t>(t.num_observations[k]);
    if (static_cast<int>(t.initial_obs[k].size()) != ns) {
      throw ValidationError("initial_obs[" + agent +
                            "] must have one row per state");
    }
    for (int s = 0; s < ns; ++s) {
      CheckRow(t.initial_obs[k][s], no,
               "initial_obs[" + agent + "][" + std::to_string(s) + "]");
    }
    if (static_cast<int>(t.observation[k].size()) != ns) {
      throw ValidationError("observation[" + agent +
                            "] must have one block per state");
    }
    if (static_cast<int>(t.reward[k].size()) != ns) {
      throw ValidationError("reward[" + agent +
                            "] must have one block per state");
    }
    const RewardRange range = t.reward_range[k];
    if (range.min > range.max) {
      throw ValidationError("reward_range[" + agent + "] is inverted");
    }
    for (int s = 0; s < ns; ++s) {
      if (static_cast<int>(t.observation[k][s].size()) != na0 ||
          static_cast<int>(t.reward[k][s].size()) != na0) {
        throw ValidationError("observation/reward[" + agent + "][" +
                              std::to_string(s) + "] has wrong action count");
      }
      for (int a0 = 0; a0 < na0; ++a0) {
        if (static_cast<int>(t.observation[k][s][a0].size()) != na1 ||
            static_cast<int>(t.reward[k][s][a0].size()) != na1) {
          throw ValidationError("observation/reward[" + agent + "][" +
                                std::to_string(s) + "][" +
                                std::to_string(a0) +
                                "] has wrong action count");
        }
        for (int a1 = 0; a1 < na1; ++a1) {
          CheckRow(t.observation[k][s][a0][a1], no,
                   "observation[" + agent + "][" + std::to_string(s) + "][" +
                       std::to_string(a0) + "][" + std::to_string(a1) + "]");
          const double r = t.reward[k][s][a0][a1];
          if (!(r >= range.min && r <= range.max)) {
            throw ValidationError(
                "reward[" + agent + "][" + std::to_string(s) + "][" +
                std::to_string(a0) + "][" + std::to_string(a1) +
                "] lies outside the declared reward range");
          }
        }
      }
    }
  }
}

TinyPosgModel::TinyPosgModel(std::string id, TinyTables tables)
    : id_(std::move(id)), tables_(std::move(tables)) {
  ValidateTinyTables(tables_);
}

State TinyPosgModel::SampleInitialState(Rng& rng) const {
  return Encode(SampleRow(tables_.initial, rng));
}

JointObservation TinyPosgModel::SampleInitialObservations(const State& state,
                                                          Rng& rng) const {
  const int s = Decode(state);
  JointObservation obs(2);
  for (int k = 0; k < 2; ++k) {
    obs[k] = static_cast<Observation>(SampleRow(tables_.initial_obs[k][s], rng));
  }
  return obs;
}

GenerativeStep TinyPosgModel::DoStep(const State& state,
                                     const JointAction& action,
                                     Rng& rng) const {
  const int s = Decode(state);
  const Action a0 = action[0];
  const Action a1 = action[1];
  const int next = SampleRow(tables_.transition[s][a0][a1], rng);
  GenerativeStep out;
  out.next_state = Encode(next);
  out.joint_obs = JointObservation(2);
  out.joint_reward = JointReward(2);
  for (int k = 0; k < 2; ++k) {
    out.joint_obs[k] = static_cast<Observation>(
        SampleRow(tables_.observation[k][next][a0][a1], rng));
    out.joint_reward[k] = tables_.reward[k][s][a0][a1];
  }
  return out;
}

std::string TinyPosgModel::StateToString(const State& state) const {
  return "s" + std::to_string(Decode(state));
}

std::shared_ptr<const TinyPosgModel> TinyPosgModel::FromJson(
    const nlohmann::json& j) {
  try {
    TinyTables t;
    t.num_states = j.at("num_states").get<int>();
    t.num_actions = j.at("num_actions").get<std::array<int, 2>>();
    t.num_observations = j.at("num_observations").get<std::array<int, 2>>();
    t.discount = j.at("discount").get<double>();
    t.initial = j.at("initial").get<std::vector<double>>();
    for (int k = 0; k < 2; ++k) {
      t.initial_obs[k] =
          j.at("initial_obs").at(k).get<std::vector<std::vector<double>>>();
      t.observation[k] = j.at("observation")
                             .at(k)
                             .get<std::vector<std::vector<
                                 std::vector<std::vector<double>>>>>();
      t.reward[k] = j.at("reward")
                        .at(k)
                        .get<std::vector<std::vector<std::vector<double>>>>();
      const auto& range = j.at("reward_range").at(k);
      t.reward_range[k] = {range.at(0).get<double>(),
                           range.at(1).get<double>()};
    }
    t.transition =
        j.at("transition")
            .get<std::vector<
                std::vector<std::vector<std::vector<double>>>>>();
    return std::make_shared<TinyPosgModel>(j.value("id", "custom"),
                                           std::move(t));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("tiny posg json: ") + e.what());
  }
}

nlohmann::json TinyPosgModel::ToJson() const {
  nlohmann::json j;
  j["id"] = id_;
  j["num_states"] = tables_.num_states;
  j["num_actions"] = tables_.num_actions;
  j["num_observations"] = tables_.num_observations;
  j["discount"] = tables_.discount;
  j["initial"] = tables_.initial;
  j["transition"] = tables_.transition;
  for (int k = 0; k < 2; ++k) {
    j["initial_obs"][k] = tables_.initial_obs[k];
    j["observation"][k] = tables_.observation[k];
    j["reward"][k] = tables_.reward[k];
    j["reward_range"][k] = {tables_.reward_range[k].min,
                            tables_.reward_range[k].max};
  }
  return j;
}

}  // namespace potmmcp
