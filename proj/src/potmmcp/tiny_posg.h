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

#ifndef POTMMCP_TINY_POSG_H_
#define POTMMCP_TINY_POSG_H_

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "potmmcp/posg.h"

namespace potmmcp {

// Explicit-table two-agent POSG small enough for exact enumeration.
//
//   initial[s]                  b_0(s)
//   initial_obs[k][s][o]        Pr(o_{k,0} = o | s)
//   transition[s][a0][a1][s']   T(s, <a0, a1>, s')
//   observation[k][s'][a0][a1][o]  Z_k(s', <a0, a1>, o)
//   reward[k][s][a0][a1]        R_k(s, <a0, a1>)
struct TinyTables {
  int num_states = 0;
  std::array<int, 2> num_actions{};
  std::array<int, 2> num_observations{};
  double discount = 0.9;
  std::vector<double> initial;
  std::array<std::vector<std::vector<double>>, 2> initial_obs;
  std::vector<std::vector<std::vector<std::vector<double>>>> transition;
  std::array<std::vector<std::vector<std::vector<std::vector<double>>>>, 2>
      observation;
  std::array<std::vector<std::vector<std::vector<double>>>, 2> reward;
  std::array<RewardRange, 2> reward_range{};
};

struct TinyState {
  std::int32_t s;
};

class TinyPosgModel final : public PosgModel {
 public:
  // Validates every table; throws ValidationError naming the offending row.
  TinyPosgModel(std::string id, TinyTables tables);

  static std::shared_ptr<const TinyPosgModel> FromJson(
      const nlohmann::json& j);
  nlohmann::json ToJson() const;

  std::string Id() const override { return id_; }
  int NumAgents() const override { return 2; }
  int NumActions(AgentId agent) const override {
    return tables_.num_actions[agent];
  }
  int NumObservations(AgentId agent) const {
    return tables_.num_observations[agent];
  }
  int NumStates() const { return tables_.num_states; }
  RewardRange Rewards(AgentId agent) const override {
    return tables_.reward_range[agent];
  }
  double Discount() const override { return tables_.discount; }

  State SampleInitialState(Rng& rng) const override;
  JointObservation SampleInitialObservations(const State& state,
                                             Rng& rng) const override;
  bool IsTerminal(const State&) const override { return false; }
  std::string StateToString(const State& state) const override;

  static State Encode(int s) { return State::Pack(TinyState{s}); }
  static int Decode(const State& state) { return state.Unpack<TinyState>().s; }

  double Initial(int s) const { return tables_.initial[s]; }
  double InitialObs(AgentId k, int s, int o) const {
    return tables_.initial_obs[k][s][o];
  }
  double Transition(int s, Action a0, Action a1, int next) const {
    return tables_.transition[s][a0][a1][next];
  }
  double Obs(AgentId k, int next, Action a0, Action a1, int o) const {
    return tables_.observation[k][next][a0][a1][o];
  }
  double Reward(AgentId k, int s, Action a0, Action a1) const {
    return tables_.reward[k][s][a0][a1];
  }
  const TinyTables& tables() const { return tables_; }

 protected:
  GenerativeStep DoStep(const State& state, const JointAction& action,
                        Rng& rng) const override;

 private:
  std::string id_;
  TinyTables tables_;
};

// Throws ValidationError listing the first malformed row.
void ValidateTinyTables(const TinyTables& tables);

}  // namespace potmmcp

#endif  // POTMMCP_TINY_POSG_H_
