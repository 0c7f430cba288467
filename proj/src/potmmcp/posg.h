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

#ifndef POTMMCP_POSG_H_
#define POTMMCP_POSG_H_

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "potmmcp/common.h"
#include "potmmcp/rng.h"

namespace potmmcp {

// Whether an episode starts with every agent receiving an observation
// (the default for all shipped environments) or with every agent acting.
enum class Convention { kObservationFirst, kActionFirst };

// One agent's interaction history <o_0 a_0 o_1 ... a_{t-1} o_t>.
// Action-first histories have no initial observation.
class History {
 public:
  static History ObservationFirst(Observation initial) {
    History h;
    h.initial_ = initial;
    return h;
  }
  static History ActionFirst() { return History(); }

  void Append(Action a, Observation o) { steps_.emplace_back(a, o); }
  History Extended(Action a, Observation o) const {
    History h = *this;
    h.Append(a, o);
    return h;
  }

  // Number of (action, observation) steps taken.
  int size() const { return static_cast<int>(steps_.size()); }
  bool empty() const { return steps_.empty(); }
  bool observation_first() const { return initial_.has_value(); }
  const std::optional<Observation>& initial() const { return initial_; }
  const std::vector<std::pair<Action, Observation>>& steps() const {
    return steps_;
  }
  Action action(int k) const { return steps_[k].first; }
  Observation observation(int k) const { return steps_[k].second; }
  // Most recent observation, if any.
  std::optional<Observation> last_observation() const {
    if (!steps_.empty()) return steps_.back().second;
    return initial_;
  }
  History Prefix(int k) const {
    History h = *this;
    h.steps_.resize(static_cast<std::size_t>(k));
    return h;
  }

  bool operator==(const History& other) const = default;
  bool operator<(const History& other) const {
    if (initial_ != other.initial_) return initial_ < other.initial_;
    return steps_ < other.steps_;
  }

  std::string ToString() const;

 private:
  std::optional<Observation> initial_;
  std::vector<std::pair<Action, Observation>> steps_;
};

struct GenerativeStep {
  State next_state;
  JointObservation joint_obs;
  JointReward joint_reward;
};

struct RewardRange {
  double min = 0.0;
  double max = 0.0;
};

struct InitialSample {
  State state;
  JointObservation joint_obs;  // empty under the action-first convention
};

// Generative multi-agent environment model. Immutable after construction;
// every method is const and all randomness comes from the caller's Rng, so a
// single model may be shared by any number of concurrent simulations.
class PosgModel {
 public:
  virtual ~PosgModel() = default;

  virtual std::string Id() const = 0;
  virtual int NumAgents() const = 0;
  virtual int NumActions(AgentId agent) const = 0;
  virtual RewardRange Rewards(AgentId agent) const = 0;
  virtual double Discount() const = 0;
  virtual Convention convention() const {
    return Convention::kObservationFirst;
  }
  // Agents are interchangeable (same action/observation/reward structure).
  virtual bool IsSymmetric() const { return false; }

  virtual State SampleInitialState(Rng& rng) const = 0;
  // Initial joint observation given the initial state (observation-first).
  virtual JointObservation SampleInitialObservations(const State& state,
                                                     Rng& rng) const = 0;

  InitialSample SampleInitial(Rng& rng) const;

  // Checks the joint action, then samples <s', o, r> ~ G(s, a). Terminal
  // states are absorbing with zero reward for every agent.
  GenerativeStep Step(const State& state, const JointAction& action,
                      Rng& rng) const;

  virtual bool IsTerminal(const State& state) const = 0;
  // True once the agent can no longer receive reward (crashed, arrived,
  // episode over). Defaults to whole-episode termination.
  virtual bool IsAgentDone(const State& state, AgentId agent) const {
    (void)agent;
    return IsTerminal(state);
  }
  // Episode step counter stored in the state, if the model keeps one.
  virtual int StepCount(const State& state) const {
    (void)state;
    return 0;
  }
  virtual int StepLimit() const { return 0; }

  virtual std::string StateToString(const State& state) const;

 protected:
  virtual GenerativeStep DoStep(const State& state, const JointAction& action,
                                Rng& rng) const = 0;
};

// Sum_k gamma^k r_k.
double DiscountedReturn(std::span<const double> rewards, double gamma);

// Smallest d with gamma^d < epsilon; 1 when gamma == 0 (gamma^0 = 1 is
// taken to be >= epsilon).
int HorizonForEpsilon(double gamma, double epsilon);

}  // namespace potmmcp

#endif  // POTMMCP_POSG_H_
