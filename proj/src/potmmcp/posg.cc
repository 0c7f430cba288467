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

#include "potmmcp/posg.h"

#include <cmath>
#include <sstream>

namespace potmmcp {

std::string History::ToString() const {
  std::ostringstream out;
  out << "<";
  bool first = true;
  if (initial_) {
    out << "o" << *initial_;
    first = false;
  }
  for (const auto& [a, o] : steps_) {
    if (!first) out << " ";
    out << "a" << a << " o" << o;
    first = false;
  }
  out << ">";
  return out.str();
}

InitialSample PosgModel::SampleInitial(Rng& rng) const {
  InitialSample sample;
  sample.state = SampleInitialState(rng);
  if (convention() == Convention::kObservationFirst) {
    sample.joint_obs = SampleInitialObservations(sample.state, rng);
  }
  return sample;
}

GenerativeStep PosgModel::Step(const State& state, const JointAction& action,
                               Rng& rng) const {
  const int n = NumAgents();
  if (action.size() != n) {
    throw ContractViolation("joint action has " +
                            std::to_string(action.size()) +
                            " entries, model has " + std::to_string(n) +
                            " agents");
  }
  for (AgentId i = 0; i < n; ++i) {
    if (action[i] < 0 || action[i] >= NumActions(i)) {
      throw ContractViolation("invalid action " + std::to_string(action[i]) +
                              " for agent " + std::to_string(i));
    }
  }
  if (IsTerminal(state)) {
    // Absorbing: same state, zero reward. Observations are re-derived by the
    // model so histories stay well formed.
    GenerativeStep out = DoStep(state, action, rng);
    out.next_state = state;
    out.joint_reward = JointReward(n, 0.0);
    return out;
  }
  return DoStep(state, action, rng);
}

std::string PosgModel::StateToString(const State& state) const {
  std::ostringstream out;
  out << "state#" << std::hex << state.Hash();
  return out.str();
}

double DiscountedReturn(std::span<const double> rewards, double gamma) {
  double total = 0.0;
  double weight = 1.0;
  for (double r : rewards) {
    total += weight * r;
    weight *= gamma;
  }
  return total;
}

int HorizonForEpsilon(double gamma, double epsilon) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw ContractViolation("discount must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ContractViolation("epsilon must be positive");
  if (gamma == 0.0) return 1;
  // Direct powering avoids off-by-one from floating-point logs.
  int depth = 0;
  double power = 1.0;
  while (power >= epsilon) {
    power *= gamma;
    ++depth;
  }
  return depth;
}

}  // namespace potmmcp
