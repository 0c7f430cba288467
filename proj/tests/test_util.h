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

#ifndef POTMMCP_TESTS_TEST_UTIL_H_
#define POTMMCP_TESTS_TEST_UTIL_H_

#include <memory>
#include <string>

#include "potmmcp/belief.h"
#include "potmmcp/registry.h"
#include "potmmcp/tiny_instances.h"

namespace potmmcp::testing {

struct TinyFixture {
  std::shared_ptr<const TinyPosgModel> model;
  std::shared_ptr<PolicySet> set;
};

inline TinyFixture LoadTiny(const std::string& id) {
  TinyFixture f;
  f.model = MakeTinyPosg(id);
  f.set = LoadPolicySet(f.model, TinyManifest(id));
  return f;
}

// Planner history of a real episode: true joint policy, random planner
// actions, the others following their policies.
struct SampledHistory {
  History history;
  int joint = 0;
};

inline SampledHistory SampleHistory(const PosgModel& model,
                                    const PolicySet& set, int steps,
                                    Rng& rng) {
  const AgentId me = set.planner_agent();
  InitialSample init = model.SampleInitial(rng);
  SampledHistory out;
  out.joint = SampleJointPolicy(set, rng);
  out.history = init.joint_obs.size() > 0
                    ? History::ObservationFirst(init.joint_obs[me])
                    : History::ActionFirst();
  Particle w;
  w.state = init.state;
  w.joint = out.joint;
  w.memory = PerAgent<PolicyState>(model.NumAgents());
  for (AgentId j = 0; j < model.NumAgents(); ++j) {
    if (j == me) continue;
    const Policy& pj = set.policy(set.joint(out.joint).per_agent[j]);
    w.memory[j] = pj.InitialState(
        out.history.observation_first()
            ? std::optional<Observation>(init.joint_obs[j])
            : std::nullopt);
  }
  for (int t = 0; t < steps; ++t) {
    const Action a = rng.UniformInt(model.NumActions(me));
    ParticleStep step = StepParticle(model, set, w, a, rng);
    out.history.Append(a, step.joint_obs[me]);
    w = step.next;
  }
  return out;
}

inline std::string SourcePath(const std::string& rel) {
  return std::string(POTMMCP_SOURCE_DIR) + "/" + rel;
}

}  // namespace potmmcp::testing

#endif  // POTMMCP_TESTS_TEST_UTIL_H_
