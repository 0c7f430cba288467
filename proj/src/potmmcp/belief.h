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

#ifndef POTMMCP_BELIEF_H_
#define POTMMCP_BELIEF_H_

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "json.hpp"
#include "potmmcp/policy.h"
#include "potmmcp/posg.h"
#include "potmmcp/tiny_posg.h"

namespace potmmcp {

// History-policy-state: environment state, the others' joint policy (index
// into the PolicySet's prior) and each other agent's history, kept as that
// agent's policy summary. The planner's slot in `memory` is unused.
struct Particle {
  State state;
  int joint = 0;
  PerAgent<PolicyState> memory;
};

struct ParticleBelief {
  std::vector<Particle> particles;
  // Set when a top-up ran out of attempts before reaching its target.
  bool depleted = false;

  int size() const { return static_cast<int>(particles.size()); }
  bool empty() const { return particles.empty(); }
};

// Result of pushing one particle through the generative model.
struct ParticleStep {
  Particle next;
  JointAction action;
  JointObservation joint_obs;
  JointReward joint_reward;
};

// Samples the other agents' actions from the particle's policies, steps the
// model with the planner's action and advances the others' summaries.
ParticleStep StepParticle(const PosgModel& model, const PolicySet& set,
                          const Particle& w, Action planner_action, Rng& rng);

// Samples s ~ b0, a joint policy ~ prior and (observation-first) the initial
// joint observation; keeps draws whose planner observation equals
// `planner_obs`. Pass nullopt under the action-first convention. Throws
// DepletionError when no draw is accepted within 100 * n attempts; a
// partial result is returned with `depleted` set.
ParticleBelief InitialBelief(const PosgModel& model, const PolicySet& set,
                             int n, std::optional<Observation> planner_obs,
                             Rng& rng);

inline int TopUpTarget(int target) {
  // ceil((1 + 1/16) * target) in integer arithmetic.
  return target + (target + 15) / 16;
}

// Root belief after the planner executed `action` and observed `obs`.
// Starts from the child node's particles and tops up by rejection: a
// particle from `root` is stepped with `action` and kept if it reproduces
// `obs`, until TopUpTarget(target) particles are held. If 100 * target
// attempts do not suffice, particles are regenerated from the initial belief
// by replaying `history` (the planner's full history including this step)
// with rejection. Throws DepletionError if nothing survives.
ParticleBelief UpdateRootBelief(std::vector<Particle> child,
                                const std::vector<Particle>& root,
                                const PosgModel& model, const PolicySet& set,
                                Action action, Observation obs, int target,
                                const History& history, Rng& rng);

// Draws particles consistent with the whole planner history by forward
// simulation from the initial belief with rejection at every step.
std::vector<Particle> ReplayHistory(const PosgModel& model,
                                    const PolicySet& set,
                                    const History& history, int wanted,
                                    std::int64_t max_attempts, Rng& rng);

struct BeliefMetrics {
  // Fraction of particles carrying the true joint policy.
  double prob_true_type = 0.0;
  // Total variation (Wasserstein-1 under the 0/1 metric) between the
  // particle-mean action distribution and the true one, averaged over the
  // other agents.
  double action_distance = 0.0;
};

BeliefMetrics ComputeBeliefMetrics(const ParticleBelief& belief,
                                   const PolicySet& set, int true_joint,
                                   const PerAgent<PolicyState>& true_memory);

// Belief snapshot: size, per-joint counts and, for tiny models, per-state
// counts.
nlohmann::json BeliefSnapshot(const ParticleBelief& belief,
                              const PolicySet& set, const PosgModel& model);

// Exact posterior over history-policy-states of a two-agent tiny model.
struct ExactParticle {
  int s = 0;
  int joint = 0;
  History other;  // full history of the non-planner agent
  bool operator<(const ExactParticle& o) const {
    if (s != o.s) return s < o.s;
    if (joint != o.joint) return joint < o.joint;
    return other < o.other;
  }
  bool operator==(const ExactParticle&) const = default;
};
using ExactBelief = std::map<ExactParticle, double>;

inline constexpr std::size_t kExactSupportCap = 200000;

// Exact Bayes filter for the planner history `history` (observation-first
// when history.observation_first()). Throws CapacityError beyond
// kExactSupportCap support points and DepletionError for a zero-likelihood
// history.
ExactBelief ExactPosterior(const TinyPosgModel& model, const PolicySet& set,
                           const History& history);

// Key that identifies a particle up to the others' policy summaries. Exact
// and particle beliefs are compared through this key.
struct ParticleKey {
  int s = 0;
  int joint = 0;
  PolicyState other;
  bool operator<(const ParticleKey& o) const;
};

// Distribution over (state, joint policy, other's policy state). With
// `behaviour` the policy state is reduced to Policy::BehaviourState, which
// merges histories the other agent cannot tell apart in its future play.
std::map<ParticleKey, double> KeyDistribution(const ParticleBelief& belief,
                                              const PolicySet& set,
                                              bool behaviour = true);
std::map<ParticleKey, double> KeyDistribution(const ExactBelief& belief,
                                              const PolicySet& set,
                                              bool behaviour = true);

template <class K>
double TotalVariation(const std::map<K, double>& p,
                      const std::map<K, double>& q) {
  double sum = 0.0;
  auto a = p.begin();
  auto b = q.begin();
  while (a != p.end() || b != q.end()) {
    if (b == q.end() || (a != p.end() && a->first < b->first)) {
      sum += std::abs(a->second);
      ++a;
    } else if (a == p.end() || b->first < a->first) {
      sum += std::abs(b->second);
      ++b;
    } else {
      sum += std::abs(a->second - b->second);
      ++a;
      ++b;
    }
  }
  return 0.5 * sum;
}

}  // namespace potmmcp

#endif  // POTMMCP_BELIEF_H_
