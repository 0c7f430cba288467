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

#include "potmmcp/belief.h"

#include <algorithm>
#include <array>
#include <cstring>

namespace potmmcp {

namespace {

Particle FreshParticle(const PosgModel& model, const PolicySet& set,
                       const InitialSample& init, int joint) {
  const int n = model.NumAgents();
  const bool obs_first = model.convention() == Convention::kObservationFirst;
  Particle w;
  w.state = init.state;
  w.joint = joint;
  w.memory = PerAgent<PolicyState>(n);
  for (AgentId j = 0; j < n; ++j) {
    if (j == set.planner_agent()) continue;
    w.memory[j] = set.policy(set.joint(joint).per_agent[j])
                      .InitialState(obs_first ? std::optional<Observation>(
                                                    init.joint_obs[j])
                                              : std::nullopt);
  }
  return w;
}

}  // namespace

ParticleStep StepParticle(const PosgModel& model, const PolicySet& set,
                          const Particle& w, Action planner_action, Rng& rng) {
  const int n = model.NumAgents();
  const AgentId me = set.planner_agent();
  const JointPolicy& joint = set.joint(w.joint);
  ParticleStep out;
  out.action = JointAction(n);
  for (AgentId j = 0; j < n; ++j) {
    out.action[j] = j == me ? planner_action
                            : SampleAction(set.policy(joint.per_agent[j]),
                                           w.memory[j], rng);
  }
  GenerativeStep step = model.Step(w.state, out.action, rng);
  out.next.state = step.next_state;
  out.next.joint = w.joint;
  out.next.memory = w.memory;
  for (AgentId j = 0; j < n; ++j) {
    if (j == me) continue;
    out.next.memory[j] = set.policy(joint.per_agent[j])
                             .NextState(w.memory[j], out.action[j],
                                        step.joint_obs[j]);
  }
  out.joint_obs = step.joint_obs;
  out.joint_reward = step.joint_reward;
  return out;
}

ParticleBelief InitialBelief(const PosgModel& model, const PolicySet& set,
                             int n, std::optional<Observation> planner_obs,
                             Rng& rng) {
  POTMMCP_CHECK(n >= 1, ContractViolation, "particle count must be >= 1");
  ParticleBelief belief;
  belief.particles.reserve(static_cast<std::size_t>(n));
  const std::int64_t budget = 100 * static_cast<std::int64_t>(n);
  const AgentId me = set.planner_agent();
  for (std::int64_t attempt = 0; attempt < budget && belief.size() < n;
       ++attempt) {
    const int joint = SampleJointPolicy(set, rng);
    InitialSample init = model.SampleInitial(rng);
    if (planner_obs && init.joint_obs[me] != *planner_obs) continue;
    belief.particles.push_back(FreshParticle(model, set, init, joint));
  }
  if (belief.empty()) {
    throw DepletionError("initial belief: no particle matches the planner's "
                         "initial observation");
  }
  belief.depleted = belief.size() < n;
  return belief;
}

std::vector<Particle> ReplayHistory(const PosgModel& model,
                                    const PolicySet& set,
                                    const History& history, int wanted,
                                    std::int64_t max_attempts, Rng& rng) {
  std::vector<Particle> out;
  const AgentId me = set.planner_agent();
  for (std::int64_t attempt = 0;
       attempt < max_attempts && static_cast<int>(out.size()) < wanted;
       ++attempt) {
    const int joint = SampleJointPolicy(set, rng);
    InitialSample init = model.SampleInitial(rng);
    if (history.initial() && init.joint_obs[me] != *history.initial()) {
      continue;
    }
    Particle w = FreshParticle(model, set, init, joint);
    bool ok = true;
    for (const auto& [a, o] : history.steps()) {
      ParticleStep step = StepParticle(model, set, w, a, rng);
      if (step.joint_obs[me] != o) {
        ok = false;
        break;
      }
      w = step.next;
    }
    if (ok) out.push_back(w);
  }
  return out;
}

ParticleBelief UpdateRootBelief(std::vector<Particle> child,
                                const std::vector<Particle>& root,
                                const PosgModel& model, const PolicySet& set,
                                Action action, Observation obs, int target,
                                const History& history, Rng& rng) {
  ParticleBelief out;
  out.particles = std::move(child);
  const int want = TopUpTarget(target);
  const AgentId me = set.planner_agent();
  const std::int64_t budget = 100 * static_cast<std::int64_t>(target);
  if (!root.empty()) {
    for (std::int64_t attempt = 0; attempt < budget && out.size() < want;
         ++attempt) {
      const Particle& w =
          root[static_cast<std::size_t>(rng.UniformInt(
              static_cast<int>(root.size())))];
      ParticleStep step = StepParticle(model, set, w, action, rng);
      if (step.joint_obs[me] == obs) out.particles.push_back(step.next);
    }
  }
  if (out.size() < want) {
    std::vector<Particle> extra =
        ReplayHistory(model, set, history, want - out.size(), budget, rng);
    out.particles.insert(out.particles.end(), extra.begin(), extra.end());
    out.depleted = out.size() < want;
  }
  if (out.empty()) {
    throw DepletionError("belief update: no particle reproduces the "
                         "planner's observation history");
  }
  return out;
}

BeliefMetrics ComputeBeliefMetrics(const ParticleBelief& belief,
                                   const PolicySet& set, int true_joint,
                                   const PerAgent<PolicyState>& true_memory) {
  BeliefMetrics m;
  if (belief.empty()) return m;
  const int n = set.num_agents();
  const AgentId me = set.planner_agent();
  std::array<double, 16> buffer{};
  int matches = 0;
  for (const Particle& w : belief.particles) matches += w.joint == true_joint;
  m.prob_true_type =
      static_cast<double>(matches) / static_cast<double>(belief.size());

  double distance = 0.0;
  int others = 0;
  for (AgentId j = 0; j < n; ++j) {
    if (j == me) continue;
    const Policy& truth = set.policy(set.joint(true_joint).per_agent[j]);
    const auto k = static_cast<std::size_t>(truth.num_actions());
    std::vector<double> estimate(k, 0.0);
    for (const Particle& w : belief.particles) {
      const Policy& p = set.policy(set.joint(w.joint).per_agent[j]);
      std::span<double> dist(buffer.data(), k);
      p.ActionDist(w.memory[j], dist);
      for (std::size_t a = 0; a < k; ++a) estimate[a] += dist[a];
    }
    std::span<double> dist(buffer.data(), k);
    truth.ActionDist(true_memory[j], dist);
    double tv = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      tv += std::abs(estimate[a] / belief.size() - dist[a]);
    }
    distance += 0.5 * tv;
    ++others;
  }
  m.action_distance = others > 0 ? distance / others : 0.0;
  return m;
}

nlohmann::json BeliefSnapshot(const ParticleBelief& belief,
                              const PolicySet& set, const PosgModel& model) {
  std::vector<int> per_joint(static_cast<std::size_t>(set.num_joints()), 0);
  for (const Particle& w : belief.particles) {
    ++per_joint[static_cast<std::size_t>(w.joint)];
  }
  nlohmann::json joints = nlohmann::json::object();
  for (int k = 0; k < set.num_joints(); ++k) {
    joints[set.JointName(k)] = per_joint[static_cast<std::size_t>(k)];
  }
  nlohmann::json snap{{"size", belief.size()},
                      {"depleted", belief.depleted},
                      {"joint_counts", joints}};
  if (dynamic_cast<const TinyPosgModel*>(&model) != nullptr) {
    std::map<int, int> states;
    for (const Particle& w : belief.particles) {
      ++states[TinyPosgModel::Decode(w.state)];
    }
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [s, c] : states) counts["s" + std::to_string(s)] = c;
    snap["state_counts"] = counts;
  }
  return snap;
}

ExactBelief ExactPosterior(const TinyPosgModel& model, const PolicySet& set,
                           const History& history) {
  const AgentId me = set.planner_agent();
  const AgentId other = 1 - me;
  const auto in_range = [](std::uint64_t v, int n) {
    return v < static_cast<std::uint64_t>(n);
  };
  POTMMCP_CHECK(!history.initial() ||
                    in_range(*history.initial(), model.NumObservations(me)),
                ContractViolation, "exact posterior: observation out of range");
  for (const auto& [a, o] : history.steps()) {
    POTMMCP_CHECK(a >= 0 && a < model.NumActions(me) &&
                      in_range(o, model.NumObservations(me)),
                  ContractViolation,
                  "exact posterior: action or observation out of range");
  }
  ExactBelief belief;
  for (int s = 0; s < model.NumStates(); ++s) {
    if (model.Initial(s) == 0.0) continue;
    for (int k = 0; k < set.num_joints(); ++k) {
      const double base = model.Initial(s) * set.prior()[k];
      if (base == 0.0) continue;
      if (!history.initial()) {
        belief[{s, k, History::ActionFirst()}] += base;
        continue;
      }
      const double zi = model.InitialObs(
          me, s, static_cast<int>(*history.initial()));
      if (zi == 0.0) continue;
      for (int oj = 0; oj < model.NumObservations(other); ++oj) {
        const double zj = model.InitialObs(other, s, oj);
        if (zj == 0.0) continue;
        belief[{s, k, History::ObservationFirst(static_cast<Observation>(oj))}] +=
            base * zi * zj;
      }
    }
  }

  auto normalize = [&](ExactBelief& b) {
    double total = 0.0;
    for (const auto& [w, p] : b) total += p;
    if (!(total > 0.0)) {
      throw DepletionError("exact posterior: history has zero likelihood");
    }
    for (auto& [w, p] : b) p /= total;
  };
  normalize(belief);

  for (const auto& [ai, oi] : history.steps()) {
    ExactBelief next;
    for (const auto& [w, p] : belief) {
      const Policy& pj = set.policy(set.joint(w.joint).per_agent[other]);
      const std::vector<double> dist = ActionDistForHistory(pj, w.other);
      for (Action aj = 0; aj < model.NumActions(other); ++aj) {
        if (dist[static_cast<std::size_t>(aj)] == 0.0) continue;
        const Action a0 = me == 0 ? ai : aj;
        const Action a1 = me == 0 ? aj : ai;
        for (int s2 = 0; s2 < model.NumStates(); ++s2) {
          const double t = model.Transition(w.s, a0, a1, s2);
          if (t == 0.0) continue;
          const double zi = model.Obs(me, s2, a0, a1, static_cast<int>(oi));
          if (zi == 0.0) continue;
          for (int oj = 0; oj < model.NumObservations(other); ++oj) {
            const double zj = model.Obs(other, s2, a0, a1, oj);
            if (zj == 0.0) continue;
            next[{s2, w.joint,
                  w.other.Extended(aj, static_cast<Observation>(oj))}] +=
                p * dist[static_cast<std::size_t>(aj)] * t * zi * zj;
          }
        }
      }
      if (next.size() > kExactSupportCap) {
        throw CapacityError(
            "exact posterior support exceeds " +
            std::to_string(kExactSupportCap) +
            " points; use a shorter history or a smaller instance");
      }
    }
    belief = std::move(next);
    normalize(belief);
  }
  return belief;
}

bool ParticleKey::operator<(const ParticleKey& o) const {
  if (s != o.s) return s < o.s;
  if (joint != o.joint) return joint < o.joint;
  using Bytes = std::array<unsigned char, PolicyState::kCapacity>;
  const Bytes a = other.Unpack<Bytes>();
  const Bytes b = o.other.Unpack<Bytes>();
  return std::memcmp(a.data(), b.data(), a.size()) < 0;
}

std::map<ParticleKey, double> KeyDistribution(const ParticleBelief& belief,
                                              const PolicySet& set,
                                              bool behaviour) {
  const AgentId other = 1 - set.planner_agent();
  std::map<ParticleKey, double> out;
  const double unit = 1.0 / static_cast<double>(belief.size());
  for (const Particle& w : belief.particles) {
    const Policy& pj = set.policy(set.joint(w.joint).per_agent[other]);
    const PolicyState& m = w.memory[other];
    out[{TinyPosgModel::Decode(w.state), w.joint,
         behaviour ? pj.BehaviourState(m) : m}] += unit;
  }
  return out;
}

std::map<ParticleKey, double> KeyDistribution(const ExactBelief& belief,
                                              const PolicySet& set,
                                              bool behaviour) {
  const AgentId other = 1 - set.planner_agent();
  std::map<ParticleKey, double> out;
  for (const auto& [w, p] : belief) {
    const Policy& pj = set.policy(set.joint(w.joint).per_agent[other]);
    const PolicyState m = StateForHistory(pj, w.other);
    out[{w.s, w.joint, behaviour ? pj.BehaviourState(m) : m}] += p;
  }
  return out;
}

}  // namespace potmmcp
