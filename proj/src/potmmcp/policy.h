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

#ifndef POTMMCP_POLICY_H_
#define POTMMCP_POLICY_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "potmmcp/posg.h"

namespace potmmcp {

// A stationary history-based policy pi(a | h).
//
// Histories are summarized incrementally into a fixed-size PolicyState that
// is a sufficient statistic for the policy's action distribution, so the
// planner never stores or replays full histories of other agents.
class Policy {
 public:
  Policy(std::string id, std::string family, int num_actions)
      : id_(std::move(id)),
        family_(std::move(family)),
        num_actions_(num_actions) {}
  virtual ~Policy() = default;

  const std::string& id() const { return id_; }
  const std::string& family() const { return family_; }
  int num_actions() const { return num_actions_; }

  // Summary of the empty (action-first) or single-observation history.
  virtual PolicyState InitialState(std::optional<Observation> initial) const = 0;
  // Summary of h a o given the summary of h.
  virtual PolicyState NextState(const PolicyState& state, Action action,
                                Observation obs) const = 0;
  // Writes pi(. | h) into out (size num_actions()).
  virtual void ActionDist(const PolicyState& state,
                          std::span<double> out) const = 0;

  // Key used by value tables; nullopt when the policy has no value function.
  virtual std::optional<std::uint64_t> ValueFeature(
      const PolicyState& state) const {
    (void)state;
    return std::nullopt;
  }
  // The history shows the agent can no longer collect reward.
  // Coarsest state with the same future behaviour: two states map to the
  // same value iff every continuation yields identical action
  // distributions. Defaults to the state itself.
  virtual PolicyState BehaviourState(const PolicyState& state) const {
    return state;
  }
  virtual bool IsTerminalState(const PolicyState& state) const {
    (void)state;
    return false;
  }

  // Parameters sufficient to rebuild this policy through the manifest
  // factory.
  virtual nlohmann::json Params() const { return nlohmann::json::object(); }

 private:
  std::string id_;
  std::string family_;
  int num_actions_;
};

PolicyState StateForHistory(const Policy& policy, const History& history);
std::vector<double> ActionDistForHistory(const Policy& policy,
                                         const History& history);

Action SampleAction(const Policy& policy, const PolicyState& state, Rng& rng);

class UniformRandomPolicy final : public Policy {
 public:
  UniformRandomPolicy(std::string id, int num_actions)
      : Policy(std::move(id), "uniform_random", num_actions) {}
  PolicyState InitialState(std::optional<Observation>) const override {
    return {};
  }
  PolicyState NextState(const PolicyState& state, Action,
                        Observation) const override {
    return state;
  }
  void ActionDist(const PolicyState&, std::span<double> out) const override;
};

// Point mass on a single action.
class ConstantPolicy final : public Policy {
 public:
  ConstantPolicy(std::string id, int num_actions, Action action);
  PolicyState InitialState(std::optional<Observation>) const override {
    return {};
  }
  PolicyState NextState(const PolicyState& state, Action,
                        Observation) const override {
    return state;
  }
  void ActionDist(const PolicyState&, std::span<double> out) const override;
  nlohmann::json Params() const override;

 private:
  Action action_;
};

// Tabular policy keyed by the most recent observation, used on TinyPosg.
// Row `num_observations` is used for the empty action-first history. The
// summary also carries an exact encoding of the whole history, which is the
// value-table feature.
class TabularPolicy final : public Policy {
 public:
  TabularPolicy(std::string id, int num_actions, int num_observations,
                std::vector<std::vector<double>> table);

  PolicyState InitialState(std::optional<Observation> initial) const override;
  PolicyState NextState(const PolicyState& state, Action action,
                        Observation obs) const override;
  void ActionDist(const PolicyState& state,
                  std::span<double> out) const override;
  std::optional<std::uint64_t> ValueFeature(
      const PolicyState& state) const override;
  PolicyState BehaviourState(const PolicyState& state) const override;
  nlohmann::json Params() const override;

  const std::vector<std::vector<double>>& table() const { return table_; }

 private:
  struct Summary {
    std::int32_t last_obs;  // num_observations_ for "none"
    std::int32_t length;
    std::uint64_t code;
  };
  int num_observations_;
  std::vector<std::vector<double>> table_;
};

// Monte-Carlo value estimates keyed by a policy's ValueFeature.
class ValueTable {
 public:
  struct Entry {
    double sum = 0.0;
    std::int64_t count = 0;
  };

  explicit ValueTable(std::int64_t min_count = 1) : min_count_(min_count) {}

  void Add(std::uint64_t feature, double value);
  std::optional<double> Lookup(std::uint64_t feature) const;
  std::size_t size() const { return entries_.size(); }
  const std::unordered_map<std::uint64_t, Entry>& entries() const {
    return entries_;
  }

  nlohmann::json ToJson() const;
  static ValueTable FromJson(const nlohmann::json& j);

 private:
  std::int64_t min_count_;
  std::unordered_map<std::uint64_t, Entry> entries_;
};

// A joint policy of the non-planning agents: a policy index per agent, -1
// in the planner's slot.
struct JointPolicy {
  std::vector<int> per_agent;
  bool operator==(const JointPolicy&) const = default;
};

// Policy sets Pi_i (planner candidates) and Pi_{-i} (joint policies of the
// other agents) with the prior rho over Pi_{-i}.
class PolicySet {
 public:
  PolicySet(int num_agents, AgentId planner_agent);

  // Returns the policy index.
  int AddPolicy(std::shared_ptr<const Policy> policy);
  void AddPlannerPolicy(const std::string& id);
  // Joint over the other agents (one id per non-planner agent, in agent
  // order).
  void AddJoint(const std::vector<std::string>& ids, double weight);
  // Normalizes and validates the prior; call once after all AddJoint calls.
  void Finalize();

  int num_agents() const { return num_agents_; }
  AgentId planner_agent() const { return planner_agent_; }
  int num_policies() const { return static_cast<int>(policies_.size()); }
  const Policy& policy(int index) const { return *policies_[index]; }
  std::shared_ptr<const Policy> policy_ptr(int index) const {
    return policies_[index];
  }
  int IndexOf(const std::string& id) const;
  bool Contains(const std::string& id) const;

  const std::vector<int>& planner_policies() const { return planner_; }
  int num_joints() const { return static_cast<int>(joints_.size()); }
  const JointPolicy& joint(int k) const { return joints_[k]; }
  const std::vector<double>& prior() const { return prior_; }
  std::string JointName(int k) const;
  int JointIndexOf(const std::vector<std::string>& ids) const;

  void SetValueTable(int policy_index, std::shared_ptr<const ValueTable> t);
  const ValueTable* value_table(int policy_index) const;

 private:
  int num_agents_;
  AgentId planner_agent_;
  std::vector<std::shared_ptr<const Policy>> policies_;
  std::vector<std::shared_ptr<const ValueTable>> value_tables_;
  std::unordered_map<std::string, int> index_;
  std::vector<int> planner_;
  std::vector<JointPolicy> joints_;
  std::vector<double> prior_;
  bool finalized_ = false;
};

// Index of a joint policy drawn from rho.
int SampleJointPolicy(const PolicySet& set, Rng& rng);

// V^pi(h) if the policy has a value table entry for h, 0 for histories the
// policy marks terminal, nullopt otherwise.
std::optional<double> PolicyValue(const PolicySet& set, int policy_index,
                                  const PolicyState& state);

// Offline Monte-Carlo policy evaluation: the policy plays `agent` while the
// other agents follow joints drawn from the prior; every visited history
// feature accumulates its discounted return-to-go (truncated after
// `horizon` further steps; 0 means until the episode ends).
std::shared_ptr<ValueTable> BuildValueTable(const PosgModel& model,
                                            const PolicySet& set,
                                            int policy_index, int episodes,
                                            int max_steps, int horizon,
                                            std::uint64_t seed,
                                            std::int64_t min_count = 1);

}  // namespace potmmcp

#endif  // POTMMCP_POLICY_H_
