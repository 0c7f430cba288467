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

#include "potmmcp/policy.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace potmmcp {

PolicyState StateForHistory(const Policy& policy, const History& history) {
  PolicyState state = policy.InitialState(history.initial());
  for (const auto& [a, o] : history.steps()) {
    state = policy.NextState(state, a, o);
  }
  return state;
}

std::vector<double> ActionDistForHistory(const Policy& policy,
                                         const History& history) {
  std::vector<double> dist(static_cast<std::size_t>(policy.num_actions()));
  policy.ActionDist(StateForHistory(policy, history), dist);
  return dist;
}

Action SampleAction(const Policy& policy, const PolicyState& state, Rng& rng) {
  std::array<double, 16> buffer{};
  const int n = policy.num_actions();
  std::span<double> dist(buffer.data(), static_cast<std::size_t>(n));
  policy.ActionDist(state, dist);
  return rng.Categorical(dist);
}

void UniformRandomPolicy::ActionDist(const PolicyState&,
                                     std::span<double> out) const {
  std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
}

ConstantPolicy::ConstantPolicy(std::string id, int num_actions, Action action)
    : Policy(std::move(id), "constant", num_actions), action_(action) {
  if (action < 0 || action >= num_actions) {
    throw ConfigError("constant policy action out of range");
  }
}

void ConstantPolicy::ActionDist(const PolicyState&,
                                std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  out[static_cast<std::size_t>(action_)] = 1.0;
}

nlohmann::json ConstantPolicy::Params() const {
  return {{"action", action_}};
}

TabularPolicy::TabularPolicy(std::string id, int num_actions,
                             int num_observations,
                             std::vector<std::vector<double>> table)
    : Policy(std::move(id), "tabular", num_actions),
      num_observations_(num_observations),
      table_(std::move(table)) {
  if (static_cast<int>(table_.size()) != num_observations_ + 1) {
    throw ValidationError("tabular policy '" + this->id() + "' needs " +
                          std::to_string(num_observations_ + 1) +
                          " rows (one per observation plus the empty "
                          "history)");
  }
  for (std::size_t r = 0; r < table_.size(); ++r) {
    const auto& row = table_[r];
    if (static_cast<int>(row.size()) != num_actions) {
      throw ValidationError("tabular policy '" + this->id() + "' row " +
                            std::to_string(r) + " has wrong width");
    }
    const double total = std::accumulate(row.begin(), row.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9 ||
        std::any_of(row.begin(), row.end(), [](double p) { return p < 0; })) {
      throw ValidationError("tabular policy '" + this->id() + "' row " +
                            std::to_string(r) + " is not a distribution");
    }
  }
}

PolicyState TabularPolicy::InitialState(
    std::optional<Observation> initial) const {
  Summary s{};
  s.length = 0;
  if (initial) {
    s.last_obs = static_cast<std::int32_t>(*initial);
    s.code = static_cast<std::uint64_t>(num_observations_ + 1) +
             static_cast<std::uint64_t>(*initial);
  } else {
    s.last_obs = num_observations_;
    s.code = 1;
  }
  return PolicyState::Pack(s);
}

PolicyState TabularPolicy::NextState(const PolicyState& state, Action action,
                                     Observation obs) const {
  Summary s = state.Unpack<Summary>();
  const auto radix =
      static_cast<std::uint64_t>(num_actions() * num_observations_);
  s.code = s.code * radix +
           static_cast<std::uint64_t>(action * num_observations_) + obs;
  s.last_obs = static_cast<std::int32_t>(obs);
  s.length += 1;
  return PolicyState::Pack(s);
}

void TabularPolicy::ActionDist(const PolicyState& state,
                               std::span<double> out) const {
  const Summary s = state.Unpack<Summary>();
  const auto& row = table_[static_cast<std::size_t>(s.last_obs)];
  std::copy(row.begin(), row.end(), out.begin());
}

std::optional<std::uint64_t> TabularPolicy::ValueFeature(
    const PolicyState& state) const {
  return state.Unpack<Summary>().code;
}

PolicyState TabularPolicy::BehaviourState(const PolicyState& state) const {
  Summary s = state.Unpack<Summary>();
  s.code = 0;
  return PolicyState::Pack(s);
}

nlohmann::json TabularPolicy::Params() const {
  return {{"num_observations", num_observations_}, {"table", table_}};
}

void ValueTable::Add(std::uint64_t feature, double value) {
  Entry& e = entries_[feature];
  e.sum += value;
  e.count += 1;
}

std::optional<double> ValueTable::Lookup(std::uint64_t feature) const {
  auto it = entries_.find(feature);
  if (it == entries_.end() || it->second.count < min_count_) {
    return std::nullopt;
  }
  return it->second.sum / static_cast<double>(it->second.count);
}

nlohmann::json ValueTable::ToJson() const {
  // Sorted for byte-stable output.
  std::vector<std::uint64_t> keys;
  keys.reserve(entries_.size());
  for (const auto& [k, e] : entries_) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  nlohmann::json rows = nlohmann::json::array();
  for (std::uint64_t k : keys) {
    const Entry& e = entries_.at(k);
    rows.push_back({k, e.sum, e.count});
  }
  return {{"min_count", min_count_}, {"entries", rows}};
}

ValueTable ValueTable::FromJson(const nlohmann::json& j) {
  ValueTable table(j.value("min_count", std::int64_t{1}));
  for (const auto& row : j.at("entries")) {
    Entry e;
    e.sum = row.at(1).get<double>();
    e.count = row.at(2).get<std::int64_t>();
    table.entries_[row.at(0).get<std::uint64_t>()] = e;
  }
  return table;
}

PolicySet::PolicySet(int num_agents, AgentId planner_agent)
    : num_agents_(num_agents), planner_agent_(planner_agent) {
  if (num_agents < 2 || num_agents > kMaxAgents) {
    throw ConfigError("policy set needs between 2 and " +
                      std::to_string(kMaxAgents) + " agents");
  }
  if (planner_agent < 0 || planner_agent >= num_agents) {
    throw ConfigError("planner agent out of range");
  }
}

int PolicySet::AddPolicy(std::shared_ptr<const Policy> policy) {
  if (finalized_) throw ContractViolation("policy set already finalized");
  if (index_.count(policy->id()) != 0) {
    throw ConfigError("duplicate policy id '" + policy->id() + "'");
  }
  const int k = static_cast<int>(policies_.size());
  index_[policy->id()] = k;
  policies_.push_back(std::move(policy));
  value_tables_.emplace_back();
  return k;
}

void PolicySet::AddPlannerPolicy(const std::string& id) {
  const int k = IndexOf(id);
  if (std::find(planner_.begin(), planner_.end(), k) != planner_.end()) {
    throw ConfigError("planner policy '" + id + "' listed twice");
  }
  planner_.push_back(k);
}

void PolicySet::AddJoint(const std::vector<std::string>& ids, double weight) {
  if (finalized_) throw ContractViolation("policy set already finalized");
  if (static_cast<int>(ids.size()) != num_agents_ - 1) {
    throw ConfigError("joint policy must name one policy per other agent");
  }
  if (!(weight >= 0.0)) throw ConfigError("prior weight must be >= 0");
  JointPolicy joint;
  joint.per_agent.assign(static_cast<std::size_t>(num_agents_), -1);
  int cursor = 0;
  for (AgentId j = 0; j < num_agents_; ++j) {
    if (j == planner_agent_) continue;
    joint.per_agent[j] = IndexOf(ids[static_cast<std::size_t>(cursor++)]);
  }
  if (std::find(joints_.begin(), joints_.end(), joint) != joints_.end()) {
    throw ConfigError("duplicate joint policy in prior");
  }
  joints_.push_back(std::move(joint));
  prior_.push_back(weight);
}

void PolicySet::Finalize() {
  if (joints_.empty()) throw ConfigError("prior has no joint policies");
  if (planner_.empty()) throw ConfigError("planner policy set is empty");
  const double total = std::accumulate(prior_.begin(), prior_.end(), 0.0);
  if (!(total > 0.0)) throw ConfigError("prior weights sum to zero");
  for (double& p : prior_) p /= total;
  finalized_ = true;
}

int PolicySet::IndexOf(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw ConfigError("unknown policy id '" + id + "'");
  }
  return it->second;
}

bool PolicySet::Contains(const std::string& id) const {
  return index_.count(id) != 0;
}

std::string PolicySet::JointName(int k) const {
  std::string name;
  for (AgentId j = 0; j < num_agents_; ++j) {
    if (j == planner_agent_) continue;
    if (!name.empty()) name += "+";
    name += policies_[joints_[k].per_agent[j]]->id();
  }
  return name;
}

int PolicySet::JointIndexOf(const std::vector<std::string>& ids) const {
  for (int k = 0; k < num_joints(); ++k) {
    int cursor = 0;
    bool match = true;
    for (AgentId j = 0; j < num_agents_ && match; ++j) {
      if (j == planner_agent_) continue;
      match = policies_[joints_[k].per_agent[j]]->id() ==
              ids[static_cast<std::size_t>(cursor++)];
    }
    if (match) return k;
  }
  return -1;
}

void PolicySet::SetValueTable(int policy_index,
                              std::shared_ptr<const ValueTable> t) {
  value_tables_.at(static_cast<std::size_t>(policy_index)) = std::move(t);
}

const ValueTable* PolicySet::value_table(int policy_index) const {
  return value_tables_[static_cast<std::size_t>(policy_index)].get();
}

int SampleJointPolicy(const PolicySet& set, Rng& rng) {
  return rng.Categorical(set.prior());
}

std::optional<double> PolicyValue(const PolicySet& set, int policy_index,
                                  const PolicyState& state) {
  const Policy& policy = set.policy(policy_index);
  const ValueTable* table = set.value_table(policy_index);
  if (table == nullptr) return std::nullopt;
  if (policy.IsTerminalState(state)) return 0.0;
  auto feature = policy.ValueFeature(state);
  if (!feature) return std::nullopt;
  return table->Lookup(*feature);
}

std::shared_ptr<ValueTable> BuildValueTable(const PosgModel& model,
                                            const PolicySet& set,
                                            int policy_index, int episodes,
                                            int max_steps, int horizon,
                                            std::uint64_t seed,
                                            std::int64_t min_count) {
  auto table = std::make_shared<ValueTable>(min_count);
  const Policy& policy = set.policy(policy_index);
  const AgentId me = set.planner_agent();
  const int n = model.NumAgents();
  const double gamma = model.Discount();
  const bool obs_first = model.convention() == Convention::kObservationFirst;
  const int run_steps = horizon > 0 ? max_steps + horizon : max_steps;

  std::vector<double> rewards;
  std::vector<std::optional<std::uint64_t>> features;
  std::vector<char> terminal;
  for (int ep = 0; ep < episodes; ++ep) {
    Rng rng(DeriveSeed(seed, {stream::kValueTable,
                              static_cast<std::uint64_t>(policy_index),
                              static_cast<std::uint64_t>(ep)}));
    const JointPolicy& joint = set.joint(SampleJointPolicy(set, rng));
    InitialSample init = model.SampleInitial(rng);
    State state = init.state;
    PerAgent<PolicyState> memory(n);
    for (AgentId j = 0; j < n; ++j) {
      const Policy& pj = j == me ? policy : set.policy(joint.per_agent[j]);
      memory[j] = pj.InitialState(
          obs_first ? std::optional<Observation>(init.joint_obs[j])
                    : std::nullopt);
    }
    rewards.clear();
    features.clear();
    terminal.clear();
    for (int t = 0; t < run_steps; ++t) {
      if (model.IsAgentDone(state, me)) break;
      features.push_back(policy.ValueFeature(memory[me]));
      terminal.push_back(policy.IsTerminalState(memory[me]) ? 1 : 0);
      JointAction action(n);
      for (AgentId j = 0; j < n; ++j) {
        const Policy& pj = j == me ? policy : set.policy(joint.per_agent[j]);
        action[j] = SampleAction(pj, memory[j], rng);
      }
      GenerativeStep step = model.Step(state, action, rng);
      for (AgentId j = 0; j < n; ++j) {
        const Policy& pj = j == me ? policy : set.policy(joint.per_agent[j]);
        memory[j] = pj.NextState(memory[j], action[j], step.joint_obs[j]);
      }
      rewards.push_back(step.joint_reward[me]);
      state = step.next_state;
    }
    // Histories after the agent is done are worth 0.
    const int len = static_cast<int>(rewards.size());
    const int record = std::min(len, max_steps);
    if (horizon <= 0) {
      double to_go = 0.0;
      for (int t = len - 1; t >= 0; --t) {
        to_go = rewards[t] + gamma * to_go;
        if (t < record && features[t] && !terminal[t]) {
          table->Add(*features[t], to_go);
        }
      }
    } else {
      for (int t = 0; t < record; ++t) {
        if (!features[t] || terminal[t]) continue;
        double to_go = 0.0;
        double w = 1.0;
        for (int k = 0; k < horizon && t + k < len; ++k) {
          to_go += w * rewards[t + k];
          w *= gamma;
        }
        table->Add(*features[t], to_go);
      }
    }
  }
  return table;
}

}  // namespace potmmcp
