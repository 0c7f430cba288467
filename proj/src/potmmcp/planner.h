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

#ifndef POTMMCP_PLANNER_H_
#define POTMMCP_PLANNER_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "potmmcp/belief.h"
#include "potmmcp/metagame.h"
#include "potmmcp/policy.h"
#include "potmmcp/posg.h"

namespace potmmcp {

enum class Variant {
  kPotmmcp,   // PUCT with meta-policy priors, averaged on every backup
  kIpomcpPf,  // UCB1 with normalized Q, Monte-Carlo rollouts at leaves
};

enum class LeafEval {
  kValueFunction,  // V^{pi_i}(h) when the policy has one, else a rollout
  kRollout,
};

struct PlannerConfig {
  Variant variant = Variant::kPotmmcp;
  double c = 1.25;
  double lambda = 0.5;
  double epsilon = 0.01;
  // Simulations per decision. When time_limit_s > 0 the search runs for that
  // many seconds instead.
  int simulations = 1000;
  double time_limit_s = 0.0;
  LeafEval leaf = LeafEval::kValueFunction;
  bool normalize_q = true;
  // Root belief target; tops up to TopUpTarget(num_particles).
  int num_particles = 100;
  // Particles retained per non-root node (0 = num_particles).
  int node_particle_cap = 0;

  static PlannerConfig IpomcpPf() {
    PlannerConfig c;
    c.variant = Variant::kIpomcpPf;
    c.c = 1.4142135623730951;
    c.leaf = LeafEval::kRollout;
    return c;
  }
};

// Policy the planner may follow during search, with its value table (null
// when it has none).
struct SearchPolicy {
  std::shared_ptr<const Policy> policy;
  const ValueTable* values = nullptr;
};

struct Edge {
  std::int64_t n = 0;
  double p = 0.0;
  double w = 0.0;
  double q = 0.0;
};

struct SearchNode {
  bool expanded = false;
  std::int64_t visits = 0;  // N(h) = sum over edges of n
  std::vector<Edge> edges;
  // Planner-side summary of this history for every search policy.
  std::vector<PolicyState> policy_states;
  std::vector<Particle> particles;
  // Lazily filled pi(. | h) per search policy, num_actions entries each.
  std::vector<double> dist_cache;
  std::vector<char> dist_ready;
  struct ChildEntry {
    Action action;
    Observation obs;
    std::unique_ptr<SearchNode> node;
  };
  std::vector<ChildEntry> children;

  SearchNode* FindChild(Action a, Observation o) const;
};

struct SearchDiagnostics {
  int simulations = 0;
  int max_depth = 0;
  std::int64_t generative_steps = 0;
  std::int64_t meta_queries = 0;
  std::int64_t rollouts = 0;
  std::int64_t value_lookups = 0;
  bool depleted = false;
};

class Planner {
 public:
  // `meta` maps a joint policy of the others to a distribution over
  // `search_policies` (same order as meta->policy_index()). Without it the
  // planner always follows search_policies[0] and never queries a
  // meta-policy.
  Planner(std::shared_ptr<const PosgModel> model,
          std::shared_ptr<const PolicySet> set,
          std::vector<SearchPolicy> search_policies,
          std::optional<BoundMetaPolicy> meta, PlannerConfig config,
          std::uint64_t seed);

  // Starts an episode from the planner's initial observation (nullopt under
  // the action-first convention).
  void Reset(std::optional<Observation> initial_obs);
  // Runs one search from the root and returns argmax_a N(root, a).
  Action Search();
  // Moves the root to the child for (action, obs) and refreshes the belief.
  void Update(Action action, Observation obs);

  const SearchNode& root() const { return *root_; }
  const ParticleBelief& belief() const { return belief_; }
  const SearchDiagnostics& diagnostics() const { return diag_; }
  const PlannerConfig& config() const { return config_; }
  const History& history() const { return history_; }
  int horizon() const { return horizon_; }
  // Q of the most visited root action.
  double RootValue() const;
  std::vector<std::int64_t> RootVisits() const;
  // Replaces the root belief (tests and oracle checks).
  void SetBelief(ParticleBelief belief) { belief_ = std::move(belief); }

  // Selection rules, exposed for tests. `rng` breaks ties uniformly.
  int PuctSelect(const SearchNode& node, Rng& rng) const;
  int UcbSelect(const SearchNode& node, Rng& rng) const;

 private:
  double Simulate(const Particle& w, SearchNode& node, int slot, int depth);
  double Expand(const Particle& w, SearchNode& node, int slot, int depth);
  double Rollout(const Particle& w, PolicyState own, int slot, int depth);
  SearchNode& ChildFor(SearchNode& node, Action a, Observation o);
  std::span<const double> PolicyDist(SearchNode& node, int slot) const;
  double NormalizedQ(const Edge& e) const;
  void ObserveQ(double q);
  void RescanQBounds();
  int ArgmaxVisits(Rng& rng) const;
  std::unique_ptr<SearchNode> MakeNode(
      std::vector<PolicyState> policy_states) const;

  std::shared_ptr<const PosgModel> model_;
  std::shared_ptr<const PolicySet> set_;
  std::vector<SearchPolicy> search_;
  std::optional<BoundMetaPolicy> meta_;
  PlannerConfig config_;
  AgentId me_;
  int num_actions_;
  int horizon_;
  double gamma_;
  int node_cap_;
  Rng rng_;

  std::unique_ptr<SearchNode> root_;
  ParticleBelief belief_;
  History history_;
  SearchDiagnostics diag_;
  double q_min_ = 0.0;
  double q_max_ = 0.0;
  bool q_seen_ = false;
  int last_action_ = -1;
};

// Search policies for the planner's own policy set (value tables attached),
// in the order of `meta.policy_index()`.
std::vector<SearchPolicy> SearchPoliciesFor(const PolicySet& set,
                                            const BoundMetaPolicy& meta);

// Single uniform-random search policy (the I-POMCP-PF + Random baseline).
std::vector<SearchPolicy> UniformSearchPolicy(int num_actions);

}  // namespace potmmcp

#endif  // POTMMCP_PLANNER_H_
