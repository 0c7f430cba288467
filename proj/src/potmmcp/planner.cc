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

#include "potmmcp/planner.h"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>

namespace potmmcp {

namespace {

// Uniform choice among the indices whose score equals the maximum.
template <class Score>
int ArgmaxTieBreak(int n, Score&& score, Rng& rng) {
  std::array<int, 32> ties{};
  int count = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < n; ++a) {
    const double s = score(a);
    if (s > best) {
      best = s;
      count = 0;
    }
    if (s == best && count < static_cast<int>(ties.size())) ties[count++] = a;
  }
  if (count <= 1) return ties[0];
  return ties[static_cast<std::size_t>(rng.UniformInt(count))];
}

}  // namespace

SearchNode* SearchNode::FindChild(Action a, Observation o) const {
  for (const ChildEntry& c : children) {
    if (c.action == a && c.obs == o) return c.node.get();
  }
  return nullptr;
}

Planner::Planner(std::shared_ptr<const PosgModel> model,
                 std::shared_ptr<const PolicySet> set,
                 std::vector<SearchPolicy> search_policies,
                 std::optional<BoundMetaPolicy> meta, PlannerConfig config,
                 std::uint64_t seed)
    : model_(std::move(model)),
      set_(std::move(set)),
      search_(std::move(search_policies)),
      meta_(std::move(meta)),
      config_(config),
      me_(set_->planner_agent()),
      num_actions_(model_->NumActions(me_)),
      horizon_(HorizonForEpsilon(model_->Discount(), config.epsilon)),
      gamma_(model_->Discount()),
      node_cap_(config.node_particle_cap > 0 ? config.node_particle_cap
                                             : config.num_particles),
      rng_(seed) {
  POTMMCP_CHECK(!search_.empty(), ConfigError, "planner needs a search policy");
  POTMMCP_CHECK(config_.c > 0.0, ConfigError, "planner c must be > 0");
  POTMMCP_CHECK(config_.lambda >= 0.0 && config_.lambda <= 1.0, ConfigError,
                "planner lambda must lie in [0, 1]");
  POTMMCP_CHECK(config_.num_particles >= 1, ConfigError,
                "planner num_particles must be >= 1");
  POTMMCP_CHECK(config_.simulations >= 1 || config_.time_limit_s > 0.0,
                ConfigError, "planner needs a simulation or time budget");
  if (meta_) {
    POTMMCP_CHECK(meta_->policy_index().size() == search_.size(), ConfigError,
                  "meta-policy and search policies disagree in size");
  }
  for (const SearchPolicy& p : search_) {
    POTMMCP_CHECK(p.policy->num_actions() == num_actions_, ConfigError,
                  "search policy '" + p.policy->id() +
                      "' has the wrong action count");
  }
}

std::unique_ptr<SearchNode> Planner::MakeNode(
    std::vector<PolicyState> policy_states) const {
  auto node = std::make_unique<SearchNode>();
  node->policy_states = std::move(policy_states);
  node->dist_cache.assign(search_.size() * static_cast<std::size_t>(num_actions_),
                          0.0);
  node->dist_ready.assign(search_.size(), 0);
  return node;
}

void Planner::Reset(std::optional<Observation> initial_obs) {
  history_ = initial_obs ? History::ObservationFirst(*initial_obs)
                         : History::ActionFirst();
  std::vector<PolicyState> states;
  states.reserve(search_.size());
  for (const SearchPolicy& p : search_) {
    states.push_back(p.policy->InitialState(initial_obs));
  }
  root_ = MakeNode(std::move(states));
  belief_ = InitialBelief(*model_, *set_, config_.num_particles, initial_obs,
                          rng_);
  diag_ = SearchDiagnostics{};
  last_action_ = -1;
}

std::span<const double> Planner::PolicyDist(SearchNode& node, int slot) const {
  const auto k = static_cast<std::size_t>(slot);
  const auto a = static_cast<std::size_t>(num_actions_);
  std::span<double> out(node.dist_cache.data() + k * a, a);
  if (!node.dist_ready[k]) {
    search_[k].policy->ActionDist(node.policy_states[k], out);
    node.dist_ready[k] = 1;
  }
  return out;
}

double Planner::NormalizedQ(const Edge& e) const {
  if (e.n == 0) return 0.0;
  if (!config_.normalize_q) return e.q;
  if (!(q_max_ > q_min_)) return 0.0;
  return (e.q - q_min_) / (q_max_ - q_min_);
}

void Planner::ObserveQ(double q) {
  if (!q_seen_) {
    q_min_ = q_max_ = q;
    q_seen_ = true;
    return;
  }
  q_min_ = std::min(q_min_, q);
  q_max_ = std::max(q_max_, q);
}

void Planner::RescanQBounds() {
  q_seen_ = false;
  q_min_ = q_max_ = 0.0;
  std::vector<const SearchNode*> stack{root_.get()};
  while (!stack.empty()) {
    const SearchNode* node = stack.back();
    stack.pop_back();
    for (const Edge& e : node->edges) {
      if (e.n > 0) ObserveQ(e.q);
    }
    for (const auto& c : node->children) stack.push_back(c.node.get());
  }
}

int Planner::PuctSelect(const SearchNode& node, Rng& rng) const {
  const double sqrt_n = std::sqrt(static_cast<double>(node.visits));
  const double mix = config_.lambda / num_actions_;
  return ArgmaxTieBreak(
      num_actions_,
      [&](int a) {
        const Edge& e = node.edges[static_cast<std::size_t>(a)];
        const double u = config_.c * (e.p * (1.0 - config_.lambda) + mix) *
                         sqrt_n / (1.0 + static_cast<double>(e.n));
        return NormalizedQ(e) + u;
      },
      rng);
}

int Planner::UcbSelect(const SearchNode& node, Rng& rng) const {
  bool unvisited = false;
  for (const Edge& e : node.edges) unvisited |= e.n == 0;
  if (unvisited) {
    return ArgmaxTieBreak(
        num_actions_,
        [&](int a) {
          return node.edges[static_cast<std::size_t>(a)].n == 0 ? 1.0 : 0.0;
        },
        rng);
  }
  const double log_n = std::log(static_cast<double>(node.visits));
  return ArgmaxTieBreak(
      num_actions_,
      [&](int a) {
        const Edge& e = node.edges[static_cast<std::size_t>(a)];
        return NormalizedQ(e) +
               config_.c * std::sqrt(log_n / static_cast<double>(e.n));
      },
      rng);
}

SearchNode& Planner::ChildFor(SearchNode& node, Action a, Observation o) {
  if (SearchNode* child = node.FindChild(a, o)) return *child;
  std::vector<PolicyState> states;
  states.reserve(search_.size());
  for (std::size_t k = 0; k < search_.size(); ++k) {
    states.push_back(search_[k].policy->NextState(node.policy_states[k], a, o));
  }
  node.children.push_back({a, o, MakeNode(std::move(states))});
  return *node.children.back().node;
}

double Planner::Rollout(const Particle& w, PolicyState own, int slot,
                        int depth) {
  const Policy& policy = *search_[static_cast<std::size_t>(slot)].policy;
  ++diag_.rollouts;
  double ret = 0.0;
  double discount = 1.0;
  Particle cur = w;
  for (int d = depth; d < horizon_; ++d) {
    if (model_->IsAgentDone(cur.state, me_)) break;
    const Action a = SampleAction(policy, own, rng_);
    ParticleStep step = StepParticle(*model_, *set_, cur, a, rng_);
    ++diag_.generative_steps;
    ret += discount * step.joint_reward[me_];
    discount *= gamma_;
    own = policy.NextState(own, a, step.joint_obs[me_]);
    cur = step.next;
  }
  return ret;
}

double Planner::Expand(const Particle& w, SearchNode& node, int slot,
                       int depth) {
  node.expanded = true;
  node.edges.assign(static_cast<std::size_t>(num_actions_), Edge{});
  diag_.max_depth = std::max(diag_.max_depth, depth);
  if (config_.variant == Variant::kPotmmcp) {
    std::span<const double> dist = PolicyDist(node, slot);
    for (int a = 0; a < num_actions_; ++a) {
      node.edges[static_cast<std::size_t>(a)].p =
          dist[static_cast<std::size_t>(a)];
    }
  } else {
    for (Edge& e : node.edges) e.p = 1.0 / num_actions_;
  }
  const auto k = static_cast<std::size_t>(slot);
  if (config_.leaf == LeafEval::kValueFunction && search_[k].values) {
    const Policy& policy = *search_[k].policy;
    const PolicyState& state = node.policy_states[k];
    if (policy.IsTerminalState(state)) return 0.0;
    if (auto feature = policy.ValueFeature(state)) {
      if (auto v = search_[k].values->Lookup(*feature)) {
        ++diag_.value_lookups;
        return *v;
      }
    }
  }
  return Rollout(w, node.policy_states[k], slot, depth);
}

double Planner::Simulate(const Particle& w, SearchNode& node, int slot,
                         int depth) {
  if (depth >= horizon_) return 0.0;
  if (model_->IsAgentDone(w.state, me_)) return 0.0;
  if (!node.expanded) return Expand(w, node, slot, depth);

  const int a = config_.variant == Variant::kPotmmcp ? PuctSelect(node, rng_)
                                                     : UcbSelect(node, rng_);
  ParticleStep step = StepParticle(*model_, *set_, w, a, rng_);
  ++diag_.generative_steps;
  SearchNode& child = ChildFor(node, a, step.joint_obs[me_]);
  const double g = step.joint_reward[me_] +
                   gamma_ * Simulate(step.next, child, slot, depth + 1);
  if (static_cast<int>(child.particles.size()) < node_cap_) {
    child.particles.push_back(step.next);
  }

  Edge& e = node.edges[static_cast<std::size_t>(a)];
  e.n += 1;
  e.w += g;
  e.q = e.w / static_cast<double>(e.n);
  ObserveQ(e.q);
  node.visits += 1;
  if (config_.variant == Variant::kPotmmcp) {
    std::span<const double> dist = PolicyDist(node, slot);
    const double inv = 1.0 / static_cast<double>(node.visits);
    for (int b = 0; b < num_actions_; ++b) {
      Edge& eb = node.edges[static_cast<std::size_t>(b)];
      eb.p += (dist[static_cast<std::size_t>(b)] - eb.p) * inv;
    }
  }
  return g;
}

Action Planner::Search() {
  POTMMCP_CHECK(root_ != nullptr, ContractViolation,
                "planner used before Reset");
  if (belief_.empty()) throw DepletionError("root belief is empty");
  diag_ = SearchDiagnostics{};
  diag_.depleted = belief_.depleted;
  if (config_.normalize_q) RescanQBounds();

  const int n = belief_.size();
  auto run_one = [&] {
    const Particle& w =
        belief_.particles[static_cast<std::size_t>(rng_.UniformInt(n))];
    int slot = 0;
    if (meta_) {
      slot = meta_->SampleSlot(w.joint, rng_);
      ++diag_.meta_queries;
    }
    Simulate(w, *root_, slot, 0);
    ++diag_.simulations;
  };
  if (config_.time_limit_s > 0.0) {
    using Clock = std::chrono::steady_clock;
    const auto deadline =
        Clock::now() + std::chrono::duration<double>(config_.time_limit_s);
    do {
      run_one();
    } while (Clock::now() < deadline);
  } else {
    for (int k = 0; k < config_.simulations; ++k) run_one();
  }
  last_action_ = ArgmaxVisits(rng_);
  return last_action_;
}

int Planner::ArgmaxVisits(Rng& rng) const {
  if (!root_->expanded) return rng.UniformInt(num_actions_);
  return ArgmaxTieBreak(
      num_actions_,
      [&](int a) {
        return static_cast<double>(
            root_->edges[static_cast<std::size_t>(a)].n);
      },
      rng);
}

double Planner::RootValue() const {
  if (!root_ || !root_->expanded || last_action_ < 0) return 0.0;
  return root_->edges[static_cast<std::size_t>(last_action_)].q;
}

std::vector<std::int64_t> Planner::RootVisits() const {
  std::vector<std::int64_t> out(static_cast<std::size_t>(num_actions_), 0);
  if (root_ && root_->expanded) {
    for (int a = 0; a < num_actions_; ++a) {
      out[static_cast<std::size_t>(a)] =
          root_->edges[static_cast<std::size_t>(a)].n;
    }
  }
  return out;
}

void Planner::Update(Action action, Observation obs) {
  POTMMCP_CHECK(root_ != nullptr, ContractViolation,
                "planner used before Reset");
  history_.Append(action, obs);
  std::unique_ptr<SearchNode> next;
  for (auto& c : root_->children) {
    if (c.action == action && c.obs == obs) {
      next = std::move(c.node);
      break;
    }
  }
  if (!next) {
    std::vector<PolicyState> states;
    states.reserve(search_.size());
    for (std::size_t k = 0; k < search_.size(); ++k) {
      states.push_back(
          search_[k].policy->NextState(root_->policy_states[k], action, obs));
    }
    next = MakeNode(std::move(states));
  }
  std::vector<Particle> carried = std::move(next->particles);
  next->particles.clear();
  ParticleBelief updated =
      UpdateRootBelief(std::move(carried), belief_.particles, *model_, *set_,
                       action, obs, config_.num_particles, history_, rng_);
  root_ = std::move(next);
  belief_ = std::move(updated);
  last_action_ = -1;
}

std::vector<SearchPolicy> SearchPoliciesFor(const PolicySet& set,
                                            const BoundMetaPolicy& meta) {
  std::vector<SearchPolicy> out;
  for (int k : meta.policy_index()) {
    out.push_back({set.policy_ptr(k), set.value_table(k)});
  }
  return out;
}

std::vector<SearchPolicy> UniformSearchPolicy(int num_actions) {
  return {{std::make_shared<UniformRandomPolicy>("uniform_random", num_actions),
           nullptr}};
}

}  // namespace potmmcp
