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

#ifndef POTMMCP_ORACLE_H_
#define POTMMCP_ORACLE_H_

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "json.hpp"
#include "potmmcp/policy.h"
#include "potmmcp/tiny_posg.h"

// Exact computations on two-agent tiny models. Everything here is
// deterministic; the only sampling entry point is SampledRolloutDistribution.
namespace potmmcp::oracle {

inline constexpr std::size_t kLayerCap = 200000;

// Single-agent POMDP over history-policy-states w = (s, joint, h_other),
// enumerated layer by layer up to a finite horizon.
class DerivedPomdp {
 public:
  struct WState {
    int s = 0;
    int joint = 0;
    History other;       // full history of the non-planner agent
    PolicyState summary;  // its policy's summary of `other`
  };
  struct Succ {
    int next = 0;
    double prob = 0.0;
  };

  // Layers W_0 .. W_{horizon-1}. Throws CapacityError when a layer exceeds
  // kLayerCap. Requires an observation-first two-agent model.
  DerivedPomdp(std::shared_ptr<const TinyPosgModel> model,
               std::shared_ptr<const PolicySet> set, int horizon);

  int horizon() const { return horizon_; }
  double gamma() const { return model_->Discount(); }
  int num_actions() const { return model_->NumActions(me_); }
  int num_observations() const { return model_->NumObservations(me_); }
  AgentId planner() const { return me_; }
  const TinyPosgModel& model() const { return *model_; }
  const PolicySet& set() const { return *set_; }

  int LayerSize(int t) const {
    return static_cast<int>(layers_[static_cast<std::size_t>(t)].size());
  }
  const WState& state(int t, int w) const {
    return layers_[static_cast<std::size_t>(t)][static_cast<std::size_t>(w)];
  }
  // b0(w) for w in W_0.
  double Initial(int w) const { return initial_[static_cast<std::size_t>(w)]; }
  // Probability of the planner's initial observation in w.
  double InitialObs(int w, Observation o) const;
  // T(w, a, .) as a sparse row over W_{t+1}; defined for t < horizon - 1.
  const std::vector<Succ>& Transition(int t, int w, Action a) const {
    return trans_[static_cast<std::size_t>(t)][static_cast<std::size_t>(w)]
                 [static_cast<std::size_t>(a)];
  }
  // Z(w', a, o) for w' in W_{t+1}; uses the other agent's last action in w'.
  double Obs(int t_next, int w_next, Action a, Observation o) const;
  // R(w, a), the planner's reward marginalized over the other's policy.
  double Reward(int t, int w, Action a) const {
    return reward_[static_cast<std::size_t>(t)][static_cast<std::size_t>(w)]
                  [static_cast<std::size_t>(a)];
  }

  // Unnormalized layer-0 weights b0(w) * Z0(w, o).
  std::vector<std::pair<int, double>> RootWeights(Observation o) const;

 private:
  std::shared_ptr<const TinyPosgModel> model_;
  std::shared_ptr<const PolicySet> set_;
  int horizon_;
  AgentId me_;
  AgentId other_;
  std::vector<std::vector<WState>> layers_;
  std::vector<double> initial_;
  std::vector<std::vector<std::vector<std::vector<Succ>>>> trans_;
  std::vector<std::vector<std::vector<double>>> reward_;
};

// V^{pi}(o) for every planner initial observation o with positive
// probability, over the derived model's horizon.
std::map<Observation, double> DerivedPolicyValue(const DerivedPomdp& derived,
                                                 const Policy& pi);

// The same quantity computed directly from the game tables, without the
// derived model.
std::map<Observation, double> DirectPolicyValue(const TinyPosgModel& model,
                                                const PolicySet& set,
                                                const Policy& pi, int horizon);

struct OptimalResult {
  Observation root_obs = 0;
  double root_prob = 0.0;  // probability of the root observation
  double value = 0.0;
  std::vector<double> q;
  std::vector<int> optimal_actions;  // within 1e-6 of the best q
};

// Finite-horizon Bayes-optimal value at the history (o) by backward
// induction over planner histories with exact beliefs.
OptimalResult OptimalValue(const DerivedPomdp& derived, Observation root_obs);
// One result per root observation with positive probability.
std::vector<OptimalResult> OptimalValues(const DerivedPomdp& derived);

// Exact V^{pi}(h) for every planner history h of length < horizon, over the
// remaining horizon - |h| steps, keyed by pi's value feature.
std::shared_ptr<ValueTable> ExactValueTable(const DerivedPomdp& derived,
                                            const Policy& pi);

using HistoryDistribution = std::map<History, double>;

// Distribution of the planner history after `depth` steps of following pi
// from the root history (o), by forward enumeration of the derived model
// (which must have horizon > depth).
HistoryDistribution ExactRolloutDistribution(const DerivedPomdp& derived,
                                             const Policy& pi,
                                             Observation root_obs, int depth);

// Empirical distribution from `k` simulations, each root-sampling a state,
// joint policy and initial observations consistent with (o) and then
// following pi for `depth` steps.
HistoryDistribution SampledRolloutDistribution(const TinyPosgModel& model,
                                               const PolicySet& set,
                                               const Policy& pi,
                                               Observation root_obs, int depth,
                                               int k, std::uint64_t seed);

// Best value over all deterministic planner policy trees of the given depth,
// from the root history (o), by enumeration. Intended for single-type sets.
// Throws CapacityError when the number of trees exceeds `max_trees`.
double ExhaustiveOptimalValue(const TinyPosgModel& model, const PolicySet& set,
                              Observation root_obs, int horizon,
                              std::int64_t max_trees = 1 << 22);

// Per-instance oracle summary: horizon and every root's V* and optimal set.
nlohmann::json OracleReport(const std::string& instance,
                            const DerivedPomdp& derived);

}  // namespace potmmcp::oracle

#endif  // POTMMCP_ORACLE_H_
