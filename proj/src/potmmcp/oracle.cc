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

#include "potmmcp/oracle.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace potmmcp::oracle {

namespace {

using Weights = std::vector<std::pair<int, double>>;

std::vector<double> Dist(const Policy& pi, const PolicyState& state) {
  std::vector<double> d(static_cast<std::size_t>(pi.num_actions()));
  pi.ActionDist(state, d);
  return d;
}

double Mass(const Weights& w) {
  double total = 0.0;
  for (const auto& [k, p] : w) total += p;
  return total;
}

// Successor weights over W_{t+1} after the planner takes `a` and sees `o`.
Weights Advance(const DerivedPomdp& d, int t, const Weights& alpha, Action a,
                Observation o) {
  std::unordered_map<int, double> acc;
  for (const auto& [w, p] : alpha) {
    for (const auto& succ : d.Transition(t, w, a)) {
      const double z = d.Obs(t + 1, succ.next, a, o);
      if (z == 0.0) continue;
      acc[succ.next] += p * succ.prob * z;
    }
  }
  Weights out(acc.begin(), acc.end());
  std::sort(out.begin(), out.end());
  return out;
}

double ExpectedReward(const DerivedPomdp& d, int t, const Weights& alpha,
                      Action a) {
  double r = 0.0;
  for (const auto& [w, p] : alpha) r += p * d.Reward(t, w, a);
  return r;
}

// Unnormalized value of following pi from weights alpha at time t.
double EvaluateWeights(const DerivedPomdp& d, const Policy& pi, int t,
                       const Weights& alpha, const PolicyState& ps) {
  if (t >= d.horizon()) return 0.0;
  const std::vector<double> dist = Dist(pi, ps);
  double v = 0.0;
  for (Action a = 0; a < d.num_actions(); ++a) {
    const double p = dist[static_cast<std::size_t>(a)];
    if (p == 0.0) continue;
    double q = ExpectedReward(d, t, alpha, a);
    if (t + 1 < d.horizon()) {
      for (int o = 0; o < d.num_observations(); ++o) {
        const auto obs = static_cast<Observation>(o);
        Weights next = Advance(d, t, alpha, a, obs);
        if (next.empty()) continue;
        q += d.gamma() *
             EvaluateWeights(d, pi, t + 1, next, pi.NextState(ps, a, obs));
      }
    }
    v += p * q;
  }
  return v;
}

}  // namespace

DerivedPomdp::DerivedPomdp(std::shared_ptr<const TinyPosgModel> model,
                           std::shared_ptr<const PolicySet> set, int horizon)
    : model_(std::move(model)),
      set_(std::move(set)),
      horizon_(horizon),
      me_(set_->planner_agent()),
      other_(1 - set_->planner_agent()) {
  POTMMCP_CHECK(horizon_ >= 1, ContractViolation,
                "derived model needs horizon >= 1");
  POTMMCP_CHECK(model_->NumAgents() == 2, ContractViolation,
                "derived model supports two agents");
  const TinyPosgModel& m = *model_;
  auto policy_of = [&](int joint) -> const Policy& {
    return set_->policy(set_->joint(joint).per_agent[other_]);
  };

  layers_.resize(static_cast<std::size_t>(horizon_));
  auto& first = layers_[0];
  for (int s = 0; s < m.NumStates(); ++s) {
    if (m.Initial(s) == 0.0) continue;
    for (int k = 0; k < set_->num_joints(); ++k) {
      if (set_->prior()[k] == 0.0) continue;
      for (int oj = 0; oj < m.NumObservations(other_); ++oj) {
        const double z = m.InitialObs(other_, s, oj);
        if (z == 0.0) continue;
        const auto obs = static_cast<Observation>(oj);
        first.push_back({s, k, History::ObservationFirst(obs),
                         policy_of(k).InitialState(obs)});
        initial_.push_back(m.Initial(s) * set_->prior()[k] * z);
      }
    }
  }

  const int na = m.NumActions(me_);
  trans_.resize(static_cast<std::size_t>(std::max(horizon_ - 1, 0)));
  reward_.resize(static_cast<std::size_t>(horizon_));
  for (int t = 0; t < horizon_; ++t) {
    auto& layer = layers_[static_cast<std::size_t>(t)];
    if (layer.size() > kLayerCap) {
      throw CapacityError("derived model layer " + std::to_string(t) +
                          " has " + std::to_string(layer.size()) +
                          " states, above the cap of " +
                          std::to_string(kLayerCap) +
                          "; use a smaller horizon or instance");
    }
    auto& rewards = reward_[static_cast<std::size_t>(t)];
    rewards.assign(layer.size(), std::vector<double>(static_cast<std::size_t>(na)));
    const bool last = t + 1 >= horizon_;
    std::map<std::tuple<int, int, History>, int> index;
    std::vector<WState> next_layer;
    if (!last) trans_[static_cast<std::size_t>(t)].resize(layer.size());
    for (std::size_t w = 0; w < layer.size(); ++w) {
      const WState ws = layer[w];
      const Policy& pj = policy_of(ws.joint);
      const std::vector<double> dj = Dist(pj, ws.summary);
      for (Action ai = 0; ai < na; ++ai) {
        double r = 0.0;
        std::vector<Succ> row;
        for (Action aj = 0; aj < m.NumActions(other_); ++aj) {
          const double p = dj[static_cast<std::size_t>(aj)];
          if (p == 0.0) continue;
          const Action a0 = me_ == 0 ? ai : aj;
          const Action a1 = me_ == 0 ? aj : ai;
          r += p * m.Reward(me_, ws.s, a0, a1);
          if (last) continue;
          for (int s2 = 0; s2 < m.NumStates(); ++s2) {
            const double tp = m.Transition(ws.s, a0, a1, s2);
            if (tp == 0.0) continue;
            for (int oj = 0; oj < m.NumObservations(other_); ++oj) {
              const double z = m.Obs(other_, s2, a0, a1, oj);
              if (z == 0.0) continue;
              const auto obs = static_cast<Observation>(oj);
              History h = ws.other.Extended(aj, obs);
              auto key = std::make_tuple(s2, ws.joint, h);
              auto it = index.find(key);
              int id;
              if (it == index.end()) {
                id = static_cast<int>(next_layer.size());
                next_layer.push_back(
                    {s2, ws.joint, std::move(h), pj.NextState(ws.summary, aj, obs)});
                index.emplace(std::move(key), id);
              } else {
                id = it->second;
              }
              row.push_back({id, p * tp * z});
            }
          }
        }
        rewards[w][static_cast<std::size_t>(ai)] = r;
        if (!last) trans_[static_cast<std::size_t>(t)][w].push_back(std::move(row));
      }
    }
    if (!last) layers_[static_cast<std::size_t>(t + 1)] = std::move(next_layer);
  }
}

double DerivedPomdp::InitialObs(int w, Observation o) const {
  return model_->InitialObs(me_, state(0, w).s, static_cast<int>(o));
}

double DerivedPomdp::Obs(int t_next, int w_next, Action a, Observation o) const {
  const WState& ws = state(t_next, w_next);
  const Action aj = ws.other.steps().back().first;
  const Action a0 = me_ == 0 ? a : aj;
  const Action a1 = me_ == 0 ? aj : a;
  return model_->Obs(me_, ws.s, a0, a1, static_cast<int>(o));
}

Weights DerivedPomdp::RootWeights(Observation o) const {
  Weights out;
  for (int w = 0; w < LayerSize(0); ++w) {
    const double p = Initial(w) * InitialObs(w, o);
    if (p > 0.0) out.emplace_back(w, p);
  }
  return out;
}

std::map<Observation, double> DerivedPolicyValue(const DerivedPomdp& derived,
                                                 const Policy& pi) {
  std::map<Observation, double> out;
  for (int o = 0; o < derived.num_observations(); ++o) {
    const auto obs = static_cast<Observation>(o);
    Weights alpha = derived.RootWeights(obs);
    const double mass = Mass(alpha);
    if (mass == 0.0) continue;
    out[obs] =
        EvaluateWeights(derived, pi, 0, alpha, pi.InitialState(obs)) / mass;
  }
  return out;
}

std::map<Observation, double> DirectPolicyValue(const TinyPosgModel& model,
                                                const PolicySet& set,
                                                const Policy& pi, int horizon) {
  const AgentId me = set.planner_agent();
  const AgentId other = 1 - me;
  const double gamma = model.Discount();

  // Value of the joint configuration at time t, straight from the tables.
  auto eval = [&](auto&& self, int t, int s, const Policy& pj,
                  const PolicyState& psj, const PolicyState& psi) -> double {
    if (t >= horizon) return 0.0;
    const std::vector<double> di = Dist(pi, psi);
    const std::vector<double> dj = Dist(pj, psj);
    double v = 0.0;
    for (Action ai = 0; ai < model.NumActions(me); ++ai) {
      if (di[static_cast<std::size_t>(ai)] == 0.0) continue;
      for (Action aj = 0; aj < model.NumActions(other); ++aj) {
        const double p =
            di[static_cast<std::size_t>(ai)] * dj[static_cast<std::size_t>(aj)];
        if (p == 0.0) continue;
        const Action a0 = me == 0 ? ai : aj;
        const Action a1 = me == 0 ? aj : ai;
        double q = model.Reward(me, s, a0, a1);
        if (t + 1 < horizon) {
          for (int s2 = 0; s2 < model.NumStates(); ++s2) {
            const double tp = model.Transition(s, a0, a1, s2);
            if (tp == 0.0) continue;
            for (int oi = 0; oi < model.NumObservations(me); ++oi) {
              const double zi = model.Obs(me, s2, a0, a1, oi);
              if (zi == 0.0) continue;
              for (int oj = 0; oj < model.NumObservations(other); ++oj) {
                const double zj = model.Obs(other, s2, a0, a1, oj);
                if (zj == 0.0) continue;
                q += gamma * tp * zi * zj *
                     self(self, t + 1, s2, pj,
                          pj.NextState(psj, aj, static_cast<Observation>(oj)),
                          pi.NextState(psi, ai, static_cast<Observation>(oi)));
              }
            }
          }
        }
        v += p * q;
      }
    }
    return v;
  };

  std::map<Observation, double> out;
  for (int o = 0; o < model.NumObservations(me); ++o) {
    const auto obs = static_cast<Observation>(o);
    double mass = 0.0;
    double total = 0.0;
    for (int s = 0; s < model.NumStates(); ++s) {
      const double zi = model.InitialObs(me, s, o);
      if (model.Initial(s) == 0.0 || zi == 0.0) continue;
      mass += model.Initial(s) * zi;
      for (int k = 0; k < set.num_joints(); ++k) {
        const Policy& pj = set.policy(set.joint(k).per_agent[other]);
        for (int oj = 0; oj < model.NumObservations(other); ++oj) {
          const double zj = model.InitialObs(other, s, oj);
          if (zj == 0.0) continue;
          const double w = model.Initial(s) * zi * set.prior()[k] * zj;
          total += w * eval(eval, 0, s, pj,
                            pj.InitialState(static_cast<Observation>(oj)),
                            pi.InitialState(obs));
        }
      }
    }
    if (mass > 0.0) out[obs] = total / mass;
  }
  return out;
}

namespace {

double OptimalRec(const DerivedPomdp& d, int t, const Weights& alpha,
                  std::vector<double>* q_out) {
  if (t >= d.horizon()) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (Action a = 0; a < d.num_actions(); ++a) {
    double q = ExpectedReward(d, t, alpha, a);
    if (t + 1 < d.horizon()) {
      for (int o = 0; o < d.num_observations(); ++o) {
        Weights next = Advance(d, t, alpha, a, static_cast<Observation>(o));
        if (next.empty()) continue;
        q += d.gamma() * OptimalRec(d, t + 1, next, nullptr);
      }
    }
    if (q_out != nullptr) (*q_out)[static_cast<std::size_t>(a)] = q;
    best = std::max(best, q);
  }
  return best;
}

}  // namespace

OptimalResult OptimalValue(const DerivedPomdp& derived, Observation root_obs) {
  OptimalResult r;
  r.root_obs = root_obs;
  Weights alpha = derived.RootWeights(root_obs);
  const double mass = Mass(alpha);
  double prior_mass = 0.0;
  for (int w = 0; w < derived.LayerSize(0); ++w) prior_mass += derived.Initial(w);
  r.root_prob = prior_mass > 0.0 ? mass / prior_mass : 0.0;
  if (mass == 0.0) {
    throw DepletionError("root observation has zero probability");
  }
  for (auto& [w, p] : alpha) p /= mass;
  r.q.assign(static_cast<std::size_t>(derived.num_actions()), 0.0);
  r.value = OptimalRec(derived, 0, alpha, &r.q);
  for (int a = 0; a < derived.num_actions(); ++a) {
    if (r.q[static_cast<std::size_t>(a)] >= r.value - 1e-6) {
      r.optimal_actions.push_back(a);
    }
  }
  return r;
}

std::vector<OptimalResult> OptimalValues(const DerivedPomdp& derived) {
  std::vector<OptimalResult> out;
  for (int o = 0; o < derived.num_observations(); ++o) {
    const auto obs = static_cast<Observation>(o);
    if (Mass(derived.RootWeights(obs)) == 0.0) continue;
    out.push_back(OptimalValue(derived, obs));
  }
  return out;
}

std::shared_ptr<ValueTable> ExactValueTable(const DerivedPomdp& derived,
                                            const Policy& pi) {
  auto table = std::make_shared<ValueTable>();
  auto visit = [&](auto&& self, int t, const Weights& alpha,
                   const PolicyState& ps) -> void {
    if (t >= derived.horizon()) return;
    const auto feature = pi.ValueFeature(ps);
    if (!feature) {
      throw ContractViolation("policy '" + pi.id() + "' has no value feature");
    }
    table->Add(*feature,
               EvaluateWeights(derived, pi, t, alpha, ps) / Mass(alpha));
    if (t + 1 >= derived.horizon()) return;
    for (Action a = 0; a < derived.num_actions(); ++a) {
      for (int o = 0; o < derived.num_observations(); ++o) {
        const auto obs = static_cast<Observation>(o);
        Weights next = Advance(derived, t, alpha, a, obs);
        if (next.empty() || Mass(next) == 0.0) continue;
        self(self, t + 1, next, pi.NextState(ps, a, obs));
      }
    }
  };
  for (int o = 0; o < derived.num_observations(); ++o) {
    const auto obs = static_cast<Observation>(o);
    Weights alpha = derived.RootWeights(obs);
    if (alpha.empty()) continue;
    visit(visit, 0, alpha, pi.InitialState(obs));
  }
  return table;
}

HistoryDistribution ExactRolloutDistribution(const DerivedPomdp& derived,
                                             const Policy& pi,
                                             Observation root_obs, int depth) {
  POTMMCP_CHECK(depth >= 0 && depth < derived.horizon(), ContractViolation,
                "rollout depth must be below the derived horizon");
  Weights alpha = derived.RootWeights(root_obs);
  const double mass = Mass(alpha);
  if (mass == 0.0) throw DepletionError("root observation has zero probability");
  HistoryDistribution out;
  auto go = [&](auto&& self, int t, const Weights& a_w, const PolicyState& ps,
                const History& h) -> void {
    if (t == depth) {
      out[h] += Mass(a_w) / mass;
      return;
    }
    const std::vector<double> dist = Dist(pi, ps);
    for (Action a = 0; a < derived.num_actions(); ++a) {
      const double p = dist[static_cast<std::size_t>(a)];
      if (p == 0.0) continue;
      for (int o = 0; o < derived.num_observations(); ++o) {
        const auto obs = static_cast<Observation>(o);
        Weights next = Advance(derived, t, a_w, a, obs);
        if (next.empty()) continue;
        for (auto& [w, x] : next) x *= p;
        self(self, t + 1, next, pi.NextState(ps, a, obs), h.Extended(a, obs));
      }
    }
  };
  go(go, 0, alpha, pi.InitialState(root_obs),
     History::ObservationFirst(root_obs));
  return out;
}

HistoryDistribution SampledRolloutDistribution(const TinyPosgModel& model,
                                               const PolicySet& set,
                                               const Policy& pi,
                                               Observation root_obs, int depth,
                                               int k, std::uint64_t seed) {
  const AgentId me = set.planner_agent();
  const AgentId other = 1 - me;
  Rng rng(seed);
  HistoryDistribution out;
  const double unit = 1.0 / static_cast<double>(k);
  constexpr int kMaxRejections = 1000000;
  for (int sim = 0; sim < k; ++sim) {
    int joint = 0;
    InitialSample init;
    int tries = 0;
    do {
      if (++tries > kMaxRejections) {
        throw DepletionError("root observation is never sampled");
      }
      joint = SampleJointPolicy(set, rng);
      init = model.SampleInitial(rng);
    } while (init.joint_obs[me] != root_obs);
    const Policy& pj = set.policy(set.joint(joint).per_agent[other]);
    State s = init.state;
    PolicyState psi = pi.InitialState(root_obs);
    PolicyState psj = pj.InitialState(init.joint_obs[other]);
    History h = History::ObservationFirst(root_obs);
    for (int t = 0; t < depth; ++t) {
      JointAction a(2);
      a[me] = SampleAction(pi, psi, rng);
      a[other] = SampleAction(pj, psj, rng);
      GenerativeStep step = model.Step(s, a, rng);
      psi = pi.NextState(psi, a[me], step.joint_obs[me]);
      psj = pj.NextState(psj, a[other], step.joint_obs[other]);
      h.Append(a[me], step.joint_obs[me]);
      s = step.next_state;
    }
    out[h] += unit;
  }
  return out;
}

double ExhaustiveOptimalValue(const TinyPosgModel& model, const PolicySet& set,
                              Observation root_obs, int horizon,
                              std::int64_t max_trees) {
  const AgentId me = set.planner_agent();
  const AgentId other = 1 - me;
  const int na = model.NumActions(me);
  const int no = model.NumObservations(me);
  const double gamma = model.Discount();
  // Level d of the tree holds no^d nodes, one per observation sequence.
  std::vector<std::int64_t> offset{0};
  for (int d = 0; d < horizon; ++d) {
    offset.push_back(offset.back() +
                     static_cast<std::int64_t>(std::pow(no, d)));
  }
  const std::int64_t nodes = offset.back();
  double trees = std::pow(static_cast<double>(na), static_cast<double>(nodes));
  if (trees > static_cast<double>(max_trees)) {
    throw CapacityError("exhaustive enumeration needs " +
                        std::to_string(trees) + " policy trees");
  }
  std::vector<int> tree(static_cast<std::size_t>(nodes), 0);

  auto eval = [&](auto&& self, int d, std::int64_t seq, int s, const Policy& pj,
                  const PolicyState& psj) -> double {
    const Action ai = tree[static_cast<std::size_t>(offset[d] + seq)];
    const std::vector<double> dj = Dist(pj, psj);
    double v = 0.0;
    for (Action aj = 0; aj < model.NumActions(other); ++aj) {
      const double p = dj[static_cast<std::size_t>(aj)];
      if (p == 0.0) continue;
      const Action a0 = me == 0 ? ai : aj;
      const Action a1 = me == 0 ? aj : ai;
      double q = model.Reward(me, s, a0, a1);
      if (d + 1 < horizon) {
        for (int s2 = 0; s2 < model.NumStates(); ++s2) {
          const double tp = model.Transition(s, a0, a1, s2);
          if (tp == 0.0) continue;
          for (int oi = 0; oi < no; ++oi) {
            const double zi = model.Obs(me, s2, a0, a1, oi);
            if (zi == 0.0) continue;
            for (int oj = 0; oj < model.NumObservations(other); ++oj) {
              const double zj = model.Obs(other, s2, a0, a1, oj);
              if (zj == 0.0) continue;
              q += gamma * tp * zi * zj *
                   self(self, d + 1, seq * no + oi, s2, pj,
                        pj.NextState(psj, aj, static_cast<Observation>(oj)));
            }
          }
        }
      }
      v += p * q;
    }
    return v;
  };

  double best = -std::numeric_limits<double>::infinity();
  const auto count = static_cast<std::int64_t>(trees);
  for (std::int64_t code = 0; code < count; ++code) {
    std::int64_t c = code;
    for (auto& a : tree) {
      a = static_cast<int>(c % na);
      c /= na;
    }
    double mass = 0.0;
    double total = 0.0;
    for (int s = 0; s < model.NumStates(); ++s) {
      const double zi = model.InitialObs(me, s, static_cast<int>(root_obs));
      if (model.Initial(s) == 0.0 || zi == 0.0) continue;
      mass += model.Initial(s) * zi;
      for (int k = 0; k < set.num_joints(); ++k) {
        const Policy& pj = set.policy(set.joint(k).per_agent[other]);
        for (int oj = 0; oj < model.NumObservations(other); ++oj) {
          const double zj = model.InitialObs(other, s, oj);
          if (zj == 0.0) continue;
          total += model.Initial(s) * zi * set.prior()[k] * zj *
                   eval(eval, 0, 0, s, pj,
                        pj.InitialState(static_cast<Observation>(oj)));
        }
      }
    }
    if (mass == 0.0) throw DepletionError("root observation has zero probability");
    best = std::max(best, total / mass);
  }
  return best;
}

nlohmann::json OracleReport(const std::string& instance,
                            const DerivedPomdp& derived) {
  nlohmann::json roots = nlohmann::json::array();
  for (const OptimalResult& r : OptimalValues(derived)) {
    roots.push_back({{"root_obs", r.root_obs},
                     {"root_prob", r.root_prob},
                     {"v_star", r.value},
                     {"q_star", r.q},
                     {"optimal_actions", r.optimal_actions}});
  }
  nlohmann::json layers = nlohmann::json::array();
  for (int t = 0; t < derived.horizon(); ++t) layers.push_back(derived.LayerSize(t));
  return {{"instance", instance},
          {"horizon", derived.horizon()},
          {"gamma", derived.gamma()},
          {"layer_sizes", layers},
          {"roots", roots}};
}

}  // namespace potmmcp::oracle
