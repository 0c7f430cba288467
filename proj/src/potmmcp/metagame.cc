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

#include "potmmcp/metagame.h"

#include <algorithm>
#include <cmath>

#include "potmmcp/parallel.h"

namespace potmmcp {

using json = nlohmann::json;

PayoffTable::PayoffTable(std::vector<std::string> rows,
                         std::vector<std::string> cols)
    : rows_(std::move(rows)),
      cols_(std::move(cols)),
      cells_(rows_.size() * cols_.size()) {}

int PayoffTable::RowIndex(const std::string& id) const {
  auto it = std::find(rows_.begin(), rows_.end(), id);
  return it == rows_.end() ? -1 : static_cast<int>(it - rows_.begin());
}

int PayoffTable::ColIndex(const std::string& name) const {
  auto it = std::find(cols_.begin(), cols_.end(), name);
  return it == cols_.end() ? -1 : static_cast<int>(it - cols_.begin());
}

json PayoffTable::ToJson() const {
  json mean = json::array(), err = json::array(), count = json::array();
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    json m = json::array(), e = json::array(), c = json::array();
    for (std::size_t k = 0; k < cols_.size(); ++k) {
      const PayoffCell& x = cell(static_cast<int>(r), static_cast<int>(k));
      m.push_back(x.mean);
      e.push_back(x.stderr_mean);
      c.push_back(x.count);
    }
    mean.push_back(std::move(m));
    err.push_back(std::move(e));
    count.push_back(std::move(c));
  }
  return json{{"rows", rows_},
              {"cols", cols_},
              {"mean", mean},
              {"stderr", err},
              {"count", count},
              {"gamma", gamma},
              {"episodes_per_cell", episodes_per_cell},
              {"max_steps", max_steps},
              {"seed", seed}};
}

PayoffTable PayoffTable::FromJson(const json& j) {
  try {
    PayoffTable t(j.at("rows").get<std::vector<std::string>>(),
                  j.at("cols").get<std::vector<std::string>>());
    const auto& mean = j.at("mean");
    const auto& err = j.at("stderr");
    const auto& count = j.at("count");
    for (std::size_t r = 0; r < t.rows_.size(); ++r) {
      for (std::size_t c = 0; c < t.cols_.size(); ++c) {
        PayoffCell& x = t.cell(static_cast<int>(r), static_cast<int>(c));
        x.mean = mean.at(r).at(c).get<double>();
        x.stderr_mean = err.at(r).at(c).get<double>();
        x.count = count.at(r).at(c).get<std::int64_t>();
      }
    }
    t.gamma = j.value("gamma", 0.0);
    t.episodes_per_cell = j.value("episodes_per_cell", 0);
    t.max_steps = j.value("max_steps", 0);
    t.seed = j.value("seed", std::uint64_t{0});
    return t;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("payoff table: ") + e.what());
  }
}

PayoffCell SimulateCell(const PosgModel& model, const PolicySet& set, int row,
                        int joint, const PayoffOptions& options) {
  POTMMCP_CHECK(options.episodes_per_cell >= 1, ConfigError,
                "episodes_per_cell must be >= 1");
  const int n = model.NumAgents();
  const AgentId planner = set.planner_agent();
  const int max_steps =
      options.max_steps > 0 ? options.max_steps : model.StepLimit();
  POTMMCP_CHECK(max_steps > 0, ConfigError,
                "max_steps must be set for models without a step limit");
  const bool obs_first = model.convention() == Convention::kObservationFirst;
  const double gamma = model.Discount();
  const std::uint64_t cell_seed =
      DeriveSeed(options.seed, {stream::kPayoffCell,
                                HashTag(set.policy(row).id()),
                                HashTag(set.JointName(joint))});

  // Other agents' policies in seat order, planner seat removed.
  std::vector<int> others;
  for (AgentId j = 0; j < n; ++j) {
    if (j != planner) others.push_back(set.joint(joint).per_agent[j]);
  }

  std::vector<double> returns;
  returns.reserve(static_cast<std::size_t>(options.episodes_per_cell));
  for (int e = 0; e < options.episodes_per_cell; ++e) {
    Rng rng(DeriveSeed(cell_seed, {static_cast<std::uint64_t>(e)}));
    const AgentId seat = model.IsSymmetric() ? e % n : planner;
    std::vector<const Policy*> seats(static_cast<std::size_t>(n));
    for (AgentId j = 0, cursor = 0; j < n; ++j) {
      seats[j] = j == seat ? &set.policy(row)
                           : &set.policy(others[static_cast<std::size_t>(
                                 cursor++)]);
    }
    InitialSample init = model.SampleInitial(rng);
    State state = init.state;
    PerAgent<PolicyState> memory(n);
    for (AgentId j = 0; j < n; ++j) {
      memory[j] = seats[j]->InitialState(
          obs_first ? std::optional<Observation>(init.joint_obs[j])
                    : std::nullopt);
    }
    double ret = 0.0;
    double discount = 1.0;
    for (int t = 0; t < max_steps && !model.IsTerminal(state); ++t) {
      JointAction action(n);
      for (AgentId j = 0; j < n; ++j) {
        action[j] = SampleAction(*seats[j], memory[j], rng);
      }
      GenerativeStep step = model.Step(state, action, rng);
      for (AgentId j = 0; j < n; ++j) {
        memory[j] = seats[j]->NextState(memory[j], action[j], step.joint_obs[j]);
      }
      ret += discount * step.joint_reward[seat];
      discount *= gamma;
      state = step.next_state;
    }
    returns.push_back(ret);
  }

  PayoffCell cell;
  cell.count = static_cast<std::int64_t>(returns.size());
  double sum = 0.0;
  for (double r : returns) sum += r;
  cell.mean = sum / static_cast<double>(returns.size());
  if (returns.size() > 1) {
    double ss = 0.0;
    for (double r : returns) ss += (r - cell.mean) * (r - cell.mean);
    const double var = ss / static_cast<double>(returns.size() - 1);
    cell.stderr_mean = std::sqrt(var / static_cast<double>(returns.size()));
  }
  return cell;
}

namespace {

PayoffTable EmptyTable(const PosgModel& model, const PolicySet& set,
                       const PayoffOptions& options) {
  std::vector<std::string> rows, cols;
  for (int k : set.planner_policies()) rows.push_back(set.policy(k).id());
  for (int k = 0; k < set.num_joints(); ++k) cols.push_back(set.JointName(k));
  PayoffTable table(std::move(rows), std::move(cols));
  table.gamma = model.Discount();
  table.episodes_per_cell = options.episodes_per_cell;
  table.max_steps =
      options.max_steps > 0 ? options.max_steps : model.StepLimit();
  table.seed = options.seed;
  return table;
}

// Simulates the listed (row, col) cells of `table` in parallel.
void FillCells(PayoffTable& table, const PosgModel& model,
               const PolicySet& set, const PayoffOptions& options,
               const std::vector<std::pair<int, int>>& todo) {
  std::vector<PayoffCell> out(todo.size());
  ParallelFor(static_cast<int>(todo.size()), options.workers, [&](int k) {
    const auto [r, c] = todo[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(k)] = SimulateCell(
        model, set, set.planner_policies()[static_cast<std::size_t>(r)], c,
        options);
  });
  for (std::size_t k = 0; k < todo.size(); ++k) {
    table.cell(todo[k].first, todo[k].second) = out[k];
  }
}

}  // namespace

PayoffTable ComputePayoffs(const PosgModel& model, const PolicySet& set,
                           const PayoffOptions& options) {
  PayoffTable table = EmptyTable(model, set, options);
  std::vector<std::pair<int, int>> todo;
  for (int r = 0; r < static_cast<int>(table.rows().size()); ++r) {
    for (int c = 0; c < static_cast<int>(table.cols().size()); ++c) {
      todo.emplace_back(r, c);
    }
  }
  FillCells(table, model, set, options, todo);
  return table;
}

PayoffTable AddPolicy(const PayoffTable& table, const PosgModel& model,
                      const PolicySet& set, const PayoffOptions& options,
                      int* simulated) {
  PayoffTable out = EmptyTable(model, set, options);
  for (const auto& id : table.rows()) {
    if (out.RowIndex(id) < 0) {
      throw ConfigError("policy set drops table row '" + id + "'");
    }
  }
  for (const auto& name : table.cols()) {
    if (out.ColIndex(name) < 0) {
      throw ConfigError("policy set drops table column '" + name + "'");
    }
  }
  if (out.rows().size() == table.rows().size() &&
      out.cols().size() == table.cols().size()) {
    throw ConfigError("policy set adds no new policy to the table");
  }
  std::vector<std::pair<int, int>> todo;
  for (int r = 0; r < static_cast<int>(out.rows().size()); ++r) {
    const int old_r = table.RowIndex(out.rows()[static_cast<std::size_t>(r)]);
    for (int c = 0; c < static_cast<int>(out.cols().size()); ++c) {
      const int old_c =
          table.ColIndex(out.cols()[static_cast<std::size_t>(c)]);
      if (old_r >= 0 && old_c >= 0) {
        out.cell(r, c) = table.cell(old_r, old_c);
      } else {
        todo.emplace_back(r, c);
      }
    }
  }
  FillCells(out, model, set, options, todo);
  if (simulated != nullptr) *simulated = static_cast<int>(todo.size());
  return out;
}

std::vector<double> Softmax(std::span<const double> payoffs, double tau) {
  POTMMCP_CHECK(!payoffs.empty(), ContractViolation, "softmax of empty row");
  POTMMCP_CHECK(tau >= 0.0, ConfigError, "tau must be >= 0");
  const std::size_t n = payoffs.size();
  std::vector<double> out(n, 0.0);
  if (std::isinf(tau)) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(n));
    return out;
  }
  const double best = *std::max_element(payoffs.begin(), payoffs.end());
  if (tau == 0.0) {
    int ties = 0;
    for (double u : payoffs) ties += u == best ? 1 : 0;
    for (std::size_t k = 0; k < n; ++k) {
      out[k] = payoffs[k] == best ? 1.0 / ties : 0.0;
    }
    return out;
  }
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = std::exp((payoffs[k] - best) / tau);
    total += out[k];
  }
  for (double& p : out) p /= total;
  return out;
}

MetaPolicy::MetaPolicy(double tau, std::vector<std::string> policy_ids,
                       std::vector<std::string> joint_names,
                       std::vector<std::vector<double>> rows)
    : tau_(tau),
      policy_ids_(std::move(policy_ids)),
      joint_names_(std::move(joint_names)),
      rows_(std::move(rows)) {}

const std::vector<double>& MetaPolicy::Row(const std::string& joint) const {
  auto it = std::find(joint_names_.begin(), joint_names_.end(), joint);
  if (it == joint_names_.end()) {
    throw ConfigError("meta-policy has no row for joint policy '" + joint +
                      "'");
  }
  return rows_[static_cast<std::size_t>(it - joint_names_.begin())];
}

std::string MetaPolicy::Sample(const std::string& joint, Rng& rng) const {
  return policy_ids_[static_cast<std::size_t>(rng.Categorical(Row(joint)))];
}

json MetaPolicy::ToJson() const {
  json rows = json::object();
  for (std::size_t k = 0; k < joint_names_.size(); ++k) {
    rows[joint_names_[k]] = rows_[k];
  }
  return json{{"tau", std::isinf(tau_) ? json("inf") : json(tau_)},
              {"policies", policy_ids_},
              {"rows", rows}};
}

MetaPolicy MakeMetaPolicy(const PayoffTable& table, double tau) {
  // The table is indexed [policy][joint]; a meta-policy row is a column.
  std::vector<std::vector<double>> rows;
  std::vector<double> column(table.rows().size());
  for (int c = 0; c < static_cast<int>(table.cols().size()); ++c) {
    for (int r = 0; r < static_cast<int>(table.rows().size()); ++r) {
      column[static_cast<std::size_t>(r)] = table.cell(r, c).mean;
    }
    rows.push_back(Softmax(column, tau));
  }
  return MetaPolicy(tau, table.rows(), table.cols(), std::move(rows));
}

BoundMetaPolicy BoundMetaPolicy::Bind(const MetaPolicy& meta,
                                      const PolicySet& set) {
  BoundMetaPolicy bound;
  for (const auto& id : meta.policy_ids()) {
    const int k = set.IndexOf(id);
    const auto& planner = set.planner_policies();
    if (std::find(planner.begin(), planner.end(), k) == planner.end()) {
      throw ConfigError("meta-policy policy '" + id +
                        "' is not a planner policy");
    }
    bound.policy_index_.push_back(k);
  }
  for (int j = 0; j < set.num_joints(); ++j) {
    bound.rows_.push_back(meta.Row(set.JointName(j)));
  }
  return bound;
}

BoundMetaPolicy BoundMetaPolicy::Fixed(const PolicySet& set,
                                       const std::string& id) {
  BoundMetaPolicy bound;
  bound.policy_index_.push_back(set.IndexOf(id));
  bound.rows_.assign(static_cast<std::size_t>(set.num_joints()), {1.0});
  return bound;
}

std::vector<double> BoundMetaPolicy::Marginal(
    std::span<const double> prior) const {
  std::vector<double> out(policy_index_.size(), 0.0);
  for (std::size_t j = 0; j < rows_.size() && j < prior.size(); ++j) {
    for (std::size_t m = 0; m < out.size(); ++m) {
      out[m] += prior[j] * rows_[j][m];
    }
  }
  return out;
}

}  // namespace potmmcp
