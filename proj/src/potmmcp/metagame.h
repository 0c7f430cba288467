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

#ifndef POTMMCP_METAGAME_H_
#define POTMMCP_METAGAME_H_

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "potmmcp/policy.h"
#include "potmmcp/posg.h"

namespace potmmcp {

inline constexpr double kTauInfinity = std::numeric_limits<double>::infinity();

struct PayoffCell {
  double mean = 0.0;
  double stderr_mean = 0.0;
  std::int64_t count = 0;
  bool operator==(const PayoffCell&) const = default;
};

// Empirical game: rows are the planner's policies, columns the other agents'
// joint policies (named by PolicySet::JointName). Cells hold the mean
// discounted return of the row policy.
class PayoffTable {
 public:
  PayoffTable() = default;
  PayoffTable(std::vector<std::string> rows, std::vector<std::string> cols);

  const std::vector<std::string>& rows() const { return rows_; }
  const std::vector<std::string>& cols() const { return cols_; }
  int RowIndex(const std::string& id) const;  // -1 if absent
  int ColIndex(const std::string& name) const;
  PayoffCell& cell(int r, int c) { return cells_[Offset(r, c)]; }
  const PayoffCell& cell(int r, int c) const { return cells_[Offset(r, c)]; }

  // Run parameters recorded alongside the cells.
  double gamma = 0.0;
  int episodes_per_cell = 0;
  int max_steps = 0;
  std::uint64_t seed = 0;

  nlohmann::json ToJson() const;
  static PayoffTable FromJson(const nlohmann::json& j);

  bool operator==(const PayoffTable&) const = default;

 private:
  std::size_t Offset(int r, int c) const {
    return static_cast<std::size_t>(r) * cols_.size() +
           static_cast<std::size_t>(c);
  }
  std::vector<std::string> rows_;
  std::vector<std::string> cols_;
  std::vector<PayoffCell> cells_;
};

struct PayoffOptions {
  int episodes_per_cell = 1000;
  // Episode length cap; 0 uses the model's own step limit.
  int max_steps = 0;
  std::uint64_t seed = 0;
  int workers = 1;
};

// Mean discounted return of `row` (a planner policy) against `joint`. In
// symmetric games the row policy's seat rotates with the episode index so
// the cell averages over seat permutations.
PayoffCell SimulateCell(const PosgModel& model, const PolicySet& set, int row,
                        int joint, const PayoffOptions& options);

PayoffTable ComputePayoffs(const PosgModel& model, const PolicySet& set,
                           const PayoffOptions& options);

// Extends `table` to every (planner policy, joint) pair of `set`, which must
// contain all of the table's rows and columns plus new entries. Existing
// cells are copied unchanged; only missing cells are simulated. The number
// of simulated cells is written to `simulated` when non-null.
PayoffTable AddPolicy(const PayoffTable& table, const PosgModel& model,
                      const PolicySet& set, const PayoffOptions& options,
                      int* simulated = nullptr);

// Softmax of `payoffs` at temperature tau. tau = 0 puts uniform mass on the
// argmax set; tau = kTauInfinity is uniform.
std::vector<double> Softmax(std::span<const double> payoffs, double tau);

class MetaPolicy {
 public:
  MetaPolicy() = default;
  MetaPolicy(double tau, std::vector<std::string> policy_ids,
             std::vector<std::string> joint_names,
             std::vector<std::vector<double>> rows);

  double tau() const { return tau_; }
  const std::vector<std::string>& policy_ids() const { return policy_ids_; }
  const std::vector<std::string>& joint_names() const { return joint_names_; }
  // Distribution over policy_ids() given the others' joint policy.
  const std::vector<double>& Row(const std::string& joint_name) const;
  std::string Sample(const std::string& joint_name, Rng& rng) const;

  nlohmann::json ToJson() const;

 private:
  double tau_ = 0.0;
  std::vector<std::string> policy_ids_;
  std::vector<std::string> joint_names_;
  std::vector<std::vector<double>> rows_;
};

MetaPolicy MakeMetaPolicy(const PayoffTable& table, double tau);

// Meta-policy resolved against a PolicySet for fast lookups during search:
// row k is the distribution for joint index k, entry m refers to policy
// index policy_index[m].
class BoundMetaPolicy {
 public:
  static BoundMetaPolicy Bind(const MetaPolicy& meta, const PolicySet& set);
  // Point mass on one planner policy for every joint.
  static BoundMetaPolicy Fixed(const PolicySet& set, const std::string& id);

  // Position m of the sampled policy; policy_index()[m] is its set index.
  int SampleSlot(int joint, Rng& rng) const {
    return rng.Categorical(rows_[static_cast<std::size_t>(joint)]);
  }
  int Sample(int joint, Rng& rng) const {
    return policy_index_[static_cast<std::size_t>(SampleSlot(joint, rng))];
  }
  const std::vector<double>& row(int joint) const {
    return rows_[static_cast<std::size_t>(joint)];
  }
  const std::vector<int>& policy_index() const { return policy_index_; }
  // Sum_k prior(k) * row(k).
  std::vector<double> Marginal(std::span<const double> prior) const;

 private:
  std::vector<int> policy_index_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace potmmcp

#endif  // POTMMCP_METAGAME_H_
