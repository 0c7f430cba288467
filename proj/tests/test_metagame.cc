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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "test_util.h"

namespace potmmcp {
namespace {

TEST_CASE("softmax reference values") {
  const std::vector<double> p{1.0, 0.5};
  const auto s = Softmax(p, 0.25);
  CHECK(s[0] == doctest::Approx(0.8808).epsilon(1e-4));
  CHECK(s[1] == doctest::Approx(0.1192).epsilon(1e-3));
  CHECK(s[0] + s[1] == doctest::Approx(1.0));
}

TEST_CASE("softmax limits") {
  const std::vector<double> p{0.2, 0.9, 0.9, -1.0};
  const auto greedy = Softmax(p, 0.0);
  CHECK(greedy == std::vector<double>{0.0, 0.5, 0.5, 0.0});
  const auto flat = Softmax(p, kTauInfinity);
  for (double x : flat) CHECK(x == doctest::Approx(0.25));
  // Large payoffs do not overflow.
  const std::vector<double> big{1000.0, 999.0};
  const auto b = Softmax(big, 0.01);
  CHECK(std::isfinite(b[0]));
  CHECK(b[0] == doctest::Approx(1.0));
  CHECK_THROWS(Softmax(p, -1.0));
}

TEST_CASE("softmax approaches its limits continuously") {
  const std::vector<double> p{1.0, 0.5, 0.0};
  CHECK(Softmax(p, 1e-4)[0] == doctest::Approx(1.0));
  const auto hot = Softmax(p, 1e6);
  for (double x : hot) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
}

TEST_CASE("payoff table json round-trip") {
  PayoffTable t({"a", "b"}, {"x", "y", "z"});
  t.cell(1, 2) = {0.5, 0.01, 10};
  t.gamma = 0.9;
  t.episodes_per_cell = 10;
  t.seed = 4;
  CHECK(PayoffTable::FromJson(t.ToJson()) == t);
  CHECK(t.RowIndex("b") == 1);
  CHECK(t.ColIndex("missing") == -1);
}

TEST_CASE("payoffs are deterministic and independent of workers") {
  auto f = testing::LoadTiny("tiny_reveal");
  PayoffOptions o;
  o.episodes_per_cell = 200;
  o.max_steps = 6;
  o.seed = 99;
  const PayoffTable a = ComputePayoffs(*f.model, *f.set, o);
  o.workers = 3;
  const PayoffTable b = ComputePayoffs(*f.model, *f.set, o);
  CHECK(a == b);
  CHECK(a.rows().size() == f.set->planner_policies().size());
  CHECK(static_cast<int>(a.cols().size()) == f.set->num_joints());
}

TEST_CASE("adding a policy keeps the existing cells") {
  auto f = testing::LoadTiny("tiny_reveal");
  PayoffOptions o;
  o.episodes_per_cell = 100;
  o.max_steps = 6;
  o.seed = 5;
  const PayoffTable full = ComputePayoffs(*f.model, *f.set, o);
  // Drop the last row, then add it back.
  std::vector<std::string> rows(full.rows().begin(), full.rows().end() - 1);
  PayoffTable part(rows, full.cols());
  for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
    for (int c = 0; c < static_cast<int>(full.cols().size()); ++c) {
      part.cell(r, c) = full.cell(r, c);
    }
  }
  part.gamma = full.gamma;
  part.episodes_per_cell = full.episodes_per_cell;
  part.max_steps = full.max_steps;
  part.seed = full.seed;
  int simulated = 0;
  const PayoffTable grown = AddPolicy(part, *f.model, *f.set, o, &simulated);
  CHECK(simulated == static_cast<int>(full.cols().size()));
  CHECK(grown == full);
}

TEST_CASE("meta-policy rows are softmax over the payoff column") {
  PayoffTable t({"p", "q"}, {"k0", "k1"});
  t.cell(0, 0).mean = 1.0;
  t.cell(1, 0).mean = 0.5;
  t.cell(0, 1).mean = 0.0;
  t.cell(1, 1).mean = 2.0;
  const MetaPolicy m = MakeMetaPolicy(t, 0.25);
  CHECK(m.Row("k0")[0] == doctest::Approx(0.8808).epsilon(1e-4));
  CHECK(m.Row("k1")[1] > 0.99);
  const MetaPolicy g = MakeMetaPolicy(t, 0.0);
  CHECK(g.Row("k0") == std::vector<double>{1.0, 0.0});
  CHECK_THROWS(m.Row("k9"));
}

TEST_CASE("bound meta-policy marginal mixes rows by the prior") {
  auto f = testing::LoadTiny("tiny_reveal");
  PayoffOptions o;
  o.episodes_per_cell = 50;
  o.max_steps = 4;
  const PayoffTable t = ComputePayoffs(*f.model, *f.set, o);
  const BoundMetaPolicy b = BoundMetaPolicy::Bind(MakeMetaPolicy(t, 0.25), *f.set);
  const auto marginal = b.Marginal(f.set->prior());
  double total = 0.0;
  for (std::size_t m = 0; m < marginal.size(); ++m) {
    double expect = 0.0;
    for (int k = 0; k < f.set->num_joints(); ++k) {
      expect += f.set->prior()[static_cast<std::size_t>(k)] * b.row(k)[m];
    }
    CHECK(marginal[m] == doctest::Approx(expect));
    total += marginal[m];
  }
  CHECK(total == doctest::Approx(1.0));
  const auto fixed = BoundMetaPolicy::Fixed(*f.set, f.set->policy(b.policy_index()[0]).id());
  CHECK(fixed.row(0)[0] == 1.0);
}

}  // namespace
}  // namespace potmmcp
