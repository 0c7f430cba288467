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

#ifndef POTMMCP_HARNESS_H_
#define POTMMCP_HARNESS_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "potmmcp/metagame.h"
#include "potmmcp/planner.h"
#include "potmmcp/policy.h"
#include "potmmcp/posg.h"

namespace potmmcp {

inline constexpr const char* kVersion = "0.1.0";

enum class MethodKind {
  kPlanner,         // tree search every step
  kMetaPolicyOnly,  // one policy drawn from sum_k rho(k) sigma(. | k)
  kBestResponse,    // argmax payoff row for the true joint policy
};

struct MethodConfig {
  std::string name;
  MethodKind kind = MethodKind::kPlanner;
  PlannerConfig planner;
  double tau = 0.25;
  // Empty: search with the meta-policy. "uniform": one uniform-random search
  // policy. Otherwise the id of a planner policy used for every search.
  std::string search_policy;
};

struct OracleCheckConfig {
  std::vector<std::string> instances;  // empty = every shipped instance
  double epsilon = 0.1;
  std::vector<int> budgets{100, 1000, 10000, 100000};
  int runs = 100;
  int num_particles = 10000;
  double tau = 0.25;
  int payoff_episodes = 500;
  int payoff_max_steps = 10;
  // Allowed |V(root) - V*| beyond epsilon / (1 - gamma).
  double slack = 0.05;
  // Required fraction of runs whose chosen action is optimal.
  double agreement = 0.99;
};

struct RunConfig {
  std::string name;
  std::string config_dir;  // relative paths resolve against it
  nlohmann::json environment;
  std::string policies_path;  // empty for built-in tiny manifests
  nlohmann::json manifest;
  int episodes = 400;
  std::uint64_t seed = 0;
  int workers = 1;
  int max_steps = 0;  // 0 = the model's step limit
  PayoffOptions payoffs;
  std::string payoffs_file;
  int value_episodes = 2000;
  int value_min_count = 3;
  PlannerConfig planner;  // defaults shared by every planner method
  std::vector<MethodConfig> methods;
  std::string output_dir;
  OracleCheckConfig oracle;
  bool has_oracle = false;
  // Canonical JSON the config hash is computed from (after overrides, with
  // the manifest inlined).
  nlohmann::json canonical;
  std::string hash;
};

// Command-line overrides applied on top of a config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  std::optional<int> simulations;
  std::optional<int> workers;
  std::optional<std::string> output_dir;
  std::optional<std::vector<std::string>> methods;  // keep only these

  static Overrides FromJson(const nlohmann::json& j);
};

// Parses and validates; errors are ValidationError messages that start
// with the offending field path ("methods[1].tau: ...").
RunConfig ParseRunConfig(const nlohmann::json& j, const std::string& config_dir,
                         const Overrides& overrides = {});
RunConfig LoadRunConfig(const std::string& path,
                        const Overrides& overrides = {});

// Resolved model, policy set and empirical game for one run.
struct Experiment {
  RunConfig config;
  std::shared_ptr<const PosgModel> model;
  std::shared_ptr<PolicySet> set;
  PayoffTable payoffs;
  int payoff_cells_simulated = 0;
  int value_horizon = 0;
};

struct PrepareOptions {
  bool payoffs = true;
  bool value_tables = true;
};

Experiment Prepare(const RunConfig& config, PrepareOptions options = {});

struct StepRecord {
  int t = 0;
  Action action = 0;
  double reward = 0.0;  // planner's reward
  // Belief metrics of the root belief before acting; NaN when the method
  // keeps no belief.
  double prob_true_type = 0.0;
  double action_distance = 0.0;
  int max_depth = 0;
  int simulations = 0;
  std::int64_t generative_steps = 0;
  int belief_size = 0;
  bool depleted = false;
  bool fallback = false;
  std::vector<std::int64_t> root_visits;
};

struct EpisodeRecord {
  int episode = 0;
  std::uint64_t seed = 0;
  int true_joint = 0;
  int played_policy = -1;  // baselines only
  std::vector<double> discounted;    // per agent
  std::vector<double> undiscounted;  // per agent
  int steps = 0;
  int fallback_step = -1;
  int planners_built = 0;
  std::vector<StepRecord> step_records;
};

// Per-method runtime objects shared by every episode.
struct MethodRuntime {
  MethodConfig config;
  std::optional<BoundMetaPolicy> meta;
  std::vector<SearchPolicy> search;
  std::vector<double> marginal;  // meta-policy-only baseline
};

MethodRuntime MakeMethodRuntime(const Experiment& experiment,
                                const MethodConfig& method);

std::uint64_t EpisodeSeed(std::uint64_t root, int episode);

EpisodeRecord RunEpisode(const Experiment& experiment,
                         const MethodRuntime& method, int episode);

struct MethodSummary {
  std::string method;
  int episodes = 0;
  double mean_return = 0.0;
  double stderr_return = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double mean_max_depth = 0.0;
  double mean_generative_steps = 0.0;  // per decision
  double first_quartile_prob = 0.0;
  double last_quartile_prob = 0.0;
  int planners_built = 0;
  int fallback_episodes = 0;
};

struct MethodResult {
  MethodSummary summary;
  std::vector<EpisodeRecord> episodes;
};

struct EvaluationResult {
  std::vector<MethodResult> methods;
  std::vector<std::string> files;  // written CSVs, relative to output_dir
};

// Runs every configured method; episodes run on `workers` threads and are
// merged by episode index.
EvaluationResult RunEvaluation(const Experiment& experiment);
MethodResult EvaluateMethod(const Experiment& experiment,
                            const MethodConfig& method);
MethodSummary Summarize(const std::string& method,
                        const std::vector<EpisodeRecord>& episodes,
                        AgentId planner_agent);

// Per-step belief metrics averaged across episodes.
struct BeliefRow {
  int step = 0;
  int count = 0;
  double prob_mean = 0.0, prob_ci = 0.0;
  double distance_mean = 0.0, distance_ci = 0.0;
};
std::vector<BeliefRow> BeliefTable(const std::vector<EpisodeRecord>& episodes);

// Mean prob_true_type over steps in the first and last quarter of each
// episode (positions floor(4 t / steps) = 0 and 3).
std::pair<double, double> QuartileBelief(
    const std::vector<EpisodeRecord>& episodes);

// Oracle check on tiny instances.
struct OracleRun {
  std::string instance;
  int budget = 0;
  int run = 0;
  std::uint64_t seed = 0;
  Observation root_obs = 0;
  Action action = 0;
  bool optimal = false;
  double value = 0.0;
  double v_star = 0.0;
};
struct OracleInstanceResult {
  std::string instance;
  int horizon = 0;
  double tolerance = 0.0;
  std::vector<OracleRun> runs;
  int agree_at_max = 0;
  double max_error_at_max = 0.0;
  bool pass = false;
  double seconds = 0.0;
  nlohmann::json report;
};
OracleInstanceResult OracleCheckInstance(const std::string& instance,
                                         const OracleCheckConfig& config,
                                         std::uint64_t seed);

// CLI entry points. Each writes its files under config.output_dir
// (created when missing) plus manifest.json, and returns a JSON summary.
nlohmann::json CommandValidate(const RunConfig& config);
nlohmann::json CommandPayoffs(const RunConfig& config);
nlohmann::json CommandEvaluate(const RunConfig& config);
nlohmann::json CommandBeliefStats(const RunConfig& config);
nlohmann::json CommandOracleCheck(const RunConfig& config);

// Shortest round-trip decimal form; NaN becomes an empty field.
std::string FormatDouble(double x);

}  // namespace potmmcp

#endif  // POTMMCP_HARNESS_H_
