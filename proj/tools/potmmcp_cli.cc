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

// Command-line front end. Talks to the library through the C interface
// only.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "potmmcp/potmmcp.h"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  std::optional<int> simulations;
  std::optional<int> workers;
  std::optional<std::string> output;
  std::vector<std::string> methods;
};

void AddCommon(CLI::App* cmd, CommonFlags& f, bool run_flags) {
  cmd->add_option("config", f.config, "Run config (JSON)")->required();
  cmd->add_option("--seed", f.seed, "Root seed (overrides the config)");
  if (!run_flags) return;
  cmd->add_option("--episodes", f.episodes,
                  "Episodes per method (oracle-check: seeded runs)");
  cmd->add_option("--simulations", f.simulations,
                  "Simulations per decision (oracle-check: single budget)");
  cmd->add_option("--workers", f.workers, "Worker threads (0 = all cores)");
  cmd->add_option("--output", f.output, "Output directory");
  cmd->add_option("--methods", f.methods, "Only run these methods")->delimiter(',');
}

std::string OverridesJson(const CommonFlags& f) {
  nlohmann::json j = nlohmann::json::object();
  if (f.seed) j["seed"] = *f.seed;
  if (f.episodes) j["episodes"] = *f.episodes;
  if (f.simulations) j["simulations"] = *f.simulations;
  if (f.workers) j["workers"] = *f.workers;
  if (f.output) j["output_dir"] = *f.output;
  if (!f.methods.empty()) j["methods"] = f.methods;
  return j.dump();
}

using Command = potmmcp_status (*)(potmmcp_context*, const char*, const char*);

int Dispatch(Command command, const CommonFlags& f) {
  potmmcp_context* ctx = nullptr;
  if (potmmcp_context_create(&ctx) != POTMMCP_OK) {
    std::cerr << "error: cannot create context\n";
    return 1;
  }
  const std::string overrides = OverridesJson(f);
  const potmmcp_status status = command(ctx, f.config.c_str(), overrides.c_str());
  int code = 0;
  if (status == POTMMCP_OK) {
    std::cout << nlohmann::json::parse(potmmcp_last_result(ctx)).dump(2) << '\n';
  } else {
    std::cerr << "error (" << potmmcp_status_name(status)
              << "): " << potmmcp_last_error(ctx) << '\n';
    code = static_cast<int>(status) + 1;
  }
  potmmcp_context_destroy(ctx);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"POTMMCP planner and experiment harness"};
  app.set_version_flag("--version", std::string(potmmcp_version()));
  app.require_subcommand(1);

  CommonFlags validate, payoffs, evaluate, belief, oracle;
  AddCommon(app.add_subcommand("validate-config",
                               "Check a run config and print its resolved summary"),
            validate, false);
  AddCommon(app.add_subcommand("payoffs",
                               "Simulate the empirical game and write payoff / "
                               "meta-policy files"),
            payoffs, true);
  AddCommon(app.add_subcommand("evaluate",
                               "Run every configured method and write episode, "
                               "step and summary CSVs"),
            evaluate, true);
  AddCommon(app.add_subcommand("belief-stats",
                               "Per-step belief accuracy of the planner methods"),
            belief, true);
  AddCommon(app.add_subcommand("oracle-check",
                               "Compare planner root values and actions with "
                               "exact optima on tiny instances"),
            oracle, true);

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("validate-config")) {
    return Dispatch(potmmcp_validate_config, validate);
  }
  if (app.got_subcommand("payoffs")) return Dispatch(potmmcp_payoffs, payoffs);
  if (app.got_subcommand("evaluate")) return Dispatch(potmmcp_evaluate, evaluate);
  if (app.got_subcommand("belief-stats")) return Dispatch(potmmcp_belief_stats, belief);
  return Dispatch(potmmcp_oracle_check, oracle);
}
