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

#include "potmmcp/potmmcp.h"

#include <memory>
#include <new>
#include <string>

#include "json.hpp"
#include "potmmcp/belief.h"
#include "potmmcp/harness.h"
#include "potmmcp/planner.h"

using nlohmann::json;

struct potmmcp_context {
  std::string error;
  std::string result;
};

struct potmmcp_planner {
  std::shared_ptr<potmmcp::Experiment> experiment;
  potmmcp::MethodRuntime method;
  std::unique_ptr<potmmcp::Planner> planner;
  std::string error;
  std::string info;
};

namespace {

template <class Fn>
potmmcp_status Guard(std::string& error, Fn&& fn) {
  error.clear();
  try {
    fn();
    return POTMMCP_OK;
  } catch (const potmmcp::ValidationError& e) {
    error = e.what();
    return POTMMCP_ERR_VALIDATION;
  } catch (const potmmcp::ConfigError& e) {
    error = e.what();
    return POTMMCP_ERR_CONFIG;
  } catch (const potmmcp::DepletionError& e) {
    error = e.what();
    return POTMMCP_ERR_DEPLETION;
  } catch (const potmmcp::CapacityError& e) {
    error = e.what();
    return POTMMCP_ERR_CAPACITY;
  } catch (const potmmcp::ContractViolation& e) {
    error = e.what();
    return POTMMCP_ERR_CONTRACT;
  } catch (const json::exception& e) {
    error = std::string("json: ") + e.what();
    return POTMMCP_ERR_ARGUMENT;
  } catch (const std::filesystem::filesystem_error& e) {
    error = e.what();
    return POTMMCP_ERR_IO;
  } catch (const std::bad_alloc&) {
    error = "out of memory";
    return POTMMCP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    error = e.what();
    return POTMMCP_ERR_INTERNAL;
  }
}

potmmcp::RunConfig Load(const char* path, const char* overrides) {
  if (path == nullptr) throw potmmcp::ValidationError("config: path is null");
  potmmcp::Overrides ov;
  if (overrides != nullptr && *overrides != '\0') {
    json j;
    try {
      j = json::parse(overrides);
    } catch (const json::parse_error& e) {
      throw potmmcp::ValidationError(std::string("overrides: ") + e.what());
    }
    ov = potmmcp::Overrides::FromJson(j);
  }
  return potmmcp::LoadRunConfig(path, ov);
}

template <class Command>
potmmcp_status Run(potmmcp_context* ctx, const char* path, const char* overrides,
                   Command&& command) {
  if (ctx == nullptr) return POTMMCP_ERR_ARGUMENT;
  return Guard(ctx->error, [&] {
    const potmmcp::RunConfig config = Load(path, overrides);
    ctx->result = command(config).dump();
  });
}

}  // namespace

extern "C" {

const char* potmmcp_version(void) { return potmmcp::kVersion; }

const char* potmmcp_status_name(potmmcp_status status) {
  switch (status) {
    case POTMMCP_OK:
      return "ok";
    case POTMMCP_ERR_ARGUMENT:
      return "argument error";
    case POTMMCP_ERR_CONFIG:
      return "configuration error";
    case POTMMCP_ERR_VALIDATION:
      return "validation error";
    case POTMMCP_ERR_DEPLETION:
      return "belief depletion";
    case POTMMCP_ERR_CAPACITY:
      return "capacity exceeded";
    case POTMMCP_ERR_CONTRACT:
      return "contract violation";
    case POTMMCP_ERR_IO:
      return "i/o error";
    case POTMMCP_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

potmmcp_status potmmcp_context_create(potmmcp_context** out) {
  if (out == nullptr) return POTMMCP_ERR_ARGUMENT;
  *out = new (std::nothrow) potmmcp_context();
  return *out != nullptr ? POTMMCP_OK : POTMMCP_ERR_INTERNAL;
}

void potmmcp_context_destroy(potmmcp_context* ctx) { delete ctx; }

const char* potmmcp_last_error(const potmmcp_context* ctx) {
  return ctx != nullptr ? ctx->error.c_str() : "null context";
}

const char* potmmcp_last_result(const potmmcp_context* ctx) {
  return ctx != nullptr ? ctx->result.c_str() : "";
}

potmmcp_status potmmcp_validate_config(potmmcp_context* ctx, const char* path,
                                       const char* overrides) {
  return Run(ctx, path, overrides, potmmcp::CommandValidate);
}

potmmcp_status potmmcp_payoffs(potmmcp_context* ctx, const char* path,
                               const char* overrides) {
  return Run(ctx, path, overrides, potmmcp::CommandPayoffs);
}

potmmcp_status potmmcp_evaluate(potmmcp_context* ctx, const char* path,
                                const char* overrides) {
  return Run(ctx, path, overrides, potmmcp::CommandEvaluate);
}

potmmcp_status potmmcp_belief_stats(potmmcp_context* ctx, const char* path,
                                    const char* overrides) {
  return Run(ctx, path, overrides, potmmcp::CommandBeliefStats);
}

potmmcp_status potmmcp_oracle_check(potmmcp_context* ctx, const char* path,
                                    const char* overrides) {
  return Run(ctx, path, overrides, potmmcp::CommandOracleCheck);
}

potmmcp_status potmmcp_planner_create(potmmcp_context* ctx, const char* path,
                                      const char* overrides,
                                      const char* method_name, uint64_t seed,
                                      potmmcp_planner** out) {
  if (ctx == nullptr || out == nullptr || method_name == nullptr) {
    if (ctx != nullptr) ctx->error = "null argument";
    return POTMMCP_ERR_ARGUMENT;
  }
  *out = nullptr;
  return Guard(ctx->error, [&] {
    potmmcp::RunConfig config = Load(path, overrides);
    const potmmcp::MethodConfig* method = nullptr;
    for (const auto& m : config.methods) {
      if (m.name == method_name) method = &m;
    }
    if (method == nullptr) {
      throw potmmcp::ValidationError(std::string("methods: no method named '") +
                                     method_name + "'");
    }
    if (method->kind != potmmcp::MethodKind::kPlanner) {
      throw potmmcp::ValidationError(std::string("methods: '") + method_name +
                                     "' is not a planner method");
    }
    const potmmcp::MethodConfig chosen = *method;
    config.methods = {chosen};
    auto handle = std::make_unique<potmmcp_planner>();
    handle->experiment =
        std::make_shared<potmmcp::Experiment>(potmmcp::Prepare(config));
    handle->method = potmmcp::MakeMethodRuntime(*handle->experiment, chosen);
    handle->planner = std::make_unique<potmmcp::Planner>(
        handle->experiment->model, handle->experiment->set, handle->method.search,
        handle->method.meta, chosen.planner, seed);
    *out = handle.release();
  });
}

void potmmcp_planner_destroy(potmmcp_planner* planner) { delete planner; }

potmmcp_status potmmcp_planner_reset(potmmcp_planner* p, int has_initial_obs,
                                     uint64_t initial_obs) {
  if (p == nullptr) return POTMMCP_ERR_ARGUMENT;
  return Guard(p->error, [&] {
    p->planner->Reset(has_initial_obs ? std::optional<potmmcp::Observation>(initial_obs)
                                      : std::nullopt);
  });
}

potmmcp_status potmmcp_planner_search(potmmcp_planner* p, int32_t* action) {
  if (p == nullptr || action == nullptr) return POTMMCP_ERR_ARGUMENT;
  return Guard(p->error, [&] { *action = p->planner->Search(); });
}

potmmcp_status potmmcp_planner_update(potmmcp_planner* p, int32_t action,
                                      uint64_t observation) {
  if (p == nullptr) return POTMMCP_ERR_ARGUMENT;
  return Guard(p->error, [&] { p->planner->Update(action, observation); });
}

potmmcp_status potmmcp_planner_root_value(const potmmcp_planner* p, double* value) {
  if (p == nullptr || value == nullptr) return POTMMCP_ERR_ARGUMENT;
  *value = p->planner->RootValue();
  return POTMMCP_OK;
}

const char* potmmcp_planner_info(potmmcp_planner* p) {
  if (p == nullptr) return "";
  const auto& d = p->planner->diagnostics();
  json j = {{"simulations", d.simulations},
            {"max_depth", d.max_depth},
            {"generative_steps", d.generative_steps},
            {"meta_queries", d.meta_queries},
            {"rollouts", d.rollouts},
            {"value_lookups", d.value_lookups},
            {"depleted", d.depleted},
            {"root_visits", p->planner->RootVisits()},
            {"belief", potmmcp::BeliefSnapshot(p->planner->belief(),
                                               *p->experiment->set,
                                               *p->experiment->model)}};
  p->info = j.dump();
  return p->info.c_str();
}

const char* potmmcp_planner_last_error(const potmmcp_planner* p) {
  return p != nullptr ? p->error.c_str() : "null planner";
}

}  // extern "C"
