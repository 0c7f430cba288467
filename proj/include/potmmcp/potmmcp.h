/* Copyright 2026 The POTMMCP Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the POTMMCP planner and experiment harness.
 *
 * Every call that can fail returns a potmmcp_status. On failure the context
 * keeps a message retrievable with potmmcp_last_error until the next call on
 * that context. Strings returned by the library stay valid until the next
 * call on the same context (or planner) and must not be freed.
 *
 * A context is not thread-safe; use one per thread. Planners are owned by
 * the caller and destroyed with potmmcp_planner_destroy.
 */
#ifndef POTMMCP_POTMMCP_H_
#define POTMMCP_POTMMCP_H_

#include <stdint.h>

#if defined(_WIN32)
#define POTMMCP_API __declspec(dllexport)
#else
#define POTMMCP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum potmmcp_status {
  POTMMCP_OK = 0,
  POTMMCP_ERR_ARGUMENT = 1,   /* null handle or malformed argument */
  POTMMCP_ERR_CONFIG = 2,     /* bad environment / policy configuration */
  POTMMCP_ERR_VALIDATION = 3, /* run config failed validation */
  POTMMCP_ERR_DEPLETION = 4,  /* belief has no particles left */
  POTMMCP_ERR_CAPACITY = 5,   /* oracle state space above its cap */
  POTMMCP_ERR_CONTRACT = 6,   /* API used out of order */
  POTMMCP_ERR_IO = 7,
  POTMMCP_ERR_INTERNAL = 8
} potmmcp_status;

typedef struct potmmcp_context potmmcp_context;
typedef struct potmmcp_planner potmmcp_planner;

POTMMCP_API const char* potmmcp_version(void);
POTMMCP_API const char* potmmcp_status_name(potmmcp_status status);

POTMMCP_API potmmcp_status potmmcp_context_create(potmmcp_context** out);
POTMMCP_API void potmmcp_context_destroy(potmmcp_context* ctx);
POTMMCP_API const char* potmmcp_last_error(const potmmcp_context* ctx);
/* JSON summary produced by the last successful command. */
POTMMCP_API const char* potmmcp_last_result(const potmmcp_context* ctx);

/* Harness commands. `config_path` names a JSON run config; `overrides_json`
 * may be NULL or a JSON object with any of
 *   seed, episodes, simulations, workers, output_dir, methods. */
POTMMCP_API potmmcp_status potmmcp_validate_config(potmmcp_context* ctx,
                                                   const char* config_path,
                                                   const char* overrides_json);
POTMMCP_API potmmcp_status potmmcp_payoffs(potmmcp_context* ctx,
                                           const char* config_path,
                                           const char* overrides_json);
POTMMCP_API potmmcp_status potmmcp_evaluate(potmmcp_context* ctx,
                                            const char* config_path,
                                            const char* overrides_json);
POTMMCP_API potmmcp_status potmmcp_belief_stats(potmmcp_context* ctx,
                                                const char* config_path,
                                                const char* overrides_json);
POTMMCP_API potmmcp_status potmmcp_oracle_check(potmmcp_context* ctx,
                                                const char* config_path,
                                                const char* overrides_json);

/* Interactive planner for one configured planner method. Builds the
 * environment, policy set, value tables and payoffs of the config. */
POTMMCP_API potmmcp_status potmmcp_planner_create(potmmcp_context* ctx,
                                                  const char* config_path,
                                                  const char* overrides_json,
                                                  const char* method_name,
                                                  uint64_t seed,
                                                  potmmcp_planner** out);
POTMMCP_API void potmmcp_planner_destroy(potmmcp_planner* planner);
/* Starts an episode. `has_initial_obs` = 0 under the action-first
 * convention. */
POTMMCP_API potmmcp_status potmmcp_planner_reset(potmmcp_planner* planner,
                                                 int has_initial_obs,
                                                 uint64_t initial_obs);
POTMMCP_API potmmcp_status potmmcp_planner_search(potmmcp_planner* planner,
                                                  int32_t* action);
POTMMCP_API potmmcp_status potmmcp_planner_update(potmmcp_planner* planner,
                                                  int32_t action,
                                                  uint64_t observation);
POTMMCP_API potmmcp_status potmmcp_planner_root_value(
    const potmmcp_planner* planner, double* value);
/* JSON with the last search's diagnostics and the belief snapshot. */
POTMMCP_API const char* potmmcp_planner_info(potmmcp_planner* planner);
POTMMCP_API const char* potmmcp_planner_last_error(
    const potmmcp_planner* planner);

#ifdef __cplusplus
}
#endif

#endif /* POTMMCP_POTMMCP_H_ */
