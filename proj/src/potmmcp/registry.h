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

#ifndef POTMMCP_REGISTRY_H_
#define POTMMCP_REGISTRY_H_

#include <memory>
#include <string>

#include "json.hpp"
#include "potmmcp/policy.h"
#include "potmmcp/posg.h"

namespace potmmcp {

// Builds an environment from its JSON description:
//   {"id": "driving", "width": 7, "height": 7, "layout": "driving7",
//    "agents": 2}
//   {"id": "pursuit_evasion", "layout": "pe8"}
//   {"id": "predator_prey", "predators": 2, "strength": 2, "prey": 3,
//    "layout": "pp10", "prey_move_period": 1}
//   {"id": "tiny", "spec": "tiny_reveal"}    (or "file": "<tables.json>")
std::shared_ptr<const PosgModel> MakeEnvironment(const nlohmann::json& env);

// One policy from a manifest entry {"id", "family", "params", "agent"}.
// `agent` is the role the policy plays; it defaults to 0.
std::shared_ptr<const Policy> MakePolicy(
    const std::shared_ptr<const PosgModel>& model, const nlohmann::json& spec);

// Policy set from a manifest:
//   {"planner_agent": 0,
//    "policies": [ {...}, ... ],
//    "planner_policies": ["id", ...],
//    "prior": [ {"joint": ["id", ...], "weight": w}, ... ]}
// Errors name the offending field path.
std::shared_ptr<PolicySet> LoadPolicySet(
    const std::shared_ptr<const PosgModel>& model,
    const nlohmann::json& manifest);

// Reads a JSON file; throws ConfigError naming the path on failure.
nlohmann::json ReadJsonFile(const std::string& path);

}  // namespace potmmcp

#endif  // POTMMCP_REGISTRY_H_
