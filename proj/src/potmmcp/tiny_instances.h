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

#ifndef POTMMCP_TINY_INSTANCES_H_
#define POTMMCP_TINY_INSTANCES_H_

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "potmmcp/tiny_posg.h"

namespace potmmcp {

// Shipped explicit-table instances. In all of them agent 0 plans and agent
// 1 follows one of a few tabular types.
//
//   tiny_reveal      hidden coin; the other agent is honest, a liar or
//                    random about it; the planner may wait or guess
//   tiny_signal      the other agent's first action reveals its type
//   tiny_random      sparse random tables (fixed generator seed)
//   tiny_single      one type only, so the planner faces a plain POMDP
//   tiny_degenerate  the planner has a single action
std::vector<std::string> TinyInstanceIds();

// Throws ConfigError for unknown ids.
std::shared_ptr<const TinyPosgModel> MakeTinyPosg(const std::string& spec_id);

// Policy-set manifest (same schema as the JSON manifest files).
nlohmann::json TinyManifest(const std::string& spec_id);

}  // namespace potmmcp

#endif  // POTMMCP_TINY_INSTANCES_H_
