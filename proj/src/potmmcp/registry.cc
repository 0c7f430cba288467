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

#include "potmmcp/registry.h"

#include <fstream>

#include "potmmcp/driving.h"
#include "potmmcp/heuristics.h"
#include "potmmcp/predator_prey.h"
#include "potmmcp/pursuit_evasion.h"
#include "potmmcp/tiny_instances.h"

namespace potmmcp {
namespace {

using json = nlohmann::json;

template <class T>
T Get(const json& j, const char* key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(key) + ": wrong type");
  }
}

template <class T>
T Require(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string(key) + ": missing");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(key) + ": wrong type");
  }
}

template <class M>
std::shared_ptr<const M> As(const std::shared_ptr<const PosgModel>& model,
                            const std::string& family) {
  auto typed = std::dynamic_pointer_cast<const M>(model);
  if (!typed) {
    throw ConfigError("family '" + family + "' does not fit environment '" +
                      model->Id() + "'");
  }
  return typed;
}

std::shared_ptr<const Policy> BuildPolicy(
    const std::shared_ptr<const PosgModel>& model, const json& spec) {
  const auto id = Require<std::string>(spec, "id");
  const auto family = Require<std::string>(spec, "family");
  const json params = spec.contains("params") ? spec.at("params") : json::object();
  const int agent = Get<int>(spec, "agent", 0);
  if (agent < 0 || agent >= model->NumAgents()) {
    throw ConfigError("agent: out of range");
  }
  const int num_actions = model->NumActions(agent);
  if (family == "uniform_random") {
    return std::make_shared<UniformRandomPolicy>(id, num_actions);
  }
  if (family == "constant") {
    return std::make_shared<ConstantPolicy>(id, num_actions,
                                            Require<int>(params, "action"));
  }
  if (family == "tabular") {
    auto table = Require<std::vector<std::vector<double>>>(params, "table");
    const int width = table.empty() ? 0 : static_cast<int>(table[0].size());
    return std::make_shared<TabularPolicy>(
        id, width, Require<int>(params, "num_observations"), std::move(table));
  }
  if (family == "driving_shortest_path") {
    DrivingPolicy::Config c;
    c.target_speed = Get(params, "target_speed", c.target_speed);
    c.yield_prob = Get(params, "yield_prob", c.yield_prob);
    c.noise = Get(params, "noise", c.noise);
    return std::make_shared<DrivingPolicy>(
        id, As<driving::DrivingModel>(model, family), c);
  }
  if (family.rfind("pe_", 0) == 0) {
    const auto kind = PursuitEvasionPolicy::KindFromFamily(family);
    PursuitEvasionPolicy::Config c;
    c.noise = Get(params, "noise", c.noise);
    c.retreat = Get(params, "retreat", c.retreat);
    if (params.contains("waypoint")) {
      const auto w = Require<std::vector<int>>(params, "waypoint");
      if (w.size() != 2) throw ConfigError("waypoint: expected [x, y]");
      c.waypoint_x = w[0];
      c.waypoint_y = w[1];
    }
    c.goal = Get(params, "goal", c.goal);
    c.radius = Get(params, "radius", c.radius);
    c.reverse = Get(params, "reverse", c.reverse);
    return std::make_shared<PursuitEvasionPolicy>(
        id, kind, As<pe::PursuitEvasionModel>(model, family), c);
  }
  if (family == "pp_predator") {
    PredatorPolicy::Config c;
    const auto mode = Get<std::string>(params, "mode", "nearest");
    if (mode == "nearest") {
      c.mode = PredatorPolicy::Mode::kNearest;
    } else if (mode == "flank") {
      c.mode = PredatorPolicy::Mode::kFlank;
    } else if (mode == "follow") {
      c.mode = PredatorPolicy::Mode::kFollow;
    } else {
      throw ConfigError("mode: unknown predator mode '" + mode + "'");
    }
    c.turn = Get(params, "turn", c.turn);
    c.start_heading = Get(params, "start_heading", c.start_heading);
    c.noise = Get(params, "noise", c.noise);
    return std::make_shared<PredatorPolicy>(
        id, As<pp::PredatorPreyModel>(model, family), c);
  }
  throw ConfigError("family: unknown policy family '" + family + "'");
}

}  // namespace

nlohmann::json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::shared_ptr<const PosgModel> MakeEnvironment(const nlohmann::json& env) {
  try {
    const auto id = Require<std::string>(env, "id");
    if (id == "driving") {
      return driving::MakeDriving(Get(env, "width", 7), Get(env, "height", 7),
                                  Get<std::string>(env, "layout", "driving7"),
                                  Get(env, "agents", 2));
    }
    if (id == "pursuit_evasion") {
      return pe::MakePursuitEvasion(Get<std::string>(env, "layout", "pe8"));
    }
    if (id == "predator_prey") {
      return pp::MakePredatorPrey(Get(env, "predators", 2),
                                  Get(env, "strength", 2), Get(env, "prey", 3),
                                  Get<std::string>(env, "layout", "pp10"),
                                  Get(env, "prey_move_period", 1));
    }
    if (id == "tiny") {
      if (env.contains("file")) {
        return TinyPosgModel::FromJson(
            ReadJsonFile(Require<std::string>(env, "file")));
      }
      return MakeTinyPosg(Require<std::string>(env, "spec"));
    }
    throw ConfigError("id: unknown environment '" + id + "'");
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("environment: ") + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("environment.") + e.what());
  }
}

std::shared_ptr<const Policy> MakePolicy(
    const std::shared_ptr<const PosgModel>& model, const nlohmann::json& spec) {
  return BuildPolicy(model, spec);
}

std::shared_ptr<PolicySet> LoadPolicySet(
    const std::shared_ptr<const PosgModel>& model,
    const nlohmann::json& manifest) {
  const int planner = Get(manifest, "planner_agent", 0);
  auto set = std::make_shared<PolicySet>(model->NumAgents(), planner);
  if (!manifest.contains("policies") || !manifest.at("policies").is_array()) {
    throw ConfigError("manifest.policies: missing or not an array");
  }
  const json& policies = manifest.at("policies");
  for (std::size_t k = 0; k < policies.size(); ++k) {
    try {
      set->AddPolicy(BuildPolicy(model, policies[k]));
    } catch (const Error& e) {
      throw ConfigError("manifest.policies[" + std::to_string(k) + "]." +
                        e.what());
    }
  }
  try {
    for (const auto& id :
         Require<std::vector<std::string>>(manifest, "planner_policies")) {
      set->AddPlannerPolicy(id);
      if (set->policy(set->IndexOf(id)).num_actions() !=
          model->NumActions(planner)) {
        throw ConfigError("'" + id + "' has the wrong action count");
      }
    }
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("manifest.planner_policies: ") + e.what());
  }
  if (!manifest.contains("prior") || !manifest.at("prior").is_array()) {
    throw ConfigError("manifest.prior: missing or not an array");
  }
  const json& prior = manifest.at("prior");
  for (std::size_t k = 0; k < prior.size(); ++k) {
    try {
      const auto ids = Require<std::vector<std::string>>(prior[k], "joint");
      set->AddJoint(ids, Get(prior[k], "weight", 1.0));
    } catch (const ConfigError& e) {
      throw ConfigError("manifest.prior[" + std::to_string(k) + "]." +
                        e.what());
    }
  }
  try {
    set->Finalize();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  return set;
}

}  // namespace potmmcp
