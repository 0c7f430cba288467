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

#include "potmmcp/harness.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "potmmcp/belief.h"
#include "potmmcp/oracle.h"
#include "potmmcp/parallel.h"
#include "potmmcp/registry.h"
#include "potmmcp/tiny_instances.h"
#include "potmmcp/tiny_posg.h"

namespace potmmcp {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Exact value tables are only built for tiny models up to this horizon;
// deeper horizons fall back to Monte-Carlo tables.
constexpr int kExactValueHorizon = 5;

// --- Config reading ----------------------------------------------------

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) Fail(path_, "expected an object");
  }

  std::string Path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  bool Has(const char* key) const { return j_.contains(key); }
  const json& At(const char* key) const { return j_.at(key); }

  [[noreturn]] static void Fail(const std::string& path, const std::string& msg) {
    throw ValidationError((path.empty() ? std::string("config") : path) + ": " +
                          msg);
  }

  void AllowOnly(std::initializer_list<const char*> keys) const {
    for (const auto& [k, v] : j_.items()) {
      bool ok = false;
      for (const char* allowed : keys) ok |= k == allowed;
      if (!ok) Fail(Path(k), "unknown field");
    }
  }

  template <class T>
  T Get(const char* key, T fallback) const {
    if (!j_.contains(key) || j_.at(key).is_null()) return fallback;
    return Convert<T>(j_.at(key), Path(key));
  }
  template <class T>
  T Require(const char* key) const {
    if (!j_.contains(key)) Fail(Path(key), "required field is missing");
    return Convert<T>(j_.at(key), Path(key));
  }

  template <class T>
  static T Convert(const json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) Fail(path, "expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!v.is_number_unsigned()) Fail(path, "expected a non-negative integer");
      return v.get<std::uint64_t>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) Fail(path, "expected an integer");
      const auto x = v.get<std::int64_t>();
      if (x < std::numeric_limits<T>::min() || x > std::numeric_limits<T>::max()) {
        Fail(path, "integer out of range");
      }
      return static_cast<T>(x);
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) Fail(path, "expected a number");
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) Fail(path, "expected a string");
      return v.get<std::string>();
    } else {
      try {
        return v.get<T>();
      } catch (const json::exception&) {
        Fail(path, "has the wrong type");
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
};

double ParseTau(const json& v, const std::string& path) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return kTauInfinity;
    Reader::Fail(path, "expected a number >= 0 or \"inf\"");
  }
  const double tau = Reader::Convert<double>(v, path);
  if (!(tau >= 0.0)) Reader::Fail(path, "must be >= 0");
  return tau;
}

json TauToJson(double tau) {
  if (std::isinf(tau)) return "inf";
  return tau;
}

void ParsePlanner(const Reader& r, PlannerConfig& c) {
  r.AllowOnly({"c", "lambda", "epsilon", "simulations", "time_limit_s", "leaf",
               "normalize_q", "num_particles", "node_particle_cap"});
  c.c = r.Get("c", c.c);
  c.lambda = r.Get("lambda", c.lambda);
  c.epsilon = r.Get("epsilon", c.epsilon);
  c.simulations = r.Get("simulations", c.simulations);
  c.time_limit_s = r.Get("time_limit_s", c.time_limit_s);
  c.normalize_q = r.Get("normalize_q", c.normalize_q);
  c.num_particles = r.Get("num_particles", c.num_particles);
  c.node_particle_cap = r.Get("node_particle_cap", c.node_particle_cap);
  if (r.Has("leaf")) {
    const auto leaf = r.Require<std::string>("leaf");
    if (leaf == "value_function") {
      c.leaf = LeafEval::kValueFunction;
    } else if (leaf == "rollout") {
      c.leaf = LeafEval::kRollout;
    } else {
      Reader::Fail(r.Path("leaf"), "expected \"value_function\" or \"rollout\"");
    }
  }
  if (!(c.c > 0)) Reader::Fail(r.Path("c"), "must be > 0");
  if (!(c.lambda >= 0 && c.lambda <= 1)) Reader::Fail(r.Path("lambda"), "must lie in [0, 1]");
  if (!(c.epsilon > 0 && c.epsilon < 1)) Reader::Fail(r.Path("epsilon"), "must lie in (0, 1)");
  if (c.simulations < 1 && !(c.time_limit_s > 0)) {
    Reader::Fail(r.Path("simulations"), "must be >= 1");
  }
  if (c.time_limit_s < 0) Reader::Fail(r.Path("time_limit_s"), "must be >= 0");
  if (c.num_particles < 1) Reader::Fail(r.Path("num_particles"), "must be >= 1");
  if (c.node_particle_cap < 0) Reader::Fail(r.Path("node_particle_cap"), "must be >= 0");
}

json PlannerToJson(const PlannerConfig& c) {
  return {{"variant", c.variant == Variant::kPotmmcp ? "potmmcp" : "ipomcp_pf"},
          {"c", c.c},
          {"lambda", c.lambda},
          {"epsilon", c.epsilon},
          {"simulations", c.simulations},
          {"time_limit_s", c.time_limit_s},
          {"leaf", c.leaf == LeafEval::kValueFunction ? "value_function" : "rollout"},
          {"normalize_q", c.normalize_q},
          {"num_particles", c.num_particles},
          {"node_particle_cap", c.node_particle_cap}};
}

const char* KindName(MethodKind k) {
  switch (k) {
    case MethodKind::kPlanner:
      return "planner";
    case MethodKind::kMetaPolicyOnly:
      return "metapolicy_only";
    case MethodKind::kBestResponse:
      return "best_response";
  }
  return "?";
}

bool IsTiny(const json& env) {
  return env.is_object() && env.value("id", "") == "tiny";
}

std::string ResolvePath(const std::string& path, const std::string& base) {
  fs::path p(path);
  if (p.is_absolute()) return p.string();
  const fs::path near = fs::path(base) / p;
  if (!base.empty() && fs::exists(near)) return near.lexically_normal().string();
  if (fs::exists(p)) return p.lexically_normal().string();
  const fs::path data = fs::path(POTMMCP_DEFAULT_DATA_DIR) / p;
  if (fs::exists(data)) return data.string();
  return (base.empty() ? p : near).lexically_normal().string();
}

std::string HexHash(const std::string& text) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(HashTag(text)));
  return buf;
}

bool SafeName(const std::string& s) {
  if (s.empty()) return false;
  for (char ch : s) {
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' ||
          ch == '.')) {
      return false;
    }
  }
  return true;
}

// --- Output ------------------------------------------------------------

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : cols_(header.size()) {
    AddRow(header);
  }
  void AddRow(const std::vector<std::string>& row) {
    POTMMCP_CHECK(row.size() == cols_, ContractViolation, "CSV row width mismatch");
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out_ << ',';
      out_ << row[k];
    }
    out_ << '\n';
  }
  void Write(const fs::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path.string() + "'");
    f << out_.str();
  }

 private:
  std::size_t cols_;
  std::ostringstream out_;
};

std::string S(std::int64_t x) { return std::to_string(x); }
std::string U(std::uint64_t x) { return std::to_string(x); }

void WriteJson(const fs::path& path, const json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << j.dump(2) << '\n';
}

std::string EnvLabel(const RunConfig& c) {
  if (IsTiny(c.environment)) {
    if (c.environment.contains("spec")) return c.environment.at("spec").get<std::string>();
    return "tiny";
  }
  return c.environment.value("id", "env");
}

std::string UtcNow() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path OutputDir(const RunConfig& c) {
  if (c.output_dir.empty()) {
    throw ValidationError("output_dir: required for this command");
  }
  fs::path dir(c.output_dir);
  fs::create_directories(dir);
  return dir;
}

void WriteManifest(const fs::path& dir, const std::string& command,
                   const RunConfig& c, double seconds,
                   const std::vector<std::string>& files, const json& summary) {
  json m;
  m["command"] = command;
  m["name"] = c.name;
  m["config_hash"] = c.hash;
  m["seed"] = c.seed;
  m["versions"] = {{"potmmcp", kVersion},
                   {"nlohmann_json",
                    std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                        std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                        std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                   {"compiler", __VERSION__},
                   {"cplusplus", __cplusplus}};
  m["started_at"] = UtcNow();
  m["wall_clock_seconds"] = seconds;
  m["workers"] = c.workers;
  m["files"] = files;
  m["config"] = c.canonical;
  m["summary"] = summary;
  WriteJson(dir / "manifest.json", m);
}

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

bool NeedsPayoffs(const RunConfig& c) {
  for (const auto& m : c.methods) {
    if (m.kind == MethodKind::kBestResponse) return true;
    if (m.search_policy.empty()) return true;
  }
  return false;
}

bool NeedsValueTables(const RunConfig& c) {
  for (const auto& m : c.methods) {
    if (m.kind == MethodKind::kPlanner && m.planner.leaf == LeafEval::kValueFunction &&
        m.search_policy != "uniform") {
      return true;
    }
  }
  return false;
}

}  // namespace

std::string FormatDouble(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Overrides Overrides::FromJson(const json& j) {
  Overrides o;
  if (j.is_null()) return o;
  Reader r(j, "overrides");
  r.AllowOnly({"seed", "episodes", "simulations", "workers", "output_dir", "methods"});
  if (r.Has("seed")) o.seed = r.Require<std::uint64_t>("seed");
  if (r.Has("episodes")) o.episodes = r.Require<int>("episodes");
  if (r.Has("simulations")) o.simulations = r.Require<int>("simulations");
  if (r.Has("workers")) o.workers = r.Require<int>("workers");
  if (r.Has("output_dir")) o.output_dir = r.Require<std::string>("output_dir");
  if (r.Has("methods")) o.methods = r.Require<std::vector<std::string>>("methods");
  return o;
}

RunConfig ParseRunConfig(const json& j, const std::string& config_dir,
                         const Overrides& ov) {
  RunConfig c;
  c.config_dir = config_dir;
  Reader r(j, "");
  r.AllowOnly({"name", "environment", "policies", "episodes", "seed", "workers",
               "max_steps", "payoffs", "value_tables", "planner", "methods",
               "output_dir", "oracle", "description"});
  c.name = r.Get<std::string>("name", "run");
  if (!SafeName(c.name)) Reader::Fail("name", "use letters, digits, '_', '-' or '.'");
  c.episodes = ov.episodes.value_or(r.Get("episodes", c.episodes));
  if (c.episodes < 1) Reader::Fail("episodes", "must be >= 1");
  c.seed = ov.seed.value_or(r.Get<std::uint64_t>("seed", 0));
  c.workers = ov.workers.value_or(r.Get("workers", c.workers));
  if (c.workers < 0) Reader::Fail("workers", "must be >= 0 (0 = all cores)");
  c.max_steps = r.Get("max_steps", 0);
  if (c.max_steps < 0) Reader::Fail("max_steps", "must be >= 0");
  c.output_dir = ov.output_dir.value_or(r.Get<std::string>("output_dir", ""));
  if (!c.output_dir.empty() && !ov.output_dir) {
    c.output_dir = fs::path(c.output_dir).is_absolute()
                       ? c.output_dir
                       : (fs::path(config_dir) / c.output_dir).lexically_normal().string();
  }

  // Environment and policy set.
  std::shared_ptr<const PosgModel> model;
  if (r.Has("environment")) {
    c.environment = r.At("environment");
    json env = c.environment;
    if (env.is_object() && env.contains("file") && env.at("file").is_string()) {
      env["file"] = ResolvePath(env.at("file").get<std::string>(), config_dir);
      c.environment = env;
    }
    try {
      model = MakeEnvironment(env);
    } catch (const ConfigError& e) {
      throw ValidationError(e.what());
    }
    if (r.Has("policies")) {
      const json& p = r.At("policies");
      if (p.is_string()) {
        c.policies_path = ResolvePath(p.get<std::string>(), config_dir);
        if (!fs::exists(c.policies_path)) {
          Reader::Fail("policies", "file '" + c.policies_path + "' does not exist");
        }
        try {
          c.manifest = ReadJsonFile(c.policies_path);
        } catch (const ConfigError& e) {
          Reader::Fail("policies", e.what());
        }
      } else if (p.is_object()) {
        c.manifest = p;
      } else {
        Reader::Fail("policies", "expected a manifest path or an inline manifest");
      }
    } else if (IsTiny(c.environment) && c.environment.contains("spec")) {
      c.manifest = TinyManifest(c.environment.at("spec").get<std::string>());
    } else {
      Reader::Fail("policies", "required field is missing");
    }
    if (c.max_steps == 0 && model->StepLimit() == 0) c.max_steps = 10;
  }

  std::shared_ptr<PolicySet> set;
  if (model) {
    try {
      set = LoadPolicySet(model, c.manifest);
    } catch (const ConfigError& e) {
      Reader::Fail("policies", e.what());
    }
  }

  if (r.Has("payoffs")) {
    Reader p(r.At("payoffs"), "payoffs");
    p.AllowOnly({"episodes_per_cell", "max_steps", "file"});
    c.payoffs.episodes_per_cell = p.Get("episodes_per_cell", c.payoffs.episodes_per_cell);
    c.payoffs.max_steps = p.Get("max_steps", 0);
    if (p.Has("file")) {
      c.payoffs_file = ResolvePath(p.Require<std::string>("file"), config_dir);
      if (!fs::exists(c.payoffs_file)) {
        Reader::Fail("payoffs.file", "file '" + c.payoffs_file + "' does not exist");
      }
    }
    if (c.payoffs.episodes_per_cell < 1) {
      Reader::Fail("payoffs.episodes_per_cell", "must be >= 1");
    }
    if (c.payoffs.max_steps < 0) Reader::Fail("payoffs.max_steps", "must be >= 0");
  }
  if (c.payoffs.max_steps == 0) c.payoffs.max_steps = c.max_steps;
  c.payoffs.seed = DeriveSeed(c.seed, {HashTag("payoffs")});
  c.payoffs.workers = c.workers;

  if (r.Has("value_tables")) {
    Reader v(r.At("value_tables"), "value_tables");
    v.AllowOnly({"episodes", "min_count"});
    c.value_episodes = v.Get("episodes", c.value_episodes);
    c.value_min_count = v.Get("min_count", c.value_min_count);
    if (c.value_episodes < 1) Reader::Fail("value_tables.episodes", "must be >= 1");
    if (c.value_min_count < 1) Reader::Fail("value_tables.min_count", "must be >= 1");
  }

  json global_planner = json::object();
  if (r.Has("planner")) {
    global_planner = r.At("planner");
    ParsePlanner(Reader(global_planner, "planner"), c.planner);
  }

  if (r.Has("methods")) {
    const json& ms = r.At("methods");
    if (!ms.is_array() || ms.empty()) Reader::Fail("methods", "expected a non-empty array");
    std::set<std::string> names;
    for (std::size_t k = 0; k < ms.size(); ++k) {
      const std::string path = "methods[" + std::to_string(k) + "]";
      Reader m(ms[k], path);
      m.AllowOnly({"name", "kind", "variant", "tau", "search_policy", "planner"});
      MethodConfig mc;
      mc.name = m.Require<std::string>("name");
      if (!SafeName(mc.name)) {
        Reader::Fail(m.Path("name"), "use letters, digits, '_', '-' or '.'");
      }
      if (!names.insert(mc.name).second) Reader::Fail(m.Path("name"), "duplicate method name");
      const auto kind = m.Get<std::string>("kind", "planner");
      if (kind == "planner") {
        mc.kind = MethodKind::kPlanner;
      } else if (kind == "metapolicy_only") {
        mc.kind = MethodKind::kMetaPolicyOnly;
      } else if (kind == "best_response") {
        mc.kind = MethodKind::kBestResponse;
      } else {
        Reader::Fail(m.Path("kind"),
                     "expected \"planner\", \"metapolicy_only\" or \"best_response\"");
      }
      const auto variant = m.Get<std::string>("variant", "potmmcp");
      if (variant == "potmmcp") {
        mc.planner = PlannerConfig{};
      } else if (variant == "ipomcp_pf") {
        mc.planner = PlannerConfig::IpomcpPf();
      } else {
        Reader::Fail(m.Path("variant"), "expected \"potmmcp\" or \"ipomcp_pf\"");
      }
      ParsePlanner(Reader(global_planner, "planner"), mc.planner);
      if (m.Has("planner")) ParsePlanner(Reader(m.At("planner"), m.Path("planner")), mc.planner);
      if (ov.simulations) {
        if (*ov.simulations < 1) Reader::Fail("overrides.simulations", "must be >= 1");
        mc.planner.simulations = *ov.simulations;
      }
      if (m.Has("tau")) mc.tau = ParseTau(m.At("tau"), m.Path("tau"));
      mc.search_policy = m.Get<std::string>("search_policy", "");
      if (!mc.search_policy.empty() && mc.search_policy != "uniform" && set) {
        bool found = false;
        for (int idx : set->planner_policies()) {
          found |= set->policy(idx).id() == mc.search_policy;
        }
        if (!found) {
          Reader::Fail(m.Path("search_policy"),
                       "'" + mc.search_policy + "' is not a planner policy");
        }
      }
      if (mc.kind != MethodKind::kPlanner && mc.search_policy == "uniform") {
        Reader::Fail(m.Path("search_policy"), "\"uniform\" applies to planner methods only");
      }
      if (!ov.methods || std::find(ov.methods->begin(), ov.methods->end(), mc.name) !=
                             ov.methods->end()) {
        c.methods.push_back(std::move(mc));
      }
    }
    if (ov.methods) {
      for (const auto& name : *ov.methods) {
        if (!names.count(name)) {
          Reader::Fail("overrides.methods", "unknown method '" + name + "'");
        }
      }
    }
    if (!model) Reader::Fail("environment", "required when methods are given");
  }

  if (r.Has("oracle")) {
    c.has_oracle = true;
    Reader o(r.At("oracle"), "oracle");
    o.AllowOnly({"instances", "epsilon", "budgets", "runs", "num_particles", "tau",
                 "payoff_episodes", "payoff_max_steps", "slack", "agreement"});
    auto& oc = c.oracle;
    oc.instances = o.Get("instances", oc.instances);
    const auto known = TinyInstanceIds();
    for (std::size_t k = 0; k < oc.instances.size(); ++k) {
      if (std::find(known.begin(), known.end(), oc.instances[k]) == known.end()) {
        Reader::Fail("oracle.instances[" + std::to_string(k) + "]",
                     "unknown tiny instance '" + oc.instances[k] + "'");
      }
    }
    oc.epsilon = o.Get("epsilon", oc.epsilon);
    oc.budgets = o.Get("budgets", oc.budgets);
    oc.runs = ov.episodes.value_or(o.Get("runs", oc.runs));
    oc.num_particles = o.Get("num_particles", oc.num_particles);
    if (o.Has("tau")) oc.tau = ParseTau(o.At("tau"), o.Path("tau"));
    oc.payoff_episodes = o.Get("payoff_episodes", oc.payoff_episodes);
    oc.payoff_max_steps = o.Get("payoff_max_steps", oc.payoff_max_steps);
    oc.slack = o.Get("slack", oc.slack);
    oc.agreement = o.Get("agreement", oc.agreement);
    if (ov.simulations) oc.budgets = {*ov.simulations};
    if (!(oc.epsilon > 0 && oc.epsilon < 1)) Reader::Fail("oracle.epsilon", "must lie in (0, 1)");
    if (oc.budgets.empty()) Reader::Fail("oracle.budgets", "expected a non-empty array");
    for (int b : oc.budgets) {
      if (b < 1) Reader::Fail("oracle.budgets", "entries must be >= 1");
    }
    if (oc.runs < 1) Reader::Fail("oracle.runs", "must be >= 1");
    if (oc.num_particles < 1) Reader::Fail("oracle.num_particles", "must be >= 1");
    if (oc.payoff_episodes < 1) Reader::Fail("oracle.payoff_episodes", "must be >= 1");
    if (oc.payoff_max_steps < 1) Reader::Fail("oracle.payoff_max_steps", "must be >= 1");
    if (!(oc.agreement >= 0 && oc.agreement <= 1)) {
      Reader::Fail("oracle.agreement", "must lie in [0, 1]");
    }
  }
  if (!model && !c.has_oracle) {
    Reader::Fail("environment", "required field is missing");
  }

  // Canonical form: everything that affects results, nothing that does not
  // (output location, worker count).
  json canon;
  canon["name"] = c.name;
  canon["seed"] = c.seed;
  canon["episodes"] = c.episodes;
  canon["max_steps"] = c.max_steps;
  if (model) {
    canon["environment"] = c.environment;
    canon["manifest"] = c.manifest;
    canon["payoffs"] = {{"episodes_per_cell", c.payoffs.episodes_per_cell},
                        {"max_steps", c.payoffs.max_steps}};
    if (!c.payoffs_file.empty()) {
      canon["payoffs"]["file_hash"] = HexHash(ReadJsonFile(c.payoffs_file).dump());
    }
    canon["value_tables"] = {{"episodes", c.value_episodes},
                             {"min_count", c.value_min_count}};
    canon["planner"] = PlannerToJson(c.planner);
  }
  json methods = json::array();
  for (const auto& m : c.methods) {
    methods.push_back({{"name", m.name},
                       {"kind", KindName(m.kind)},
                       {"tau", TauToJson(m.tau)},
                       {"search_policy", m.search_policy},
                       {"planner", PlannerToJson(m.planner)}});
  }
  canon["methods"] = methods;
  if (c.has_oracle) {
    const auto& oc = c.oracle;
    canon["oracle"] = {{"instances", oc.instances},
                       {"epsilon", oc.epsilon},
                       {"budgets", oc.budgets},
                       {"runs", oc.runs},
                       {"num_particles", oc.num_particles},
                       {"tau", TauToJson(oc.tau)},
                       {"payoff_episodes", oc.payoff_episodes},
                       {"payoff_max_steps", oc.payoff_max_steps},
                       {"slack", oc.slack},
                       {"agreement", oc.agreement}};
  }
  c.canonical = canon;
  c.hash = HexHash(canon.dump());
  return c;
}

RunConfig LoadRunConfig(const std::string& path, const Overrides& overrides) {
  if (!fs::exists(path)) {
    throw ValidationError("config: file '" + path + "' does not exist");
  }
  json j;
  try {
    j = ReadJsonFile(path);
  } catch (const ConfigError& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return ParseRunConfig(j, fs::path(path).parent_path().string(), overrides);
}

// --- Preparation -------------------------------------------------------

Experiment Prepare(const RunConfig& config, PrepareOptions options) {
  POTMMCP_CHECK(!config.environment.is_null(), ValidationError,
                "environment: required field is missing");
  Experiment ex;
  ex.config = config;
  ex.model = MakeEnvironment(config.environment);
  ex.set = LoadPolicySet(ex.model, config.manifest);
  ex.value_horizon = HorizonForEpsilon(ex.model->Discount(), config.planner.epsilon);

  if (options.value_tables && NeedsValueTables(config)) {
    const auto& planner = ex.set->planner_policies();
    auto tiny = std::dynamic_pointer_cast<const TinyPosgModel>(ex.model);
    if (tiny && ex.value_horizon <= kExactValueHorizon) {
      oracle::DerivedPomdp derived(tiny, ex.set, ex.value_horizon);
      for (int k : planner) {
        ex.set->SetValueTable(k, oracle::ExactValueTable(derived, ex.set->policy(k)));
      }
    } else {
      std::vector<std::shared_ptr<ValueTable>> tables(planner.size());
      const int steps = config.max_steps;
      ParallelFor(static_cast<int>(planner.size()), config.workers, [&](int j) {
        const int k = planner[static_cast<std::size_t>(j)];
        tables[static_cast<std::size_t>(j)] = BuildValueTable(
            *ex.model, *ex.set, k, config.value_episodes, steps, ex.value_horizon,
            DeriveSeed(config.seed,
                       {stream::kValueTable, HashTag(ex.set->policy(k).id())}),
            config.value_min_count);
      });
      for (std::size_t j = 0; j < planner.size(); ++j) {
        ex.set->SetValueTable(planner[j], tables[j]);
      }
    }
  }

  if (options.payoffs && (NeedsPayoffs(config) || config.methods.empty())) {
    if (!config.payoffs_file.empty()) {
      PayoffTable loaded;
      try {
        loaded = PayoffTable::FromJson(ReadJsonFile(config.payoffs_file));
      } catch (const json::exception& e) {
        throw ValidationError("payoffs.file: " + std::string(e.what()));
      }
      std::vector<std::string> rows, cols;
      for (int k : ex.set->planner_policies()) rows.push_back(ex.set->policy(k).id());
      for (int k = 0; k < ex.set->num_joints(); ++k) cols.push_back(ex.set->JointName(k));
      if (loaded.rows() == rows && loaded.cols() == cols) {
        ex.payoffs = loaded;
      } else {
        ex.payoffs = AddPolicy(loaded, *ex.model, *ex.set, config.payoffs,
                               &ex.payoff_cells_simulated);
      }
    } else {
      ex.payoffs = ComputePayoffs(*ex.model, *ex.set, config.payoffs);
      ex.payoff_cells_simulated =
          static_cast<int>(ex.payoffs.rows().size() * ex.payoffs.cols().size());
    }
  }
  return ex;
}

// --- Episodes ----------------------------------------------------------

MethodRuntime MakeMethodRuntime(const Experiment& ex, const MethodConfig& method) {
  MethodRuntime rt;
  rt.config = method;
  const PolicySet& set = *ex.set;
  if (method.search_policy == "uniform") {
    rt.search = UniformSearchPolicy(ex.model->NumActions(set.planner_agent()));
    return rt;
  }
  if (method.search_policy.empty()) {
    rt.meta = BoundMetaPolicy::Bind(MakeMetaPolicy(ex.payoffs, method.tau), set);
  } else {
    rt.meta = BoundMetaPolicy::Fixed(set, method.search_policy);
  }
  rt.search = SearchPoliciesFor(set, *rt.meta);
  rt.marginal = rt.meta->Marginal(set.prior());
  return rt;
}

std::uint64_t EpisodeSeed(std::uint64_t root, int episode) {
  return DeriveSeed(root, {stream::kEpisode, static_cast<std::uint64_t>(episode)});
}

namespace {

int BestResponseRow(const Experiment& ex, int joint) {
  const int col = ex.payoffs.ColIndex(ex.set->JointName(joint));
  POTMMCP_CHECK(col >= 0, ContractViolation, "joint policy missing from payoffs");
  int best = 0;
  for (int r = 1; r < static_cast<int>(ex.payoffs.rows().size()); ++r) {
    if (ex.payoffs.cell(r, col).mean > ex.payoffs.cell(best, col).mean) best = r;
  }
  return ex.set->IndexOf(ex.payoffs.rows()[static_cast<std::size_t>(best)]);
}

PolicyState Replay(const Policy& pi, const History& h) {
  PolicyState s = pi.InitialState(h.initial());
  for (const auto& [a, o] : h.steps()) s = pi.NextState(s, a, o);
  return s;
}

}  // namespace

EpisodeRecord RunEpisode(const Experiment& ex, const MethodRuntime& rt,
                         int episode) {
  const PosgModel& model = *ex.model;
  const PolicySet& set = *ex.set;
  const int n = model.NumAgents();
  const AgentId me = set.planner_agent();
  const double gamma = model.Discount();
  const int limit = ex.config.max_steps > 0 ? ex.config.max_steps : model.StepLimit();

  EpisodeRecord rec;
  rec.episode = episode;
  rec.seed = EpisodeSeed(ex.config.seed, episode);
  rec.discounted.assign(static_cast<std::size_t>(n), 0.0);
  rec.undiscounted.assign(static_cast<std::size_t>(n), 0.0);

  Rng type_rng(DeriveSeed(rec.seed, {stream::kTruePolicies}));
  Rng env_rng(DeriveSeed(rec.seed, {stream::kEnvironment}));
  Rng others_rng(DeriveSeed(rec.seed, {stream::kOthers}));
  Rng own_rng(DeriveSeed(rec.seed, {stream::kPlanner, 1}));
  rec.true_joint = SampleJointPolicy(set, type_rng);
  const JointPolicy& truth = set.joint(rec.true_joint);

  InitialSample init = model.SampleInitial(env_rng);
  const bool obs_first = model.convention() == Convention::kObservationFirst;
  auto initial_obs = [&](AgentId k) -> std::optional<Observation> {
    if (obs_first) return init.joint_obs[k];
    return std::nullopt;
  };
  PerAgent<PolicyState> memory(n);
  for (AgentId j = 0; j < n; ++j) {
    if (j == me) continue;
    memory[j] = set.policy(truth.per_agent[j]).InitialState(initial_obs(j));
  }
  History history = obs_first ? History::ObservationFirst(init.joint_obs[me])
                              : History::ActionFirst();

  // Planner, or the fixed policy a baseline (or a depleted planner) plays.
  std::unique_ptr<Planner> planner;
  std::shared_ptr<const Policy> fixed;
  PolicyState fixed_state;
  auto start_fixed = [&](int policy_index) {
    fixed = policy_index >= 0 ? set.policy_ptr(policy_index)
                              : std::make_shared<UniformRandomPolicy>(
                                    "uniform", model.NumActions(me));
    fixed_state = Replay(*fixed, history);
  };
  auto fall_back = [&](int t) {
    rec.fallback_step = t;
    planner.reset();
    if (rt.meta) {
      const int slot = own_rng.Categorical(rt.marginal);
      start_fixed(rt.meta->policy_index()[static_cast<std::size_t>(slot)]);
    } else {
      start_fixed(-1);
    }
  };

  switch (rt.config.kind) {
    case MethodKind::kPlanner:
      planner = std::make_unique<Planner>(
          ex.model, ex.set, rt.search, rt.meta, rt.config.planner,
          DeriveSeed(rec.seed, {stream::kPlanner}));
      ++rec.planners_built;
      try {
        planner->Reset(initial_obs(me));
      } catch (const DepletionError&) {
        fall_back(0);
      }
      break;
    case MethodKind::kMetaPolicyOnly: {
      const int slot = own_rng.Categorical(rt.marginal);
      start_fixed(rt.meta->policy_index()[static_cast<std::size_t>(slot)]);
      rec.played_policy = fixed ? set.IndexOf(fixed->id()) : -1;
      break;
    }
    case MethodKind::kBestResponse:
      start_fixed(BestResponseRow(ex, rec.true_joint));
      rec.played_policy = set.IndexOf(fixed->id());
      break;
  }

  State state = init.state;
  double discount = 1.0;
  for (int t = 0; limit <= 0 || t < limit; ++t) {
    if (model.IsTerminal(state) || model.IsAgentDone(state, me)) break;
    StepRecord step;
    step.t = t;
    step.prob_true_type = kNaN;
    step.action_distance = kNaN;
    Action own = 0;
    if (planner) {
      const BeliefMetrics bm =
          ComputeBeliefMetrics(planner->belief(), set, rec.true_joint, memory);
      step.prob_true_type = bm.prob_true_type;
      step.action_distance = bm.action_distance;
      step.belief_size = planner->belief().size();
      try {
        own = planner->Search();
        const auto& d = planner->diagnostics();
        step.max_depth = d.max_depth;
        step.simulations = d.simulations;
        step.generative_steps = d.generative_steps;
        step.depleted = d.depleted;
        step.root_visits = planner->RootVisits();
      } catch (const DepletionError&) {
        fall_back(t);
      }
    }
    if (!planner) {
      step.fallback = rec.fallback_step >= 0;
      own = SampleAction(*fixed, fixed_state, own_rng);
    }
    step.action = own;

    JointAction joint(n);
    for (AgentId j = 0; j < n; ++j) {
      joint[j] = j == me ? own
                         : SampleAction(set.policy(truth.per_agent[j]), memory[j],
                                        others_rng);
    }
    GenerativeStep g = model.Step(state, joint, env_rng);
    for (AgentId j = 0; j < n; ++j) {
      rec.undiscounted[static_cast<std::size_t>(j)] += g.joint_reward[j];
      rec.discounted[static_cast<std::size_t>(j)] += discount * g.joint_reward[j];
      if (j != me) {
        memory[j] = set.policy(truth.per_agent[j]).NextState(memory[j], joint[j],
                                                             g.joint_obs[j]);
      }
    }
    step.reward = g.joint_reward[me];
    discount *= gamma;
    history.Append(own, g.joint_obs[me]);
    state = g.next_state;
    rec.step_records.push_back(std::move(step));

    const bool over = model.IsTerminal(state) || model.IsAgentDone(state, me) ||
                      (limit > 0 && t + 1 >= limit);
    if (over) break;
    if (planner) {
      try {
        planner->Update(own, g.joint_obs[me]);
      } catch (const DepletionError&) {
        fall_back(t + 1);
      }
    } else {
      fixed_state = fixed->NextState(fixed_state, own, g.joint_obs[me]);
    }
  }
  rec.steps = static_cast<int>(rec.step_records.size());
  return rec;
}

// --- Aggregation -------------------------------------------------------

MethodSummary Summarize(const std::string& method,
                        const std::vector<EpisodeRecord>& episodes, AgentId me) {
  MethodSummary s;
  s.method = method;
  s.episodes = static_cast<int>(episodes.size());
  if (episodes.empty()) return s;
  double sum = 0.0;
  for (const auto& e : episodes) sum += e.discounted[static_cast<std::size_t>(me)];
  s.mean_return = sum / s.episodes;
  double ss = 0.0;
  for (const auto& e : episodes) {
    const double d = e.discounted[static_cast<std::size_t>(me)] - s.mean_return;
    ss += d * d;
  }
  s.stderr_return = s.episodes > 1 ? std::sqrt(ss / (s.episodes - 1) / s.episodes) : 0.0;
  s.ci_low = s.mean_return - kZ95 * s.stderr_return;
  s.ci_high = s.mean_return + kZ95 * s.stderr_return;
  std::int64_t decisions = 0;
  double depth = 0.0, gen = 0.0;
  for (const auto& e : episodes) {
    s.planners_built += e.planners_built;
    if (e.fallback_step >= 0) ++s.fallback_episodes;
    for (const auto& st : e.step_records) {
      if (st.simulations > 0) {
        ++decisions;
        depth += st.max_depth;
        gen += static_cast<double>(st.generative_steps);
      }
    }
  }
  if (decisions > 0) {
    s.mean_max_depth = depth / static_cast<double>(decisions);
    s.mean_generative_steps = gen / static_cast<double>(decisions);
  }
  const auto [q1, q4] = QuartileBelief(episodes);
  s.first_quartile_prob = q1;
  s.last_quartile_prob = q4;
  return s;
}

std::pair<double, double> QuartileBelief(const std::vector<EpisodeRecord>& episodes) {
  double first = 0.0, last = 0.0;
  std::int64_t nf = 0, nl = 0;
  for (const auto& e : episodes) {
    if (e.steps <= 0) continue;
    for (const auto& st : e.step_records) {
      if (std::isnan(st.prob_true_type)) continue;
      const int q = (4 * st.t) / e.steps;
      if (q == 0) {
        first += st.prob_true_type;
        ++nf;
      } else if (q == 3) {
        last += st.prob_true_type;
        ++nl;
      }
    }
  }
  return {nf ? first / static_cast<double>(nf) : kNaN,
          nl ? last / static_cast<double>(nl) : kNaN};
}

std::vector<BeliefRow> BeliefTable(const std::vector<EpisodeRecord>& episodes) {
  int longest = 0;
  for (const auto& e : episodes) longest = std::max(longest, e.steps);
  std::vector<BeliefRow> rows;
  for (int t = 0; t < longest; ++t) {
    std::vector<double> p, d;
    for (const auto& e : episodes) {
      if (t >= e.steps) continue;
      const StepRecord& st = e.step_records[static_cast<std::size_t>(t)];
      if (std::isnan(st.prob_true_type)) continue;
      p.push_back(st.prob_true_type);
      d.push_back(st.action_distance);
    }
    if (p.empty()) continue;
    auto mean_ci = [](const std::vector<double>& x) {
      double m = 0.0;
      for (double v : x) m += v;
      m /= static_cast<double>(x.size());
      double ss = 0.0;
      for (double v : x) ss += (v - m) * (v - m);
      const double n = static_cast<double>(x.size());
      const double ci = x.size() > 1 ? kZ95 * std::sqrt(ss / (n - 1) / n) : 0.0;
      return std::make_pair(m, ci);
    };
    BeliefRow row;
    row.step = t;
    row.count = static_cast<int>(p.size());
    std::tie(row.prob_mean, row.prob_ci) = mean_ci(p);
    std::tie(row.distance_mean, row.distance_ci) = mean_ci(d);
    rows.push_back(row);
  }
  return rows;
}

MethodResult EvaluateMethod(const Experiment& ex, const MethodConfig& method) {
  const MethodRuntime rt = MakeMethodRuntime(ex, method);
  MethodResult result;
  result.episodes.resize(static_cast<std::size_t>(ex.config.episodes));
  ParallelFor(ex.config.episodes, ex.config.workers, [&](int k) {
    result.episodes[static_cast<std::size_t>(k)] = RunEpisode(ex, rt, k);
  });
  result.summary = Summarize(method.name, result.episodes, ex.set->planner_agent());
  return result;
}

EvaluationResult RunEvaluation(const Experiment& ex) {
  EvaluationResult out;
  for (const auto& m : ex.config.methods) out.methods.push_back(EvaluateMethod(ex, m));
  return out;
}

// --- CSV ---------------------------------------------------------------

namespace {

std::string Visits(const std::vector<std::int64_t>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ';';
    s += std::to_string(v[k]);
  }
  return s;
}

void WriteEpisodesCsv(const fs::path& path, const Experiment& ex,
                      const MethodResult& r) {
  const int n = ex.model->NumAgents();
  std::vector<std::string> header{"config_hash", "seed", "environment", "method",
                                  "episode", "episode_seed", "true_joint",
                                  "played_policy", "steps", "return"};
  for (int j = 0; j < n; ++j) header.push_back("discounted_return_" + std::to_string(j));
  for (int j = 0; j < n; ++j) header.push_back("undiscounted_return_" + std::to_string(j));
  header.insert(header.end(), {"mean_max_depth", "mean_simulations",
                               "generative_steps", "fallback_step"});
  Csv csv(header);
  const AgentId me = ex.set->planner_agent();
  for (const auto& e : r.episodes) {
    double depth = 0.0, sims = 0.0;
    std::int64_t gen = 0;
    for (const auto& st : e.step_records) {
      depth += st.max_depth;
      sims += st.simulations;
      gen += st.generative_steps;
    }
    const double steps = std::max(1, e.steps);
    std::vector<std::string> row{
        ex.config.hash, U(ex.config.seed), EnvLabel(ex.config), r.summary.method,
        S(e.episode), U(e.seed), ex.set->JointName(e.true_joint),
        e.played_policy >= 0 ? ex.set->policy(e.played_policy).id() : "",
        S(e.steps), FormatDouble(e.discounted[static_cast<std::size_t>(me)])};
    for (double x : e.discounted) row.push_back(FormatDouble(x));
    for (double x : e.undiscounted) row.push_back(FormatDouble(x));
    row.push_back(FormatDouble(depth / steps));
    row.push_back(FormatDouble(sims / steps));
    row.push_back(S(gen));
    row.push_back(S(e.fallback_step));
    csv.AddRow(row);
  }
  csv.Write(path);
}

void WriteStepsCsv(const fs::path& path, const Experiment& ex, const MethodResult& r) {
  Csv csv({"config_hash", "seed", "environment", "method", "episode", "episode_seed",
           "t", "action", "reward", "prob_true_type", "action_distance", "max_depth",
           "simulations", "generative_steps", "belief_size", "depleted", "fallback",
           "root_visits"});
  for (const auto& e : r.episodes) {
    for (const auto& st : e.step_records) {
      csv.AddRow({ex.config.hash, U(ex.config.seed), EnvLabel(ex.config),
                  r.summary.method, S(e.episode), U(e.seed), S(st.t), S(st.action),
                  FormatDouble(st.reward), FormatDouble(st.prob_true_type),
                  FormatDouble(st.action_distance), S(st.max_depth),
                  S(st.simulations), S(st.generative_steps), S(st.belief_size),
                  S(st.depleted), S(st.fallback), Visits(st.root_visits)});
    }
  }
  csv.Write(path);
}

void WriteBeliefCsv(const fs::path& path, const Experiment& ex, const MethodResult& r) {
  Csv csv({"config_hash", "seed", "environment", "method", "step", "episodes",
           "prob_true_type_mean", "prob_true_type_ci95", "action_distance_mean",
           "action_distance_ci95"});
  for (const BeliefRow& row : BeliefTable(r.episodes)) {
    csv.AddRow({ex.config.hash, U(ex.config.seed), EnvLabel(ex.config),
                r.summary.method, S(row.step), S(row.count),
                FormatDouble(row.prob_mean), FormatDouble(row.prob_ci),
                FormatDouble(row.distance_mean), FormatDouble(row.distance_ci)});
  }
  csv.Write(path);
}

void WriteSummaryCsv(const fs::path& path, const Experiment& ex,
                     const std::vector<MethodResult>& results) {
  Csv csv({"config_hash", "seed", "environment", "method", "episodes", "mean_return",
           "stderr", "ci95_low", "ci95_high", "mean_max_depth",
           "generative_steps_per_decision", "first_quartile_prob_true_type",
           "last_quartile_prob_true_type", "fallback_episodes"});
  for (const auto& r : results) {
    const auto& s = r.summary;
    csv.AddRow({ex.config.hash, U(ex.config.seed), EnvLabel(ex.config), s.method,
                S(s.episodes), FormatDouble(s.mean_return), FormatDouble(s.stderr_return),
                FormatDouble(s.ci_low), FormatDouble(s.ci_high),
                FormatDouble(s.mean_max_depth), FormatDouble(s.mean_generative_steps),
                FormatDouble(s.first_quartile_prob), FormatDouble(s.last_quartile_prob),
                S(s.fallback_episodes)});
  }
  csv.Write(path);
}

void WritePayoffsCsv(const fs::path& path, const Experiment& ex) {
  Csv csv({"config_hash", "seed", "environment", "row_policy", "joint", "mean",
           "stderr", "count"});
  const PayoffTable& t = ex.payoffs;
  for (int r = 0; r < static_cast<int>(t.rows().size()); ++r) {
    for (int c = 0; c < static_cast<int>(t.cols().size()); ++c) {
      const auto& cell = t.cell(r, c);
      csv.AddRow({ex.config.hash, U(ex.config.seed), EnvLabel(ex.config),
                  t.rows()[static_cast<std::size_t>(r)],
                  t.cols()[static_cast<std::size_t>(c)], FormatDouble(cell.mean),
                  FormatDouble(cell.stderr_mean), S(cell.count)});
    }
  }
  csv.Write(path);
}

json SummaryJson(const MethodSummary& s) {
  auto num = [](double x) -> json { return std::isfinite(x) ? json(x) : json(nullptr); };
  return {{"method", s.method},
          {"episodes", s.episodes},
          {"mean_return", num(s.mean_return)},
          {"stderr", num(s.stderr_return)},
          {"ci95", {num(s.ci_low), num(s.ci_high)}},
          {"mean_max_depth", num(s.mean_max_depth)},
          {"generative_steps_per_decision", num(s.mean_generative_steps)},
          {"first_quartile_prob_true_type", num(s.first_quartile_prob)},
          {"last_quartile_prob_true_type", num(s.last_quartile_prob)},
          {"planners_built", s.planners_built},
          {"fallback_episodes", s.fallback_episodes}};
}

std::vector<double> MethodTaus(const RunConfig& c) {
  std::vector<double> taus;
  for (const auto& m : c.methods) {
    if (m.search_policy.empty() &&
        std::find(taus.begin(), taus.end(), m.tau) == taus.end()) {
      taus.push_back(m.tau);
    }
  }
  if (taus.empty()) taus.push_back(0.25);
  return taus;
}

std::string TauLabel(double tau) {
  return std::isinf(tau) ? "inf" : FormatDouble(tau);
}

}  // namespace

// --- Oracle check ------------------------------------------------------

OracleInstanceResult OracleCheckInstance(const std::string& instance,
                                         const OracleCheckConfig& oc,
                                         std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  OracleInstanceResult res;
  res.instance = instance;
  auto model = MakeTinyPosg(instance);
  std::shared_ptr<PolicySet> set = LoadPolicySet(model, TinyManifest(instance));
  const AgentId me = set->planner_agent();
  res.horizon = HorizonForEpsilon(model->Discount(), oc.epsilon);
  res.tolerance = oc.epsilon / (1.0 - model->Discount()) + oc.slack;
  oracle::DerivedPomdp derived(model, set, res.horizon);
  for (int k : set->planner_policies()) {
    set->SetValueTable(k, oracle::ExactValueTable(derived, set->policy(k)));
  }
  PayoffOptions po;
  po.episodes_per_cell = oc.payoff_episodes;
  po.max_steps = oc.payoff_max_steps;
  po.seed = DeriveSeed(seed, {HashTag("payoffs"), HashTag(instance)});
  const PayoffTable table = ComputePayoffs(*model, *set, po);
  const BoundMetaPolicy meta = BoundMetaPolicy::Bind(MakeMetaPolicy(table, oc.tau), *set);
  const auto search = SearchPoliciesFor(*set, meta);

  std::map<Observation, oracle::OptimalResult> optimal;
  for (const auto& r : oracle::OptimalValues(derived)) optimal[r.root_obs] = r;

  const int nb = static_cast<int>(oc.budgets.size());
  res.runs.resize(static_cast<std::size_t>(oc.runs * nb));
  ParallelFor(oc.runs, 1, [&](int run) {
    const std::uint64_t run_seed =
        DeriveSeed(seed, {stream::kEpisode, HashTag(instance),
                          static_cast<std::uint64_t>(run)});
    Rng rng(DeriveSeed(run_seed, {stream::kEnvironment}));
    const Observation o = model->SampleInitial(rng).joint_obs[me];
    const auto& opt = optimal.at(o);
    for (int b = 0; b < nb; ++b) {
      PlannerConfig cfg;
      cfg.epsilon = oc.epsilon;
      cfg.num_particles = oc.num_particles;
      cfg.simulations = oc.budgets[static_cast<std::size_t>(b)];
      Planner planner(model, set, search, meta, cfg,
                      DeriveSeed(run_seed, {stream::kPlanner}));
      planner.Reset(o);
      OracleRun r;
      r.instance = instance;
      r.budget = cfg.simulations;
      r.run = run;
      r.seed = run_seed;
      r.root_obs = o;
      r.action = planner.Search();
      r.optimal = std::find(opt.optimal_actions.begin(), opt.optimal_actions.end(),
                            r.action) != opt.optimal_actions.end();
      r.value = planner.RootValue();
      r.v_star = opt.value;
      res.runs[static_cast<std::size_t>(run * nb + b)] = r;
    }
  });

  const int max_budget = *std::max_element(oc.budgets.begin(), oc.budgets.end());
  const int min_budget = *std::min_element(oc.budgets.begin(), oc.budgets.end());
  json budgets = json::array();
  for (int b : oc.budgets) {
    std::vector<double> err;
    int agree = 0;
    for (const auto& r : res.runs) {
      if (r.budget != b) continue;
      err.push_back(std::abs(r.value - r.v_star));
      agree += r.optimal;
    }
    std::sort(err.begin(), err.end());
    budgets.push_back({{"budget", b},
                       {"agreement", agree},
                       {"median_error", err[err.size() / 2]},
                       {"max_error", err.back()}});
    if (b == max_budget) {
      res.agree_at_max = agree;
      res.max_error_at_max = err.back();
    }
  }
  int improved = 0;
  if (max_budget != min_budget) {
    for (int run = 0; run < oc.runs; ++run) {
      double lo = 0, hi = 0;
      for (int b = 0; b < nb; ++b) {
        const auto& r = res.runs[static_cast<std::size_t>(run * nb + b)];
        if (r.budget == min_budget) lo = std::abs(r.value - r.v_star);
        if (r.budget == max_budget) hi = std::abs(r.value - r.v_star);
      }
      improved += hi < lo;
    }
  }
  const int needed = static_cast<int>(std::ceil(oc.agreement * oc.runs - 1e-9));
  res.pass = res.agree_at_max >= needed && res.max_error_at_max <= res.tolerance;
  res.seconds = Seconds(t0);
  res.report = oracle::OracleReport(instance, derived);
  res.report["tolerance"] = res.tolerance;
  res.report["runs"] = oc.runs;
  res.report["budgets"] = budgets;
  res.report["agreement_at_max_budget"] = res.agree_at_max;
  res.report["agreement_required"] = needed;
  res.report["max_error_at_max_budget"] = res.max_error_at_max;
  res.report["runs_improved_min_to_max_budget"] = improved;
  res.report["pass"] = res.pass;
  return res;
}

// --- Commands ----------------------------------------------------------

json CommandValidate(const RunConfig& c) {
  json out;
  out["valid"] = true;
  out["name"] = c.name;
  out["config_hash"] = c.hash;
  if (!c.environment.is_null()) {
    auto model = MakeEnvironment(c.environment);
    auto set = LoadPolicySet(model, c.manifest);
    out["environment"] = model->Id();
    out["agents"] = model->NumAgents();
    out["planner_agent"] = set->planner_agent();
    json planner = json::array();
    for (int k : set->planner_policies()) planner.push_back(set->policy(k).id());
    out["planner_policies"] = planner;
    json joints = json::array();
    for (int k = 0; k < set->num_joints(); ++k) {
      joints.push_back({{"joint", set->JointName(k)}, {"prior", set->prior()[k]}});
    }
    out["joints"] = joints;
  }
  json methods = json::array();
  for (const auto& m : c.methods) methods.push_back(m.name);
  out["methods"] = methods;
  out["episodes"] = c.episodes;
  out["has_oracle"] = c.has_oracle;
  return out;
}

json CommandPayoffs(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = OutputDir(c);
  PrepareOptions po;
  po.value_tables = false;
  RunConfig copy = c;
  Experiment ex = Prepare(copy, po);
  if (ex.payoffs.rows().empty()) {
    ex.payoffs = ComputePayoffs(*ex.model, *ex.set, c.payoffs);
  }
  std::vector<std::string> files;
  const std::string env = EnvLabel(c);
  WriteJson(dir / ("payoffs_" + env + ".json"), ex.payoffs.ToJson());
  files.push_back("payoffs_" + env + ".json");
  WritePayoffsCsv(dir / ("payoffs_" + env + ".csv"), ex);
  files.push_back("payoffs_" + env + ".csv");
  for (double tau : MethodTaus(c)) {
    const std::string name = "meta_policy_" + env + "_tau" + TauLabel(tau) + ".json";
    WriteJson(dir / name, MakeMetaPolicy(ex.payoffs, tau).ToJson());
    files.push_back(name);
  }
  json summary = {{"rows", ex.payoffs.rows().size()},
                  {"cols", ex.payoffs.cols().size()},
                  {"cells_simulated", ex.payoff_cells_simulated}};
  WriteManifest(dir, "payoffs", c, Seconds(t0), files, summary);
  summary["output_dir"] = dir.string();
  summary["files"] = files;
  return summary;
}

json CommandEvaluate(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  if (c.methods.empty()) throw ValidationError("methods: required for evaluate");
  const fs::path dir = OutputDir(c);
  const Experiment ex = Prepare(c);
  const EvaluationResult result = RunEvaluation(ex);
  const std::string env = EnvLabel(c);
  std::vector<std::string> files;
  json summary = json::array();
  for (const auto& r : result.methods) {
    const std::string ep = "episodes_" + env + "_" + r.summary.method + ".csv";
    const std::string st = "steps_" + env + "_" + r.summary.method + ".csv";
    WriteEpisodesCsv(dir / ep, ex, r);
    WriteStepsCsv(dir / st, ex, r);
    files.push_back(ep);
    files.push_back(st);
    summary.push_back(SummaryJson(r.summary));
  }
  const std::string sum = "summary_" + env + ".csv";
  WriteSummaryCsv(dir / sum, ex, result.methods);
  files.push_back(sum);
  if (!ex.payoffs.rows().empty()) {
    WriteJson(dir / ("payoffs_" + env + ".json"), ex.payoffs.ToJson());
    files.push_back("payoffs_" + env + ".json");
  }
  WriteManifest(dir, "evaluate", c, Seconds(t0), files, summary);
  return {{"output_dir", dir.string()}, {"files", files}, {"methods", summary}};
}

json CommandBeliefStats(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig planners = c;
  planners.methods.clear();
  for (const auto& m : c.methods) {
    if (m.kind == MethodKind::kPlanner) planners.methods.push_back(m);
  }
  if (planners.methods.empty()) {
    throw ValidationError("methods: belief-stats needs at least one planner method");
  }
  const fs::path dir = OutputDir(c);
  const Experiment ex = Prepare(planners);
  const std::string env = EnvLabel(c);
  std::vector<std::string> files;
  std::vector<MethodResult> results;
  json summary = json::array();
  for (const auto& m : planners.methods) {
    MethodResult r = EvaluateMethod(ex, m);
    const std::string name = "belief_" + env + "_" + m.name + ".csv";
    WriteBeliefCsv(dir / name, ex, r);
    files.push_back(name);
    summary.push_back(SummaryJson(r.summary));
    results.push_back(std::move(r));
  }
  const std::string sum = "belief_summary_" + env + ".csv";
  WriteSummaryCsv(dir / sum, ex, results);
  files.push_back(sum);
  WriteManifest(dir, "belief-stats", c, Seconds(t0), files, summary);
  return {{"output_dir", dir.string()}, {"files", files}, {"methods", summary}};
}

json CommandOracleCheck(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!c.has_oracle) throw ValidationError("oracle: required for oracle-check");
  const fs::path dir = OutputDir(c);
  std::vector<std::string> instances =
      c.oracle.instances.empty() ? TinyInstanceIds() : c.oracle.instances;
  std::vector<OracleInstanceResult> results(instances.size());
  ParallelFor(static_cast<int>(instances.size()), c.workers, [&](int k) {
    results[static_cast<std::size_t>(k)] =
        OracleCheckInstance(instances[static_cast<std::size_t>(k)], c.oracle, c.seed);
  });
  std::vector<std::string> files;
  json report = json::array();
  bool all = true;
  for (const auto& res : results) {
    Csv csv({"config_hash", "seed", "instance", "budget", "run", "run_seed",
             "root_obs", "action", "optimal", "root_value", "v_star", "abs_error"});
    for (const auto& r : res.runs) {
      csv.AddRow({c.hash, U(c.seed), r.instance, S(r.budget), S(r.run), U(r.seed),
                  U(r.root_obs), S(r.action), S(r.optimal), FormatDouble(r.value),
                  FormatDouble(r.v_star), FormatDouble(std::abs(r.value - r.v_star))});
    }
    const std::string name = "oracle_" + res.instance + ".csv";
    csv.Write(dir / name);
    files.push_back(name);
    report.push_back(res.report);
    all = all && res.pass;
  }
  WriteJson(dir / "oracle_report.json", report);
  files.push_back("oracle_report.json");
  json summary = {{"pass", all}, {"instances", report}};
  WriteManifest(dir, "oracle-check", c, Seconds(t0), files, summary);
  return {{"output_dir", dir.string()}, {"files", files}, {"pass", all},
          {"instances", report}};
}

}  // namespace potmmcp
