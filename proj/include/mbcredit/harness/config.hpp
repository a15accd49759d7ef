// Copyright 2026 The mbcredit Authors
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

// Training configuration and its flat text form: one `key=value` per line,
// `#` starts a comment, blank lines are ignored, unknown keys are errors.

#ifndef MBCREDIT_HARNESS_CONFIG_HPP_
#define MBCREDIT_HARNESS_CONFIG_HPP_

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mbcredit/credit/advantages.hpp"
#include "mbcredit/errors.hpp"

namespace mbcredit::harness {

enum class AdvantageKind { kSemivalue, kShared };

// A method string resolved into its advantage path and coalition evaluator.
struct MethodSpec {
  AdvantageKind advantage = AdvantageKind::kShared;
  credit::EvaluatorKind evaluator = credit::EvaluatorKind::kModelBased;
  std::string semivalue;  // empty for the shared-advantage path

  bool uses_world_model() const {
    return advantage == AdvantageKind::kSemivalue &&
           evaluator == credit::EvaluatorKind::kModelBased;
  }
  bool uses_q_critic() const {
    return advantage == AdvantageKind::kSemivalue &&
           evaluator == credit::EvaluatorKind::kQCritic;
  }
};

inline MethodSpec ParseMethod(const std::string& method) {
  MethodSpec m;
  if (method == "mappo") return m;
  m.advantage = AdvantageKind::kSemivalue;
  if (method == "q-shapley") {
    m.evaluator = credit::EvaluatorKind::kQCritic;
    m.semivalue = "shapley";
    return m;
  }
  if (method == "mb-shapley") m.semivalue = "shapley";
  else if (method == "mb-banzhaf") m.semivalue = "banzhaf";
  else if (method == "mb-loo") m.semivalue = "loo";
  else if (method.rfind("mb-fixed:", 0) == 0) m.semivalue = method.substr(3);
  else {
    throw ConfigError("unknown method '" + method +
                      "' (expected mb-shapley, mb-banzhaf, mb-loo, "
                      "mb-fixed:<c>, q-shapley or mappo)");
  }
  return m;
}

struct TrainConfig {
  std::string env = "chain4";
  std::string method = "mb-shapley";
  int iterations = 60;
  int steps_per_iteration = 2048;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip = 0.2;
  int samples = 1;
  bool exact = false;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  bool standardize_advantages = true;
  double max_grad_norm = 0.0;
  double control_cost = -1.0;  // < 0 keeps the environment default

  int ppo_epochs = 10;
  int ppo_minibatch = 64;
  double actor_lr = 3e-4;
  int actor_width = 32;
  int actor_depth = 3;
  double log_std_init = -0.5;

  double critic_lr = 1e-3;
  int critic_width = 32;
  int critic_depth = 3;
  int critic_epochs = 10;
  int critic_minibatch = 64;

  double q_lr = 1e-3;
  int q_width = 32;
  int q_depth = 3;
  int q_epochs = 10;

  double model_lr = 1e-3;
  int model_dyn_width = 128;
  int model_dyn_depth = 4;
  int model_rew_width = 128;
  int model_rew_depth = 3;
  int model_epochs = 10;
  int model_minibatch = 64;

  int checkpoint_every = 0;  // 0: final checkpoint only
  std::string out = "runs";

  MethodSpec method_spec() const { return ParseMethod(method); }
};

namespace internal {

inline std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double ParseDouble(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) {
    throw ConfigError("key '" + key + "': '" + v + "' is not a number");
  }
  return out;
}

inline int ParseInt(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) {
    throw ConfigError("key '" + key + "': '" + v + "' is not an integer");
  }
  return static_cast<int>(out);
}

inline bool ParseBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("key '" + key + "': '" + v + "' is not a boolean");
}

inline std::vector<std::uint64_t> ParseSeeds(const std::string& key,
                                             const std::string& v) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    const int s = ParseInt(key, item);
    if (s < 0) throw ConfigError("seeds must be non-negative");
    seeds.push_back(static_cast<std::uint64_t>(s));
  }
  if (seeds.empty()) throw ConfigError("seeds list is empty");
  return seeds;
}

// Field table shared by the reader and the writer, in serialization order.
struct Field {
  const char* key;
  std::function<void(TrainConfig&, const std::string&)> set;
  std::function<std::string(const TrainConfig&)> get;
};

#define MBCREDIT_INT_FIELD(name)                                            \
  Field{#name,                                                              \
        [](TrainConfig& c, const std::string& v) { c.name = ParseInt(#name, v); }, \
        [](const TrainConfig& c) { return std::to_string(c.name); }}
#define MBCREDIT_DOUBLE_FIELD(name)                                         \
  Field{#name,                                                              \
        [](TrainConfig& c, const std::string& v) {                          \
          c.name = ParseDouble(#name, v);                                   \
        },                                                                  \
        [](const TrainConfig& c) { return FormatDouble(c.name); }}
#define MBCREDIT_BOOL_FIELD(name)                                           \
  Field{#name,                                                              \
        [](TrainConfig& c, const std::string& v) { c.name = ParseBool(#name, v); }, \
        [](const TrainConfig& c) { return std::string(c.name ? "true" : "false"); }}
#define MBCREDIT_STRING_FIELD(name)                                         \
  Field{#name, [](TrainConfig& c, const std::string& v) { c.name = v; },    \
        [](const TrainConfig& c) { return c.name; }}

inline const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      MBCREDIT_STRING_FIELD(env),
      MBCREDIT_STRING_FIELD(method),
      MBCREDIT_INT_FIELD(iterations),
      MBCREDIT_INT_FIELD(steps_per_iteration),
      MBCREDIT_DOUBLE_FIELD(gamma),
      MBCREDIT_DOUBLE_FIELD(gae_lambda),
      MBCREDIT_DOUBLE_FIELD(clip),
      MBCREDIT_INT_FIELD(samples),
      MBCREDIT_BOOL_FIELD(exact),
      Field{"seeds",
            [](TrainConfig& c, const std::string& v) {
              c.seeds = ParseSeeds("seeds", v);
            },
            [](const TrainConfig& c) {
              std::string s;
              for (std::size_t k = 0; k < c.seeds.size(); ++k) {
                if (k) s += ",";
                s += std::to_string(c.seeds[k]);
              }
              return s;
            }},
      MBCREDIT_BOOL_FIELD(standardize_advantages),
      MBCREDIT_DOUBLE_FIELD(max_grad_norm),
      MBCREDIT_DOUBLE_FIELD(control_cost),
      MBCREDIT_INT_FIELD(ppo_epochs),
      MBCREDIT_INT_FIELD(ppo_minibatch),
      MBCREDIT_DOUBLE_FIELD(actor_lr),
      MBCREDIT_INT_FIELD(actor_width),
      MBCREDIT_INT_FIELD(actor_depth),
      MBCREDIT_DOUBLE_FIELD(log_std_init),
      MBCREDIT_DOUBLE_FIELD(critic_lr),
      MBCREDIT_INT_FIELD(critic_width),
      MBCREDIT_INT_FIELD(critic_depth),
      MBCREDIT_INT_FIELD(critic_epochs),
      MBCREDIT_INT_FIELD(critic_minibatch),
      MBCREDIT_DOUBLE_FIELD(q_lr),
      MBCREDIT_INT_FIELD(q_width),
      MBCREDIT_INT_FIELD(q_depth),
      MBCREDIT_INT_FIELD(q_epochs),
      MBCREDIT_DOUBLE_FIELD(model_lr),
      MBCREDIT_INT_FIELD(model_dyn_width),
      MBCREDIT_INT_FIELD(model_dyn_depth),
      MBCREDIT_INT_FIELD(model_rew_width),
      MBCREDIT_INT_FIELD(model_rew_depth),
      MBCREDIT_INT_FIELD(model_epochs),
      MBCREDIT_INT_FIELD(model_minibatch),
      MBCREDIT_INT_FIELD(checkpoint_every),
      MBCREDIT_STRING_FIELD(out),
  };
  return fields;
}

#undef MBCREDIT_INT_FIELD
#undef MBCREDIT_DOUBLE_FIELD
#undef MBCREDIT_BOOL_FIELD
#undef MBCREDIT_STRING_FIELD

}  // namespace internal

// Range and consistency checks; throws ConfigError.
inline void ValidateConfig(const TrainConfig& c) {
  const MethodSpec m = ParseMethod(c.method);
  if (c.iterations < 0) throw ConfigError("iterations must be >= 0");
  if (c.steps_per_iteration < 1) throw ConfigError("steps_per_iteration must be >= 1");
  if (c.gamma < 0.0 || c.gamma > 1.0) throw ConfigError("gamma must be in [0, 1]");
  if (c.gae_lambda < 0.0 || c.gae_lambda > 1.0) {
    throw ConfigError("gae_lambda must be in [0, 1]");
  }
  if (c.clip <= 0.0) throw ConfigError("clip must be positive");
  if (c.samples < 1) throw ConfigError("samples must be >= 1");
  if (c.seeds.empty()) throw ConfigError("at least one seed is required");
  for (int v : {c.ppo_minibatch, c.critic_minibatch, c.model_minibatch,
                c.actor_width, c.critic_width, c.q_width, c.model_dyn_width,
                c.model_rew_width}) {
    if (v < 1) throw ConfigError("widths and minibatch sizes must be >= 1");
  }
  for (int v : {c.ppo_epochs, c.critic_epochs, c.q_epochs, c.model_epochs,
                c.actor_depth, c.critic_depth, c.q_depth, c.model_dyn_depth,
                c.model_rew_depth, c.checkpoint_every}) {
    if (v < 0) throw ConfigError("epochs, depths and checkpoint_every must be >= 0");
  }
  (void)m;
}

inline std::string SerializeConfig(const TrainConfig& c) {
  std::string out;
  for (const auto& f : internal::Fields()) {
    out += f.key;
    out += "=";
    out += f.get(c);
    out += "\n";
  }
  return out;
}

// Applies `key=value` lines on top of `base`.
inline TrainConfig ParseConfig(const std::string& text,
                               TrainConfig base = TrainConfig()) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = internal::Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = internal::Trim(line.substr(0, eq));
    const std::string value = internal::Trim(line.substr(eq + 1));
    bool known = false;
    for (const auto& f : internal::Fields()) {
      if (key == f.key) {
        f.set(base, value);
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" +
                        key + "'");
    }
  }
  return base;
}

inline TrainConfig LoadConfig(const std::string& path,
                              TrainConfig base = TrainConfig()) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str(), std::move(base));
}

// FNV-1a over the serialized config.
inline std::uint64_t ConfigHash(const TrainConfig& c) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : SerializeConfig(c)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace mbcredit::harness

#endif  // MBCREDIT_HARNESS_CONFIG_HPP_
