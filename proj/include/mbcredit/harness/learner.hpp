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

// Everything that learns in one run, plus checkpoint directories holding
// params.txt, manifest.txt and config.txt.

#ifndef MBCREDIT_HARNESS_LEARNER_HPP_
#define MBCREDIT_HARNESS_LEARNER_HPP_

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mbcredit/envkit/environment.hpp"
#include "mbcredit/errors.hpp"
#include "mbcredit/harness/config.hpp"
#include "mbcredit/numcore/checkpoint.hpp"
#include "mbcredit/numcore/rng.hpp"
#include "mbcredit/policy/networks.hpp"
#include "mbcredit/worldmodel/world_model.hpp"

namespace mbcredit::harness {

inline constexpr int kManifestVersion = 1;

struct Learner {
  envkit::EnvSpec spec;
  std::vector<policy::GaussianActor> actors;
  policy::Critic critic;
  std::optional<policy::QCritic> q_critic;
  std::optional<worldmodel::WorldModel> model;
};

inline policy::ActorConfig ActorConfigOf(const TrainConfig& c) {
  policy::ActorConfig a;
  a.width = static_cast<std::size_t>(c.actor_width);
  a.depth = static_cast<std::size_t>(c.actor_depth);
  a.learning_rate = c.actor_lr;
  a.log_std_init = c.log_std_init;
  a.max_grad_norm = c.max_grad_norm;
  return a;
}

inline policy::NetworkConfig CriticConfigOf(const TrainConfig& c) {
  return {static_cast<std::size_t>(c.critic_width),
          static_cast<std::size_t>(c.critic_depth), c.critic_lr, c.max_grad_norm};
}

inline policy::NetworkConfig QConfigOf(const TrainConfig& c) {
  return {static_cast<std::size_t>(c.q_width), static_cast<std::size_t>(c.q_depth),
          c.q_lr, c.max_grad_norm};
}

inline worldmodel::WorldModelConfig ModelConfigOf(const TrainConfig& c) {
  worldmodel::WorldModelConfig m;
  m.dynamics_width = static_cast<std::size_t>(c.model_dyn_width);
  m.dynamics_depth = static_cast<std::size_t>(c.model_dyn_depth);
  m.reward_width = static_cast<std::size_t>(c.model_rew_width);
  m.reward_depth = static_cast<std::size_t>(c.model_rew_depth);
  m.learning_rate = c.model_lr;
  return m;
}

// Fresh networks for `seed`, drawn from the initialization stream in a fixed
// order: actors, critic, Q-critic, world model.
inline Learner MakeLearner(const TrainConfig& config, const envkit::EnvSpec& spec,
                           std::uint64_t seed) {
  const MethodSpec method = config.method_spec();
  Rng rng = MakeStream(seed, {Tag(StreamTag::kInit)});
  Learner l;
  l.spec = spec;
  for (int i = 0; i < spec.n_agents; ++i) {
    l.actors.emplace_back(spec.obs_dims[i], spec.action_dims[i],
                          ActorConfigOf(config), rng);
  }
  l.critic = policy::Critic(spec.global_state_dim, CriticConfigOf(config), rng);
  if (method.uses_q_critic()) {
    l.q_critic.emplace(spec.global_state_dim, spec.joint_action_dim(),
                       QConfigOf(config), rng);
  }
  if (method.uses_world_model()) {
    l.model.emplace(spec.global_state_dim, spec.joint_action_dim(),
                    ModelConfigOf(config), rng);
  }
  return l;
}

inline std::vector<numcore::NamedTensor> ExportLearner(const Learner& l) {
  std::vector<numcore::NamedTensor> items;
  for (std::size_t i = 0; i < l.actors.size(); ++i) {
    l.actors[i].Export("actor" + std::to_string(i), items);
  }
  l.critic.Export("critic", items);
  if (l.q_critic) l.q_critic->Export("q_critic", items);
  if (l.model) l.model->Export("model", items);
  return items;
}

inline void ImportLearner(Learner& l, std::span<const numcore::NamedTensor> items) {
  for (std::size_t i = 0; i < l.actors.size(); ++i) {
    l.actors[i].Import("actor" + std::to_string(i), items);
  }
  l.critic.Import("critic", items);
  if (l.q_critic) l.q_critic->Import("q_critic", items);
  if (l.model) l.model->Import("model", items);
}

struct Manifest {
  int version = kManifestVersion;
  std::string config_hash;
  std::uint64_t seed = 0;
  int iteration = 0;  // completed iterations at save time
  std::string env;
  std::string method;
  int n_agents = 0;
};

inline std::string HexHash(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline void SaveCheckpoint(const std::string& dir, const TrainConfig& config,
                           const Learner& learner, std::uint64_t seed,
                           int iteration) {
  std::filesystem::create_directories(dir);
  numcore::SaveTensors(dir + "/params.txt", ExportLearner(learner));
  {
    std::ofstream out(dir + "/config.txt");
    out << SerializeConfig(config);
  }
  std::ofstream m(dir + "/manifest.txt");
  m << "format=mbcredit-checkpoint\n"
    << "version=" << kManifestVersion << "\n"
    << "params_version=" << numcore::kCheckpointVersion << "\n"
    << "module.numcore=1\nmodule.coopgame=1\nmodule.envkit=1\n"
    << "module.worldmodel=1\nmodule.policy=1\nmodule.credit=1\nmodule.harness=1\n"
    << "config_hash=" << HexHash(ConfigHash(config)) << "\n"
    << "seed=" << seed << "\n"
    << "iteration=" << iteration << "\n"
    << "env=" << config.env << "\n"
    << "method=" << config.method << "\n"
    << "n_agents=" << learner.spec.n_agents << "\n";
  if (!m) throw ConfigError("cannot write checkpoint manifest in " + dir);
}

inline Manifest ReadManifest(const std::string& dir) {
  std::ifstream in(dir + "/manifest.txt");
  if (!in) throw ConfigError("no checkpoint manifest in " + dir);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (kv["format"] != "mbcredit-checkpoint") {
    throw ConfigError(dir + " is not a checkpoint directory");
  }
  Manifest m;
  try {
    m.version = std::stoi(kv.at("version"));
    m.config_hash = kv.at("config_hash");
    m.seed = std::stoull(kv.at("seed"));
    m.iteration = std::stoi(kv.at("iteration"));
    m.env = kv.at("env");
    m.method = kv.at("method");
    m.n_agents = std::stoi(kv.at("n_agents"));
  } catch (const std::exception&) {
    throw ConfigError("checkpoint manifest in " + dir + " is incomplete");
  }
  if (m.version != kManifestVersion) {
    throw ConfigError("unsupported checkpoint manifest version " +
                      std::to_string(m.version));
  }
  return m;
}

struct Checkpoint {
  TrainConfig config;
  Manifest manifest;
  Learner learner;
};

// Loads a checkpoint and checks it against the environment it will run in.
inline Checkpoint LoadCheckpoint(const std::string& dir, const envkit::EnvSpec& spec) {
  Checkpoint c;
  c.manifest = ReadManifest(dir);
  c.config = LoadConfig(dir + "/config.txt");
  if (HexHash(ConfigHash(c.config)) != c.manifest.config_hash) {
    throw ConfigError("checkpoint config hash does not match its manifest");
  }
  MBCREDIT_CHECK_DIM(spec.n_agents == c.manifest.n_agents,
                     "checkpoint has " + std::to_string(c.manifest.n_agents) +
                         " agents, environment has " +
                         std::to_string(spec.n_agents));
  c.learner = MakeLearner(c.config, spec, c.manifest.seed);
  const auto items = numcore::LoadTensors(dir + "/params.txt");
  ImportLearner(c.learner, items);
  return c;
}

}  // namespace mbcredit::harness

#endif  // MBCREDIT_HARNESS_LEARNER_HPP_
