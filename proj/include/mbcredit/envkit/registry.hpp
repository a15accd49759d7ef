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

#ifndef MBCREDIT_ENVKIT_REGISTRY_HPP_
#define MBCREDIT_ENVKIT_REGISTRY_HPP_

#include <memory>
#include <string>
#include <vector>

#include "mbcredit/envkit/additive_team.hpp"
#include "mbcredit/envkit/chain_world.hpp"
#include "mbcredit/envkit/environment.hpp"
#include "mbcredit/envkit/linear_team.hpp"

namespace mbcredit::envkit {

inline std::vector<std::string> EnvironmentIds() {
  return {"chain4", "chain6", "additive", "linear"};
}

// Builds an environment from its string id. `control_cost` < 0 keeps the
// environment default.
inline std::unique_ptr<Environment> MakeEnvironment(const std::string& id,
                                                    double control_cost = -1.0) {
  if (id == "chain4" || id == "chain6") {
    ChainWorldParams p;
    p.n_links = id == "chain4" ? 4 : 6;
    if (control_cost >= 0.0) p.control_cost = control_cost;
    return std::make_unique<ChainWorld>(p);
  }
  if (id == "additive") {
    return std::make_unique<AdditiveTeam>(AdditiveTeam::Default());
  }
  if (id == "linear") {
    return std::make_unique<LinearTeam>(LinearTeam::Default());
  }
  throw ConfigError("unknown environment id '" + id +
                    "' (expected chain4, chain6, additive or linear)");
}

}  // namespace mbcredit::envkit

#endif  // MBCREDIT_ENVKIT_REGISTRY_HPP_
