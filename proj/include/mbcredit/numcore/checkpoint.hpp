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

// Parameter checkpoint format (text, version 1):
//
//   mbcredit-params 1
//   count <N>
//   <name> <rank> <d0> ... <d_rank-1>
//   <hexfloat values, space separated, row-major>
//   ...
//
// Values are written as C99 hexadecimal floats so a save/load cycle is
// bit-exact.

#ifndef MBCREDIT_NUMCORE_CHECKPOINT_HPP_
#define MBCREDIT_NUMCORE_CHECKPOINT_HPP_

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mbcredit/errors.hpp"
#include "mbcredit/numcore/mlp.hpp"
#include "mbcredit/numcore/tensor.hpp"

namespace mbcredit::numcore {

inline constexpr int kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

inline void WriteTensors(std::ostream& out, std::span<const NamedTensor> items) {
  out << "mbcredit-params " << kCheckpointVersion << "\n";
  out << "count " << items.size() << "\n";
  char buf[64];
  for (const NamedTensor& item : items) {
    MBCREDIT_CHECK(!item.name.empty() &&
                       item.name.find_first_of(" \t\n") == std::string::npos,
                   "tensor names must be non-empty and whitespace-free");
    out << item.name << " " << item.tensor.rank();
    for (std::size_t d : item.tensor.shape()) out << " " << d;
    out << "\n";
    const auto& data = item.tensor.vec();
    for (std::size_t i = 0; i < data.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%a", data[i]);
      out << (i ? " " : "") << buf;
    }
    out << "\n";
  }
}

inline std::vector<NamedTensor> ReadTensors(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "mbcredit-params") {
    throw ContractError("not a parameter checkpoint");
  }
  if (version != kCheckpointVersion) {
    throw ContractError("unsupported checkpoint version " +
                        std::to_string(version));
  }
  std::string key;
  std::size_t count = 0;
  if (!(in >> key >> count) || key != "count") {
    throw ContractError("malformed checkpoint header");
  }
  std::vector<NamedTensor> items;
  items.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    NamedTensor item;
    std::size_t rank = 0;
    if (!(in >> item.name >> rank)) {
      throw ContractError("truncated checkpoint at tensor " + std::to_string(k));
    }
    Shape shape(rank);
    for (auto& d : shape) in >> d;
    std::vector<double> data(NumElements(shape));
    std::string token;
    for (double& v : data) {
      if (!(in >> token)) throw ContractError("truncated tensor " + item.name);
      char* end = nullptr;
      v = std::strtod(token.c_str(), &end);
      if (end == token.c_str()) throw ContractError("bad value in " + item.name);
    }
    item.tensor = Tensor(std::move(shape), std::move(data));
    items.push_back(std::move(item));
  }
  return items;
}

inline void SaveTensors(const std::string& path,
                        std::span<const NamedTensor> items) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  WriteTensors(out, items);
}

inline std::vector<NamedTensor> LoadTensors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return ReadTensors(in);
}

// Appends every parameter of `net` as <prefix>.w<l> / <prefix>.b<l>.
inline void ExportMlp(const std::string& prefix, const Mlp& net,
                      std::vector<NamedTensor>& out) {
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    out.push_back({prefix + ".w" + std::to_string(l), net.weight(l)});
    out.push_back({prefix + ".b" + std::to_string(l), net.bias(l)});
  }
}

// Looks up a tensor by name; throws if missing.
inline const Tensor& FindTensor(std::span<const NamedTensor> items,
                                const std::string& name) {
  for (const NamedTensor& item : items) {
    if (item.name == name) return item.tensor;
  }
  throw ContractError("checkpoint has no tensor named " + name);
}

// Overwrites the parameters of an already-shaped network.
inline void ImportMlp(const std::string& prefix,
                      std::span<const NamedTensor> items, Mlp& net) {
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const Tensor& w = FindTensor(items, prefix + ".w" + std::to_string(l));
    const Tensor& b = FindTensor(items, prefix + ".b" + std::to_string(l));
    MBCREDIT_CHECK_DIM(w.shape() == net.weight(l).shape() &&
                           b.shape() == net.bias(l).shape(),
                       "checkpoint shape mismatch for " + prefix);
    net.weight(l) = w;
    net.bias(l) = b;
  }
}

}  // namespace mbcredit::numcore

#endif  // MBCREDIT_NUMCORE_CHECKPOINT_HPP_
