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

#ifndef MBCREDIT_NUMCORE_RNG_HPP_
#define MBCREDIT_NUMCORE_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mbcredit {

using Rng = std::mt19937_64;

inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based stream splitting: the seed of a child stream depends only on
// the root seed and the key path, never on how many draws other streams made.
inline std::uint64_t DeriveSeed(std::uint64_t seed,
                                std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = SplitMix64(seed);
  for (std::uint64_t k : keys) h = SplitMix64(h ^ SplitMix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng MakeStream(std::uint64_t seed,
                      std::initializer_list<std::uint64_t> keys) {
  return Rng(DeriveSeed(seed, keys));
}

// Stream tags so that different consumers of one run seed never collide.
enum class StreamTag : std::uint64_t {
  kInit = 1,
  kRollout = 2,
  kEnvReset = 3,
  kModelFit = 4,
  kCoalitions = 5,
  kCritic = 6,
  kActor = 7,
  kQCritic = 8,
};

inline std::uint64_t Tag(StreamTag t) { return static_cast<std::uint64_t>(t); }

}  // namespace mbcredit

#endif  // MBCREDIT_NUMCORE_RNG_HPP_
