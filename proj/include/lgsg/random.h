// Copyright 2026 The LGSG Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LGSG_RANDOM_H_
#define LGSG_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace lgsg {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
uint64_t Mix64(uint64_t x);

// Derives a substream seed from a base seed and a path of indices:
// s = Mix64(base); for each k: s = Mix64(s ^ Mix64(k + 0x9e3779b97f4a7c15)).
// Every stochastic stage keys its substreams this way so results do not
// depend on evaluation order or worker count.
uint64_t DeriveSeed(uint64_t base, std::initializer_list<uint64_t> path);

inline Rng MakeRng(uint64_t base, std::initializer_list<uint64_t> path) {
  return Rng(DeriveSeed(base, path));
}

// Uniform integer in [0, n). n must be positive.
inline int64_t UniformIndex(Rng& rng, int64_t n) {
  return std::uniform_int_distribution<int64_t>(0, n - 1)(rng);
}

inline double Uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace lgsg

#endif  // LGSG_RANDOM_H_
