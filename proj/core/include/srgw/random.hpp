// Copyright 2026 The srgw-sbm Authors.
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

#ifndef SRGW_RANDOM_HPP_
#define SRGW_RANDOM_HPP_

#include <cstdint>
#include <random>

namespace srgw {

// Portable random stream.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard distributions are not (libstdc++ and libc++ differ),
// so every variate is derived from raw engine words here:
//
//   uniform()   = (word >> 11) * 2^-53, in [0, 1)
//   normal()    = Box-Muller on two uniforms, first uniform mapped to (0, 1]
//   below(n)    = Lemire's multiply-shift with rejection, in [0, n)
//
// Independent sub-streams are keyed by hashing (seed, stream id) through
// SplitMix64 before seeding the engine.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double normal();
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Fixed stream ids so that graph sampling, initialisation and restarts never
// share randomness for the same user seed.
namespace streams {
inline constexpr std::uint64_t kLabels = 1;
inline constexpr std::uint64_t kEdges = 2;
inline constexpr std::uint64_t kKMeans = 3;
inline constexpr std::uint64_t kSketch = 4;
inline constexpr std::uint64_t kInstances = 5;
}  // namespace streams

}  // namespace srgw

#endif  // SRGW_RANDOM_HPP_
