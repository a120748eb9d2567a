// Copyright 2026 The cogroute Authors
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

#ifndef COGROUTE_RANDOM_HPP_
#define COGROUTE_RANDOM_HPP_

#include <cstdint>
#include <random>

namespace cogroute {

// Portable seeded stream: std::mt19937_64 (fully specified by the C++
// standard) with uniform doubles taken from the top 53 bits of each draw.
// Distribution helpers are written out here because the standard library's
// distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used to derive independent sub-stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

// Seed streams used by the library.
namespace stream {
inline constexpr std::uint64_t kRelays = 1;
inline constexpr std::uint64_t kSources = 2;
inline constexpr std::uint64_t kQueues = 3;
inline constexpr std::uint64_t kStateSample = 4;
inline constexpr std::uint64_t kRoutes = 5;
inline constexpr std::uint64_t kEnsemble = 6;
}  // namespace stream

// 64-bit FNV-1a, used for content hashes in manifests.
constexpr std::uint64_t fnv1a64(const char* data, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace cogroute

#endif  // COGROUTE_RANDOM_HPP_
