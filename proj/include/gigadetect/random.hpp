/* Copyright 2026 The gigadetect Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef GIGADETECT_RANDOM_HPP_
#define GIGADETECT_RANDOM_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gigadetect {

inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Independent stream seed for a (seed, key...) tuple, so work items can draw
// randomness without depending on scheduling order.
inline uint64_t StreamSeed(uint64_t seed, std::initializer_list<uint64_t> keys) {
  uint64_t h = SplitMix64(seed);
  for (uint64_t k : keys) h = SplitMix64(h ^ SplitMix64(k));
  return h;
}

inline std::mt19937_64 MakeStream(uint64_t seed,
                                  std::initializer_list<uint64_t> keys) {
  return std::mt19937_64(StreamSeed(seed, keys));
}

// Uniform double in [0, 1) from a hash value.
inline double UnitFromHash(uint64_t h) {
  return double(h >> 11) * 0x1.0p-53;
}

}  // namespace gigadetect

#endif  // GIGADETECT_RANDOM_HPP_
