// Copyright 2026 The flipsim authors
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

// Seeded, reproducible randomness. The generator is std::mt19937_64 (the
// sequence is pinned by the standard); uniform doubles and Poisson samples
// are derived here by fixed algorithms instead of the unspecified standard
// distributions, so identical seeds give identical streams everywhere.

#pragma once

#include <cstdint>
#include <random>

namespace flipsim {

using RandomEngine = std::mt19937_64;

/// splitmix64 step; used for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic per-task seed from a master seed and task indices, so
/// parallel sweeps are independent of scheduling.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::uint64_t index_a,
                                 std::uint64_t index_b = 0,
                                 std::uint64_t index_c = 0) {
  std::uint64_t s = master;
  std::uint64_t h = splitmix64(s);
  s ^= index_a + 0x9e3779b97f4a7c15ULL;
  h ^= splitmix64(s);
  s ^= index_b + 0xc2b2ae3d27d4eb4fULL;
  h ^= splitmix64(s);
  s ^= index_c + 0x165667b19e3779f9ULL;
  h ^= splitmix64(s);
  return h;
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_double(RandomEngine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Poisson sample with mean lambda. Inversion by sequential search for
/// small means, Hormann's PTRS transformed rejection otherwise.
std::uint64_t sample_poisson(RandomEngine& rng, double lambda);

}  // namespace flipsim
