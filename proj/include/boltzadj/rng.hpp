/*
   Copyright 2026 The boltzadj Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstdint>
#include <random>

namespace boltzadj {

/*!
 * Independent random streams used by a simulation.
 *
 * Every stream is keyed by (run seed, stream id, counter) so that changing
 * the initial temperatures, or perturbing one velocity, never shifts the
 * draws of another stream. Order of consumption:
 *
 *  - initial_normals (counter 0): 3N standard normals, particle-major,
 *    x then y then z.
 *  - pair_selection (counter k): partial Fisher-Yates shuffle producing the
 *    N_c colliding indices of step k; consecutive entries form pairs.
 *  - scattering (counter k): one unit vector per pair of step k, in pair
 *    order, each from two uniforms (cos theta first, then phi).
 */
enum class Stream : std::uint64_t {
    initial_normals = 0x9e01,
    pair_selection = 0x9e02,
    scattering = 0x9e03,
    seed_policy = 0x9e04,
};

using Engine = std::mt19937_64;

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t counter) {
    return mix64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(stream)) ^ counter);
}

inline Engine make_engine(std::uint64_t seed, Stream stream, std::uint64_t counter = 0) {
    return Engine(derive_seed(seed, stream, counter));
}

/// Seed of the s-th independent replica of a run; replica 0 is the base seed itself.
constexpr std::uint64_t replica_seed(std::uint64_t base, std::uint64_t s) {
    return s == 0 ? base : derive_seed(base, Stream::seed_policy, s);
}

/// Uniform double in [0, 1) built from the top 53 bits.
inline double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace boltzadj
