// SPDX-License-Identifier: Apache-2.0
//
// isacsim: localization-assisted ISAC channel simulation
// Copyright (C) 2026 The isacsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef ISAC_RANDOM_HPP
#define ISAC_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace isac
{

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Order-sensitive hash of a key sequence; used to derive independent, reproducible
// substreams (per frame, per cloud, per path) from one run seed.
constexpr std::uint64_t hash_keys(std::initializer_list<std::uint64_t> keys)
{
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (auto k : keys)
        h = mix64(h ^ mix64(k));
    return h;
}

// Uniform double in [0, 1) from a hash value.
constexpr double unit_from_hash(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

inline Rng make_stream(std::initializer_list<std::uint64_t> keys)
{
    const std::uint64_t h = hash_keys(keys);
    std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    return Rng(seq);
}

} // namespace isac

#endif
