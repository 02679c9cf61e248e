// Copyright 2026 The hardalign Authors. All Rights Reserved.
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

#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <random>
#include <string_view>

namespace hardalign {

/// Anything that yields standard-Uniform draws strictly inside (0, 1).
template <typename T>
concept UniformSource = requires(T& source) {
  { source.uniform() } -> std::convertible_to<double>;
};

/// Seeded uniform stream backed by mt19937_64.
///
/// Draws are built from the top 53 bits of each engine output and clamped
/// to [2^-53, 1 - 2^-53], so log(U) and log(1 - U) are always finite. The
/// engine's output sequence is fixed by the standard, which makes the stream
/// bit-identical across platforms for a given seed.
class NoiseSource {
 public:
  static constexpr double kEpsilon = 0x1.0p-53;

  explicit NoiseSource(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return std::clamp(u, kEpsilon, 1.0 - kEpsilon);
  }

 private:
  std::mt19937_64 engine_;
};

static_assert(UniformSource<NoiseSource>);

/// splitmix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// 64-bit FNV-1a over the label bytes.
constexpr std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed splitting rule: child = mix(mix(parent ^ fnv1a(label)) + index).
/// A child depends only on its own (parent, label, index), so adding a new
/// label elsewhere never shifts an existing stream.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::string_view label,
                                    std::uint64_t index = 0) noexcept {
  return mix_seed(mix_seed(parent ^ hash_label(label)) + index);
}

}  // namespace hardalign
