/* Copyright 2026 The HomoGuard Authors. All Rights Reserved.

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

#ifndef HOMOGUARD_RNG_HPP_
#define HOMOGUARD_RNG_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace homoguard {

// SplitMix64 step. Used to expand 64-bit seeds into generator state and to
// derive independent child seeds.
std::uint64_t SplitMix64(std::uint64_t& state);

// Deterministic seed derivation: SplitMix64 finalizer applied to a ^ rotl(b).
std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b);

std::uint64_t Fnv1a64(std::span<const std::uint8_t> bytes,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);
std::uint64_t Fnv1a64(std::string_view text);

// PCG-XSH-RR 64/32 (O'Neill 2014), state and stream increment seeded through
// SplitMix64. Streams are bit-reproducible on every platform; the
// distributions below are implemented here rather than taken from <random>,
// whose distribution algorithms are implementation-defined.
class Pcg32 {
 public:
  explicit Pcg32(std::uint64_t seed);

  std::uint32_t NextU32();
  std::uint64_t NextU64();

  // Uniform on [0, 1) with 53 bits of precision.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform on the closed integer range [lo, hi] (Lemire rejection).
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi);

  // Standard normal via Box-Muller; the second variate is cached.
  double Normal();
  double Normal(double mean, double sigma) { return mean + sigma * Normal(); }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t increment_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace homoguard

#endif  // HOMOGUARD_RNG_HPP_
