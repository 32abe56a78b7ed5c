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

#include "homoguard/rng.hpp"

#include <cmath>
#include <numbers>

#include "homoguard/error.hpp"

namespace homoguard {

std::uint64_t SplitMix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t state = a ^ ((b << 29) | (b >> 35)) ^ 0x6a09e667f3bcc909ULL;
  SplitMix64(state);
  return SplitMix64(state);
}

std::uint64_t Fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t Fnv1a64(std::string_view text) {
  return Fnv1a64(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Pcg32::Pcg32(std::uint64_t seed) {
  std::uint64_t sm = seed;
  const std::uint64_t init_state = SplitMix64(sm);
  increment_ = (SplitMix64(sm) << 1u) | 1u;
  state_ = 0;
  NextU32();
  state_ += init_state;
  NextU32();
}

std::uint32_t Pcg32::NextU32() {
  const std::uint64_t old = state_;
  state_ = old * 6364136223846793005ULL + increment_;
  const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
  const auto rot = static_cast<std::uint32_t>(old >> 59u);
  return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
}

std::uint64_t Pcg32::NextU64() {
  const std::uint64_t hi = NextU32();
  return (hi << 32u) | NextU32();
}

double Pcg32::Uniform() {
  return static_cast<double>(NextU64() >> 11u) * 0x1.0p-53;
}

std::int64_t Pcg32::UniformInt(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) Fail(ErrorCode::kInvalidArgument, "UniformInt: empty range");
  const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1u;
  if (range == 0) return static_cast<std::int64_t>(NextU64());  // full 2^64 range
  // Rejection on the 64-bit draw keeps the result exactly uniform.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % range + 1u) % range;
  std::uint64_t x = NextU64();
  while (x > limit) x = NextU64();
  return lo + static_cast<std::int64_t>(x % range);
}

double Pcg32::Normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = Uniform();
  while (u1 <= 0.0) u1 = Uniform();
  const double u2 = Uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace homoguard
