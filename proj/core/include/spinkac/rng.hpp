// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace spinkac {

// SplitMix64 finalizer: a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream splitting.
//
// The seed of stream `s` under master seed `m` is
//   mix64(mix64(m) + (s + 1) * 0x9e3779b97f4a7c15).
// mix64 is a bijection and the counter term is injective in s, so distinct
// stream ids under one master never share a seed.
constexpr std::uint64_t seed_split(std::uint64_t master, std::uint64_t stream) {
  return mix64(mix64(master) + (stream + 1) * 0x9e3779b97f4a7c15ULL);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t master, std::uint64_t stream) {
  return Rng(seed_split(master, stream));
}

// Uniform double in [0,1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n).
// Uniform integer in [0, n) by multiply-and-reject, so streams do not depend
// on the standard library's distribution code.
inline int uniform_int(Rng& rng, int n) {
  const std::uint64_t range = static_cast<std::uint64_t>(n);
  const std::uint64_t threshold = (0 - range) % range;
  for (;;) {
    __extension__ using Wide = unsigned __int128;
    const Wide m = static_cast<Wide>(rng()) * range;
    if (static_cast<std::uint64_t>(m) >= threshold) return static_cast<int>(m >> 64);
  }
}

// Exponential with mean one.
inline double exponential1(Rng& rng) { return -std::log1p(-uniform01(rng)); }

}  // namespace spinkac
