#pragma once

#include <array>
#include <cstdint>

namespace stofv {

/// Philox4x32-10 counter-based generator: a pure function of (key, counter).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer, used to derive independent seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of ensemble member `path` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t path);

/// Standard normal variate, a deterministic function of (seed, step, mode, sub).
/// sub = 0 is the step increment X^{n+1}_k; sub > 0 indexes intra-step bridge nodes.
double keyed_normal(std::uint64_t seed, std::uint64_t step, std::uint32_t mode, std::uint32_t sub = 0);

}  // namespace stofv
