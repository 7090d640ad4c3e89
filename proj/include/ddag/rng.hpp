#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ddag {

/// All stochastic components draw from std::mt19937_64. Independent streams
/// are keyed by hashing (seed, index, ...) through SplitMix64, so a trial's
/// stream depends only on its coordinates and never on scheduling order.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Derives a child seed from a parent seed and a list of stream coordinates.
std::uint64_t derive_seed(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> coords);

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

}  // namespace ddag
