#pragma once

// Seed derivation and sampling shared by every stochastic routine.
//
// All randomness flows from an explicit 64-bit seed. Independent substreams
// are obtained by hashing (master seed, index) or (master seed, tag) with
// SplitMix64, so the output for a given point never depends on evaluation
// order. The engine is std::mt19937_64, whose output sequence is fixed by the
// C++ standard; the distributions come from Boost.Random, whose algorithms are
// fixed in its source, so results are identical across platforms.

#include <cstdint>
#include <random>
#include <string_view>

namespace qnet::rng {

using Engine = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// FNV-1a over the bytes of `tag`.
std::uint64_t tag_hash(std::string_view tag) noexcept;

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) noexcept;

Engine make_engine(std::uint64_t seed);

double standard_normal(Engine& engine);

/// Poisson variate with the given mean; a non-positive mean yields 0.
std::int64_t poisson(Engine& engine, double mean);

}  // namespace qnet::rng
