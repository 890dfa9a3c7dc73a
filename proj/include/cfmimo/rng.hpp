#pragma once

#include "cfmimo/types.hpp"

#include <cstdint>
#include <random>

namespace cfmimo {

using Rng = std::mt19937_64;

/// Mixes a base seed with stream/index tags so that independent consumers
/// (AP placement, shadowing, realization r, ...) never share a sequence.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index = 0);

/// Circularly-symmetric CN(0, 1).
cd complex_normal(Rng& rng);

/// Vector of i.i.d. CN(0, 1) entries.
CVec complex_normal_vector(Rng& rng, int n);

namespace streams {
inline constexpr std::uint64_t kApPositions = 1;
inline constexpr std::uint64_t kUserPositions = 2;
inline constexpr std::uint64_t kShadowing = 3;
inline constexpr std::uint64_t kPowerAmplifier = 4;
inline constexpr std::uint64_t kChannel = 5;
inline constexpr std::uint64_t kPilotNoise = 6;
inline constexpr std::uint64_t kSnapshot = 7;
inline constexpr std::uint64_t kMoments = 8;
inline constexpr std::uint64_t kLinkSim = 9;
}  // namespace streams

}  // namespace cfmimo
