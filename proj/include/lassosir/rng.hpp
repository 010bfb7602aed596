#pragma once

#include <cstdint>
#include <random>

namespace lassosir::rng {

/// splitmix64 finalizer; bijective mixing of a 64-bit word.
std::uint64_t mix64(std::uint64_t x);

/// Counter-based seed derivation: independent streams from one root seed.
/// The value depends only on (root, a, b), never on call order or thread
/// placement, so per-replication work can be scheduled on any number of
/// threads with identical results.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0);

/// Uniform draw on (0, 1) using the high 53 bits of the engine output.
/// Avoids the implementation-defined std::uniform_real_distribution so that
/// streams are reproducible across standard libraries.
double uniform01(std::mt19937_64& gen);

/// Standard normal quantile function (Wichura's AS 241, double precision).
/// Requires 0 < u < 1.
double normal_quantile(double u);

/// N(0,1) draw via inverse-CDF transform of uniform01.
double standard_normal(std::mt19937_64& gen);

}  // namespace lassosir::rng
