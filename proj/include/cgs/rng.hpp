#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cgs {

using Rng = std::mt19937_64;

/// Derives an independent stream seed from a master seed and a stage label,
/// so stages (train/shape/sample/eval) can be rerun on their own.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream);

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace cgs
