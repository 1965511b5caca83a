#pragma once

#include <cstdint>
#include <random>

#include "opdyn/opspace.hpp"

namespace opdyn {

/// Platform-independent uniform double in [lo, hi) drawn from mt19937_64
/// (the standard distributions are implementation-defined).
inline double uniform(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
}

/// Dense matrix on [lo, hi] x [lo, hi] with uniform(-1, 1) entries, rescaled
/// to operator norm 1 when unit_norm is set.
FiniteMatrix random_matrix(std::uint64_t seed, Index lo, Index hi, bool unit_norm = true);

}  // namespace opdyn
