#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

namespace restartlab {

// Abstract running time in [1, +inf]. +inf marks runs that never terminate;
// it is the IEEE infinity, never a large finite sentinel.
using TimeValue = double;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kMaxFiniteTime = std::numeric_limits<double>::max();

// Deterministic pairwise sum; the result does not depend on how the buffer
// was filled (trial order, thread count).
double pairwise_sum(std::span<const double> v);

}  // namespace restartlab
