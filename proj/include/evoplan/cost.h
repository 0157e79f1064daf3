#pragma once

#include <cstdint>
#include <limits>

namespace evoplan {

using Cost = std::int64_t;

// Distinguished "unreachable" distance. Never produced by arithmetic on
// finite values: every addition goes through saturating_add.
inline constexpr Cost INF_COST = std::numeric_limits<Cost>::max();

// Largest finite value any accumulated cost may take. Sums that would exceed
// it are clamped here so they stay distinct from INF_COST.
inline constexpr Cost MAX_FINITE_COST = INF_COST / 4;

constexpr Cost saturating_add(Cost a, Cost b) {
    if (a == INF_COST || b == INF_COST)
        return INF_COST;
    if (a > MAX_FINITE_COST - b)
        return MAX_FINITE_COST;
    return a + b;
}

constexpr Cost saturating_mul(Cost a, Cost b) {
    if (a == INF_COST || b == INF_COST)
        return INF_COST;
    if (a == 0 || b == 0)
        return 0;
    if (a > MAX_FINITE_COST / b)
        return MAX_FINITE_COST;
    return a * b;
}

}  // namespace evoplan
