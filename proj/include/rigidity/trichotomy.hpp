#pragma once

#include <cstdint>
#include <optional>

#include "rigidity/frequency.hpp"

namespace rigidity {

struct TrichotomyVerdict {
    bool holds_i = false;    // 0 not hit by forward iterates up to [q'_{n+1}/6]
    bool holds_ii = false;   // same backward
    bool holds_iii = false;  // 0 hit within q'_n - 1 forward iterates
    std::optional<std::int64_t> witness_i;    // failing k for clause (i)
    std::optional<std::int64_t> witness_ii;   // failing k for clause (ii)
    std::optional<std::int64_t> witness_iii;  // hitting k for clause (iii)
    bool ambiguous = false;  // a decision sat exactly on an arc endpoint
    bool any() const { return holds_i || holds_ii || holds_iii; }
};

/// Arc-hitting trichotomy for the arc [y,y'] (the shorter arc) at scale n.
/// Precondition ||y-y'|| < 1/(6 q'_n) is checked (ArcTooWide).
TrichotomyVerdict classify(double y, double yp, const Frequency& beta, int n);

/// Smallest ell in [0, bound] with 0 in [x + ell alpha, x' + ell alpha].
std::optional<std::int64_t> first_hit_index(double x, double xp, const Frequency& alpha,
                                            std::int64_t bound);

/// Least real k0 >= 0 with [xi^{-1} k0] = j for the smallest integer j <= bound
/// hitting 0; the floor-bracket inverse k0 = xi * j.
std::optional<double> first_hit_real(double y, double yp, const Frequency& beta, double xi,
                                     std::int64_t bound);

}  // namespace rigidity
