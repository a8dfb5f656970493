#pragma once

#include <cstdint>
#include <optional>

#include "rigidity/frequency.hpp"

namespace rigidity {

/// Exact rotation-orbit arithmetic over a frequency's convergent surrogate
/// p/q: positions are residues r in [0, q), one step adds p (mod q).
/// |alpha - p/q| < 1/q^2, so scans up to ~1e7 steps carry position error
/// below 1e-22 — decisions against arcs wider than the 1e-25 guard band are
/// certain; exact boundary ties are flagged ambiguous by callers.
struct Rotation {
    std::int64_t p = 0;
    std::int64_t q = 1;

    explicit Rotation(const Frequency& f) : p(f.surrogate_num()), q(f.surrogate_den()) {}
    Rotation(std::int64_t p_, std::int64_t q_) : p(p_), q(q_) {}

    std::int64_t rationalize(double x) const {
        double fr = x - std::floor(x);
        auto r = static_cast<std::int64_t>(std::llround(fr * static_cast<double>(q)));
        r %= q;
        return r < 0 ? r + q : r;
    }
    double to_double(std::int64_t r) const { return static_cast<double>(r) / static_cast<double>(q); }

    std::int64_t step(std::int64_t r) const {
        r += p;
        return r >= q ? r - q : r;
    }
    std::int64_t step_back(std::int64_t r) const {
        r -= p;
        return r < 0 ? r + q : r;
    }
    std::int64_t at(std::int64_t r0, std::int64_t k) const {
        auto t = static_cast<__int128>(k % q) * (p % q) + r0;
        auto m = static_cast<std::int64_t>(t % q);
        return m < 0 ? m + q : m;
    }
    std::int64_t dist0(std::int64_t r) const { return std::min(r, q - r); }

    /// First k in [k_lo, k_hi] with residue(r0 + k p) <= len (closed test),
    /// i.e. 0 lies in the arc [lead - len, lead] after k steps of the lead
    /// point.  dir = +1 scans forward orbit, -1 backward.
    std::optional<std::int64_t> first_hit(std::int64_t r0, std::int64_t len, std::int64_t k_lo,
                                          std::int64_t k_hi, int dir = +1) const {
        if (k_hi < k_lo) return std::nullopt;
        std::int64_t r = at(r0, dir * k_lo);
        for (std::int64_t k = k_lo;; ++k) {
            if (r <= len) return k;
            if (k == k_hi) return std::nullopt;
            r = dir > 0 ? step(r) : step_back(r);
        }
    }
};

}  // namespace rigidity
