#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace rigidity {

// Neumaier-compensated accumulator; error stays O(1) ulp per term.
class CompensatedSum {
public:
    void add(double v) {
        double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }
    void reset() { sum_ = comp_ = 0.0; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double frac(double x) {
    double f = x - std::floor(x);
    return (f >= 1.0) ? 0.0 : f;  // guards against floor rounding at integers
}

// circle distance ||x - y||
inline double circle_dist(double x, double y) {
    double d = frac(x - y);
    return std::min(d, 1.0 - d);
}

// splittable deterministic RNG (xorshift-multiply); uniform via 53-bit mantissa
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {
        next();
        next();
    }
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {  // inclusive
        return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    // independent stream for a sub-task
    Rng derive(std::uint64_t idx) const {
        Rng r(state_ ^ (0xd1342543de82ef95ULL * (idx + 1)));
        return r;
    }

private:
    std::uint64_t state_;
};

// sorted-merge of closed intervals; returns disjoint union
inline std::vector<std::pair<double, double>> merge_intervals(std::vector<std::pair<double, double>> v) {
    if (v.empty()) return v;
    std::sort(v.begin(), v.end());
    std::vector<std::pair<double, double>> out;
    out.push_back(v.front());
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i].first <= out.back().second)
            out.back().second = std::max(out.back().second, v[i].second);
        else
            out.push_back(v[i]);
    }
    return out;
}

}  // namespace rigidity
