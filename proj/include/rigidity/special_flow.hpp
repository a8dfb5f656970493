#pragma once

#include <cstdint>
#include <vector>

#include "rigidity/frequency.hpp"
#include "rigidity/roof.hpp"

namespace rigidity {

struct FlowPoint {
    double x = 0;  // base point in [0,1)
    double s = 0;  // height, 0 <= s < f(x)
};

/// Suspension flow over R_alpha under a roof with certified infimum > 0.
class FlowParams {
public:
    FlowParams(Frequency alpha, RoofFunction roof);

    const Frequency& alpha() const { return alpha_; }
    const RoofFunction& roof() const { return roof_; }
    double mean() const { return roof_.mean(); }

    bool contains(const FlowPoint& p) const;
    std::int64_t clamp_events() const { return clamps_; }

    static constexpr std::int64_t kDefaultCap = 100'000'000;
    mutable std::int64_t clamps_ = 0;

private:
    Frequency alpha_;
    RoofFunction roof_;
};

/// The unique N with 0 <= s + t - f^{(N)}(x) < f(x + N alpha); monotone
/// accumulation forward, the negative-sum formula backward.
std::int64_t hitting_count(const FlowParams& params, const FlowPoint& p, double t,
                           std::int64_t cap = FlowParams::kDefaultCap);

FlowPoint flow_map(const FlowParams& params, const FlowPoint& p, double t,
                   std::int64_t cap = FlowParams::kDefaultCap);

/// d^f((x,s),(y,r)) = ||x-y|| + |s-r|
double flow_metric(const FlowPoint& a, const FlowPoint& b);

enum class BadSetKind {
    JumpCollar,     // ||z|| < eps^2 and (w < eps^2 or w > f(z)-eps^2)   [default]
    PaperMidStrip,  // ||z|| < eps^2 and eps^2 < w < f(z)-eps^2          [paper-literal]
};

struct BadSetSpec {
    BadSetKind kind = BadSetKind::JumpCollar;
};

struct GoodTimeSet {
    std::vector<std::pair<double, double>> intervals;  // disjoint, within [0,T]
    double horizon = 0;
    double eps = 0;
    double total_length = 0;
    std::size_t interval_count = 0;
    bool density_ok = false;        // total >= (1-eps^2) T
    bool count_ok = false;          // count <= (inf f)^{-1} T + 1
    BadSetSpec spec;
};

/// Exact per-crossing interval arithmetic (no time sampling): bad times come
/// from base-orbit entries into the jump strip.
GoodTimeSet good_times(const FlowParams& params, const FlowPoint& p, double T, double eps,
                       BadSetSpec spec = {});

struct ShadowingReport {
    double max_deviation = 0;
    std::vector<double> violation_times;  // good times where the bound fails
    double time_shift_last = 0;
    bool precondition_ok = true;  // d(z,z') below the calibrated delta
    int checked = 0;
};

/// Remark-style shadowing: d^f(T_t z, T_{t+shift} z') with
/// shift = f^{(N(z,t))}(z') - f^{(N(z,t))}(z), over good times in [0,T].
ShadowingReport shadowing_check(const FlowParams& params, const FlowPoint& z, const FlowPoint& zp,
                                double T, double eps, BadSetSpec spec = {});

}  // namespace rigidity
