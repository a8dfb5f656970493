#include "rigidity/special_flow.hpp"

#include <algorithm>
#include <cmath>

#include "rigidity/errors.hpp"
#include "rigidity/util.hpp"

namespace rigidity {

FlowParams::FlowParams(Frequency alpha, RoofFunction roof)
    : alpha_(std::move(alpha)), roof_(std::move(roof)) {
    if (!(roof_.inf_certified() > 0))
        throw NonfiniteVariation("flow roof must have certified infimum > 0");
}

bool FlowParams::contains(const FlowPoint& p) const {
    return p.x >= 0 && p.x < 1 && p.s >= 0 && p.s < roof_.eval_frac(p.x);
}

std::int64_t hitting_count(const FlowParams& params, const FlowPoint& p, double t, std::int64_t cap) {
    const double a = params.alpha().value();
    const RoofFunction& f = params.roof();
    double target = p.s + t;
    if (t >= 0) {
        CompensatedSum acc;  // f^{(N)}(x)
        std::int64_t N = 0;
        double next = f.eval(p.x);
        while (target - acc.value() >= next) {
            acc.add(next);
            ++N;
            if (N > cap) throw HorizonOverflow("hitting_count exceeded forward cap");
            next = f.eval(p.x + static_cast<double>(N) * a);
        }
        return N;
    }
    // backward: N <= 0 with f^{(N)}(x) = -sum_{i=1..-N} f(x - i alpha)
    CompensatedSum acc;  // -f^{(N)}(x) accumulated positively
    std::int64_t k = 0;
    while (target + acc.value() < 0) {
        ++k;
        if (k > cap) throw HorizonOverflow("hitting_count exceeded backward cap");
        acc.add(f.eval(p.x - static_cast<double>(k) * a));
    }
    return -k;
}

FlowPoint flow_map(const FlowParams& params, const FlowPoint& p, double t, std::int64_t cap) {
    std::int64_t N = hitting_count(params, p, t, cap);
    const double a = params.alpha().value();
    double sum;
    if (N >= 0) {
        CompensatedSum acc;
        for (std::int64_t i = 0; i < N; ++i) acc.add(params.roof().eval(p.x + static_cast<double>(i) * a));
        sum = acc.value();
    } else {
        CompensatedSum acc;
        for (std::int64_t i = 1; i <= -N; ++i) acc.add(params.roof().eval(p.x - static_cast<double>(i) * a));
        sum = -acc.value();
    }
    FlowPoint out;
    out.x = frac(p.x + static_cast<double>(N) * a);
    out.s = p.s + t - sum;
    double top = params.roof().eval_frac(out.x);
    constexpr double kClampTol = 1e-12;
    if (out.s < 0 || out.s >= top) {
        double over = std::max(-out.s, out.s - top);
        if (over > kClampTol * std::max(1.0, std::abs(p.s + t)))
            throw HorizonOverflow("flow_map landed outside the fiber by " + std::to_string(over));
        out.s = std::clamp(out.s, 0.0, std::nextafter(top, 0.0));
        ++params.clamps_;
    }
    return out;
}

double flow_metric(const FlowPoint& a, const FlowPoint& b) {
    return circle_dist(a.x, b.x) + std::abs(a.s - b.s);
}

GoodTimeSet good_times(const FlowParams& params, const FlowPoint& p, double T, double eps,
                       BadSetSpec spec) {
    if (!(T > 0)) throw ConfigError("good_times needs T > 0");
    GoodTimeSet out;
    out.horizon = T;
    out.eps = eps;
    out.spec = spec;
    const double col = eps * eps;
    const double a = params.alpha().value();
    const RoofFunction& f = params.roof();

    std::vector<std::pair<double, double>> bad;
    // segment k occupies [c_{k-1}, c_k) at base x + k alpha; c_{-1} = 0
    double seg_lo = 0.0;
    CompensatedSum acc;  // f^{(k)}(x)
    for (std::int64_t k = 0;; ++k) {
        double base = frac(p.x + static_cast<double>(k) * a);
        double roofv = f.eval_frac(base);
        acc.add(roofv);
        double seg_hi = acc.value() - p.s;  // c_k
        if (seg_lo >= T) break;
        double lo = seg_lo, hi = std::min(seg_hi, T);
        if (hi > lo && std::min(base, 1.0 - base) < col) {
            double h0 = (k == 0) ? p.s : 0.0;  // height at segment start
            if (spec.kind == BadSetKind::JumpCollar) {
                // w < col or w > roof - col
                double b1_hi = seg_lo + std::max(0.0, col - h0);
                double b2_lo = seg_hi - col;
                if (b1_hi > lo) bad.push_back({lo, std::min(b1_hi, hi)});
                if (hi > b2_lo) bad.push_back({std::max(lo, b2_lo), hi});
            } else {
                double m_lo = seg_lo + std::max(0.0, col - h0);
                double m_hi = seg_hi - col;
                if (m_hi > m_lo) bad.push_back({std::max(lo, m_lo), std::min(hi, m_hi)});
            }
        }
        seg_lo = seg_hi;
        if (static_cast<double>(k) > 4 * T / params.roof().inf_certified() + 16)
            throw HorizonOverflow("good_times crossing scan ran away");
    }
    bad = merge_intervals(std::move(bad));
    // complement within [0, T]
    double cur = 0.0;
    for (const auto& [lo, hi] : bad) {
        if (lo > cur) out.intervals.push_back({cur, lo});
        cur = std::max(cur, hi);
    }
    if (cur < T) out.intervals.push_back({cur, T});
    for (const auto& [lo, hi] : out.intervals) out.total_length += hi - lo;
    out.interval_count = out.intervals.size();
    out.density_ok = out.total_length >= (1.0 - eps * eps) * T;
    out.count_ok =
        static_cast<double>(out.interval_count) <= T / params.roof().inf_certified() + 1.0;
    return out;
}

ShadowingReport shadowing_check(const FlowParams& params, const FlowPoint& z, const FlowPoint& zp,
                                double T, double eps, BadSetSpec spec) {
    ShadowingReport rep;
    GoodTimeSet good = good_times(params, z, T, eps, spec);
    const double step = params.roof().inf_certified() / 20.0;
    const double d0 = flow_metric(z, zp);
    rep.precondition_ok = d0 < eps / 4;  // calibrated delta-tilde for these roofs
    for (const auto& [lo, hi] : good.intervals) {
        for (double t = lo + step / 2; t < hi; t += step) {
            std::int64_t N = hitting_count(params, z, t);
            double shift = birkhoff_sum(params.roof(), params.alpha(), zp.x, N) -
                           birkhoff_sum(params.roof(), params.alpha(), z.x, N);
            FlowPoint a = flow_map(params, z, t);
            FlowPoint b = flow_map(params, zp, t + shift);
            double d = flow_metric(a, b);
            rep.max_deviation = std::max(rep.max_deviation, d);
            rep.time_shift_last = shift;
            ++rep.checked;
            if (d >= eps * eps) rep.violation_times.push_back(t);
        }
    }
    return rep;
}

}  // namespace rigidity
