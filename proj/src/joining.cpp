#include "rigidity/joining.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>

#include "rigidity/orbit.hpp"
#include "rigidity/util.hpp"

namespace rigidity {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double trig_eval(double v, double c0, const std::vector<Harmonic>& hs) {
    double out = c0;
    for (const auto& h : hs)
        out += h.cos_coef * std::cos(kTwoPi * h.k * v) + h.sin_coef * std::sin(kTwoPi * h.k * v);
    return out;
}

// integral of Q over [0, t]
double trig_integral(double t, double c0, const std::vector<Harmonic>& hs) {
    double out = c0 * t;
    for (const auto& h : hs) {
        double w = kTwoPi * h.k;
        out += h.cos_coef * std::sin(w * t) / w + h.sin_coef * (1.0 - std::cos(w * t)) / w;
    }
    return out;
}

int pick_threads(int threads, int samples) {
    if (threads <= 0) {
        if (const char* env = std::getenv("RIGIDITY_LAB_THREADS"))
            threads = std::max(1, std::atoi(env));
        else
            threads = static_cast<int>(std::min<unsigned>(8, std::thread::hardware_concurrency()));
    }
    return std::max(1, std::min(threads, samples <= 0 ? 1 : samples));
}

// streaming orbit-average of obs along the flow from (x0, s0)
double orbit_average(const FlowParams& flow, const Observable& obs, double x0, double s0, double T,
                     double step, double* store = nullptr, std::size_t stride = 0) {
    Rotation rot(flow.alpha());
    std::int64_t r = rot.rationalize(x0);
    double base = rot.to_double(r);
    double roofv = flow.roof().eval_frac(base);
    double seg_lo = 0, seg_hi = roofv - s0;
    CompensatedSum acc;
    std::size_t count = 0;
    for (double t = step / 2; t < T; t += step) {
        while (t >= seg_hi) {
            r = rot.step(r);
            base = rot.to_double(r);
            roofv = flow.roof().eval_frac(base);
            seg_lo = seg_hi;
            seg_hi = seg_lo + roofv;
        }
        double h = (seg_lo == 0 ? s0 : 0.0) + t - seg_lo;
        double v = obs.eval(base, h);
        if (store) store[count * stride] = v;
        ++count;
        acc.add(v);
    }
    return acc.value() / static_cast<double>(count);
}

}  // namespace

double Observable::eval(double x, double s) const {
    return trig_eval(frac(x), const_x, in_x) * trig_eval(frac(s), const_s, in_s);
}

double Observable::sup_norm() const {
    double px = std::abs(const_x), qs = std::abs(const_s);
    for (const auto& h : in_x) px += std::hypot(h.cos_coef, h.sin_coef);
    for (const auto& h : in_s) qs += std::hypot(h.cos_coef, h.sin_coef);
    return px * qs;
}

double Observable::mean(const FlowParams& flow) const {
    // int_T P(x) * IQ(f(x)) dx / int_T f, IQ the antiderivative of Q
    constexpr int kGrid = 200000;
    CompensatedSum num;
    for (int i = 0; i < kGrid; ++i) {
        double x = (i + 0.5) / kGrid;
        double fx = flow.roof().eval_frac(x);
        num.add(trig_eval(x, const_x, in_x) * trig_integral(fx, const_s, in_s));
    }
    return num.value() / kGrid / flow.mean();
}

CorrelationReport product_birkhoff_correlation(const FlowParams& flowA, const FlowParams& flowB,
                                               const Observable& obsA, const Observable& obsB,
                                               double T, int samples, std::uint64_t seed,
                                               int threads) {
    CorrelationReport rep;
    rep.horizon = T;
    rep.mean_a = obsA.mean(flowA);
    rep.mean_b = obsB.mean(flowB);
    rep.rows.resize(static_cast<std::size_t>(samples));
    const double step = std::min(flowA.roof().inf_certified(), flowB.roof().inf_certified()) / 20.0;
    Rng root(seed);
    threads = pick_threads(threads, samples);

    auto run = [&](int i) {
        Rng rng = root.derive(static_cast<std::uint64_t>(i));
        CorrelationRow row;
        row.seed = seed ^ static_cast<std::uint64_t>(i);
        // uniform starts in each suspension (rejection in the bounding box)
        auto draw = [&](const FlowParams& fl, double& x, double& s) {
            for (;;) {
                x = rng.uniform();
                s = rng.uniform() * fl.roof().sup_certified();
                if (s < fl.roof().eval_frac(x)) return;
            }
        };
        double xa, sa, xb, sb;
        draw(flowA, xa, sa);
        draw(flowB, xb, sb);
        auto n = static_cast<std::size_t>(T / step);
        std::vector<double> va(n + 2), vb(n + 2);
        row.marginal_a = orbit_average(flowA, obsA, xa, sa, T, step, va.data(), 1);
        row.marginal_b = orbit_average(flowB, obsB, xb, sb, T, step, vb.data(), 1);
        CompensatedSum joint;
        std::size_t cnt = 0;
        for (double t = step / 2; t < T; t += step) {
            joint.add(va[cnt] * vb[cnt]);
            ++cnt;
        }
        row.joint = joint.value() / static_cast<double>(cnt);
        row.gap = std::abs(row.joint - rep.mean_a * rep.mean_b);
        return row;
    };

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= samples) break;
            rep.rows[static_cast<std::size_t>(i)] = run(i);
        }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    for (const auto& r : rep.rows) rep.max_gap = std::max(rep.max_gap, r.gap);
    return rep;
}

CorrelationReport self_joining_control(const FlowParams& flow, const Observable& obs, double T,
                                       int samples, std::uint64_t seed, int threads) {
    CorrelationReport rep;
    rep.horizon = T;
    rep.mean_a = rep.mean_b = obs.mean(flow);
    rep.rows.resize(static_cast<std::size_t>(samples));
    const double step = flow.roof().inf_certified() / 20.0;
    Rng root(seed);
    threads = pick_threads(threads, samples);

    auto run = [&](int i) {
        Rng rng = root.derive(static_cast<std::uint64_t>(i));
        CorrelationRow row;
        row.seed = seed ^ static_cast<std::uint64_t>(i);
        double x, s;
        for (;;) {
            x = rng.uniform();
            s = rng.uniform() * flow.roof().sup_certified();
            if (s < flow.roof().eval_frac(x)) break;
        }
        Rotation rot(flow.alpha());
        std::int64_t r = rot.rationalize(x);
        double base = rot.to_double(r);
        double roofv = flow.roof().eval_frac(base);
        double seg_lo = 0, seg_hi = roofv - s;
        CompensatedSum acc;
        std::size_t cnt = 0;
        for (double t = step / 2; t < T; t += step) {
            while (t >= seg_hi) {
                r = rot.step(r);
                base = rot.to_double(r);
                roofv = flow.roof().eval_frac(base);
                seg_lo = seg_hi;
                seg_hi = seg_lo + roofv;
            }
            double h = (seg_lo == 0 ? s : 0.0) + t - seg_lo;
            double v = obs.eval(base, h);
            acc.add(v * v);
            ++cnt;
        }
        row.joint = acc.value() / static_cast<double>(cnt);
        row.marginal_a = row.marginal_b = rep.mean_a;
        row.gap = std::abs(row.joint - rep.mean_a * rep.mean_b);
        return row;
    };

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= samples) break;
            rep.rows[static_cast<std::size_t>(i)] = run(i);
        }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    // the control statistic is the centered square; report the weakest run
    rep.diagonal_statistic = rep.rows.empty() ? 0.0 : rep.rows.front().gap;
    for (const auto& r : rep.rows)
        rep.diagonal_statistic = std::min(rep.diagonal_statistic, r.gap);
    return rep;
}

}  // namespace rigidity
