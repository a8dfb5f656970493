#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <thread>

#include "rigidity/errors.hpp"
#include "rigidity/matching.hpp"
#include "rigidity/orbit.hpp"
#include "rigidity/trichotomy.hpp"

namespace rigidity::match {

namespace {

// ----- shared per-trial geometry ------------------------------------------
struct Geometry {
    Rotation rotA, rotB;
    std::int64_t dxn = 0;     // A_k translate in alpha-surrogate residues
    std::int64_t ry_lead = 0;  // leading y endpoint residue (beta surrogate)
    std::int64_t u_res = 0;    // ||y-y'|| in beta-surrogate residues
    int sigma = +1;            // sign(d_y)
    double d_x = 0, d_y = 0;

    Geometry(const FlowPair& sys, const MatchSample& ms) : rotA(sys.alpha), rotB(sys.beta) {
        dxn = static_cast<std::int64_t>(std::llround(ms.d_x * static_cast<double>(rotA.q)));
        d_x = static_cast<double>(dxn) / static_cast<double>(rotA.q);
        sigma = ms.d_y > 0 ? +1 : -1;
        double lead = ms.d_y > 0 ? ms.y : ms.yp;
        ry_lead = rotB.rationalize(lead);
        u_res = static_cast<std::int64_t>(std::llround(std::abs(ms.d_y) * static_cast<double>(rotB.q)));
        d_y = sigma * static_cast<double>(u_res) / static_cast<double>(rotB.q);
    }
};

// first k in [lo, hi] with the pair arc straddling 0 (residue of lead < width)
std::optional<std::int64_t> first_wrap(const Rotation& rot, std::int64_t r0, std::int64_t width,
                                       std::int64_t lo, std::int64_t hi, int dir) {
    if (hi < lo) return std::nullopt;
    std::int64_t r = rot.at(r0, dir * lo);
    for (std::int64_t k = lo;; ++k) {
        if (r < width) return k;
        if (k >= hi) return std::nullopt;
        r = dir > 0 ? rot.step(r) : rot.step_back(r);
    }
}

struct Zone {
    double lo, hi;  // open zone in f-index units; windows live strictly inside
    bool f_above, g_above;
};

// place [M', M'+L'] inside the zone; L' >= max(ceil(eps^3 M'), floor) and the
// ratio invariant L'/M' >= eps^3 is preserved or the candidate is dropped
std::optional<std::pair<std::int64_t, std::int64_t>> place_window(double anchor, const Zone& z,
                                                                  const ProofConstants& C) {
    double eps3 = C.eps * C.eps * C.eps;
    auto Lmin = static_cast<std::int64_t>(std::ceil(2.0 * C.xi)) + 2;
    auto Mp = static_cast<std::int64_t>(anchor);
    auto zlo = static_cast<std::int64_t>(std::floor(z.lo));
    Mp = std::max(Mp, zlo + 1);
    if (Mp < 1) Mp = 1;
    std::int64_t Lp = std::max<std::int64_t>(static_cast<std::int64_t>(std::ceil(eps3 * Mp)), Lmin);
    if (static_cast<double>(Mp + Lp) >= z.hi) {
        Mp = static_cast<std::int64_t>(std::floor(z.hi)) - 1 - Lp;
        if (Mp < std::max<std::int64_t>(1, zlo + 1)) return std::nullopt;
        Lp = std::max<std::int64_t>(static_cast<std::int64_t>(std::ceil(eps3 * Mp)), Lmin);
        if (static_cast<double>(Mp + Lp) >= z.hi) return std::nullopt;
    }
    return std::make_pair(Mp, Lp);
}

// The structural time shifts at a representative index: the cocycle difference
// f^{(n)}(x)-f^{(n)}(x') is A(n d_x - W) plus an O(delta_eps) smooth part, so
// the aligning shift p = -(that); likewise on the g side with [xi^{-1} n].
MatchingWindow make_window(std::int64_t Mp, std::int64_t Lp, const Zone& z, int dir,
                           const Geometry& geo, const FlowPair& sys, const ProofConstants& C,
                           const std::string& label) {
    MatchingWindow w;
    w.M_prime = Mp;
    w.L_prime = Lp;
    w.direction = dir;
    w.case_path = label;
    w.f_above_wrap = z.f_above;
    w.g_above_wrap = z.g_above;
    double mid = static_cast<double>(Mp) + static_cast<double>(Lp) / 2.0;
    double fd = mid * sys.f.jump() * geo.d_x;  // below-wrap cocycle difference
    if (z.f_above) fd -= sys.f.jump();
    if (dir < 0) fd = -fd;
    w.p = -fd;
    double jmid = std::floor(mid / C.xi);
    double gd = jmid * sys.g.jump() * geo.d_y;
    if (z.g_above) gd -= geo.sigma * sys.g.jump();
    if (dir < 0) gd = -gd;
    w.q = -gd;
    w.in_P = C.in_P(w.p, w.q);
    return w;
}

}  // namespace

FindResult find_window(const MatchSample& ms, const FlowPair& sys, const ProofConstants& C) {
    Geometry geo(sys, ms);
    FindResult out;
    const double eps = C.eps, xi = C.xi, c = C.c;
    const double eps3 = eps * eps * eps;
    const double Ag = sys.g.jump();
    const std::int64_t qnk = ms.q_nk;

    // degenerate y = y': the paper's q_{n_k}-window with (p, q) = (A_f, 0)
    if (geo.u_res == 0) {
        out.degenerate_y = true;
        out.case_path = "degenerate-y";
        std::int64_t Mp = qnk;
        auto Lp = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(C.kappa * Mp)));
        Zone z{static_cast<double>(ms.i_x), static_cast<double>(ms.i_x + qnk), true, false};
        MatchingWindow w = make_window(Mp, Lp, z, +1, geo, sys, C, "degenerate-y");
        w.q = 0;
        out.candidates.push_back(w);
        out.direction = +1;
        return out;
    }

    // forward f-side wrap is pinned by the sample: ell = i_x
    std::int64_t ell = ms.i_x;
    out.ell = ell;
    const double u = std::abs(geo.d_y);

    if (C.branch == Branch::Unbounded) {
        std::int64_t qn = sys.beta.q64(ms.bracket_n);
        std::int64_t qn1 = sys.beta.q64(ms.bracket_n + 1);
        std::int64_t K1 = qn1 / 6;
        auto hit_f = first_wrap(geo.rotB, geo.ry_lead, geo.u_res, 0, K1, +1);
        auto hit_b = first_wrap(geo.rotB, geo.ry_lead, geo.u_res, 0, K1, -1);
        if (!hit_f) {
            // Case 1: forward horizon clear of g-wraps
            out.case_path = "case1";
            out.direction = +1;
            if (static_cast<double>(ell) * Ag * u > 4.0 * c) {
                auto lp = static_cast<std::int64_t>(std::floor(2.0 * c / (Ag * u)));
                Zone z{0, static_cast<double>(ell), false, false};
                if (auto pw = place_window(static_cast<double>(lp), z, C))
                    out.candidates.push_back(make_window(pw->first, pw->second, z, +1, geo, sys, C,
                                                         "case1/subcase1"));
            } else {
                Zone z{static_cast<double>(ell), static_cast<double>(ell + qnk), true, false};
                if (auto pw = place_window(static_cast<double>(ell + 1), z, C))
                    out.candidates.push_back(make_window(pw->first, pw->second, z, +1, geo, sys, C,
                                                         "case1/subcase2"));
            }
            return out;
        }
        if (!hit_b) {
            // Case 2: backward iterates; rerun the forward machinery reversed
            out.case_path = "case2";
            out.direction = -1;
            auto cap = static_cast<std::int64_t>(static_cast<double>(qnk) * (1 + 2 * c * c)) + 4;
            auto ellb = first_wrap(geo.rotA, rigidity::Rotation(sys.alpha).rationalize(ms.x),
                                   geo.dxn, 1, cap, -1);
            if (!ellb) {
                out.case_path = "case2/no-backward-hit";
                return out;
            }
            out.ell = *ellb;
            if (static_cast<double>(*ellb) * Ag * u > 4.0 * c) {
                auto lp = static_cast<std::int64_t>(std::floor(2.0 * c / (Ag * u)));
                Zone z{0, static_cast<double>(*ellb), false, false};
                if (auto pw = place_window(static_cast<double>(lp), z, C))
                    out.candidates.push_back(make_window(pw->first, pw->second, z, -1, geo, sys, C,
                                                         "case2/subcase1"));
            } else {
                Zone z{static_cast<double>(*ellb), static_cast<double>(*ellb + qnk), true, false};
                if (auto pw = place_window(static_cast<double>(*ellb + 1), z, C))
                    out.candidates.push_back(make_window(pw->first, pw->second, z, -1, geo, sys, C,
                                                         "case2/subcase2"));
            }
            return out;
        }
        // Case 3: 0 is hit within q'_n forward iterates
        auto j0 = first_wrap(geo.rotB, geo.ry_lead, geo.u_res, 0, qn - 1, +1);
        if (!j0) {
            out.case_path = "allfalse";  // Lemma 3.3 says this cannot happen
            return out;
        }
        out.j0 = *j0;
        out.direction = +1;
        double k0 = xi * static_cast<double>(*j0);
        double second_g = xi * static_cast<double>(*j0 + qn);
        if (k0 <= (1 - eps) * static_cast<double>(ell)) {
            out.case_path = "case3/subcase1";
            Zone z1{0, k0, false, false};
            Zone z2{k0, std::min(static_cast<double>(ell), second_g), false, true};
            if (auto pw = place_window((1 - eps3) * k0, z1, C))
                out.candidates.push_back(
                    make_window(pw->first, pw->second, z1, +1, geo, sys, C, "case3/subcase1/w1"));
            if (auto pw = place_window(std::floor(k0) + 1, z2, C))
                out.candidates.push_back(
                    make_window(pw->first, pw->second, z2, +1, geo, sys, C, "case3/subcase1/w2"));
        } else if (k0 >= (1 + eps) * static_cast<double>(ell)) {
            out.case_path = "case3/subcase2";
            Zone z1{static_cast<double>(ell), std::min(k0, static_cast<double>(ell + qnk)), true,
                    false};
            Zone z2{0, static_cast<double>(ell), false, false};
            if (auto pw = place_window(static_cast<double>(ell + 1), z1, C))
                out.candidates.push_back(
                    make_window(pw->first, pw->second, z1, +1, geo, sys, C, "case3/subcase2/w1"));
            if (auto pw = place_window(static_cast<double>(ell / 2), z2, C))
                out.candidates.push_back(
                    make_window(pw->first, pw->second, z2, +1, geo, sys, C, "case3/subcase2/w2"));
        } else {
            out.case_path = "case3/subcase3";
            double mn = std::min(k0, static_cast<double>(ell));
            double mx = std::max(k0, static_cast<double>(ell));
            Zone z1{0, mn, false, false};
            Zone z2{mx, std::min(static_cast<double>(ell + qnk), second_g), true, true};
            if (auto pw = place_window((1 - eps) * mn, z1, C))
                out.candidates.push_back(
                    make_window(pw->first, pw->second, z1, +1, geo, sys, C, "case3/subcase3/w1"));
            if (auto pw = place_window((1 + eps) * mx, z2, C))
                out.candidates.push_back(
                    make_window(pw->first, pw->second, z2, +1, geo, sys, C, "case3/subcase3/w2"));
        }
        return out;
    }

    // ---- bounded branch: cases A/B/C keyed to ell0 vs m = ell -----------------
    std::int64_t qn = sys.beta.q64(ms.bracket_n);
    auto bnd = static_cast<std::int64_t>((1 + eps) * static_cast<double>(ell) / xi) + 2;
    auto l0 = first_wrap(geo.rotB, geo.ry_lead, geo.u_res, 1, bnd, +1);
    out.direction = +1;
    if (l0) out.j0 = *l0;
    if (!l0 || static_cast<double>(*l0) >= (1 + eps) * static_cast<double>(ell) / xi) {
        out.case_path = "caseB";
        double gcap = l0 ? xi * static_cast<double>(*l0) : 1e300;
        Zone z1{static_cast<double>(ell), std::min(static_cast<double>(ell + qnk), gcap), true,
                false};
        Zone z2{0, static_cast<double>(ell), false, false};
        if (auto pw = place_window(static_cast<double>(ell + 1), z1, C))
            out.candidates.push_back(make_window(pw->first, pw->second, z1, +1, geo, sys, C,
                                                 "caseB/w1"));
        if (auto pw = place_window(static_cast<double>(ell / 2), z2, C))
            out.candidates.push_back(make_window(pw->first, pw->second, z2, +1, geo, sys, C,
                                                 "caseB/w2"));
    } else if (static_cast<double>(*l0) <= (1 - eps) * static_cast<double>(ell) / xi) {
        out.case_path = "caseA";
        double k0 = xi * static_cast<double>(*l0);
        double second_g = xi * static_cast<double>(*l0 + qn);
        Zone z1{0, k0, false, false};
        Zone z2{k0, std::min(static_cast<double>(ell), second_g), false, true};
        if (auto pw = place_window((1 - eps3) * k0, z1, C))
            out.candidates.push_back(make_window(pw->first, pw->second, z1, +1, geo, sys, C,
                                                 "caseA/w1"));
        if (auto pw = place_window(std::floor(k0) + 1, z2, C))
            out.candidates.push_back(make_window(pw->first, pw->second, z2, +1, geo, sys, C,
                                                 "caseA/w2"));
    } else {
        out.case_path = "caseC";
        double k0 = xi * static_cast<double>(*l0);
        double second_g = xi * static_cast<double>(*l0 + qn);
        double mn = std::min(k0, static_cast<double>(ell));
        double mx = std::max(k0, static_cast<double>(ell));
        Zone z1{0, mn, false, false};
        Zone z2{mx, std::min(static_cast<double>(ell + qnk), second_g), true, true};
        if (auto pw = place_window((1 - eps) * mn, z1, C))
            out.candidates.push_back(make_window(pw->first, pw->second, z1, +1, geo, sys, C,
                                                 "caseC/w1"));
        if (auto pw = place_window((1 + eps) * mx, z2, C))
            out.candidates.push_back(make_window(pw->first, pw->second, z2, +1, geo, sys, C,
                                                 "caseC/w2"));
    }
    return out;
}

VerifyReport verify_window(const MatchSample& ms, const MatchingWindow& w, const FlowPair& sys,
                           const ProofConstants& C) {
    Geometry geo(sys, ms);
    VerifyReport rep;
    const double eps2 = C.eps * C.eps;
    const double eps3 = eps2 * C.eps;
    const int dir = w.direction;
    const std::int64_t top = w.M_prime + w.L_prime;

    // f-side cocycle difference, streamed: the sawtooth part is exact via the
    // wrap flags; the smooth part is compensated.
    Rotation rotA = geo.rotA;
    std::int64_t rx = rotA.rationalize(ms.x);
    // backward sums use terms at x - i alpha for i = 1..n
    std::int64_t r = dir > 0 ? rx : rotA.step_back(rx);
    CompensatedSum smooth;
    std::int64_t wraps = 0;
    double fmax = 0;
    const double Af = sys.f.jump();
    auto smooth_term = [&](std::int64_t rr) {
        double xv = rotA.to_double(rr);
        double xpv = rotA.to_double((rr - geo.dxn + rotA.q) % rotA.q);
        double t = 0;
        for (const auto& h : sys.f.harmonics()) {
            double w1 = 2 * std::numbers::pi * h.k;
            t += h.cos_coef * (std::cos(w1 * xv) - std::cos(w1 * xpv)) +
                 h.sin_coef * (std::sin(w1 * xv) - std::sin(w1 * xpv));
        }
        return t;
    };
    for (std::int64_t n = 1; n <= top; ++n) {
        if (r < geo.dxn) ++wraps;
        smooth.add(smooth_term(r));
        if (n >= w.M_prime) {
            double fd = Af * (static_cast<double>(n) * geo.d_x - static_cast<double>(wraps)) +
                        smooth.value();
            if (dir < 0) fd = -fd;
            fmax = std::max(fmax, std::abs(fd + w.p));
        }
        r = dir > 0 ? rotA.step(r) : rotA.step_back(r);
    }
    rep.resid_f = fmax;

    // g-side at indices [xi^{-1} n]
    Rotation rotB = geo.rotB;
    std::int64_t ry = rotB.rationalize(ms.y);
    std::int64_t ryp = rotB.rationalize(ms.yp);
    auto gtop = static_cast<std::int64_t>(std::floor(static_cast<double>(top) / C.xi));
    std::vector<double> gdiff(static_cast<std::size_t>(gtop) + 1, 0.0);
    {
        std::int64_t rl = dir > 0 ? geo.ry_lead : rotB.step_back(geo.ry_lead);
        std::int64_t r1 = dir > 0 ? ry : rotB.step_back(ry);
        std::int64_t r2 = dir > 0 ? ryp : rotB.step_back(ryp);
        CompensatedSum sm;
        std::int64_t wr = 0;
        const double Ag = sys.g.jump();
        for (std::int64_t j = 1; j <= gtop; ++j) {
            if (rl < geo.u_res) ++wr;
            double t = 0;
            double yv = rotB.to_double(r1), ypv = rotB.to_double(r2);
            for (const auto& h : sys.g.harmonics()) {
                double w1 = 2 * std::numbers::pi * h.k;
                t += h.cos_coef * (std::cos(w1 * yv) - std::cos(w1 * ypv)) +
                     h.sin_coef * (std::sin(w1 * yv) - std::sin(w1 * ypv));
            }
            sm.add(t);
            double gd = Ag * (static_cast<double>(j) * geo.d_y -
                              geo.sigma * static_cast<double>(wr)) +
                        sm.value();
            if (dir < 0) gd = -gd;
            gdiff[static_cast<std::size_t>(j)] = gd;
            rl = dir > 0 ? rotB.step(rl) : rotB.step_back(rl);
            r1 = dir > 0 ? rotB.step(r1) : rotB.step_back(r1);
            r2 = dir > 0 ? rotB.step(r2) : rotB.step_back(r2);
        }
    }
    double gmax = 0;
    for (std::int64_t n = w.M_prime; n <= top; ++n) {
        auto j = static_cast<std::int64_t>(std::floor(static_cast<double>(n) / C.xi));
        gmax = std::max(gmax, std::abs(gdiff[static_cast<std::size_t>(j)] + w.q));
    }
    rep.resid_g = gmax;

    // independent recheck: direct long-double sums at the window endpoints
    {
        long double a = static_cast<long double>(sys.alpha.surrogate_num()) /
                        static_cast<long double>(sys.alpha.surrogate_den());
        long double x1 = ms.x, x2 = ms.x - geo.d_x;
        long double s1 = 0, s2 = 0;
        double worst = 0;
        for (std::int64_t i = 1; i <= top; ++i) {
            long double t1 = dir > 0 ? x1 + static_cast<long double>(i - 1) * a
                                     : x1 - static_cast<long double>(i) * a;
            long double t2 = dir > 0 ? x2 + static_cast<long double>(i - 1) * a
                                     : x2 - static_cast<long double>(i) * a;
            t1 -= floorl(t1);
            t2 -= floorl(t2);
            s1 += static_cast<long double>(sys.f.eval_frac(static_cast<double>(t1)));
            s2 += static_cast<long double>(sys.f.eval_frac(static_cast<double>(t2)));
            if (i == top) {
                double fd_direct = static_cast<double>(dir > 0 ? (s1 - s2) : -(s1 - s2));
                double fd_struct;
                {
                    // reproduce the structural value at n = top
                    fd_struct = Af * (static_cast<double>(top) * geo.d_x -
                                      static_cast<double>(wraps)) + smooth.value();
                    if (dir < 0) fd_struct = -fd_struct;
                }
                worst = std::abs(fd_direct - fd_struct);
            }
        }
        rep.recheck_discrepancy = worst;
    }

    rep.ratio_ok = static_cast<double>(w.L_prime) >=
                   eps3 * static_cast<double>(w.M_prime) - 1e-12;
    rep.in_P = w.in_P;
    rep.pass = rep.resid_f < eps2 && rep.resid_g < eps2 && rep.ratio_ok && rep.in_P &&
               rep.recheck_discrepancy <= 1e-6;
    return rep;
}

namespace {

// streaming flow evaluator in a fixed time direction from (r0, h0)
class FlowStream {
public:
    FlowStream(const Rotation& rot, const RoofFunction& roof, std::int64_t r0, double h0, int dir)
        : rot_(rot), roof_(&roof), dir_(dir), r_(r0), h0_(h0) {
        if (dir_ > 0) {
            roof_v_ = roof_->eval_frac(rot_.to_double(r_));
            seg_lo_ = 0;
            seg_hi_ = roof_v_ - h0_;
        } else {
            roof_v_ = roof_->eval_frac(rot_.to_double(r_));  // base 0 on the way down
            seg_lo_ = 0;
            seg_hi_ = h0_;
        }
    }
    // advance so that tau lies in the current segment (tau nondecreasing)
    void advance(double tau) {
        while (tau >= seg_hi_) {
            ++k_;
            r_ = dir_ > 0 ? rot_.step(r_) : rot_.step_back(r_);
            roof_v_ = roof_->eval_frac(rot_.to_double(r_));
            seg_lo_ = seg_hi_;
            cum_.add(roof_v_);
            seg_hi_ = seg_lo_ + roof_v_;
        }
    }
    double height(double tau) const {
        if (dir_ > 0) return (k_ == 0 ? h0_ : 0.0) + tau - seg_lo_;
        return k_ == 0 ? h0_ - tau : roof_v_ - (tau - seg_lo_);
    }
    double base_frac() const { return rot_.to_double(r_); }
    std::int64_t base_res() const { return r_; }
    std::int64_t crossings() const { return k_; }
    double seg_lo() const { return seg_lo_; }
    double seg_hi() const { return seg_hi_; }
    double roof_value() const { return roof_v_; }

private:
    Rotation rot_;
    const RoofFunction* roof_;
    int dir_;
    std::int64_t r_;
    double h0_;
    std::int64_t k_ = 0;
    double seg_lo_ = 0, seg_hi_ = 0, roof_v_ = 0;
    CompensatedSum cum_;
};

// |cocycle| magnitude to n steps in the given direction (positive value)
double cocycle_span(const Rotation& rot, const RoofFunction& roof, std::int64_t r0, int dir,
                    std::int64_t n_lo, std::int64_t n_hi, double& at_lo) {
    CompensatedSum acc;
    std::int64_t r = dir > 0 ? r0 : rot.step_back(r0);
    at_lo = 0;
    for (std::int64_t i = 1; i <= n_hi; ++i) {
        acc.add(roof.eval_frac(rot.to_double(r)));
        if (i == n_lo) at_lo = acc.value();
        r = dir > 0 ? rot.step(r) : rot.step_back(r);
    }
    return acc.value();
}

}  // namespace

LiftReport lift_to_continuous(const MatchSample& ms, const MatchingWindow& w, const FlowPair& sys,
                              const ProofConstants& C) {
    Geometry geo(sys, ms);
    LiftReport rep;
    const int dir = w.direction;
    const double eps = C.eps;
    const std::int64_t top = w.M_prime + w.L_prime;
    Rotation rotA = geo.rotA, rotB = geo.rotB;
    std::int64_t rx = rotA.rationalize(ms.x);
    std::int64_t rxp = (rx - geo.dxn + rotA.q) % rotA.q;
    std::int64_t ry = rotB.rationalize(ms.y);
    std::int64_t ryp = rotB.rationalize(ms.yp);
    auto jM = static_cast<std::int64_t>(std::floor(static_cast<double>(w.M_prime) / C.xi));
    auto jT = static_cast<std::int64_t>(std::floor(static_cast<double>(top) / C.xi));

    double fM = 0, gM = 0;
    double fT = cocycle_span(rotA, sys.f, rx, dir, w.M_prime, top, fM);
    double gT = cocycle_span(rotB, sys.g, ry, dir, jM, jT, gM);
    rep.M = std::max(fM, gM);
    rep.L = std::min(fT - fM, gT - gM);
    rep.L_ok = rep.L >= 1.0;
    rep.ratio_ok = rep.L >= C.kappa * rep.M;
    rep.M_ge_N = rep.M >= static_cast<double>(C.N);
    if (!(rep.L > 0)) {
        rep.pass = false;
        return rep;
    }

    // bad-time intervals over [M, M+L] from the two reference orbits
    const double col = 2.0 * eps * eps;  // the lift's collar kappa_eps^2
    auto strip = [&](const Rotation& rot, std::int64_t r) {
        return static_cast<double>(rot.dist0(r)) < col * static_cast<double>(rot.q);
    };
    std::vector<std::pair<double, double>> bad;
    auto collect = [&](const Rotation& rot, const RoofFunction& roof, std::int64_t r0, double h0) {
        FlowStream st(rot, roof, r0, h0, dir);
        while (st.seg_hi() < rep.M) st.advance(st.seg_hi());
        while (st.seg_lo() < rep.M + rep.L) {
            bool in_strip = dir > 0 ? strip(rot, st.base_res())
                                    : strip(rot, st.base_res());
            if (in_strip && st.crossings() > 0) {
                bad.push_back({st.seg_lo(), std::min(st.seg_lo() + col, st.seg_hi())});
                bad.push_back({std::max(st.seg_hi() - col, st.seg_lo()), st.seg_hi()});
            }
            st.advance(st.seg_hi());
        }
    };
    collect(rotA, sys.f, rx, ms.s);
    collect(rotB, sys.g, ry, ms.r);
    for (auto& b : bad) {
        b.first = std::max(b.first, rep.M);
        b.second = std::min(b.second, rep.M + rep.L);
    }
    std::erase_if(bad, [](const auto& b) { return b.second <= b.first; });
    bad = merge_intervals(std::move(bad));
    double badlen = 0;
    for (const auto& [a, b] : bad) badlen += b - a;
    rep.U_length = rep.L - badlen;
    rep.U_intervals = bad.size() + 1;
    rep.density_ok = rep.U_length >= (1.0 - eps) * rep.L;
    rep.count_ok = static_cast<double>(rep.U_intervals) <=
                   std::floor(rep.L / C.c) + 1.0;

    // distances on a grid over U; partners run at shifted times
    const double step = std::min(sys.f.inf_certified(), sys.g.inf_certified()) / 20.0;
    FlowStream sf(rotA, sys.f, rx, ms.s, dir);
    FlowStream sfp(rotA, sys.f, rxp, ms.s, dir);
    FlowStream sg(rotB, sys.g, ry, ms.r, dir);
    FlowStream sgp(rotB, sys.g, ryp, ms.rp, dir);
    // partner clocks: t + shift in flow time means tau +- shift on this clock
    const double shf = dir > 0 ? w.p : -w.p;
    const double shg = dir > 0 ? w.q : -w.q;
    std::size_t bi = 0;
    double dfm = 0, dgm = 0;
    for (double tau = rep.M; tau <= rep.M + rep.L; tau += step) {
        while (bi < bad.size() && tau > bad[bi].second) ++bi;
        if (bi < bad.size() && tau >= bad[bi].first && tau <= bad[bi].second) continue;
        double ta = tau + shf;
        double tb = tau + shg;
        if (ta < 0 || tb < 0) continue;
        sf.advance(tau);
        sfp.advance(ta);
        sg.advance(tau);
        sgp.advance(tb);
        double df = circle_dist(sf.base_frac(), sfp.base_frac()) +
                    std::abs(sf.height(tau) - sfp.height(ta));
        double dg = circle_dist(sg.base_frac(), sgp.base_frac()) +
                    std::abs(sg.height(tau) - sgp.height(tb));
        dfm = std::max(dfm, df);
        dgm = std::max(dgm, dg);
    }
    rep.dist_f_max = dfm;
    rep.dist_g_max = dgm;
    rep.dist_ok = dfm < eps && dgm < eps;
    rep.pass = rep.L_ok && rep.ratio_ok && rep.density_ok && rep.count_ok && rep.dist_ok;
    return rep;
}

MatchSample sample_match(const FlowPair& sys, const ProofConstants& C,
                         const std::vector<int>& scales, Rng& rng, bool correlated) {
    if (scales.empty()) throw ScaleUnavailable("no admissible E_k scale at these constants");
    ZSet Z(sys, C);
    MatchSample ms;
    if (correlated) {
        // the y-pair rides on the x-pair (same rotation assumed)
        int n_k = scales[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(scales.size()) - 1))];
        EkSet E(sys, C, n_k);
        auto s = E.sample(rng);
        ms.n_k = n_k;
        ms.q_nk = E.scale().q_nk;
        ms.d_x = E.scale().d_x;
        ms.i_x = s.i_x;
        ms.rx = s.rx;
        ms.x = s.x;
        ms.s = s.s;
        ms.y = s.x;
        ms.yp = frac(s.x - ms.d_x);
        ms.d_y = ms.d_x;
        int n = -1;
        int den = C.branch == Branch::Unbounded ? 6 : 2;
        for (int k = 1; k + 1 <= sys.beta.max_index64(); ++k) {
            double lo = 1.0 / (den * static_cast<double>(sys.beta.q64(k + 1)));
            double hi = 1.0 / (den * static_cast<double>(sys.beta.q64(k)));
            if (ms.d_x >= lo && ms.d_x < hi) {
                n = k;
                break;
            }
        }
        if (n < 0) throw ScaleUnavailable("correlated sample: bracket outside expansion depth");
        ms.bracket_n = n;
        double gy = sys.g.eval_frac(frac(ms.y)), gyp = sys.g.eval_frac(frac(ms.yp));
        double top = std::min(gy, gyp) - C.delta;
        if (top <= C.delta) throw ScaleUnavailable("correlated sample: no height room");
        ms.r = rng.uniform(C.delta, top);
        double wdt = (C.delta - ms.d_x) / 2;
        ms.rp = std::clamp(ms.r + rng.uniform(-wdt, wdt), C.delta, top);
        return ms;
    }
    // y-pair in Z with d^g <= delta; u uniform in [delta/10, delta]
    for (int attempt = 0;; ++attempt) {
        if (attempt > 4096) throw ScaleUnavailable("Z sampler failed");
        double u = rng.uniform(C.delta / 10.0, C.delta);
        int den = C.branch == Branch::Unbounded ? 6 : 2;
        int n = -1;
        for (int k = 1; k + 1 <= sys.beta.max_index64(); ++k) {
            double lo = 1.0 / (den * static_cast<double>(sys.beta.q64(k + 1)));
            double hi = 1.0 / (den * static_cast<double>(sys.beta.q64(k)));
            if (u >= lo && u < hi) {
                n = k;
                break;
            }
        }
        if (n < C.m) continue;  // sampler stays in the Z2-protected bracket range
        double y = rng.uniform();
        double sgn = rng.uniform() < 0.5 ? 1.0 : -1.0;
        double yp = frac(y - sgn * u);
        if (!Z.base_ok(y) || !Z.base_ok(yp)) continue;
        double gy = sys.g.eval_frac(frac(y)), gyp = sys.g.eval_frac(frac(yp));
        if (gy - 2 * C.delta <= C.delta || gyp - 2 * C.delta <= C.delta) continue;
        double r = rng.uniform(C.delta, gy - C.delta);
        double wdt = C.delta - u;
        double rp = r + rng.uniform(-wdt, wdt);
        if (!(rp > C.delta && rp < gyp - C.delta)) continue;
        ms.y = y;
        ms.yp = yp;
        ms.r = r;
        ms.rp = rp;
        ms.d_y = sgn * u;
        ms.bracket_n = n;
        break;
    }
    // x-side from E_k at a random admissible scale
    int n_k = scales[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(scales.size()) - 1))];
    EkSet E(sys, C, n_k);
    auto s = E.sample(rng);
    ms.n_k = n_k;
    ms.q_nk = E.scale().q_nk;
    ms.d_x = E.scale().d_x;
    ms.i_x = s.i_x;
    ms.rx = s.rx;
    ms.x = s.x;
    ms.s = s.s;
    return ms;
}

CriterionReport criterion_audit(const FlowPair& sys, const ProofConstants& C, int trials,
                                std::uint64_t seed, int threads, bool correlated) {
    CriterionReport rep;
    rep.trials = trials;
    rep.rows.resize(static_cast<std::size_t>(trials));
    auto scales = admissible_scales(sys, C);
    if (threads <= 0) {
        if (const char* env = std::getenv("RIGIDITY_LAB_THREADS"))
            threads = std::max(1, std::atoi(env));
        else
            threads = static_cast<int>(std::min<unsigned>(8, std::thread::hardware_concurrency()));
    }
    threads = std::max(1, std::min(threads, trials == 0 ? 1 : trials));
    Rng root(seed);

    auto run_trial = [&](int t) {
        TrialRecord row;
        row.trial = t;
        Rng rng = root.derive(static_cast<std::uint64_t>(t));
        try {
            row.sample = sample_match(sys, C, scales, rng, correlated);
            FindResult fr = find_window(row.sample, sys, C);
            row.case_path = fr.case_path;
            row.direction = fr.direction;
            row.two_window = fr.candidates.size() == 2;
            if (row.two_window) {
                row.two_window_P_ok = false;
                for (const auto& cand : fr.candidates)
                    if (cand.in_P) row.two_window_P_ok = true;
            }
            const MatchingWindow* best = nullptr;
            VerifyReport best_rep;
            for (const auto& cand : fr.candidates) {
                VerifyReport vr = verify_window(row.sample, cand, sys, C);
                if (vr.pass &&
                    (!best || vr.resid_f + vr.resid_g < best_rep.resid_f + best_rep.resid_g)) {
                    best = &cand;
                    best_rep = vr;
                }
            }
            if (!best) {
                row.note = fr.candidates.empty() ? "no-window" : "verify-failed";
                for (const auto& cand : fr.candidates) {
                    VerifyReport vr = verify_window(row.sample, cand, sys, C);
                    if (!vr.in_P && vr.resid_f < C.eps * C.eps && vr.resid_g < C.eps * C.eps)
                        row.note = "P-membership-failed";
                }
                return row;
            }
            row.window_pass = true;
            row.M_prime = best->M_prime;
            row.L_prime = best->L_prime;
            row.p = best->p;
            row.q = best->q;
            row.resid_f = best_rep.resid_f;
            row.resid_g = best_rep.resid_g;
            LiftReport lr = lift_to_continuous(row.sample, *best, sys, C);
            row.lift_pass = lr.pass;
            row.M_ge_N = lr.M_ge_N;
            row.M = lr.M;
            row.L = lr.L;
            row.U_length = lr.U_length;
            if (!lr.pass) row.note = "lift-failed";
        } catch (const Error& e) {
            row.note = std::string("error: ") + e.what();
        }
        return row;
    };

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            int t = next.fetch_add(1);
            if (t >= trials) break;
            rep.rows[static_cast<std::size_t>(t)] = run_trial(t);
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::map<std::string, int> hist;
    for (const auto& row : rep.rows) {
        if (row.window_pass) ++rep.window_successes;
        if (row.lift_pass) ++rep.lift_successes;
        if (row.two_window) {
            ++rep.two_window_trials;
            if (!row.two_window_P_ok) ++rep.two_window_P_failures;
        }
        ++hist[row.case_path.empty() ? "none" : row.case_path];
    }
    rep.case_histogram.assign(hist.begin(), hist.end());
    return rep;
}

}  // namespace rigidity::match
