#include <algorithm>
#include <cmath>
#include <numbers>

#include "rigidity/errors.hpp"
#include "rigidity/matching.hpp"
#include "rigidity/orbit.hpp"

namespace rigidity::match {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// certified bound: |f_ac^{(k)}(z) - f_ac^{(k)}(z')| <= C(f_ac) ||z-z'|| for all k,
// via |sum_{i<k} e(i h alpha)| <= 1/(2 ||h alpha||) for trig polynomials
double abscont_slope(const RoofFunction& roof, const Frequency& freq) {
    Rotation rot(freq);
    double tot = 0;
    for (const auto& h : roof.harmonics()) {
        // ||h alpha|| via the surrogate: residue of h*p mod q
        auto t = static_cast<std::int64_t>(static_cast<__int128>(h.k) * rot.p % rot.q);
        double nrm = static_cast<double>(rot.dist0(t)) / static_cast<double>(rot.q);
        tot += std::hypot(h.cos_coef, h.sin_coef) * std::numbers::pi * h.k / std::max(nrm, 1e-300);
    }
    return tot;
}

}  // namespace

ProofConstants derive_constants(const FlowPair& sys, double eps, std::int64_t N, Mode mode,
                                Branch branch, double c_override) {
    const double Af = sys.f.jump(), Ag = sys.g.jump();
    if (!(Af > 0) || !(Ag > 0))
        throw ConfigError("derive_constants expects positive jumps (normalize first)");
    ProofConstants C;
    C.eps = eps;
    C.N = N;
    C.mode = mode;
    C.branch = branch;
    C.xi = sys.g.mean() / sys.f.mean();
    C.Delta = 1000.0 * std::max({C.xi, Af / Ag, Ag / Af, 1.0 / Af, 1.0 / Ag});
    double cmin = std::min({Af, Ag, std::abs(Af - Ag), C.xi, 1.0 / C.xi});
    if (branch == Branch::Bounded) {
        double rmax = 0;
        for (int n = 1; n + 1 <= sys.alpha.max_index64() && n <= sys.alpha.depth(); ++n)
            rmax = std::max(rmax, static_cast<double>(sys.alpha.q64(n + 1)) /
                                      static_cast<double>(sys.alpha.q64(n)));
        for (int n = 1; n + 1 <= sys.beta.max_index64() && n <= sys.beta.depth(); ++n)
            rmax = std::max(rmax, static_cast<double>(sys.beta.q64(n + 1)) /
                                      static_cast<double>(sys.beta.q64(n)));
        C.a0 = 10.0 * rmax;
        cmin = std::min(cmin, 1.0 / C.a0);
    }
    C.c_paper = cmin / (100.0 * C.Delta * C.Delta);
    C.c = (mode == Mode::PaperFaithful) ? C.c_paper : c_override;
    if (!(C.c > 0 && C.c < 1)) throw ConfigError("c must lie in (0,1)");
    C.kappa = C.c * eps * eps * eps;
    C.P_max_shift = 10.0 * std::max(Af, Ag);
    C.P_separation = C.c * C.c;
    const double g_min = sys.g.inf_certified(), g_max = sys.g.sup_certified();
    C.eps_cap = std::min({g_min / 4, Ag / 72, g_max * Ag / 72, C.c});
    C.eps_cap_ok = eps < C.eps_cap;
    if (mode == Mode::PaperFaithful && !C.eps_cap_ok)
        throw EpsilonTooLarge("eps exceeds the branch cap " + std::to_string(C.eps_cap));
    // delta_eps per (eq:abscont) at eps^3/20, certified analytically
    double slope = std::max({abscont_slope(sys.f, sys.alpha), abscont_slope(sys.g, sys.beta), 1e-12});
    C.delta_eps = (eps * eps * eps / 20.0) / slope;
    // m: minimal with sum_{n>=m} lambda(B_n) < eps/(4 g_max)
    const double target = eps / (4.0 * g_max);
    int top = std::min(sys.beta.max_index64() - 1, sys.beta.depth());
    double tail = 0;
    int m = top;
    for (int n = top; n >= 1; --n) {
        double qn = static_cast<double>(sys.beta.q64(n));
        double lam = std::min(1.0, (2.0 * std::floor(std::sqrt(qn)) + 1.0) / (3.0 * qn));
        if (tail + lam >= target) break;
        tail += lam;
        m = n;
    }
    C.m = m;
    // n0: the paper rule, boosted so delta-reachable brackets stay Z2-protected
    double need = std::max(12.0 * static_cast<double>(N) / g_min,
                           std::pow(static_cast<double>(N) / g_min, 2));
    int n0 = 1;
    while (n0 < top && static_cast<double>(sys.beta.q64(n0)) <= need) ++n0;
    C.n0 = std::max(n0, m + 2);
    if (C.n0 > top) throw InsufficientDepth("beta expansion too shallow for n0");
    C.delta = std::min({C.delta_eps, eps / 10.0, eps / (20.0 * Ag),
                        12.0 * eps / (Ag * static_cast<double>(sys.beta.q64(C.n0)))});
    return C;
}

namespace {

// desk-scale arc: the widest upper edge keeping both (eq:fbhit) hits strictly
// inside (0, c/q); paper mode keeps the literal c^2/q edge.
bool scale_geometry(const FlowPair& sys, const ProofConstants& C, int n, EkScale& out) {
    if (n < 1 || n + 1 > sys.alpha.max_index64()) return false;
    const double c = C.c;
    double qn = static_cast<double>(sys.alpha.q64(n));
    double qn1 = static_cast<double>(sys.alpha.q64(n + 1));
    out.n_k = n;
    out.q_nk = sys.alpha.q64(n);
    out.i_lo = n;
    out.i_hi = static_cast<std::int64_t>(std::floor(c * c * qn));
    out.d_x = c / qn;
    if (C.branch == Branch::Unbounded) {
        if (!(c / qn > 2.0 / qn1)) return false;  // the spec's scale precondition
        out.arc_lo = 2.0 / qn1;
        out.arc_hi = c * c / qn;
        if (C.mode == Mode::DeskScale)
            out.arc_hi = std::max(out.arc_hi, c / qn - 3.0 / qn1);
    } else {
        out.arc_lo = c * c / qn;
        out.arc_hi = 2.0 * c * c / qn;
        if (!(qn1 / qn < 1.0 / (2.0 * c))) return false;  // bounded-type smallness of c
    }
    if (!(out.arc_hi > out.arc_lo)) return false;
    if (out.i_hi < out.i_lo + 1) return false;
    if (!(out.d_x < C.delta)) return false;  // d(A_k, Id) < delta
    return true;
}

}  // namespace

std::vector<int> admissible_scales(const FlowPair& sys, const ProofConstants& C,
                                   std::int64_t q_cap) {
    std::vector<int> out;
    int top = std::min(sys.alpha.max_index64() - 1, sys.alpha.depth());
    for (int n = 1; n <= top; ++n) {
        if (sys.alpha.q64(n) > q_cap) break;
        EkScale sc;
        if (scale_geometry(sys, C, n, sc)) out.push_back(n);
    }
    return out;
}

EkSet::EkSet(const FlowPair& sys, const ProofConstants& C, int n_k) : sys_(&sys), C_(&C) {
    if (!scale_geometry(sys, C, n_k, sc_))
        throw ScaleUnavailable("scale " + std::to_string(n_k) + " fails the E_k preconditions");
    Rotation rot(sys.alpha);
    arc_lo_res_ = static_cast<std::int64_t>(std::ceil(sc_.arc_lo * static_cast<double>(rot.q)));
    arc_hi_res_ = static_cast<std::int64_t>(std::floor(sc_.arc_hi * static_cast<double>(rot.q)));
    dxn_ = static_cast<std::int64_t>(std::llround(sc_.d_x * static_cast<double>(rot.q)));
    sc_.d_x = static_cast<double>(dxn_) / static_cast<double>(rot.q);  // rationalized translate
}

std::optional<std::int64_t> EkSet::witness(double x) const {
    Rotation rot(sys_->alpha);
    std::int64_t r = rot.at(rot.rationalize(x), sc_.i_lo);
    for (std::int64_t i = sc_.i_lo; i <= sc_.i_hi; ++i) {
        if (r >= arc_lo_res_ && r <= arc_hi_res_) return i;
        r = rot.step(r);
    }
    return std::nullopt;
}

double EkSet::base_measure() const {
    Rotation rot(sys_->alpha);
    std::vector<std::pair<double, double>> iv;
    double len = static_cast<double>(arc_hi_res_ - arc_lo_res_) / static_cast<double>(rot.q);
    for (std::int64_t i = sc_.i_lo; i <= sc_.i_hi; ++i) {
        std::int64_t r = rot.at(arc_lo_res_, -i);
        double lo = rot.to_double(r);
        iv.push_back({lo, lo + len});  // may exceed 1; fold below
        if (lo + len > 1.0) {
            iv.back().second = 1.0;
            iv.push_back({0.0, lo + len - 1.0});
        }
    }
    double tot = 0;
    for (const auto& [a, b] : merge_intervals(std::move(iv))) tot += b - a;
    return tot;
}

EkSet::Sample EkSet::sample(Rng& rng) const {
    Rotation rot(sys_->alpha);
    Sample s;
    for (int attempt = 0; attempt < 256; ++attempt) {
        std::int64_t i = rng.uniform_int(sc_.i_lo, sc_.i_hi);
        std::int64_t t = rng.uniform_int(arc_lo_res_, arc_hi_res_);
        std::int64_t rx = rot.at(t, -i);
        double x = rot.to_double(rx);
        double xp = rot.to_double((rx - dxn_ + rot.q) % rot.q);
        double top = std::min(sys_->f.eval_frac(x), sys_->f.eval_frac(xp));
        if (top <= 0) continue;
        // require i to be the first hit (it is, up to boundary grazes)
        std::int64_t r = rot.rationalize(x);
        bool clean = true;
        for (std::int64_t k = 0; k < i; ++k) {
            if (r < dxn_) {
                clean = false;
                break;
            }
            r = rot.step(r);
        }
        if (!clean) continue;
        s.x = x;
        s.s = rng.uniform(0.0, top);
        s.i_x = i;
        s.rx = rx;
        return s;
    }
    throw ScaleUnavailable("E_k sampler failed to produce a clean sample");
}

ZSet::ZSet(const FlowPair& sys, const ProofConstants& C) : sys_(&sys), C_(&C) {
    // truncate the union at the deepest bracket reachable at delta, plus margin
    int top = std::min(sys.beta.max_index64() - 1, sys.beta.depth());
    n_trunc_ = std::min(top, C.n0 + 8);
    tail_ = 0;
    for (int n = n_trunc_ + 1; n <= top; ++n) {
        double qn = static_cast<double>(sys.beta.q64(n));
        tail_ += (2.0 * std::floor(std::sqrt(qn)) + 1.0) / (3.0 * qn);
    }
    // analytic remainder past the expansion: geometric by Fibonacci growth
    double qtop = static_cast<double>(sys.beta.q64(top));
    tail_ += 4.0 / std::sqrt(qtop);
}

bool ZSet::base_ok(double y) const {
    Rotation rot(sys_->beta);
    std::int64_t ry = rot.rationalize(y);
    for (int n = C_->m; n <= n_trunc_; ++n) {
        std::int64_t qn = sys_->beta.q64(n);
        auto I = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(qn))));
        // ||y - i beta|| < 1/(6 q'_n) for some |i| <= I ?
        std::int64_t lim = rot.q / (6 * qn);
        std::int64_t r = rot.at(ry, +I);  // y - i beta scanned via i from -I..I equals y + k beta
        for (std::int64_t k = -I; k <= I; ++k) {
            if (rot.dist0(r) < lim) return false;
            r = rot.step_back(r);
        }
    }
    return true;
}

bool ZSet::contains(double y, double r) const {
    double gy = sys_->g.eval_frac(frac(y));
    if (!(r > C_->delta && r < gy - C_->delta)) return false;
    return base_ok(y);
}

}  // namespace rigidity::match
