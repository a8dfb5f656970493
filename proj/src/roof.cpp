#include "rigidity/roof.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rigidity/errors.hpp"
#include "rigidity/util.hpp"

namespace rigidity {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kCertGrid = 1 << 15;
}  // namespace

RoofFunction::RoofFunction(double jump, double constant, std::vector<Harmonic> harmonics)
    : jump_(jump), const_(constant), harm_(std::move(harmonics)) {
    for (const auto& h : harm_) {
        if (h.k < 1) throw NonfiniteVariation("harmonic index must be >= 1");
        if (!std::isfinite(h.cos_coef) || !std::isfinite(h.sin_coef))
            throw NonfiniteVariation("non-finite harmonic coefficient");
    }
    if (!std::isfinite(jump_) || !std::isfinite(const_)) throw NonfiniteVariation("non-finite roof parameter");
    mean_ = jump_ / 2 + const_;
    double v = 0;
    for (const auto& h : harm_) v += kTwoPi * h.k * std::hypot(h.cos_coef, h.sin_coef);
    dsup_ = std::abs(jump_) + v;
    var_ = std::abs(jump_) + v;
    // certified bounds: grid of width w with Lipschitz slack L w / 2
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < kCertGrid; ++i) {
        double val = eval_frac((i + 0.5) / kCertGrid);
        lo = std::min(lo, val);
        hi = std::max(hi, val);
    }
    // the sawtooth endpoints are one-sided limits; include both
    lo = std::min(lo, eval_frac(0.0));
    double slack = dsup_ / (2.0 * kCertGrid);
    inf_ = lo - slack;
    sup_ = hi + slack;
}

double RoofFunction::eval_frac(double fr) const {
    double v = jump_ * fr + const_;
    for (const auto& h : harm_)
        v += h.cos_coef * std::cos(kTwoPi * h.k * fr) + h.sin_coef * std::sin(kTwoPi * h.k * fr);
    return v;
}

double RoofFunction::eval(double x) const { return eval_frac(frac(x)); }

std::string RoofFunction::serialize() const {
    std::ostringstream os;
    os.precision(17);
    os << "jump=" << jump_ << "; c0=" << const_;
    for (const auto& h : harm_) os << "; k:" << h.k << "=" << h.cos_coef << "," << h.sin_coef;
    return os.str();
}

RoofFunction RoofFunction::parse(const std::string& text) {
    double jump = 0, c0 = 0;
    bool saw_jump = false;
    std::vector<Harmonic> harm;
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ';')) {
        auto b = tok.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        tok = tok.substr(b, tok.find_last_not_of(" \t") - b + 1);
        auto eq = tok.find('=');
        if (eq == std::string::npos) throw ConfigError("bad roof field: " + tok);
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "jump") {
            jump = std::stod(val);
            saw_jump = true;
        } else if (key == "c0") {
            c0 = std::stod(val);
        } else if (key.rfind("k:", 0) == 0) {
            Harmonic h;
            h.k = std::stoi(key.substr(2));
            auto comma = val.find(',');
            if (comma == std::string::npos) throw ConfigError("harmonic needs <cos>,<sin>: " + tok);
            h.cos_coef = std::stod(val.substr(0, comma));
            h.sin_coef = std::stod(val.substr(comma + 1));
            harm.push_back(h);
        } else {
            throw ConfigError("unknown roof key: " + key);
        }
    }
    if (!saw_jump) throw ConfigError("roof literal missing jump=");
    return RoofFunction(jump, c0, std::move(harm));
}

RoofFunction RoofFunction::reflected() const {
    // A{1-x}+f_ac(1-x) = (-A){x} + (A + f_ac(1-x)) a.e.;
    // cos(2 pi k (1-x)) = cos(2 pi k x), sin(2 pi k (1-x)) = -sin(2 pi k x)
    std::vector<Harmonic> h = harm_;
    for (auto& t : h) t.sin_coef = -t.sin_coef;
    return RoofFunction(-jump_, jump_ + const_, std::move(h));
}

double birkhoff_sum(const RoofFunction& f, const Frequency& alpha, double x, std::int64_t n) {
    if (n == 0) return 0.0;
    const double a = alpha.value();
    CompensatedSum acc;
    if (n > 0) {
        for (std::int64_t i = 0; i < n; ++i) acc.add(f.eval(x + static_cast<double>(i) * a));
        return acc.value();
    }
    // f^{(-m)}(x) = -f^{(m)}(x - m alpha)
    std::int64_t m = -n;
    double x0 = x - static_cast<double>(m) * a;
    for (std::int64_t i = 0; i < m; ++i) acc.add(f.eval(x0 + static_cast<double>(i) * a));
    return -acc.value();
}

BigInt birkhoff_sum_rational_num(std::int64_t a_num, std::int64_t a_den, std::int64_t c_num,
                                 std::int64_t c_den, std::int64_t p, std::int64_t q,
                                 std::int64_t x_num, std::int64_t x_den, std::int64_t n,
                                 BigInt& denom_out) {
    // sum_{i<n} [ A * {x + i p/q} + c ] over the common denominator a_den*c_den*x_den*q
    BigInt D = BigInt(a_den) * c_den * x_den * q;
    denom_out = D;
    BigInt total = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        // {x + i p/q} = ((x_num q + i p x_den) mod (x_den q)) / (x_den q)
        BigInt num = BigInt(x_num) * q + BigInt(i) * p * x_den;
        BigInt mod = BigInt(x_den) * q;
        BigInt r = num % mod;
        if (r < 0) r += mod;
        total += BigInt(a_num) * c_den * r + BigInt(c_num) * a_den * mod;
    }
    return total;  // value = total / D
}

DKReport dk_audit(const RoofFunction& f, const Frequency& alpha, int index_lo, int index_hi,
                  int samples, std::uint64_t seed, const std::vector<LemmaPair>& pairs) {
    if (!std::isfinite(f.variation_bound())) throw NonfiniteVariation("roof has no finite variation bound");
    DKReport rep;
    rep.variation_bound = f.variation_bound();
    rep.samples = samples;
    Rng root(seed);
    const double mean = f.mean();
    for (int n = index_lo; n <= index_hi; ++n) {
        std::int64_t qn = alpha.q64(n);
        Rng rng = root.derive(static_cast<std::uint64_t>(n));
        double sup = 0;
        for (int s = 0; s < samples; ++s) {
            double x = rng.uniform();
            double dev = std::abs(birkhoff_sum(f, alpha, x, qn) - static_cast<double>(qn) * mean);
            sup = std::max(sup, dev);
        }
        rep.records.push_back({n, qn, sup});
        if (sup > rep.variation_bound) rep.all_within_variation = false;
    }
    // linear-bound audit over random n >= n_eps
    Rng rng = root.derive(0xABCDEF);
    for (const auto& pr : pairs) {
        std::int64_t witness = -1;
        for (int t = 0; t < 64; ++t) {
            std::int64_t n = pr.n_eps + rng.uniform_int(0, pr.n_eps);
            double x = rng.uniform();
            double dev = std::abs(birkhoff_sum(f, alpha, x, n) - static_cast<double>(n) * mean);
            if (dev >= pr.eps * static_cast<double>(n)) {
                witness = n;
                break;
            }
        }
        if (witness >= 0) rep.lemma_violations.push_back({pr, witness});
    }
    return rep;
}

NormalizedSystem normalize_positive_jump(const Frequency& alpha, const RoofFunction& f) {
    if (f.jump() == 0.0) throw ZeroJump("jump is zero; use the coboundary pathway");
    if (f.jump() > 0.0) return {alpha, f, false};
    return {alpha.reflected(), f.reflected(), true};
}

}  // namespace rigidity
