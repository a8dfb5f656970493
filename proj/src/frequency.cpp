#include "rigidity/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "rigidity/errors.hpp"

namespace rigidity {

namespace mp = boost::multiprecision;
using Real = mp::number<mp::cpp_bin_float<320, mp::digit_base_2>>;

void Frequency::finish() {
    if (digits_.empty()) throw InsufficientDepth("empty digit list");
    for (auto a : digits_)
        if (a < 1) throw NotInUnitInterval("partial quotients must be positive");
    den_ = {BigInt(1), BigInt(digits_[0])};
    num_ = {BigInt(0), BigInt(1)};
    for (std::size_t n = 1; n < digits_.size(); ++n) {
        den_.push_back(digits_[n] * den_[n] + den_[n - 1]);
        num_.push_back(digits_[n] * num_[n] + num_[n - 1]);
    }
    max64_ = 0;
    for (std::size_t n = 0; n < den_.size(); ++n) {
        if (den_[n] > std::numeric_limits<std::int64_t>::max() / 4) break;
        max64_ = static_cast<int>(n);
    }
    // surrogate: deepest convergent with q <= cap
    si_ = 1;
    for (int n = 1; n <= max64_; ++n)
        if (den_[static_cast<std::size_t>(n)] <= kSurrogateCap) si_ = n;
    sp_ = static_cast<std::int64_t>(num_[static_cast<std::size_t>(si_)]);
    sq_ = static_cast<std::int64_t>(den_[static_cast<std::size_t>(si_)]);
    value_ = static_cast<double>(sp_) / static_cast<double>(sq_);
}

Frequency Frequency::from_digits(std::vector<std::int64_t> digits) {
    Frequency f;
    f.digits_ = std::move(digits);
    f.finish();
    std::ostringstream os;
    os << "cf:[";
    for (std::size_t i = 0; i < f.digits_.size(); ++i) os << (i ? "," : "") << f.digits_[i];
    os << "]";
    f.source_ = os.str();
    return f;
}

namespace {

struct Expansion {
    std::vector<std::int64_t> digits;
    bool unreliable = false;
};

Expansion expand_interval(Real lo, Real hi, int depth) {
    if (!(lo > 0 && hi < 1)) throw NotInUnitInterval("value not strictly inside (0,1)");
    std::vector<std::int64_t> digits;
    bool unreliable = false;
    for (int k = 0; k < depth; ++k) {
        // next digit of [lo, hi]: a = floor(1/x); the interval inverts
        Real ilo = 1 / hi, ihi = 1 / lo;
        Real flo = floor(ilo), fhi = floor(ihi);
        if (flo != fhi) {
            // remainder's uncertainty straddles an integer
            if (k == depth - 1 && k > 0) {
                Real mid = (ilo + ihi) / 2;
                digits.push_back(static_cast<std::int64_t>(floor(mid)));
                unreliable = true;
                break;
            }
            throw PrecisionExhausted("digit " + std::to_string(k + 1) +
                                     " not certified at stated precision");
        }
        auto a = static_cast<std::int64_t>(flo);
        if (a < 1) throw NotInUnitInterval("expansion produced a non-positive digit");
        digits.push_back(a);
        lo = ilo - flo;
        hi = ihi - flo;
        if (lo <= 0 && static_cast<int>(digits.size()) < depth)
            throw PrecisionExhausted("remainder indistinguishable from a rational at depth " +
                                     std::to_string(digits.size()));
    }
    if (static_cast<int>(digits.size()) < depth && !unreliable)
        throw PrecisionExhausted("could not certify requested depth");
    return {std::move(digits), unreliable};
}

}  // namespace

Frequency Frequency::from_real(const std::string& decimal, int precision_bits, int depth) {
    if (precision_bits < 4 || precision_bits > 300) throw ConfigError("precision-bits out of range");
    Real x(decimal.c_str());
    Real r = ldexp(Real(1), -precision_bits);
    Expansion e = expand_interval(x - r, x + r, depth);
    Frequency f = Frequency::from_digits(std::move(e.digits));
    f.last_unreliable_ = e.unreliable;
    std::ostringstream os;
    os << "real:" << decimal << "@" << precision_bits;
    f.source_ = os.str();
    return f;
}

Frequency Frequency::from_real(double x, int precision_bits, int depth) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return from_real(os.str(), precision_bits, depth);
}

Frequency Frequency::parse(const std::string& text, int depth) {
    if (text.rfind("cf:[", 0) == 0 && text.back() == ']') {
        std::vector<std::int64_t> digits;
        std::string body = text.substr(4, text.size() - 5);
        std::istringstream is(body);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            if (tok.empty()) continue;
            digits.push_back(std::stoll(tok));
        }
        return from_digits(std::move(digits));
    }
    if (text.rfind("real:", 0) == 0) {
        auto at = text.find('@');
        if (at == std::string::npos) throw ConfigError("real:<decimal>@<precision-bits> expected");
        return from_real(text.substr(5, at - 5), std::stoi(text.substr(at + 1)), depth);
    }
    throw ConfigError("unrecognized frequency literal: " + text);
}

std::string Frequency::serialize() const { return source_; }

std::vector<BigInt> Frequency::paper_literal_denominators() const {
    std::vector<BigInt> q = {BigInt(1), BigInt(1)};
    for (std::size_t n = 1; n <= digits_.size(); ++n)
        q.push_back(digits_[n - 1] * q[n] + q[n - 1]);
    return q;
}

std::int64_t Frequency::q64(int n) const {
    if (n < 0 || n > max64_) throw InsufficientDepth("denominator index outside int64 range");
    return static_cast<std::int64_t>(den_[static_cast<std::size_t>(n)]);
}

std::int64_t Frequency::p64(int n) const {
    if (n < 0 || n > max64_) throw InsufficientDepth("numerator index outside int64 range");
    return static_cast<std::int64_t>(num_[static_cast<std::size_t>(n)]);
}

Frequency Frequency::reflected() const {
    std::vector<std::int64_t> d;
    if (digits_[0] == 1) {
        // 1 - [0;1,a2,a3,...] = [0;a2+1,a3,...]
        if (digits_.size() < 2) throw InsufficientDepth("reflection needs depth >= 2");
        d.push_back(digits_[1] + 1);
        d.insert(d.end(), digits_.begin() + 2, digits_.end());
    } else {
        // 1 - [0;a1,a2,...] = [0;1,a1-1,a2,...]
        d.push_back(1);
        d.push_back(digits_[0] - 1);
        d.insert(d.end(), digits_.begin() + 1, digits_.end());
    }
    return from_digits(std::move(d));
}

BigInt OstrowskiDigits::reconstruct(const Frequency& f) const {
    BigInt n = 0;
    for (std::size_t i = 0; i < coefficients.size(); ++i)
        n += coefficients[i] * f.denominators()[i];
    return n;
}

OstrowskiDigits ostrowski_decompose(const BigInt& n, const Frequency& f) {
    if (n <= 0) throw NotInUnitInterval("ostrowski_decompose expects a positive integer");
    const auto& q = f.denominators();
    if (q.back() <= n) throw InsufficientDepth("expand the continued fraction past n first");
    OstrowskiDigits out;
    out.coefficients.assign(q.size(), 0);
    BigInt rem = n;
    for (std::size_t i = q.size(); i-- > 0;) {
        if (q[i] <= rem) {
            BigInt b = rem / q[i];
            out.coefficients[i] = static_cast<std::int64_t>(b);
            rem -= b * q[i];
        }
        if (rem == 0) break;
    }
    while (!out.coefficients.empty() && out.coefficients.back() == 0) out.coefficients.pop_back();
    return out;
}

TypeVerdict classify_type(const Frequency& f, int horizon, std::int64_t bound) {
    if (horizon > f.depth()) throw InsufficientDepth("horizon exceeds expanded depth");
    TypeVerdict v;
    v.horizon = horizon;
    std::int64_t mx = 0;
    for (int n = 1; n <= horizon; ++n) {
        mx = std::max(mx, f.digit(n));
        if (f.digit(n) > bound) v.evidence_indices.push_back(n);
    }
    v.bounded = v.evidence_indices.empty();
    v.bound_M = mx + 1;
    return v;
}

DcReport dc_check(const Frequency& f, double tau, double C, int horizon) {
    DcReport r;
    r.horizon = horizon;
    r.tau = tau;
    r.C = C;
    horizon = std::min({horizon, f.max_index64() - 1, f.surrogate_index() - 2});
    const BigInt sp = f.surrogate_num(), sq = f.surrogate_den();
    for (int n = 1; n <= horizon; ++n) {
        // |alpha - p_n/q_n| = |q_n sp - p_n sq| / (sq q_n) up to the surrogate
        // error 1/sq^2, far below any convergent gap at this horizon.
        const BigInt& qn = f.denominators()[static_cast<std::size_t>(n)];
        const BigInt& pn = f.numerators()[static_cast<std::size_t>(n)];
        BigInt d = qn * sp - pn * sq;
        if (d < 0) d = -d;
        double diff = static_cast<double>(d) /
                      (static_cast<double>(sq) * static_cast<double>(qn));
        double rhs = C * std::pow(static_cast<double>(qn), -tau);
        if (!(diff > rhs)) {
            r.first_violation = n;
            return r;
        }
    }
    return r;
}

std::vector<int> unbounded_sequence(const Frequency& f, double threshold) {
    std::vector<int> out;
    const auto& q = f.denominators();
    for (std::size_t n = 0; n + 1 < q.size(); ++n) {
        // q_{n+1}/q_n >= threshold, exact comparison in integers
        BigInt lhs = q[n + 1];
        BigInt rhs = BigInt(static_cast<std::int64_t>(std::ceil(threshold * 1e6))) * q[n];
        if (lhs * 1'000'000 >= rhs) out.push_back(static_cast<int>(n));
    }
    return out;
}

}  // namespace rigidity
