#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rigidity/frequency.hpp"

namespace rigidity {

struct Harmonic {
    int k = 1;
    double cos_coef = 0.0;
    double sin_coef = 0.0;
};

/// f(x) = A {x} + f_ac(x), f_ac a trigonometric polynomial (constant + harmonics).
/// {0} = 0, so f(0) = f_ac(0); the single discontinuity sits at 0 with jump A.
class RoofFunction {
public:
    RoofFunction(double jump, double constant, std::vector<Harmonic> harmonics = {});

    double eval(double x) const;        // any real, reduced mod 1
    double eval_frac(double fr) const;  // fr already in [0,1)

    double jump() const { return jump_; }
    double constant() const { return const_; }
    const std::vector<Harmonic>& harmonics() const { return harm_; }

    double mean() const { return mean_; }                    // A/2 + c0, exact
    double variation_bound() const { return var_; }          // |A| + sum 2 pi k amp
    double derivative_sup() const { return dsup_; }          // |A| + sum 2 pi k amp (f_ac')
    double inf_certified() const { return inf_; }            // grid + Lipschitz slack
    double sup_certified() const { return sup_; }

    // "jump=<A>; c0=<c>; k:<k>=<cos>,<sin>; ..."
    std::string serialize() const;
    static RoofFunction parse(const std::string& text);

    // roof of the reflected system x -> 1-x: jump -A, smooth A + f_ac(1-x)
    RoofFunction reflected() const;

private:
    double jump_, const_;
    std::vector<Harmonic> harm_;
    double mean_, var_, dsup_, inf_, sup_;
};

/// Birkhoff sum f^{(n)}(x) with the sign convention f^{(-n)}(x) = -f^{(n)}(x - n alpha),
/// f^{(0)} = 0.  Compensated summation throughout.
double birkhoff_sum(const RoofFunction& f, const Frequency& alpha, double x, std::int64_t n);

/// Exact-rational oracle for roofs with no harmonics (A, c0 rational), rational
/// rotation p/q and rational base point.  Cross-check path for tests.
BigInt birkhoff_sum_rational_num(std::int64_t a_num, std::int64_t a_den, std::int64_t c_num,
                                 std::int64_t c_den, std::int64_t p, std::int64_t q,
                                 std::int64_t x_num, std::int64_t x_den, std::int64_t n,
                                 BigInt& denom_out);

struct DKRecord {
    int index = 0;             // denominator index n
    std::int64_t qn = 0;
    double sup_deviation = 0;  // sup over samples of |f^(qn)(x) - qn mean|
};

struct LemmaPair {
    double eps;
    std::int64_t n_eps;
};

struct DKReport {
    std::vector<DKRecord> records;
    double variation_bound = 0;
    int samples = 0;
    bool all_within_variation = true;
    // Lemma-style linear bound audit: violations of |f^(n)(x) - n mean| <= eps |n|
    std::vector<std::pair<LemmaPair, std::int64_t>> lemma_violations;  // (pair, witness n)
};

DKReport dk_audit(const RoofFunction& f, const Frequency& alpha, int index_lo, int index_hi,
                  int samples, std::uint64_t seed, const std::vector<LemmaPair>& pairs = {});

struct NormalizedSystem {
    Frequency alpha;
    RoofFunction roof;
    bool reflected = false;  // conjugation tag: x -> 1-x was applied
};

/// Positive-jump normalization via the reflection x -> 1-x (A<0 becomes -A>0,
/// base rotation becomes 1-alpha).  Identity pass-through for A>0.
NormalizedSystem normalize_positive_jump(const Frequency& alpha, const RoofFunction& f);

}  // namespace rigidity
