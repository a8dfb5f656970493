#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rigidity/frequency.hpp"
#include "rigidity/roof.hpp"
#include "rigidity/util.hpp"

namespace rigidity::match {

enum class Mode { PaperFaithful, DeskScale };
enum class Branch { Unbounded, Bounded };

/// Two special flows (alpha, f) and (beta, g) after positive-jump normalization.
struct FlowPair {
    Frequency alpha;
    RoofFunction f;
    Frequency beta;
    RoofFunction g;
};

struct ProofConstants {
    double eps = 0;
    double xi = 1;         // int g / int f
    double Delta = 0;
    double c = 0;          // active value (override in desk-scale mode)
    double c_paper = 0;    // the formula value, kept for documentation
    double kappa = 0;      // c eps^3
    double delta = 0;      // min{delta_eps, eps/10, eps/(20 Ag), 12 eps/(Ag q'_{n0})}
    double delta_eps = 0;  // certified smallness radius for (eq:abscont)
    int n0 = 0;
    int m = 0;             // Z2 exclusion start
    std::int64_t N = 1;
    double P_max_shift = 0;   // max(|p|,|q|) <= 10 max(Af, Ag)
    double P_separation = 0;  // |p-q| >= c^2
    double a0 = 0;            // bounded branch only
    double eps_cap = 0;
    bool eps_cap_ok = true;   // desk-scale mode records a warning instead of failing
    Mode mode = Mode::DeskScale;
    Branch branch = Branch::Unbounded;

    bool in_P(double p, double q) const {
        return std::max(std::abs(p), std::abs(q)) <= P_max_shift + 1e-12 &&
               std::abs(p - q) >= P_separation - 1e-12;
    }
};

ProofConstants derive_constants(const FlowPair& sys, double eps, std::int64_t N, Mode mode,
                                Branch branch, double c_override = 0.05);

struct EkScale {
    int n_k = 0;              // denominator index
    std::int64_t q_nk = 0;
    double arc_lo = 0, arc_hi = 0;  // base arc of the backward union
    std::int64_t i_lo = 0, i_hi = 0;  // admissible iterate range
    double d_x = 0;           // the A_k translate c/q_{n_k} (as rationalized)
};

/// Admissible scale indices for E_k at the given constants (arc nonempty,
/// translate below delta, iterate range nonempty, q below the work cap).
std::vector<int> admissible_scales(const FlowPair& sys, const ProofConstants& C,
                                   std::int64_t q_cap = 20'000'000);

/// Handle to E_k = E~_k^f ∩ X_k: membership scan, uniform sampler, measure.
class EkSet {
public:
    EkSet(const FlowPair& sys, const ProofConstants& C, int n_k);

    const EkScale& scale() const { return sc_; }
    bool contains(double x) const { return witness(x).has_value(); }
    std::optional<std::int64_t> witness(double x) const;  // i_x in [i_lo, i_hi]
    double base_measure() const;  // exact union measure of E~_k

    struct Sample {
        double x = 0, s = 0;
        std::int64_t i_x = 0;
        std::int64_t rx = 0;  // residue of x over the alpha surrogate
    };
    Sample sample(Rng& rng) const;

private:
    const FlowPair* sys_;
    const ProofConstants* C_;
    EkScale sc_;
    std::int64_t arc_lo_res_ = 0, arc_hi_res_ = 0, dxn_ = 0;
};

/// Handle to Z = Z1 ∩ Z2 (heights clear of the roof edges; base clear of the
/// truncated union of B_n).  Tail measure of the truncation is reported.
class ZSet {
public:
    ZSet(const FlowPair& sys, const ProofConstants& C);
    bool contains(double y, double r) const;
    bool base_ok(double y) const;
    double tail_slack() const { return tail_; }
    int truncation_depth() const { return n_trunc_; }

private:
    const FlowPair* sys_;
    const ProofConstants* C_;
    int n_trunc_ = 0;
    double tail_ = 0;
};

struct MatchSample {
    // x-side: (x,s) in E_k, x' = x - c/q_{n_k}
    int n_k = 0;
    std::int64_t q_nk = 0;
    double d_x = 0;  // x - x' > 0
    std::int64_t i_x = 0;
    std::int64_t rx = 0;
    double x = 0, s = 0;
    // y-side: (y,r),(y',r') in Z, d^g <= delta
    double y = 0, yp = 0, r = 0, rp = 0;
    double d_y = 0;  // y - y', signed, |d_y| = ||y-y'||
    int bracket_n = 0;
};

struct MatchingWindow {
    std::int64_t M_prime = 0;
    std::int64_t L_prime = 0;
    double p = 0, q = 0;    // time shifts; the (shf) numerator is f-diff + p
    int direction = +1;     // +1 forward, -1 backward (eq. backw)
    std::string case_path;
    bool in_P = false;
    bool f_above_wrap = false, g_above_wrap = false;  // zone bookkeeping
};

struct FindResult {
    std::vector<MatchingWindow> candidates;  // one or two
    std::string case_path;
    int direction = +1;
    std::int64_t ell = -1;  // f-side first hit (in the chosen direction)
    std::int64_t j0 = -1;   // g-side first hit (forward cases), -1 if none
    bool degenerate_y = false;
};

FindResult find_window(const MatchSample& ms, const FlowPair& sys, const ProofConstants& C);

struct VerifyReport {
    double resid_f = 0, resid_g = 0;
    bool ratio_ok = false;    // L'/M' >= eps^3
    bool in_P = false;
    bool pass = false;
    double recheck_discrepancy = 0;  // independent long-double route
};

VerifyReport verify_window(const MatchSample& ms, const MatchingWindow& w, const FlowPair& sys,
                           const ProofConstants& C);

struct LiftReport {
    double M = 0, L = 0;
    double U_length = 0;
    std::size_t U_intervals = 0;
    double dist_f_max = 0, dist_g_max = 0;
    bool L_ok = false;        // L >= 1
    bool ratio_ok = false;    // L/M >= kappa
    bool density_ok = false;  // |U| >= (1-eps) L
    bool count_ok = false;    // intervals <= [c^{-1} L] + 1
    bool dist_ok = false;     // both distances < eps on U
    bool M_ge_N = false;      // premise flag, reported but not gating
    bool pass = false;
};

LiftReport lift_to_continuous(const MatchSample& ms, const MatchingWindow& w, const FlowPair& sys,
                              const ProofConstants& C);

struct TrialRecord {
    int trial = 0;
    MatchSample sample;
    std::string case_path;
    int direction = +1;
    std::int64_t M_prime = 0, L_prime = 0;
    double p = 0, q = 0;
    double resid_f = 0, resid_g = 0;
    bool window_pass = false;
    bool lift_pass = false;
    bool two_window = false;
    bool two_window_P_ok = false;  // at least one candidate in P
    bool M_ge_N = false;
    double M = 0, L = 0, U_length = 0;
    std::string note;
};

struct CriterionReport {
    std::vector<TrialRecord> rows;
    int trials = 0;
    int window_successes = 0;
    int lift_successes = 0;
    int two_window_trials = 0;
    int two_window_P_failures = 0;
    std::vector<std::pair<std::string, int>> case_histogram;
};

/// Samples trials, runs find/verify/lift, aggregates. Deterministic for a
/// fixed seed; trials are independent and parallelize by derived seeds.
/// correlated = true pins the y-pair to the x-pair (the equal-jump contrast
/// experiment: matching then forces p = q, outside P).
CriterionReport criterion_audit(const FlowPair& sys, const ProofConstants& C, int trials,
                                std::uint64_t seed, int threads = 0, bool correlated = false);

/// Samples one MatchSample (the audit's ensemble: u uniform in [delta/10, delta],
/// heights uniform, x from the E_k union sampler at a random admissible scale).
MatchSample sample_match(const FlowPair& sys, const ProofConstants& C,
                         const std::vector<int>& scales, Rng& rng, bool correlated = false);

}  // namespace rigidity::match
