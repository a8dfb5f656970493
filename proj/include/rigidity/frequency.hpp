#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace rigidity {

using BigInt = boost::multiprecision::cpp_int;

/// An irrational rotation number in (0,1) held as a continued-fraction
/// expansion [0; a1, a2, ...] together with its convergents p_n/q_n
/// (q0 = 1, q1 = a1, q_{n+1} = a_{n+1} q_n + q_{n-1}).  For all-ones digit
/// lists this reproduces q0 = q1 = 1 and the Fibonacci denominators.
///
/// An int64 convergent surrogate p/q (largest q <= surrogate_cap) backs the
/// exact orbit arithmetic used by the hit scans; |alpha - p/q| < 1/q^2.
class Frequency {
public:
    static constexpr std::int64_t kSurrogateCap = 2'000'000'000'000'000LL;  // 2e15

    static Frequency from_digits(std::vector<std::int64_t> digits);
    // Expands a real value to `depth` digits certified at `precision_bits`.
    // The last digit is flagged unreliable when the remainder's uncertainty
    // interval straddles an integer; PrecisionExhausted if no digit certifies.
    static Frequency from_real(const std::string& decimal, int precision_bits, int depth);
    static Frequency from_real(double x, int precision_bits, int depth);

    // text forms: "cf:[a1,a2,...]" or "real:<decimal>@<precision-bits>"
    static Frequency parse(const std::string& text, int depth = 64);
    std::string serialize() const;

    int depth() const { return static_cast<int>(digits_.size()); }
    std::int64_t digit(int n) const { return digits_.at(static_cast<std::size_t>(n - 1)); }  // 1-based
    const std::vector<std::int64_t>& digits() const { return digits_; }

    // q_0 .. q_depth, p_0 .. p_depth (exact)
    const std::vector<BigInt>& denominators() const { return den_; }
    const std::vector<BigInt>& numerators() const { return num_; }
    // the paper's literal seeding q0=q1=1, q_{n+1}=a_n q_n+q_{n-1} (display only)
    std::vector<BigInt> paper_literal_denominators() const;

    // checked int64 views (throws InsufficientDepth past the int64 range)
    std::int64_t q64(int n) const;
    std::int64_t p64(int n) const;
    int max_index64() const { return max64_; }

    double value() const { return value_; }
    std::int64_t surrogate_num() const { return sp_; }
    std::int64_t surrogate_den() const { return sq_; }
    int surrogate_index() const { return si_; }

    bool last_digit_unreliable() const { return last_unreliable_; }

    // 1 - alpha (the reflected rotation used by the positive-jump normalization)
    Frequency reflected() const;

private:
    Frequency() = default;
    void finish();

    std::vector<std::int64_t> digits_;
    std::vector<BigInt> den_, num_;
    std::int64_t sp_ = 0, sq_ = 1;
    int si_ = 1;
    int max64_ = 0;
    double value_ = 0.0;
    bool last_unreliable_ = false;
    std::string source_;
};

struct OstrowskiDigits {
    std::vector<std::int64_t> coefficients;  // b_0 .. b_k, b_i multiplies q_i
    BigInt reconstruct(const Frequency& f) const;
};

/// Greedy decomposition n = sum b_i q_i with b_i <= q_{i+1}/q_i.
OstrowskiDigits ostrowski_decompose(const BigInt& n, const Frequency& f);

struct TypeVerdict {
    bool bounded = false;
    std::int64_t bound_M = 0;                 // bounded: all examined digits < M
    std::vector<int> evidence_indices;        // unbounded: n with a_n > bound
    int horizon = 0;
};

/// Horizon-relative classification: finite evidence, never a proof.
TypeVerdict classify_type(const Frequency& f, int horizon, std::int64_t bound);

struct DcReport {
    std::optional<int> first_violation;  // smallest n with |alpha - p_n/q_n| <= C/q_n^tau
    int horizon = 0;
    double tau = 0.0, C = 0.0;
};

/// Checks |alpha - p_n/q_n| > C/q_n^tau on convergents up to `horizon`
/// (convergents suffice: they minimize |alpha - p/q| for q <= q_n).
DcReport dc_check(const Frequency& f, double tau, double C, int horizon);

/// All indices n with q_{n+1}/q_n >= threshold, increasing.  Empty result is
/// a legitimate outcome (caller may deepen the expansion).
std::vector<int> unbounded_sequence(const Frequency& f, double threshold);

}  // namespace rigidity
