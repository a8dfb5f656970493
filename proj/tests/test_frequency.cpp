#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "rigidity/errors.hpp"
#include "rigidity/frequency.hpp"
#include "rigidity/util.hpp"

using namespace rigidity;

namespace {

// independent oracle: the plain three-term recurrence, written out directly
std::vector<long long> recurrence_oracle(const std::vector<long long>& a) {
    std::vector<long long> q = {1, a[0]};
    for (std::size_t n = 1; n < a.size(); ++n) q.push_back(a[n] * q[n] + q[n - 1]);
    return q;
}

Frequency golden(int depth = 40) {
    return Frequency::from_digits(std::vector<std::int64_t>(static_cast<std::size_t>(depth), 1));
}

Frequency sqrt2m1(int depth = 30) {
    return Frequency::from_digits(std::vector<std::int64_t>(static_cast<std::size_t>(depth), 2));
}

}  // namespace

TEST_CASE("golden digits give the Fibonacci denominators with q0=q1=1") {
    Frequency f = Frequency::from_real("0.61803398874989484820458683436563811772", 100, 6);
    CHECK(f.digits() == std::vector<std::int64_t>{1, 1, 1, 1, 1, 1});
    std::vector<std::int64_t> q;
    for (auto& b : f.denominators()) q.push_back(static_cast<std::int64_t>(b));
    CHECK(q == std::vector<std::int64_t>{1, 1, 2, 3, 5, 8, 13});
}

TEST_CASE("sqrt(2)-1 expansion matches the direct recurrence q_{n+1}=2q_n+q_{n-1}") {
    Frequency f = Frequency::from_real("0.41421356237309504880168872420969807857", 100, 5);
    CHECK(f.digits() == std::vector<std::int64_t>{2, 2, 2, 2, 2});
    auto oracle = recurrence_oracle({2, 2, 2, 2, 2});
    REQUIRE(f.denominators().size() == oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i)
        CHECK(f.denominators()[i] == BigInt(oracle[i]));
}

TEST_CASE("rational-to-precision input exhausts the certified depth") {
    CHECK_THROWS_AS(Frequency::from_real("0.5000000000000000000001", 64, 6), PrecisionExhausted);
    CHECK_THROWS_AS(Frequency::from_real("1.25", 64, 4), NotInUnitInterval);
}

TEST_CASE("serialization round-trips") {
    Frequency f = Frequency::from_digits({1, 2, 1, 4, 1, 8});
    Frequency g = Frequency::parse(f.serialize());
    CHECK(g.digits() == f.digits());
    Frequency h = Frequency::parse("real:0.41421356237309504880168872421@90", 5);
    CHECK(h.digits() == std::vector<std::int64_t>{2, 2, 2, 2, 2});
}

TEST_CASE("best approximation: |alpha q_n - p_n| < 1/q_{n+1} via 128-bit evaluation") {
    using Wide = boost::multiprecision::number<
        boost::multiprecision::cpp_bin_float<160, boost::multiprecision::digit_base_2>>;
    auto check = [](const Frequency& f, const Wide& alpha) {
        for (int n = 1; n + 1 <= f.max_index64(); ++n) {
            Wide lhs = abs(alpha * f.q64(n) - f.p64(n));
            CHECK(lhs < Wide(1) / f.q64(n + 1));
        }
    };
    Wide s5 = sqrt(Wide(5));
    check(golden(40), (s5 - 1) / 2);
    Wide s2 = sqrt(Wide(2));
    check(sqrt2m1(30), s2 - 1);
    // mixed digit list against its own deep surrogate
    Frequency mix = Frequency::from_digits({1, 2, 1, 4, 1, 8, 1, 16, 1, 32, 1, 64, 1, 128});
    Wide v = Wide(mix.surrogate_num()) / Wide(mix.surrogate_den());
    for (int n = 1; n + 1 <= mix.surrogate_index() - 1; ++n)
        CHECK(abs(v * mix.q64(n) - mix.p64(n)) < Wide(1) / mix.q64(n + 1));
}

TEST_CASE("ostrowski: spec examples and round-trip with digit bounds") {
    Frequency g = golden(20), s = sqrt2m1(20);
    SUBCASE("n=1 is b0=1") {
        auto d = ostrowski_decompose(BigInt(1), g);
        CHECK(d.coefficients == std::vector<std::int64_t>{1});
    }
    SUBCASE("n=10 over golden: 8 + 2") {
        auto d = ostrowski_decompose(BigInt(10), g);
        CHECK(d.reconstruct(g) == BigInt(10));
        // q = [1,1,2,3,5,8]: greedy picks q5=8 and q2=2
        CHECK(d.coefficients == std::vector<std::int64_t>{0, 0, 1, 0, 0, 1});
    }
    SUBCASE("n=41 over sqrt2-1: 29 + 12 under the true denominators") {
        auto d = ostrowski_decompose(BigInt(41), s);
        CHECK(d.reconstruct(s) == BigInt(41));
        CHECK(d.coefficients == std::vector<std::int64_t>{0, 0, 0, 1, 1});
    }
    SUBCASE("round-trip with digit bounds, sampled range") {
        for (const Frequency* f : {&g, &s}) {
            for (long long n = 1; n <= 3000; ++n) {
                auto d = ostrowski_decompose(BigInt(n), *f);
                CHECK(d.reconstruct(*f) == BigInt(n));
                for (std::size_t i = 0; i + 1 < d.coefficients.size(); ++i) {
                    // b_i <= q_{i+1}/q_i exactly
                    CHECK(BigInt(d.coefficients[i]) * f->denominators()[i] <=
                          f->denominators()[i + 1]);
                }
            }
        }
    }
    SUBCASE("insufficient depth raises") {
        Frequency tiny = Frequency::from_digits({1, 1, 1});
        CHECK_THROWS_AS(ostrowski_decompose(BigInt(1000), tiny), InsufficientDepth);
    }
}

TEST_CASE("classify_type: examples and horizon monotonicity") {
    CHECK(classify_type(golden(50), 50, 10).bounded);
    CHECK(classify_type(golden(50), 50, 10).bound_M == 2);
    std::vector<std::int64_t> powers;
    for (int k = 0; k < 12; ++k) powers.push_back(1LL << k);
    Frequency p2 = Frequency::from_digits(powers);
    auto v = classify_type(p2, 12, 10);
    CHECK_FALSE(v.bounded);
    CHECK(v.evidence_indices == std::vector<int>{5, 6, 7, 8, 9, 10, 11, 12});  // digits 16..2048
    auto w = classify_type(sqrt2m1(20), 20, 1);
    CHECK_FALSE(w.bounded);
    CHECK(w.evidence_indices.size() == 20);  // every digit is 2 > 1; bound-relative verdict
    // monotone in horizon: evidence never converts back to bounded
    for (int h = 13; h <= 20; ++h) {  // beyond the first offending index
        Frequency deep = Frequency::from_digits(std::vector<std::int64_t>(20, 2));
        CHECK_FALSE(classify_type(deep, h, 1).bounded);
    }
}

TEST_CASE("dc_check: examples") {
    CHECK_FALSE(dc_check(golden(40), 2.5, 0.1, 30).first_violation.has_value());
    auto v = dc_check(golden(40), 1.0, 1e6, 30);
    REQUIRE(v.first_violation.has_value());
    CHECK(*v.first_violation == 1);
    // a large digit forces |alpha - p/q| ~ 1/(a q^2) below C/q^2
    std::vector<std::int64_t> d = {1, 1, 100, 1, 1, 1, 1, 1, 1, 1, 1, 1};
    auto w = dc_check(Frequency::from_digits(d), 2.0, 0.5, 10);
    REQUIRE(w.first_violation.has_value());
    CHECK(*w.first_violation == 2);  // the convergent just before the big digit
}

TEST_CASE("unbounded_sequence: examples") {
    CHECK(unbounded_sequence(golden(40), 3.0).empty());
    Frequency mix = Frequency::from_digits({1, 2, 1, 4, 1, 8, 1, 16, 1, 32});
    auto idx = unbounded_sequence(mix, 4.0);
    // ratios q_{n+1}/q_n ~ a_{n+1}: digits 4, 8, 16, 32 sit at positions 4, 6, 8, 10
    CHECK(idx == std::vector<int>{3, 5, 7, 9});
    auto all = unbounded_sequence(golden(10), 1.0);
    CHECK(all.size() == golden(10).denominators().size() - 1);
}

TEST_CASE("reflected frequency represents 1 - alpha") {
    for (auto digits : {std::vector<std::int64_t>{1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1},
                        std::vector<std::int64_t>{2, 2, 2, 2, 2, 2, 2, 2, 2, 2},
                        std::vector<std::int64_t>{3, 1, 4, 1, 5, 9, 2, 6, 5, 3}}) {
        Frequency f = Frequency::from_digits(digits);
        Frequency r = f.reflected();
        CHECK(std::abs((1.0 - f.value()) - r.value()) < 1e-12);
    }
}

TEST_CASE("paper-literal seeding is exposed for the cf table") {
    auto lit = sqrt2m1(5).paper_literal_denominators();
    std::vector<std::int64_t> got;
    for (auto& b : lit) got.push_back(static_cast<std::int64_t>(b));
    CHECK(got == std::vector<std::int64_t>{1, 1, 3, 7, 17, 41});
}
