#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rigidity/errors.hpp"
#include "rigidity/roof.hpp"
#include "rigidity/util.hpp"

using namespace rigidity;

namespace {
Frequency golden(int depth = 60) {
    return Frequency::from_digits(std::vector<std::int64_t>(static_cast<std::size_t>(depth), 1));
}
}  // namespace

TEST_CASE("eval_roof examples") {
    RoofFunction saw(1.0, 0.0);
    CHECK(saw.eval(0.25) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(saw.eval(0.0) == 0.0);  // {0} = 0, f(0) = f_ac(0)
    RoofFunction c(0.0, 1.0, {{1, 0.1, 0.0}});
    CHECK(c.eval(0.5) == doctest::Approx(0.9).epsilon(1e-15));
    RoofFunction m(2.0, 0.0, {{1, 0.0, 0.3}});
    // 2*0.75 + 0.3 sin(1.5 pi) = 1.2
    CHECK(m.eval(0.75) == doctest::Approx(1.2).epsilon(1e-14));
}

TEST_CASE("mean, variation and certified bounds") {
    RoofFunction f(1.0, 0.2, {{1, 0.0, 0.1}});
    CHECK(f.mean() == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(f.variation_bound() ==
          doctest::Approx(1.0 + 2 * std::numbers::pi * 0.1).epsilon(1e-12));
    CHECK(f.inf_certified() > 0.19);
    CHECK(f.inf_certified() <= 0.2);
    Rng rng(7);
    for (int i = 0; i < 20000; ++i) {
        double v = f.eval(rng.uniform());
        CHECK(v >= f.inf_certified());
        CHECK(v <= f.sup_certified());
    }
}

TEST_CASE("roof serialization round-trips") {
    RoofFunction f(2.0, 0.4, {{1, 0.1, 0.0}, {3, -0.05, 0.2}});
    RoofFunction g = RoofFunction::parse(f.serialize());
    CHECK(g.jump() == f.jump());
    CHECK(g.constant() == f.constant());
    REQUIRE(g.harmonics().size() == 2);
    CHECK(g.harmonics()[1].sin_coef == f.harmonics()[1].sin_coef);
    CHECK_THROWS_AS(RoofFunction::parse("c0=1"), ConfigError);
    CHECK_THROWS_AS(RoofFunction::parse("jump=1; q:2=1,0"), ConfigError);
}

TEST_CASE("birkhoff_sum basics") {
    Frequency a = golden();
    RoofFunction saw(1.0, 0.0);
    CHECK(birkhoff_sum(saw, a, 0.123, 0) == 0.0);
    CHECK(birkhoff_sum(saw, a, 0.3, 1) == doctest::Approx(0.3).epsilon(1e-15));
    // two-term direct sum: {0} + {alpha}
    CHECK(birkhoff_sum(saw, a, 0.0, 2) == doctest::Approx(a.value()).epsilon(1e-12));
    // sign convention: f^{(-n)}(x) = -f^{(n)}(x - n alpha)
    double x = 0.37;
    for (std::int64_t n : {1, 5, 40}) {
        double lhs = birkhoff_sum(saw, a, x, -n);
        double rhs = -birkhoff_sum(saw, a, x - static_cast<double>(n) * a.value(), n);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("cocycle identity over mixed signs") {
    Frequency a = golden();
    RoofFunction f(1.0, 0.2, {{1, 0.0, 0.1}});
    Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        auto m = rng.uniform_int(-100000, 100000);
        auto n = rng.uniform_int(-100000, 100000);
        double x = rng.uniform();
        double lhs = birkhoff_sum(f, a, x, m + n);
        double rhs = birkhoff_sum(f, a, x, m) +
                     birkhoff_sum(f, a, x + static_cast<double>(m) * a.value(), n);
        CHECK(std::abs(lhs - rhs) < 1e-9);
    }
}

TEST_CASE("exact-rational oracle agrees with the compensated path") {
    // alpha = [2,2,2,2,2] is exactly 29/70 through the surrogate
    Frequency a = Frequency::from_digits({2, 2, 2, 2, 2});
    REQUIRE(a.surrogate_num() == 29);
    REQUIRE(a.surrogate_den() == 70);
    RoofFunction f(1.0, 0.25);  // A=1, c0=1/4, no harmonics
    BigInt denom;
    BigInt num = birkhoff_sum_rational_num(1, 1, 1, 4, 29, 70, 1, 3, 10000, denom);
    double exact = static_cast<double>(num) / static_cast<double>(denom);
    double approx = birkhoff_sum(f, a, 1.0 / 3.0, 10000);
    CHECK(std::abs(exact - approx) < 1e-8);
}

TEST_CASE("mean consistency at a large denominator time") {
    Frequency a = golden();
    RoofFunction f(1.0, 0.0);
    std::int64_t q = a.q64(24);  // 75025
    Rng rng(3);
    for (int i = 0; i < 5; ++i) {
        double x = rng.uniform();
        double dev = std::abs(birkhoff_sum(f, a, x, q) / static_cast<double>(q) - f.mean());
        CHECK(dev <= f.variation_bound() / static_cast<double>(q) + 1e-9);
    }
}

TEST_CASE("dk_audit: constant roof has zero deviation; sawtooth within Var") {
    Frequency a = golden();
    RoofFunction c(0.0, 3.0);
    auto rep = dk_audit(c, a, 2, 8, 200, 11);
    for (const auto& r : rep.records) CHECK(r.sup_deviation < 1e-9);
    RoofFunction saw(1.0, 0.0);
    auto rep2 = dk_audit(saw, a, 2, 12, 2000, 11);
    CHECK(rep2.all_within_variation);
    CHECK(rep2.variation_bound == 1.0);
    RoofFunction cosr(0.0, 0.0, {{1, 1.0, 0.0}});
    auto rep3 = dk_audit(cosr, a, 2, 12, 2000, 11);
    CHECK(rep3.all_within_variation);
    CHECK(rep3.variation_bound == doctest::Approx(2 * std::numbers::pi));
}

TEST_CASE("normalize_positive_jump") {
    Frequency a = golden();
    RoofFunction f(1.0, 0.2);
    SUBCASE("positive jump passes through") {
        auto n = normalize_positive_jump(a, f);
        CHECK_FALSE(n.reflected);
        CHECK(n.roof.jump() == 1.0);
    }
    SUBCASE("zero jump is rejected") {
        CHECK_THROWS_AS(normalize_positive_jump(a, RoofFunction(0.0, 1.0)), ZeroJump);
    }
    SUBCASE("A=-1, f_ac=0: jump +1, constant A_f = -1, rotation 1-alpha") {
        auto n = normalize_positive_jump(a, RoofFunction(-1.0, 0.0));
        CHECK(n.reflected);
        CHECK(n.roof.jump() == 1.0);
        CHECK(n.roof.constant() == -1.0);
        CHECK(std::abs(n.alpha.value() - (1.0 - a.value())) < 1e-12);
    }
    SUBCASE("A=-2 with a sine part: sin flips sign") {
        auto n = normalize_positive_jump(a, RoofFunction(-2.0, 0.0, {{1, 0.0, 0.1}}));
        CHECK(n.roof.jump() == 2.0);
        CHECK(n.roof.constant() == -2.0);
        CHECK(n.roof.harmonics()[0].sin_coef == doctest::Approx(-0.1));
    }
    SUBCASE("conjugacy: reflected Birkhoff sums match at reflected points") {
        RoofFunction neg(-1.0, 1.4, {{1, 0.05, 0.02}});  // positive roof with A < 0
        auto n = normalize_positive_jump(a, neg);
        Rng rng(5);
        for (int i = 0; i < 10; ++i) {
            double x = rng.uniform();
            auto steps = rng.uniform_int(1, 1000);
            double orig = birkhoff_sum(neg, a, x, steps);
            double refl = birkhoff_sum(n.roof, n.alpha, frac(1.0 - x), steps);
            CHECK(std::abs(orig - refl) < 1e-10);
        }
    }
}
