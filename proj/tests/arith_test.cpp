#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "crs/arith.hpp"
#include "crs/factor.hpp"
#include "crs/zeta.hpp"
#include "oracles.hpp"

using crs::i128;

namespace {

crs::Factorization fz(std::uint64_t n) { return crs::factorize(n); }

TEST(Factorize, MatchesTrialDivisionOnRange) {
    for (std::uint64_t n = 1; n <= 5000; ++n) {
        auto ours = fz(n);
        auto ref = oracle::trial_factor(n);
        ASSERT_EQ(ours.factors.size(), ref.size()) << "n=" << n;
        for (std::size_t i = 0; i < ref.size(); ++i) {
            EXPECT_EQ(ours.factors[i].prime, ref[i].first) << "n=" << n;
            EXPECT_EQ(ours.factors[i].exponent, ref[i].second) << "n=" << n;
        }
    }
}

TEST(Factorize, LargeSemiprimeSplits) {
    auto f = fz(600851475143ull);
    std::vector<std::uint64_t> primes;
    for (auto& pp : f.factors) {
        EXPECT_EQ(pp.exponent, 1u);
        primes.push_back(pp.prime);
    }
    EXPECT_EQ(primes, (std::vector<std::uint64_t>{71, 839, 1471, 6857}));
}

TEST(Factorize, PollardPathHandlesBigCofactors) {
    // Both factors exceed the 10^6 trial-division horizon.
    std::uint64_t p = 1000003, q = 1000033;
    auto f = fz(p * q);
    ASSERT_EQ(f.factors.size(), 2u);
    EXPECT_EQ(f.factors[0].prime, p);
    EXPECT_EQ(f.factors[1].prime, q);

    // Large prime detected as such.
    auto g = fz((1ull << 61) - 1);
    ASSERT_EQ(g.factors.size(), 1u);
    EXPECT_EQ(g.factors[0].prime, (1ull << 61) - 1);
    EXPECT_EQ(g.factors[0].exponent, 1u);

    // Square of a large prime.
    auto h = fz(1000003ull * 1000003ull);
    ASSERT_EQ(h.factors.size(), 1u);
    EXPECT_EQ(h.factors[0].prime, 1000003ull);
    EXPECT_EQ(h.factors[0].exponent, 2u);
}

TEST(Factorize, RejectsOutOfRange) {
    EXPECT_THROW(crs::factorize(0), crs::DomainError);
    EXPECT_THROW(crs::factorize(0x8000000000000000ull), crs::DomainError);
}

TEST(Mobius, ValuesAndDivisorSum) {
    EXPECT_EQ(crs::mobius(1), 1);
    EXPECT_EQ(crs::mobius(2), -1);
    EXPECT_EQ(crs::mobius(4), 0);
    EXPECT_EQ(crs::mobius(6), 1);
    EXPECT_EQ(crs::mobius(30), -1);
    // sum_{d | n} mu(d) vanishes except at n = 1.
    for (std::uint64_t n = 1; n <= 2000; ++n) {
        int total = 0;
        for (std::uint64_t d : crs::divisors(fz(n))) total += crs::mobius(d);
        EXPECT_EQ(total, n == 1 ? 1 : 0) << "n=" << n;
    }
}

TEST(GenGcd, MatchesScanOracle) {
    for (unsigned s = 1; s <= 3; ++s)
        for (std::uint64_t m = 1; m <= 60; ++m)
            for (std::uint64_t n = 1; n <= 60; ++n)
                ASSERT_EQ(crs::gen_gcd(s, m, n), oracle::gen_gcd(s, m, n))
                    << "s=" << s << " m=" << m << " n=" << n;
}

TEST(GenGcd, KnownValuesAndEdges) {
    EXPECT_EQ(crs::gen_gcd(2, 4, 8), 4u);
    EXPECT_EQ(crs::gen_gcd(1, 12, 18), 6u);
    EXPECT_EQ(crs::gen_gcd(2, 5, 7), 1u);
    EXPECT_EQ(crs::gen_gcd(3, 216, 216), 216u);
    // Zero as absorbing element.
    EXPECT_EQ(crs::gen_gcd(2, 0, 48), 16u);
    EXPECT_EQ(crs::gen_gcd(2, 48, 0), 16u);
    EXPECT_THROW(crs::gen_gcd(2, 0, 0), crs::DomainError);
    EXPECT_THROW(crs::gen_gcd(0, 3, 5), crs::DomainError);
}

TEST(GenGcd, PowerIdentities) {
    // gen_gcd(s, m^s, n^s) = gcd(m,n)^s, and together with lcm it recovers
    // the full product m^s * n^s.
    for (unsigned s = 1; s <= 3; ++s) {
        for (std::uint64_t m = 1; m <= 200; ++m) {
            for (std::uint64_t n = 1; n <= 200; ++n) {
                std::uint64_t ms = 1, ns = 1, gs = 1;
                for (unsigned i = 0; i < s; ++i) {
                    ms *= m;
                    ns *= n;
                    gs *= std::gcd(m, n);
                }
                std::uint64_t g = crs::gen_gcd(s, ms, ns);
                ASSERT_EQ(g, gs) << "s=" << s << " m=" << m << " n=" << n;
                i128 lcm = i128(ms) / i128(std::gcd(ms, ns)) * i128(ns);
                ASSERT_EQ(i128(g) * lcm, i128(ms) * i128(ns))
                    << "s=" << s << " m=" << m << " n=" << n;
            }
        }
    }
}

TEST(JordanTotient, MatchesTupleCountOracle) {
    for (std::uint64_t n = 1; n <= 40; ++n)
        ASSERT_EQ(crs::jordan_totient(1, n), i128(oracle::jordan_count(1, n))) << n;
    for (std::uint64_t n = 1; n <= 30; ++n)
        ASSERT_EQ(crs::jordan_totient(2, n), i128(oracle::jordan_count(2, n))) << n;
    for (std::uint64_t n = 1; n <= 12; ++n)
        ASSERT_EQ(crs::jordan_totient(3, n), i128(oracle::jordan_count(3, n))) << n;
}

TEST(JordanTotient, KnownValues) {
    EXPECT_EQ(crs::jordan_totient(2, 2), i128(3));
    EXPECT_EQ(crs::jordan_totient(2, 6), i128(24));
    EXPECT_EQ(crs::jordan_totient(1, 6), i128(2));
    EXPECT_EQ(crs::jordan_totient(1, 1), i128(1));
}

TEST(JordanTotient, DivisorSumsRecoverPowers) {
    // sum_{d | n} J_s(d) = n^s, and the same with the Klee totient of d^s.
    for (unsigned s = 1; s <= 3; ++s) {
        for (std::uint64_t n = 1; n <= 2000; ++n) {
            i128 ns = crs::checked_pow(i128(n), s);
            i128 sum_j = 0;
            i128 sum_k = 0;
            for (std::uint64_t d : crs::divisors(fz(n))) {
                sum_j += crs::jordan_totient(s, d);
                std::uint64_t dpow = 1;
                for (unsigned i = 0; i < s; ++i) dpow *= d;
                sum_k += i128(crs::klee_phi(s, dpow));
            }
            ASSERT_EQ(sum_j, ns) << "s=" << s << " n=" << n;
            ASSERT_EQ(sum_k, ns) << "s=" << s << " n=" << n;
        }
    }
}

TEST(KleePhi, MatchesDefinitionalCount) {
    // Exhaustive check against the literal definition.
    for (unsigned s = 1; s <= 3; ++s) {
        // Precompute the largest s-th power dividing each g (1 means coprime
        // in the generalized sense when applied to gcd values).
        const std::uint32_t limit = 10000;
        std::vector<std::uint32_t> spart(limit + 1, 1);
        for (std::uint64_t l = 2;; ++l) {
            std::uint64_t ls = 1;
            for (unsigned i = 0; i < s; ++i) ls *= l;
            if (ls > limit) break;
            for (std::uint64_t v = ls; v <= limit; v += ls)
                if (ls > spart[v]) spart[v] = std::uint32_t(ls);
        }
        for (std::uint32_t n = 1; n <= limit; ++n) {
            std::uint64_t count = 0;
            for (std::uint32_t m = 1; m <= n; ++m)
                if (spart[std::gcd(m, n)] == 1) ++count;
            ASSERT_EQ(crs::klee_phi(s, n), count) << "s=" << s << " n=" << n;
        }
    }
}

TEST(KleePhi, KnownValues) {
    EXPECT_EQ(crs::klee_phi(2, 4), 3u);
    EXPECT_EQ(crs::klee_phi(2, 8), 6u);
    EXPECT_EQ(crs::klee_phi(1, 10), 4u);
    // On s-th powers the Klee totient is the Jordan totient of the base.
    for (unsigned s = 1; s <= 3; ++s)
        for (std::uint64_t n = 1; n <= 50; ++n) {
            std::uint64_t npow = 1;
            for (unsigned i = 0; i < s; ++i) npow *= n;
            EXPECT_EQ(i128(crs::klee_phi(s, npow)), crs::jordan_totient(s, n))
                << "s=" << s << " n=" << n;
        }
}

TEST(TauS, MatchesScanOracle) {
    for (unsigned s = 1; s <= 3; ++s)
        for (std::uint64_t n = 1; n <= 3000; ++n)
            ASSERT_EQ(crs::tau_s(s, n), oracle::tau_s(s, n)) << "s=" << s << " n=" << n;
    EXPECT_EQ(crs::tau_s(2, 16), 3u);
    EXPECT_EQ(crs::tau_s(1, 6), 4u);
    EXPECT_EQ(crs::tau_s(2, 7), 1u);
}

TEST(Sigma, MatchesScanOracleAndStaysExact) {
    for (unsigned t = 0; t <= 3; ++t)
        for (std::uint64_t n = 1; n <= 500; ++n) {
            crs::Rational v = crs::sigma(int(t), n);
            ASSERT_TRUE(v.is_integer());
            ASSERT_EQ(v.num(), oracle::sigma(t, n)) << "t=" << t << " n=" << n;
        }
    EXPECT_EQ(crs::sigma(1, 6), crs::Rational(12));
    EXPECT_EQ(crs::sigma(2, 4), crs::Rational(21));
    EXPECT_EQ(crs::sigma(-5, 1), crs::Rational(1));
    EXPECT_EQ(crs::sigma(-5, 2), crs::Rational(33, 32));
    // Negative exponent is the exact mirror: sigma_{-t}(n) * n^t = sigma_t(n).
    for (unsigned t = 1; t <= 4; ++t)
        for (std::uint64_t n = 1; n <= 300; ++n) {
            crs::Rational neg = crs::sigma(-int(t), n);
            crs::Rational mirrored = neg * crs::pow(crs::Rational(i128(n)), t);
            ASSERT_EQ(mirrored, crs::sigma(int(t), n)) << "t=" << t << " n=" << n;
        }
}

TEST(SigmaSpower, MatchesScanOracle) {
    for (unsigned s = 1; s <= 3; ++s)
        for (std::uint64_t n = 1; n <= 3000; ++n)
            ASSERT_EQ(crs::sigma_spower(s, n), oracle::sigma_spower(s, n))
                << "s=" << s << " n=" << n;
    EXPECT_EQ(crs::sigma_spower(2, 16), i128(21));
    EXPECT_EQ(crs::sigma_spower(1, 6), i128(12));
    EXPECT_EQ(crs::sigma_spower(3, 5), i128(1));
}

TEST(Multiplicative, CoprimeProductsFactor) {
    for (std::uint64_t a = 1; a <= 100; ++a)
        for (std::uint64_t b = 1; b <= 100; ++b) {
            if (std::gcd(a, b) != 1) continue;
            ASSERT_EQ(crs::mobius(a * b), crs::mobius(a) * crs::mobius(b));
            for (unsigned s = 1; s <= 2; ++s)
                ASSERT_EQ(crs::jordan_totient(s, a * b),
                          crs::jordan_totient(s, a) * crs::jordan_totient(s, b));
            for (int t = -2; t <= 2; ++t)
                ASSERT_EQ(crs::sigma(t, a * b), crs::sigma(t, a) * crs::sigma(t, b));
        }
}

TEST(Zeta, MatchesClosedFormsWithinReportedBounds) {
    crs::RealApprox z2 = crs::zeta(2.0);
    double pi = std::numbers::pi;
    EXPECT_LE(z2.abs_error_bound, 1e-12);
    EXPECT_TRUE(z2.contains(pi * pi / 6.0)) << z2.value;

    crs::RealApprox z6 = crs::zeta(6.0);
    EXPECT_LE(z6.abs_error_bound, 1e-12);
    EXPECT_TRUE(z6.contains(std::pow(pi, 6) / 945.0)) << z6.value;

    EXPECT_NEAR(crs::zeta(2.0).value, 1.6449340668, 1e-9);
    EXPECT_NEAR(crs::zeta(6.0).value, 1.0173430619, 1e-9);
    EXPECT_NEAR(crs::zeta(20.0).value, 1.0000009540, 1e-9);

    EXPECT_THROW(crs::zeta(1.0), crs::DomainError);
    EXPECT_THROW(crs::zeta(0.5), crs::DomainError);
}

TEST(Zeta, EulerProductCrossCheck) {
    for (double x : {2.0, 3.0, 4.0, 6.0}) {
        crs::RealApprox series = crs::zeta(x);
        crs::RealApprox product = crs::zeta_euler_product(x, 100000);
        EXPECT_LE(std::abs(series.value - product.value),
                  series.abs_error_bound + product.abs_error_bound)
            << "x=" << x;
    }
}

TEST(EulerGamma, StableAndConsistentWithHarmonicSums) {
    crs::RealApprox g = crs::euler_gamma();
    EXPECT_LE(g.abs_error_bound, 1e-9);
    EXPECT_NEAR(g.value, 0.5772156649015329, 1e-9);
    // |H_x - log x - gamma| <= 1/x.
    for (std::uint64_t x : {1000ull, 10000ull, 100000ull}) {
        double drift = crs::harmonic_sum(x) - std::log(double(x)) - g.value;
        EXPECT_LE(std::abs(drift), 1.0 / double(x)) << "x=" << x;
    }
}

TEST(CheckedArithmetic, OverflowIsAnErrorNotAWrap) {
    EXPECT_THROW(crs::checked_pow(i128(10), 40), crs::OverflowError);
    EXPECT_NO_THROW(crs::checked_pow(i128(10), 37));
    EXPECT_THROW(crs::jordan_totient(3, 1ull << 61), crs::OverflowError);
    EXPECT_THROW(crs::SPower(1u << 30, 5), crs::OverflowError);
    crs::SPower ok(7, 3);
    EXPECT_EQ(ok.value, i128(343));
}

TEST(Rational, ParseAndArithmetic) {
    using crs::Rational;
    EXPECT_EQ(Rational::parse("33/32"), Rational(33, 32));
    EXPECT_EQ(Rational::parse("-6/4"), Rational(-3, 2));
    EXPECT_EQ(Rational::parse("17"), Rational(17));
    EXPECT_THROW(Rational::parse("1/0"), crs::ParseError);
    EXPECT_THROW(Rational::parse("x"), crs::ParseError);
    EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
    EXPECT_EQ(Rational(2, 3) * Rational(9, 4), Rational(3, 2));
    EXPECT_EQ((Rational(5, 7) / Rational(5, 7)), Rational(1));
    EXPECT_EQ(Rational(7, 2).str(), "7/2");
    EXPECT_EQ(Rational(-8, 2).str(), "-4");
}

}  // namespace
