#pragma once

// Multiplicative arithmetic built on top of the factorizer: Mobius, the
// generalized gcd that only sees s-th power common divisors, Jordan and Klee
// totients, s-th-power divisor counts, and exact divisor-power sums.

#include <cstdint>
#include <numeric>

#include "crs/factor.hpp"
#include "crs/int128.hpp"
#include "crs/rational.hpp"

namespace crs {

inline int mobius(const Factorization& f) {
    int sign = 1;
    for (const auto& pp : f.factors) {
        if (pp.exponent > 1) return 0;
        sign = -sign;
    }
    return sign;
}

inline int mobius(std::uint64_t n) { return mobius(factorize(n)); }

// Largest l^s dividing both m and n (the generalized gcd). With s = 1 this is
// the ordinary gcd. Defined as long as m, n are not both zero; a zero argument
// acts as the absorbing element, e.g. gen_gcd(s, 0, n) is the largest s-th
// power dividing n.
inline std::uint64_t gen_gcd(unsigned s, std::uint64_t m, std::uint64_t n) {
    if (s == 0) throw DomainError("gen_gcd: s must be >= 1");
    if (m == 0 && n == 0) throw DomainError("gen_gcd: undefined for m = n = 0");
    std::uint64_t g = std::gcd(m, n);
    if (s == 1) return g;
    std::uint64_t out = 1;
    for (const auto& pp : factorize(g).factors) {
        std::uint32_t keep = pp.exponent - pp.exponent % s;
        for (std::uint32_t i = 0; i < keep; ++i) out *= pp.prime;
    }
    return out;
}

// Jordan totient J_s(n) = n^s * prod_{p | n} (1 - p^{-s}), computed exactly as
// prod p^{s(e-1)} (p^s - 1). Throws if n^s leaves the 128-bit range.
inline i128 jordan_totient(unsigned s, const Factorization& f) {
    if (s == 0) throw DomainError("jordan_totient: s must be >= 1");
    i128 out = 1;
    for (const auto& pp : f.factors) {
        i128 ps = checked_pow(i128(pp.prime), s);
        out = checked_mul(out, checked_sub(ps, 1));
        for (std::uint32_t e = 1; e < pp.exponent; ++e) out = checked_mul(out, ps);
    }
    return out;
}

inline i128 jordan_totient(unsigned s, std::uint64_t n) {
    if (n == 0) throw DomainError("jordan_totient: n must be >= 1");
    return jordan_totient(s, factorize(n));
}

// Klee totient: the count of 1 <= m <= n with gen_gcd(s, m, n) = 1. Equals
// n * prod (1 - p^{-s}) over primes whose s-th power divides n; each division
// below is exact because p^s | n for every prime in the product.
inline std::uint64_t klee_phi(unsigned s, std::uint64_t n) {
    if (s == 0) throw DomainError("klee_phi: s must be >= 1");
    if (n == 0) throw DomainError("klee_phi: n must be >= 1");
    std::uint64_t out = n;
    for (const auto& pp : factorize(n).factors) {
        if (pp.exponent < s) continue;
        std::uint64_t ps = 1;
        for (std::uint32_t i = 0; i < s; ++i) ps *= pp.prime;
        out = out / ps * (ps - 1);
    }
    return out;
}

// Number of s-th powers dividing n (l = 1 included); tau_1 is the ordinary
// divisor count.
inline std::uint64_t tau_s(unsigned s, const Factorization& f) {
    if (s == 0) throw DomainError("tau_s: s must be >= 1");
    std::uint64_t out = 1;
    for (const auto& pp : f.factors) out *= pp.exponent / s + 1;
    return out;
}

inline std::uint64_t tau_s(unsigned s, std::uint64_t n) {
    if (n == 0) throw DomainError("tau_s: n must be >= 1");
    return tau_s(s, factorize(n));
}

// sigma_t(n) = sum of d^t over divisors d of n, exact for any integer t.
// Negative t gives the exact rational sigma_{|t|}(n) / n^{|t|}.
inline Rational sigma(int t, const Factorization& f) {
    unsigned at = unsigned(t < 0 ? -t : t);
    Rational pos(1);
    for (const auto& pp : f.factors) {
        // 1 + p^t + ... + p^{t e}
        Rational geom(1);
        Rational ppow(1);
        i128 pt = checked_pow(i128(pp.prime), at);
        for (std::uint32_t e = 1; e <= pp.exponent; ++e) {
            ppow = ppow * Rational(pt);
            geom = geom + ppow;
        }
        pos = pos * geom;
    }
    if (t >= 0) return pos;
    // sigma_{-t}(n) = sigma_t(n) / n^t, exactly.
    return pos / pow(Rational(i128(f.n)), at);
}

inline Rational sigma(int t, std::uint64_t n) {
    if (n == 0) throw DomainError("sigma: n must be >= 1");
    return sigma(t, factorize(n));
}

// Sum of the s-th power divisors of n: sum of d^s over d with d^s | n.
inline i128 sigma_spower(unsigned s, const Factorization& f) {
    if (s == 0) throw DomainError("sigma_spower: s must be >= 1");
    i128 out = 1;
    for (const auto& pp : f.factors) {
        i128 ps = checked_pow(i128(pp.prime), s);
        i128 geom = 1;
        i128 term = 1;
        for (std::uint32_t j = 1; j <= pp.exponent / s; ++j) {
            term = checked_mul(term, ps);
            geom = checked_add(geom, term);
        }
        out = checked_mul(out, geom);
    }
    return out;
}

inline i128 sigma_spower(unsigned s, std::uint64_t n) {
    if (n == 0) throw DomainError("sigma_spower: n must be >= 1");
    return sigma_spower(s, factorize(n));
}

}  // namespace crs
