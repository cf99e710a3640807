#pragma once

// Integer factorization for the full unsigned 64-bit range (1 <= n < 2^63):
// trial division over a cached prime table up to 10^6, then deterministic
// Miller-Rabin plus Brent's variant of Pollard rho for what remains. All
// paths are deterministic; rho's parameters are fixed, not random.

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "crs/int128.hpp"
#include "crs/primes.hpp"

namespace crs {

struct PrimePower {
    std::uint64_t prime = 0;
    std::uint32_t exponent = 0;
    bool operator==(const PrimePower&) const = default;
};

// Prime factorization sorted by prime; empty for n = 1.
struct Factorization {
    std::uint64_t n = 1;
    std::vector<PrimePower> factors;
};

namespace detail {

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return std::uint64_t(u128(a) * b % m);
}

inline std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t r = m > 1 ? 1 : 0;
    base %= m;
    while (exp > 0) {
        if (exp & 1ull) r = mulmod_u64(r, base, m);
        base = mulmod_u64(base, base, m);
        exp >>= 1ull;
    }
    return r;
}

inline const std::vector<std::uint32_t>& small_primes() {
    static const std::vector<std::uint32_t> table = primes_up_to(1000000);
    return table;
}

// Deterministic Miller-Rabin; this base set decides primality for all n < 2^64.
inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1ull) == 0) {
        d >>= 1ull;
        ++s;
    }
    for (std::uint64_t a : {2ull, 325ull, 9375ull, 28178ull, 450775ull, 9780504ull, 1795265022ull}) {
        std::uint64_t x = powmod_u64(a % n, d, n);
        if (x <= 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

// Brent's cycle-detection form of Pollard rho. Deterministic: the polynomial
// constant c walks 1, 2, 3, ... until a nontrivial factor appears.
inline std::uint64_t pollard_brent(std::uint64_t n) {
    if ((n & 1ull) == 0) return 2;
    for (std::uint64_t c = 1;; ++c) {
        auto step = [n, c](std::uint64_t v) { return (mulmod_u64(v, v, n) + c) % n; };
        std::uint64_t x = 2, y = 2, ys = 2, d = 1, q = 1, r = 1;
        const std::uint64_t m = 128;
        while (d == 1) {
            x = y;
            for (std::uint64_t i = 0; i < r; ++i) y = step(y);
            for (std::uint64_t k = 0; k < r && d == 1; k += m) {
                ys = y;
                std::uint64_t lim = std::min(m, r - k);
                for (std::uint64_t i = 0; i < lim; ++i) {
                    y = step(y);
                    q = mulmod_u64(q, x > y ? x - y : y - x, n);
                }
                d = std::uint64_t(gcd_u128(q, n));
            }
            r <<= 1ull;
        }
        if (d == n) {
            // Batched gcd jumped past the factor; replay one step at a time.
            d = 1;
            while (d == 1) {
                ys = step(ys);
                d = std::uint64_t(gcd_u128(x > ys ? x - ys : ys - x, n));
            }
        }
        if (d != n && d != 0) return d;
    }
}

inline void factor_recurse(std::uint64_t n, std::vector<std::uint64_t>& primes_out) {
    while (n > 1) {
        if (is_prime_u64(n)) {
            primes_out.push_back(n);
            return;
        }
        std::uint64_t d = pollard_brent(n);
        factor_recurse(d, primes_out);
        n /= d;
    }
}

}  // namespace detail

inline bool is_prime(std::uint64_t n) { return detail::is_prime_u64(n); }

// Factorize 1 <= n <= 2^63 - 1.
inline Factorization factorize(std::uint64_t n) {
    if (n == 0) throw DomainError("factorize: n must be >= 1");
    if (n > 0x7fffffffffffffffull) throw DomainError("factorize: n exceeds 2^63 - 1");
    Factorization f;
    f.n = n;
    std::uint64_t rest = n;
    for (std::uint32_t p : detail::small_primes()) {
        if (std::uint64_t(p) * p > rest) break;
        if (rest % p == 0) {
            std::uint32_t e = 0;
            while (rest % p == 0) {
                rest /= p;
                ++e;
            }
            f.factors.push_back({p, e});
        }
    }
    if (rest > 1) {
        std::vector<std::uint64_t> big;
        detail::factor_recurse(rest, big);
        std::sort(big.begin(), big.end());
        for (std::size_t i = 0; i < big.size();) {
            std::size_t j = i;
            while (j < big.size() && big[j] == big[i]) ++j;
            f.factors.push_back({big[i], std::uint32_t(j - i)});
            i = j;
        }
    }
    std::sort(f.factors.begin(), f.factors.end(),
              [](const PrimePower& a, const PrimePower& b) { return a.prime < b.prime; });
    return f;
}

// All divisors of the factored n, ascending. Count is tau(n); callers keep n
// modest so the list stays small.
inline std::vector<std::uint64_t> divisors(const Factorization& f) {
    std::vector<std::uint64_t> out{1};
    for (const auto& pp : f.factors) {
        std::size_t base = out.size();
        std::uint64_t pe = 1;
        for (std::uint32_t e = 1; e <= pp.exponent; ++e) {
            pe *= pp.prime;
            for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pe);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace crs
