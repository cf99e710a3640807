#pragma once

// Prime sieves shared by the factorizer and the bulk tabulation routines.

#include <cstdint>
#include <vector>

#include "crs/int128.hpp"

namespace crs {

// Primes up to limit (inclusive), classic odd-only Eratosthenes.
inline std::vector<std::uint32_t> primes_up_to(std::uint32_t limit) {
    std::vector<std::uint32_t> out;
    if (limit < 2) return out;
    out.push_back(2);
    const std::uint32_t half = (limit - 1) / 2;  // index i <-> odd 2i+3
    std::vector<bool> composite(half, false);
    for (std::uint32_t i = 0; i < half; ++i) {
        if (composite[i]) continue;
        std::uint64_t p = 2ull * i + 3;
        out.push_back(std::uint32_t(p));
        for (std::uint64_t j = (p * p - 3) / 2; j < half; j += p) composite[std::size_t(j)] = true;
    }
    return out;
}

// Smallest-prime-factor table; spf[n] == n exactly when n is prime (spf[0],
// spf[1] are 0). Drives linear-time factorization of every n <= limit.
class SpfTable {
public:
    explicit SpfTable(std::uint32_t limit) : spf_(std::size_t(limit) + 1, 0) {
        for (std::uint64_t i = 2; i <= limit; ++i) {
            if (spf_[std::size_t(i)] == 0)
                for (std::uint64_t j = i; j <= limit; j += i)
                    if (spf_[std::size_t(j)] == 0) spf_[std::size_t(j)] = std::uint32_t(i);
        }
    }

    std::uint32_t limit() const { return std::uint32_t(spf_.size() - 1); }
    std::uint32_t operator[](std::uint32_t n) const { return spf_[n]; }

    // (prime, exponent) pairs in increasing prime order.
    void factor(std::uint32_t n, std::vector<std::pair<std::uint32_t, std::uint32_t>>& out) const {
        out.clear();
        while (n > 1) {
            std::uint32_t p = spf_[n];
            std::uint32_t e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            out.emplace_back(p, e);
        }
    }

private:
    std::vector<std::uint32_t> spf_;
};

}  // namespace crs
