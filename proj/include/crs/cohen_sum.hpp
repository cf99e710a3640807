#pragma once

// The generalized Ramanujan sum c_r^s(n): the sum of e^{2*pi*i*n*h / r^s} over
// 1 <= h <= r^s whose generalized gcd with r^s is 1.
//
// Three evaluators with one value:
//   crs_exact   - canonical integer evaluator via the Mobius-over-divisors
//                 form  sum_{d | r, d^s | n} mu(r/d) d^s.
//   crs_fast    - same recurrence collapsed per prime power and multiplied
//                 out; bitwise-equal to crs_exact by contract.
//   crs_direct  - floating-point exponential sum straight from the
//                 definition; the independent oracle the others are audited
//                 against. Rounds to integer only inside hard tolerances.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "crs/arith.hpp"
#include "crs/factor.hpp"
#include "crs/int128.hpp"
#include "crs/real_approx.hpp"
#include "crs/summation.hpp"

namespace crs {

// r and s bundled with the (checked) modulus r^s and r's factorization, so
// repeated evaluations do not refactorize.
struct CrsParams {
    std::uint64_t r = 1;
    unsigned s = 1;
    i128 modulus = 1;  // r^s
    Factorization r_fact;

    CrsParams(std::uint64_t r_, unsigned s_) : r(r_), s(s_) {
        if (r_ == 0) throw DomainError("CrsParams: r must be >= 1");
        if (s_ == 0) throw DomainError("CrsParams: s must be >= 1");
        modulus = checked_pow(i128(r_), s_);
        r_fact = factorize(r_);
    }

    // For bulk callers that already factored r (e.g. via an SpfTable).
    CrsParams(unsigned s_, Factorization f) : r(f.n), s(s_), r_fact(std::move(f)) {
        if (r == 0) throw DomainError("CrsParams: r must be >= 1");
        if (s_ == 0) throw DomainError("CrsParams: s must be >= 1");
        modulus = checked_pow(i128(r), s_);
    }
};

inline i128 crs_exact(const CrsParams& p, u128 n) {
    // Reduce n modulo the period r^s first; d^s | r^s for every d | r, so the
    // divisibility tests below are unaffected.
    u128 n_red = n % u128(p.modulus);
    // mu(r/d) != 0 only when d takes exponent e_p or e_p - 1 at every prime,
    // so the sum has exactly 2^omega(r) live terms, one per prime subset.
    const auto& fs = p.r_fact.factors;
    const std::size_t w = fs.size();
    i128 total = 0;
    for (std::uint32_t mask = 0; mask < (1u << w); ++mask) {
        i128 ds = 1;  // d^s for this subset
        int sign = 1;
        for (std::size_t i = 0; i < w; ++i) {
            std::uint32_t e = fs[i].exponent;
            if (mask & (1u << i)) {
                sign = -sign;
                --e;  // drop one power of this prime from d
            }
            ds = checked_mul(ds, checked_pow(i128(fs[i].prime), e * p.s));
        }
        if (n_red % u128(ds) == 0) total = sign > 0 ? checked_add(total, ds) : checked_sub(total, ds);
    }
    return total;
}

inline i128 crs_exact(std::uint64_t r, unsigned s, u128 n) {
    return crs_exact(CrsParams(r, s), n);
}

// Performance path: the same Mobius recurrence evaluated per prime power
// (where it collapses to at most two terms) and multiplied across the
// factorization. Contract: bitwise equality with crs_exact.
inline i128 crs_fast(const CrsParams& p, u128 n) {
    u128 n_red = n % u128(p.modulus);
    i128 total = 1;
    for (const auto& pp : p.r_fact.factors) {
        i128 top = checked_pow(i128(pp.prime), pp.exponent * p.s);
        i128 below = checked_pow(i128(pp.prime), (pp.exponent - 1) * p.s);
        i128 local = 0;
        if (n_red % u128(top) == 0) local = checked_add(local, top);
        if (n_red % u128(below) == 0) local = checked_sub(local, below);
        if (local == 0) return 0;
        total = checked_mul(total, local);
    }
    return total;
}

inline i128 crs_fast(std::uint64_t r, unsigned s, u128 n) {
    return crs_fast(CrsParams(r, s), n);
}

namespace detail {

inline constexpr std::uint64_t kDirectModulusLimit = 1000000;

// Unit flags for h in [1, M], M = r^s: true when gen_gcd(s, h, M) == 1.
inline std::vector<bool> direct_units(const CrsParams& p) {
    std::uint64_t m = std::uint64_t(p.modulus);
    std::vector<bool> unit(m + 1, false);
    for (std::uint64_t h = 1; h <= m; ++h) unit[h] = gen_gcd(p.s, h, m) == 1;
    return unit;
}

}  // namespace detail

// Definition-level oracle: sums the complex exponentials term by term.
// Requires r^s <= 10^6. Throws ToleranceError if the result strays more than
// 1e-6 from a real integer; that would mean the evaluators cannot be trusted.
inline RealApprox crs_direct(const CrsParams& p, u128 n) {
    if (p.modulus > i128(detail::kDirectModulusLimit))
        throw DomainError("crs_direct: r^s exceeds the oracle limit 10^6");
    const std::uint64_t m = std::uint64_t(p.modulus);
    const u128 n_red = n % m;
    NeumaierSum re, im;
    for (std::uint64_t h = 1; h <= m; ++h) {
        if (gen_gcd(p.s, h, m) != 1) continue;
        std::uint64_t k = std::uint64_t(n_red * h % m);
        double angle = 2.0 * std::numbers::pi * double(k) / double(m);
        re.add(std::cos(angle));
        im.add(std::sin(angle));
    }
    double real = re.value();
    double imag = im.value();
    if (std::abs(imag) >= 1e-6)
        throw ToleranceError("crs_direct: imaginary part " + std::to_string(imag) +
                             " exceeds 1e-6 for r=" + std::to_string(p.r) +
                             " s=" + std::to_string(p.s));
    double nearest = std::round(real);
    if (std::abs(real - nearest) >= 1e-6)
        throw ToleranceError("crs_direct: real part " + std::to_string(real) +
                             " is not within 1e-6 of an integer for r=" + std::to_string(p.r) +
                             " s=" + std::to_string(p.s));
    return RealApprox(real, std::max(std::abs(imag), std::abs(real - nearest)));
}

inline RealApprox crs_direct(std::uint64_t r, unsigned s, u128 n) {
    return crs_direct(CrsParams(r, s), n);
}

// crs_direct validated and rounded to the integer it certifies.
inline std::int64_t crs_direct_rounded(const CrsParams& p, u128 n) {
    return std::int64_t(std::llround(crs_direct(p, n).value));
}

// Whole period of the exponential-sum oracle: values c_r^s(n) for
// n = 0..r^s-1, one strided accumulation pass per unit h over a shared table
// of the r^s-th roots of unity. Same tolerances as crs_direct, applied to
// every entry.
inline std::vector<std::int64_t> crs_direct_period(const CrsParams& p) {
    if (p.modulus > i128(detail::kDirectModulusLimit))
        throw DomainError("crs_direct_period: r^s exceeds the oracle limit 10^6");
    const std::uint64_t m = std::uint64_t(p.modulus);
    std::vector<double> root_re(m), root_im(m);
    for (std::uint64_t k = 0; k < m; ++k) {
        double angle = 2.0 * std::numbers::pi * double(k) / double(m);
        root_re[k] = std::cos(angle);
        root_im[k] = std::sin(angle);
    }
    const std::vector<bool> unit = detail::direct_units(p);
    // Block the h-accumulation so plain adds stay accurate: partials over
    // batches of units are folded compensated.
    std::vector<double> acc_re(m, 0.0), acc_im(m, 0.0);
    std::vector<NeumaierSum> sum_re(m), sum_im(m);
    std::uint64_t in_batch = 0;
    auto flush = [&]() {
        if (in_batch == 0) return;
        for (std::uint64_t k = 0; k < m; ++k) {
            sum_re[k].add(acc_re[k]);
            sum_im[k].add(acc_im[k]);
            acc_re[k] = 0.0;
            acc_im[k] = 0.0;
        }
        in_batch = 0;
    };
    for (std::uint64_t h = 1; h <= m; ++h) {
        if (!unit[h]) continue;
        std::uint64_t idx = 0;
        for (std::uint64_t k = 0; k < m; ++k) {
            acc_re[k] += root_re[idx];
            acc_im[k] += root_im[idx];
            idx += h;
            if (idx >= m) idx -= m;
        }
        if (++in_batch == 512) flush();
    }
    flush();
    std::vector<std::int64_t> out(m);
    for (std::uint64_t k = 0; k < m; ++k) {
        double real = sum_re[k].value();
        double imag = sum_im[k].value();
        if (std::abs(imag) >= 1e-6)
            throw ToleranceError("crs_direct_period: imaginary part exceeds 1e-6 at n=" +
                                 std::to_string(k) + " for r=" + std::to_string(p.r) +
                                 " s=" + std::to_string(p.s));
        double nearest = std::round(real);
        if (std::abs(real - nearest) >= 1e-6)
            throw ToleranceError("crs_direct_period: real part not near an integer at n=" +
                                 std::to_string(k) + " for r=" + std::to_string(p.r) +
                                 " s=" + std::to_string(p.s));
        out[k] = std::int64_t(std::llround(real));
    }
    return out;
}

// Integer period table for c_r^s, for bulk consumers (lemma grids,
// coefficient extraction). Built by the Mobius form: for each live divisor d,
// add mu(r/d) d^s at every multiple of d^s.
class CrsPeriod {
public:
    CrsPeriod(std::uint64_t r, unsigned s) : params_(r, s) {
        if (params_.modulus > i128(10000000))
            throw DomainError("CrsPeriod: r^s too large to tabulate");
        period_ = std::uint64_t(params_.modulus);
        val_.assign(period_, 0);
        const auto& fs = params_.r_fact.factors;
        const std::size_t w = fs.size();
        for (std::uint32_t mask = 0; mask < (1u << w); ++mask) {
            std::uint64_t ds = 1;
            int sign = 1;
            for (std::size_t i = 0; i < w; ++i) {
                std::uint32_t e = fs[i].exponent;
                if (mask & (1u << i)) {
                    sign = -sign;
                    --e;
                }
                for (std::uint32_t j = 0; j < e * params_.s; ++j) ds *= fs[i].prime;
            }
            std::int64_t term = sign > 0 ? std::int64_t(ds) : -std::int64_t(ds);
            for (std::uint64_t idx = 0; idx < period_; idx += ds) val_[idx] += term;
        }
    }

    std::uint64_t r() const { return params_.r; }
    unsigned s() const { return params_.s; }
    std::uint64_t period() const { return period_; }
    std::int64_t at(u128 n) const { return val_[std::uint64_t(n % period_)]; }
    const std::vector<std::int64_t>& values() const { return val_; }

private:
    CrsParams params_;
    std::uint64_t period_ = 1;
    std::vector<std::int64_t> val_;
};

// Pairwise averages (1/r^s) sum_{m=1}^{r^s} c_d^s(m) c_t^s(m) for all divisor
// pairs d, t of r. The division by r^s must be exact; anything else is an
// internal error, not a rounding situation.
struct OrthogonalityTable {
    std::uint64_t r = 1;
    unsigned s = 1;
    std::vector<std::uint64_t> divs;
    std::vector<std::vector<i128>> value;  // value[i][j], indices into divs

    i128 at(std::uint64_t d, std::uint64_t t) const {
        std::size_t i = find(d), j = find(t);
        return value[i][j];
    }

private:
    std::size_t find(std::uint64_t d) const {
        for (std::size_t i = 0; i < divs.size(); ++i)
            if (divs[i] == d) return i;
        throw DomainError("OrthogonalityTable: not a divisor of r");
    }
};

inline OrthogonalityTable orthogonality_table(std::uint64_t r, unsigned s) {
    CrsParams base(r, s);
    if (base.modulus > i128(detail::kDirectModulusLimit))
        throw DomainError("orthogonality_table: r^s exceeds 10^6");
    const std::uint64_t m = std::uint64_t(base.modulus);
    OrthogonalityTable table;
    table.r = r;
    table.s = s;
    table.divs = divisors(base.r_fact);
    std::vector<CrsPeriod> periods;
    periods.reserve(table.divs.size());
    for (std::uint64_t d : table.divs) periods.emplace_back(d, s);
    const std::size_t k = table.divs.size();
    table.value.assign(k, std::vector<i128>(k, 0));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            const auto& a = periods[i].values();
            const auto& b = periods[j].values();
            std::uint64_t ia = 0, ib = 0;
            i128 acc = 0;
            for (std::uint64_t n = 1; n <= m; ++n) {
                if (++ia == a.size()) ia = 0;
                if (++ib == b.size()) ib = 0;
                acc += i128(a[ia]) * b[ib];
            }
            if (acc % i128(m) != 0)
                throw Error("orthogonality_table: non-exact average for r=" + std::to_string(r));
            table.value[i][j] = table.value[j][i] = acc / i128(m);
        }
    }
    return table;
}

}  // namespace crs
