#pragma once

// Expansion of arithmetic functions in the c_r^s basis: coefficient families,
// truncated evaluation with explicit tail bounds, and empirical coefficient
// extraction from tabulated data.
//
// A family knows whether its expansion feeds c_r^s the plain index n or the
// power n^s; mixing the two silently is exactly the mistake this type system
// is here to prevent, so conversions require an explicit flag.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "crs/arith.hpp"
#include "crs/cohen_sum.hpp"
#include "crs/int128.hpp"
#include "crs/primes.hpp"
#include "crs/rational.hpp"
#include "crs/real_approx.hpp"
#include "crs/summation.hpp"
#include "crs/zeta.hpp"

namespace crs {

enum class ArgumentMode { plain, s_power };

inline Factorization factorization_from_spf(const SpfTable& spf, std::uint32_t n) {
    Factorization f;
    f.n = n;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    spf.factor(n, pairs);
    for (auto& [p, e] : pairs) f.factors.push_back({p, e});
    return f;
}

class CoefficientFamily {
public:
    enum class Kind { sigma, jordan, shifted, tabulated };

    // Coefficients zeta((k+1)s) / r^{(k+1)s}; expands the ratio
    // sigma_{ks}(n) / n^{ks} over arguments n^s. The prefactor follows from
    // the Mobius rearrangement sum_r c_r^s(n^s) r^{-(k+1)s}
    // = sigma_{ks}(n) / (n^{ks} zeta((k+1)s)); at s = 1 it is the classical
    // zeta(k+1).
    static CoefficientFamily sigma_family(int k, unsigned s) {
        if (k < 1) throw DomainError("sigma_family: k must be >= 1");
        check_s(s);
        CoefficientFamily f;
        f.kind_ = Kind::sigma;
        f.k_ = k;
        f.s_ = s;
        f.mode_ = ArgumentMode::s_power;
        f.prefactor_ = zeta(double(unsigned(k + 1) * s));
        return f;
    }

    // Coefficients mu(q) / (zeta(s+k) J_{s+k}(q)); expands J_k(n) / n^k over
    // arguments n^s.
    static CoefficientFamily jordan_family(int k, unsigned s) {
        if (k < 1) throw DomainError("jordan_family: k must be >= 1");
        check_s(s);
        CoefficientFamily f;
        f.kind_ = Kind::jordan;
        f.k_ = k;
        f.s_ = s;
        f.mode_ = ArgumentMode::s_power;
        f.prefactor_ = zeta(double(s) + double(k)).inverse();
        return f;
    }

    // Explicit coefficient list; coeffs[i] belongs to rank r = i + 1.
    static CoefficientFamily tabulated_family(std::vector<Rational> coeffs, unsigned s,
                                              ArgumentMode mode) {
        check_s(s);
        CoefficientFamily f;
        f.kind_ = Kind::tabulated;
        f.s_ = s;
        f.mode_ = mode;
        f.prefactor_ = RealApprox::exact(1.0);
        f.table_ = std::move(coeffs);
        return f;
    }

    Kind kind() const { return kind_; }
    unsigned s() const { return s_; }
    int k() const { return k_; }
    ArgumentMode argument_mode() const { return mode_; }
    const RealApprox& prefactor() const { return prefactor_; }
    std::uint64_t shift() const { return h_; }
    const CoefficientFamily* base() const { return base_.get(); }
    std::size_t table_size() const { return table_.size(); }

    // Exact part of the coefficient at rank r (the prefactor stays outside).
    Rational coeff_rational(std::uint64_t r) const {
        if (r == 0) throw DomainError("coeff_rational: rank must be >= 1");
        switch (kind_) {
            case Kind::sigma:
                return Rational(1, checked_pow(i128(r), unsigned(k_ + 1) * s_));
            case Kind::jordan: {
                Factorization f = factorize(r);
                int mu = mobius(f);
                if (mu == 0) return Rational(0);
                return Rational(mu, jordan_totient(unsigned(k_) + s_, f));
            }
            case Kind::shifted: {
                Rational base = base_->coeff_rational(r);
                if (base.num() == 0) return base;
                i128 c_h = crs_exact(r, s_, h_);
                i128 phi = jordan_totient(s_, r);  // Klee totient of r^s
                return base * Rational(c_h, phi);
            }
            case Kind::tabulated:
                return r <= table_.size() ? table_[r - 1] : Rational(0);
        }
        throw Error("coeff_rational: unreachable");
    }

    // Full coefficient value with the prefactor's error bound propagated.
    RealApprox coeff(std::uint64_t r) const {
        Rational q = coeff_rational(r);
        return prefactor_.scaled(q.to_double());
    }

    // |coeff(r)| <= decay_scale / r^decay_exponent for every r > 0; the pair
    // drives tail bounds and rank solving. Tabulated families have no decay
    // law (they are finite instead), and a shifted family inherits from its
    // base.
    bool has_decay_law() const {
        if (kind_ == Kind::shifted) return base_->has_decay_law();
        return kind_ != Kind::tabulated;
    }
    // Rank past which every coefficient is zero; 0 means no such rank.
    std::size_t finite_rank_limit() const {
        if (kind_ == Kind::shifted) return base_->finite_rank_limit();
        return kind_ == Kind::tabulated ? table_.size() : 0;
    }
    double decay_exponent() const {
        switch (kind_) {
            case Kind::sigma:
                return double(unsigned(k_ + 1) * s_);
            case Kind::jordan:
                return double(s_ + unsigned(k_));
            case Kind::shifted:
                // h = 0 collapses to the base family (c_r^s(0) = Phi_s(r^s));
                // otherwise |c_r^s(h)| <= sigma_{1,s}(h) and
                // Phi_s(r^s) >= sqrt(r^s / 2) sharpen the base decay by s/2.
                if (h_ == 0) return base_->decay_exponent();
                return base_->decay_exponent() + double(s_) / 2.0;
            case Kind::tabulated:
                break;
        }
        throw DomainError("decay_exponent: tabulated family has no decay law");
    }
    double decay_scale() const {
        switch (kind_) {
            case Kind::sigma:
                return prefactor_.value + prefactor_.abs_error_bound;
            case Kind::jordan:
                // |mu(q)| / (zeta(z) J_z(q)) <= q^{-z} since J_z(q) >= q^z / zeta(z).
                return 1.0;
            case Kind::shifted:
                if (h_ == 0) return base_->decay_scale();
                return base_->decay_scale() * double(sigma_spower(s_, h_)) * std::sqrt(2.0);
            case Kind::tabulated:
                break;
        }
        throw DomainError("decay_scale: tabulated family has no decay law");
    }

    friend CoefficientFamily shift_family(const CoefficientFamily& base, std::uint64_t h,
                                          bool reinterpret_as_plain);

private:
    static void check_s(unsigned s) {
        if (s == 0) throw DomainError("CoefficientFamily: s must be >= 1");
    }

    Kind kind_ = Kind::tabulated;
    int k_ = 0;
    unsigned s_ = 1;
    ArgumentMode mode_ = ArgumentMode::plain;
    RealApprox prefactor_ = RealApprox::exact(1.0);
    std::uint64_t h_ = 0;
    std::shared_ptr<const CoefficientFamily> base_;
    std::vector<Rational> table_;
};

// Derived family with coefficients f(r) * c_r^s(h) / Phi_s(r^s), expanding
// n -> f(n + h) over plain arguments. The base must already be a plain-
// argument expansion; with s = 1 the two modes coincide and pass untouched.
// Anything else needs the explicit reinterpret flag, because quietly reading
// an n^s-argument expansion at plain n changes the function being shifted.
inline CoefficientFamily shift_family(const CoefficientFamily& base, std::uint64_t h,
                                      bool reinterpret_as_plain = false) {
    if (base.argument_mode() != ArgumentMode::plain && base.s() != 1 && !reinterpret_as_plain)
        throw DomainError(
            "shift_family: base expands over n^s arguments; pass "
            "reinterpret_as_plain=true to force a plain-argument reading");
    CoefficientFamily f;
    f.kind_ = CoefficientFamily::Kind::shifted;
    f.s_ = base.s();
    f.k_ = base.k();
    f.mode_ = ArgumentMode::plain;
    f.prefactor_ = base.prefactor();
    f.h_ = h;
    f.base_ = std::make_shared<CoefficientFamily>(base);
    return f;
}

struct TruncatedEvaluation {
    std::uint64_t n = 0;
    std::uint64_t rank = 0;
    double partial_sum = 0.0;
    // Bound on |partial_sum - limit|; absent when the family admits none.
    std::optional<double> tail_bound;
};

namespace detail {

inline double formula_tail(const CoefficientFamily& fam, double sigma_arg, std::uint64_t rank) {
    // sum_{r > R} scale * r^{-E} * sigma_arg <= scale * sigma_arg * R^{1-E} / (E-1).
    double e = fam.decay_exponent();
    if (!(e > 1.0)) throw DomainError("tail bound requires decay exponent > 1");
    return fam.decay_scale() * sigma_arg * std::pow(double(rank), 1.0 - e) / (e - 1.0);
}

}  // namespace detail

// Partial sum of the expansion through rank R, with a certified tail bound
// where the family carries a decay law (plus the exact remainder for finite
// tabulated families truncated early).
inline TruncatedEvaluation eval_truncated(const CoefficientFamily& fam, std::uint64_t n,
                                          std::uint64_t rank) {
    if (n == 0) throw DomainError("eval_truncated: n must be >= 1");
    if (rank == 0) throw DomainError("eval_truncated: rank must be >= 1");
    if (rank > 10000000) throw DomainError("eval_truncated: rank above 10^7; use a tighter bound");
    u128 arg = n;
    if (fam.argument_mode() == ArgumentMode::s_power)
        for (unsigned i = 1; i < fam.s(); ++i) arg *= u128(n);
    if (arg > u128(std::numeric_limits<std::int64_t>::max()))
        throw DomainError("eval_truncated: n^s exceeds 2^63");
    // sigma_{1,s} of the argument bounds every |c_r^s(arg)|.
    const double sigma_arg = double(sigma_spower(fam.s(), std::uint64_t(arg)));

    std::optional<SpfTable> spf;
    if (rank >= 512) spf.emplace(std::uint32_t(rank));

    NeumaierSum acc;
    double abs_acc = 0.0;  // sum of |term|s, for the rounding slack
    for (std::uint64_t r = 1; r <= rank; ++r) {
        Rational q = fam.coeff_rational(r);
        if (q.num() == 0) continue;
        CrsParams params = spf ? CrsParams(fam.s(), factorization_from_spf(*spf, std::uint32_t(r)))
                               : CrsParams(r, fam.s());
        i128 c = crs_exact(params, arg);
        if (c == 0) continue;
        double term = q.to_double() * to_double(c);
        acc.add(term);
        abs_acc += std::abs(term);
    }
    double inner = acc.value();
    const RealApprox& pre = fam.prefactor();

    TruncatedEvaluation out;
    out.n = n;
    out.rank = rank;
    out.partial_sum = pre.value * inner;
    double fp_slack = 8.0 * std::numeric_limits<double>::epsilon() *
                      (std::abs(pre.value) * abs_acc + std::abs(out.partial_sum));
    if (fam.has_decay_law()) {
        out.tail_bound = detail::formula_tail(fam, sigma_arg, rank) +
                         pre.abs_error_bound * abs_acc + fp_slack;
    } else if (rank >= fam.finite_rank_limit()) {
        out.tail_bound = fp_slack;  // finite expansion fully consumed
    } else {
        // Finite family truncated early: bound the dropped terms exactly.
        NeumaierSum rest;
        for (std::uint64_t r = rank + 1; r <= fam.finite_rank_limit(); ++r)
            rest.add(std::abs(fam.coeff_rational(r).to_double()));
        out.tail_bound = rest.value() * sigma_arg + fp_slack;
    }
    return out;
}

// Smallest rank whose formula tail bound is <= eps for this n.
inline std::uint64_t solve_rank(const CoefficientFamily& fam, std::uint64_t n, double eps) {
    if (!(eps > 0.0)) throw DomainError("solve_rank: eps must be positive");
    if (!fam.has_decay_law())
        throw DomainError("solve_rank: family has no decay law (finite coefficient table)");
    u128 arg = n;
    if (fam.argument_mode() == ArgumentMode::s_power)
        for (unsigned i = 1; i < fam.s(); ++i) arg *= u128(n);
    if (arg > u128(std::numeric_limits<std::int64_t>::max()))
        throw DomainError("solve_rank: n^s exceeds 2^63");
    double sigma_arg = double(sigma_spower(fam.s(), std::uint64_t(arg)));
    double e = fam.decay_exponent();
    double target = fam.decay_scale() * sigma_arg / (eps * (e - 1.0));
    double r = std::pow(target, 1.0 / (e - 1.0));
    std::uint64_t rank = r < 1.0 ? 1 : std::uint64_t(std::ceil(r));
    // Round up until the closed form actually clears eps (guards pow rounding).
    while (fam.decay_scale() * sigma_arg * std::pow(double(rank), 1.0 - e) / (e - 1.0) > eps)
        ++rank;
    return rank;
}

// Empirical mean value sum_{n <= x'} f(n) c_r^s(n) / (x' Phi_s(r^s)) with x'
// equal to x rounded down to whole periods of r^s. values[n] holds f(n);
// index 0 is ignored.
inline double extract_coeff(const std::vector<double>& values, std::uint64_t r, unsigned s,
                            std::uint64_t x, unsigned threads = 0) {
    CrsParams p(r, s);
    if (p.modulus > i128(10000000)) throw DomainError("extract_coeff: r^s too large");
    std::uint64_t period = std::uint64_t(p.modulus);
    if (x < period) throw DomainError("extract_coeff: x must cover at least one period of r^s");
    std::uint64_t x_whole = x - x % period;
    if (x_whole + 1 > values.size())
        throw DomainError("extract_coeff: values shorter than the averaging window");
    CrsPeriod table(r, s);
    double total = blocked_sum(
        1, x_whole,
        [&](std::uint64_t n) { return values[n] * double(table.at(n)); }, threads);
    return total / double(x_whole) / to_double(jordan_totient(s, p.r_fact));
}

namespace detail {

// sum_{q <= limit} mu^2(q) / J_z(q) by direct smallest-prime-factor walks.
inline double sjrs_small(unsigned z, std::uint64_t limit) {
    SpfTable spf{std::uint32_t(limit)};
    NeumaierSum acc;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::uint64_t q = 1; q <= limit; ++q) {
        spf.factor(std::uint32_t(q), pairs);
        double jz = 1.0;
        bool squarefree = true;
        for (auto& [p, e] : pairs) {
            if (e > 1) {
                squarefree = false;
                break;
            }
            jz *= std::pow(double(p), double(z)) - 1.0;
        }
        if (squarefree) acc.add(1.0 / jz);
    }
    return acc.value();
}

// Same sum by a segmented sieve over fixed 2^20 blocks; usable up to ranks
// around 10^9 where no per-q table fits. Deterministic for any thread count
// (fixed blocks, ordered fold).
inline double sjrs_segmented(unsigned z, std::uint64_t limit, unsigned threads) {
    const std::uint32_t sqrt_limit = std::uint32_t(std::sqrt(double(limit))) + 2;
    const std::vector<std::uint32_t> base = primes_up_to(sqrt_limit);
    std::vector<double> pz1(base.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        pz1[i] = std::pow(double(base[i]), double(z)) - 1.0;

    const std::uint64_t block = 1u << 20;
    const std::uint64_t nblocks = (limit + block - 1) / block;
    std::vector<double> partial(std::size_t(nblocks), 0.0);

    auto run_block = [&](std::uint64_t b) {
        const std::uint64_t lo = b * block + 1;
        const std::uint64_t hi = std::min(limit, lo + block - 1);
        const std::size_t len = std::size_t(hi - lo + 1);
        std::vector<std::uint32_t> rem(len);
        std::vector<double> fac(len, 1.0);
        std::vector<unsigned char> ok(len, 1);
        for (std::size_t i = 0; i < len; ++i) rem[i] = std::uint32_t(lo + i);
        for (std::size_t pi = 0; pi < base.size(); ++pi) {
            const std::uint64_t p = base[pi];
            std::uint64_t start = (lo + p - 1) / p * p;
            for (std::uint64_t v = start; v <= hi; v += p) {
                std::size_t i = std::size_t(v - lo);
                std::uint32_t q = rem[i] / std::uint32_t(p);
                if (q % p == 0) {
                    ok[i] = 0;  // p^2 divides it; strip the rest anyway
                    while (q % p == 0) q /= std::uint32_t(p);
                } else {
                    fac[i] *= pz1[pi];
                }
                rem[i] = q;
            }
        }
        NeumaierSum acc;
        for (std::size_t i = 0; i < len; ++i) {
            if (!ok[i]) continue;
            double jz = fac[i];
            if (rem[i] > 1) {
                double rr = double(rem[i]);
                jz *= std::pow(rr, double(z)) - 1.0;
            }
            acc.add(1.0 / jz);
        }
        partial[std::size_t(b)] = acc.value();
    };

    unsigned nthreads = resolve_threads(threads);
    if (nthreads <= 1) {
        for (std::uint64_t b = 0; b < nblocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t)
            pool.emplace_back([&, t]() {
                for (std::uint64_t b = t; b < nblocks; b += nthreads) run_block(b);
            });
        for (auto& th : pool) th.join();
    }
    NeumaierSum total;
    for (double v : partial) total.add(v);
    return total.value();
}

}  // namespace detail

// sum_{q <= limit} mu^2(q) / J_z(q), the jordan-family expansion of 1
// evaluated without its 1/zeta(z) prefactor. Small limits walk a
// smallest-prime-factor table; large ones run the segmented sieve.
inline double squarefree_jordan_reciprocal_sum(unsigned z, std::uint64_t limit,
                                               unsigned threads = 0) {
    if (z < 2) throw DomainError("squarefree_jordan_reciprocal_sum: z must be >= 2");
    if (limit >= (1ull << 32))
        throw DomainError("squarefree_jordan_reciprocal_sum: limit must be < 2^32");
    if (limit == 0) return 0.0;
    if (limit <= 2000000) return detail::sjrs_small(z, limit);
    return detail::sjrs_segmented(z, limit, threads);
}

}  // namespace crs
