#pragma once

// End-to-end acceptance checks. Each check pins its tolerances and budgets in
// code, measures real quantities, and reports one pass/fail verdict with the
// numbers that drove it. Checks never exaggerate: a miss is reported as a
// miss together with the measured gap.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "crs/arith.hpp"
#include "crs/cohen_sum.hpp"
#include "crs/correlation.hpp"
#include "crs/expansion.hpp"
#include "crs/factor.hpp"
#include "crs/zeta.hpp"

namespace crs {

struct CheckResult {
    std::string name;
    bool passed = false;
    double seconds = 0.0;
    std::string detail;
};

namespace detail {

class Stopwatch {
public:
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline std::string fmt(double v, int precision = 6) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

}  // namespace detail

// The three evaluators (subset-sum over the divisor lattice, rounded
// exponential-sum oracle, gcd-based fast form) agree on every value of every
// period with r <= 30, s <= 3, inside a 10 s budget.
inline CheckResult check_oracle_equivalence() {
    detail::Stopwatch sw;
    const double kTimeLimit = 10.0;
    std::uint64_t values = 0, mismatches = 0;
    for (unsigned s = 1; s <= 3; ++s) {
        for (std::uint64_t r = 1; r <= 30; ++r) {
            CrsParams p(r, s);
            const std::uint64_t m = std::uint64_t(p.modulus);
            std::vector<std::int64_t> direct = crs_direct_period(p);
            for (std::uint64_t n = 0; n < m; ++n) {
                i128 exact = crs_exact(p, n);
                if (exact != i128(direct[n]) || exact != crs_fast(p, n)) ++mismatches;
                ++values;
            }
        }
    }
    double t = sw.elapsed();
    CheckResult res;
    res.name = "oracle-equivalence";
    res.seconds = t;
    res.passed = mismatches == 0 && t < kTimeLimit;
    res.detail = std::to_string(values) + " values across 90 periods, " +
                 std::to_string(mismatches) + " mismatches, budget " +
                 detail::fmt(kTimeLimit, 3) + "s";
    return res;
}

// Exact integer identities, zero tolerance: totient divisor sums, the
// generalized-gcd lcm product, orthogonality tables, c_r^s(0) = J_s(r), and
// s-power-free shift absorption.
inline CheckResult check_exact_identities() {
    detail::Stopwatch sw;
    std::uint64_t checked = 0, failures = 0;

    // sum_{d|n} J_s(d) = n^s and sum_{d|n} Phi_s(d^s) = n^s for n <= 2000.
    for (unsigned s = 1; s <= 3; ++s) {
        for (std::uint64_t n = 1; n <= 2000; ++n) {
            i128 ns = checked_pow(i128(n), s);
            i128 jsum = 0, ksum = 0;
            for (std::uint64_t d : divisors(factorize(n))) {
                jsum += jordan_totient(s, d);
                ksum += i128(klee_phi(s, std::uint64_t(checked_pow(i128(d), s))));
            }
            checked += 2;
            if (jsum != ns) ++failures;
            if (ksum != ns) ++failures;
        }
    }

    // gen_gcd(s, m^s, n^s) * lcm(m^s, n^s) = m^s n^s, and the gcd power law.
    for (unsigned s = 1; s <= 3; ++s) {
        for (std::uint64_t m = 1; m <= 200; ++m) {
            for (std::uint64_t n = 1; n <= 200; ++n) {
                std::uint64_t ms = std::uint64_t(checked_pow(i128(m), s));
                std::uint64_t ns = std::uint64_t(checked_pow(i128(n), s));
                std::uint64_t g = gen_gcd(s, ms, ns);
                i128 lcm = i128(ms) / std::gcd(ms, ns) * i128(ns);
                checked += 2;
                if (i128(g) * lcm != i128(ms) * i128(ns)) ++failures;
                if (i128(g) != checked_pow(i128(std::gcd(m, n)), s)) ++failures;
            }
        }
    }

    // Pairwise period averages: (1/r^s) sum_m c_d^s(m) c_t^s(m) is J_s(d) on
    // the diagonal and 0 off it.
    for (unsigned s = 1; s <= 3; ++s) {
        for (std::uint64_t r = 1; r <= 20; ++r) {
            OrthogonalityTable table = orthogonality_table(r, s);
            for (std::size_t i = 0; i < table.divs.size(); ++i) {
                for (std::size_t j = 0; j < table.divs.size(); ++j) {
                    i128 expected = i == j ? jordan_totient(s, table.divs[i]) : i128(0);
                    ++checked;
                    if (table.value[i][j] != expected) ++failures;
                }
            }
        }
    }

    // c_r^s(0) = J_s(r) for r <= 50, s <= 3.
    for (unsigned s = 1; s <= 3; ++s) {
        for (std::uint64_t r = 1; r <= 50; ++r) {
            ++checked;
            if (crs_exact(r, s, 0) != jordan_totient(s, r)) ++failures;
        }
    }

    // c_r^s(m^s k) = c_r^s(m^s) whenever no l^s > 1 divides k.
    std::uint64_t absorption_cells = 0;
    auto absorb = [&](unsigned s, std::uint64_t r, std::uint64_t m, std::uint64_t k) {
        u128 base = u128(checked_pow(i128(m), s));
        ++checked;
        ++absorption_cells;
        if (crs_exact(r, s, base * k) != crs_exact(r, s, base)) ++failures;
    };
    for (std::uint64_t r = 1; r <= 10; ++r)
        for (std::uint64_t m = 1; m <= 5; ++m)
            for (std::uint64_t k : {2, 3, 6, 10}) absorb(2, r, m, k);
    for (std::uint64_t r = 1; r <= 6; ++r)
        for (std::uint64_t m = 1; m <= 3; ++m)
            for (std::uint64_t k : {2, 4, 12}) absorb(3, r, m, k);

    CheckResult res;
    res.name = "exact-identities";
    res.seconds = sw.elapsed();
    res.passed = failures == 0;
    res.detail = std::to_string(checked) + " exact comparisons (" +
                 std::to_string(absorption_cells) + " absorption cells), " +
                 std::to_string(failures) + " failures";
    return res;
}

// Truncated sigma-ratio expansions at s=1, k=2: certified tails hold and the
// relative error stays under 1e-3 for n <= 50 at rank 2000; the n=1 series
// reaches 1 within 1e-9 at rank 1e5.
inline CheckResult check_sigma_expansion() {
    detail::Stopwatch sw;
    CoefficientFamily fam = CoefficientFamily::sigma_family(2, 1);
    bool ok = true;
    double worst_rel = 0.0;
    for (std::uint64_t n = 1; n <= 50; ++n) {
        TruncatedEvaluation ev = eval_truncated(fam, n, 2000);
        double target = sigma(-2, n).to_double();
        double diff = std::abs(ev.partial_sum - target);
        if (!ev.tail_bound || diff > *ev.tail_bound) ok = false;
        double rel = diff / target;
        worst_rel = std::max(worst_rel, rel);
        if (rel > 1e-3) ok = false;
    }
    double unit = eval_truncated(fam, 1, 100000).partial_sum;
    double unit_diff = std::abs(unit - 1.0);
    if (unit_diff > 1e-9) ok = false;

    CheckResult res;
    res.name = "sigma-expansion";
    res.seconds = sw.elapsed();
    res.passed = ok;
    res.detail = "n<=50 worst rel err " + detail::fmt(worst_rel, 3) +
                 " (tol 1e-3, tails certified); n=1 |diff| " + detail::fmt(unit_diff, 3) +
                 " (tol 1e-9)";
    return res;
}

// Truncated jordan-ratio expansions for s, k in {1,2}: certified tails hold
// for n <= 50, and the n=1 series reaches 1 within 1e-9 (via the segmented
// squarefree sieve when s+k = 2, where the needed rank is 1e9).
inline CheckResult check_jordan_expansion() {
    detail::Stopwatch sw;
    bool ok = true;
    std::string units;
    for (unsigned s = 1; s <= 2; ++s) {
        for (int k = 1; k <= 2; ++k) {
            CoefficientFamily fam = CoefficientFamily::jordan_family(k, s);
            for (std::uint64_t n = 1; n <= 50; ++n) {
                TruncatedEvaluation ev = eval_truncated(fam, n, 20000);
                double target = to_double(jordan_totient(unsigned(k), n)) /
                                std::pow(double(n), double(k));
                double diff = std::abs(ev.partial_sum - target);
                if (!ev.tail_bound || diff > *ev.tail_bound) ok = false;
            }
            const unsigned z = s + unsigned(k);
            double unit;
            if (z == 2) {
                unit = squarefree_jordan_reciprocal_sum(2, 1000000000) / zeta(2.0).value;
            } else {
                std::uint64_t rank = solve_rank(fam, 1, 1e-9);
                unit = eval_truncated(fam, 1, rank).partial_sum;
            }
            double diff = std::abs(unit - 1.0);
            if (diff > 1e-9) ok = false;
            if (!units.empty()) units += ", ";
            units += "s=" + std::to_string(s) + ",k=" + std::to_string(k) + ":" +
                     detail::fmt(diff, 3);
        }
    }
    CheckResult res;
    res.name = "jordan-expansion";
    res.seconds = sw.elapsed();
    res.passed = ok;
    res.detail = "tails certified for n<=50; n=1 |diff| {" + units + "} (tol 1e-9)";
    return res;
}

// Mean-value extraction on the sigma ratio at x = 1e6 recovers the rank-1
// coefficient within 2% and the rank-2 coefficient within 5%, under 60 s.
inline CheckResult check_coefficient_extraction() {
    detail::Stopwatch sw;
    const double kTimeLimit = 60.0;
    const std::uint64_t x = 1000000;
    auto values = tabulate(FunctionDescriptor::parse("sigma:a=2"), 1, x);
    double c1 = extract_coeff(values, 1, 1, x);
    double c2 = extract_coeff(values, 2, 1, x);
    double z3 = zeta(3.0).value;
    double rel1 = std::abs(c1 / z3 - 1.0);
    double rel2 = std::abs(c2 / (z3 / 8.0) - 1.0);
    double t = sw.elapsed();

    CheckResult res;
    res.name = "coefficient-extraction";
    res.seconds = t;
    res.passed = rel1 <= 0.02 && rel2 <= 0.05 && t < kTimeLimit;
    res.detail = "r=1: " + detail::fmt(c1, 8) + " vs " + detail::fmt(z3, 8) + " (rel " +
                 detail::fmt(rel1, 3) + ", tol 2%); r=2 rel " + detail::fmt(rel2, 3) +
                 " (tol 5%); budget " + detail::fmt(kTimeLimit, 3) + "s";
    return res;
}

// Shifted correlation of the sigma ratio with itself at h=1, N=1e6: the
// normalized sum lands within 1% of the predicted constant, with the
// checkpoint trace logged, under 120 s.
inline CheckResult check_shifted_correlation() {
    detail::Stopwatch sw;
    const double kTimeLimit = 120.0;
    const std::uint64_t N = 1000000;
    auto f = tabulate(FunctionDescriptor::parse("sigma:a=2"), 1, N + 1);
    RealApprox closed = zeta(3.0) * zeta(3.0) * zeta(6.0).inverse();
    auto rep = correlate(f, f, 1, N, {100000, 250000, 500000, 1000000}, closed);
    double t = sw.elapsed();

    std::string trace;
    for (const auto& p : rep.trace) {
        if (!trace.empty()) trace += " ";
        trace += std::to_string(p.n) + ":" + detail::fmt(p.ratio, 6);
    }
    CheckResult res;
    res.name = "shifted-correlation";
    res.seconds = t;
    res.passed = std::abs(rep.ratio - 1.0) <= 0.01 && t < kTimeLimit;
    res.detail = "mean/constant = " + detail::fmt(rep.ratio, 6) + " (constant " +
                 detail::fmt(closed.value, 6) + ", tol 1%); trace " + trace;
    return res;
}

// Diagonal second moment of the sigma ratio at N=1e6 within 1% of the
// predicted constant.
inline CheckResult check_diagonal_correlation() {
    detail::Stopwatch sw;
    const std::uint64_t N = 1000000;
    auto f = tabulate(FunctionDescriptor::parse("sigma:a=2"), 1, N);
    RealApprox closed = zeta(3.0) * zeta(3.0) * zeta(5.0) * zeta(6.0).inverse();
    auto rep = correlate(f, f, 0, N, {}, closed);

    CheckResult res;
    res.name = "diagonal-correlation";
    res.seconds = sw.elapsed();
    res.passed = std::abs(rep.ratio - 1.0) <= 0.01;
    res.detail = "mean/constant = " + detail::fmt(rep.ratio, 6) + " (constant " +
                 detail::fmt(closed.value, 6) + ", tol 1%)";
    return res;
}

// Jordan-ratio correlation at s=2, a=b=3: the closed-form Euler product and
// the coefficient series agree to 1e-6 for m in {1,2}; the desk-scale
// empirical mean at N=1e5, h=1 is compared to the constant at 5%.
inline CheckResult check_jordan_correlation() {
    detail::Stopwatch sw;
    CoefficientFamily fam = CoefficientFamily::jordan_family(3, 2);
    bool product_ok = true;
    double worst_gap = 0.0;
    RealApprox constant1 = RealApprox::exact(0.0);
    for (std::uint64_t m : {1, 2}) {
        RealApprox constant = jordan_correlation_constant(2, 3, 3, m, 100000);
        RealApprox series = predicted_shifted(fam, fam, m * m, 4000);
        double gap = std::abs(constant.value - series.value) / std::abs(constant.value);
        worst_gap = std::max(worst_gap, gap);
        if (gap >= 1e-6) product_ok = false;
        if (m == 1) constant1 = constant;
    }

    const std::uint64_t N = 100000;
    auto f = tabulate(FunctionDescriptor::parse("jordan:a=3"), 2, N + 1);
    auto rep = correlate(f, f, 1, N, {}, constant1);
    bool empirical_ok = std::abs(rep.ratio - 1.0) <= 0.05;

    CheckResult res;
    res.name = "jordan-correlation";
    res.seconds = sw.elapsed();
    res.passed = product_ok && empirical_ok;
    res.detail = "constant vs series worst rel gap " + detail::fmt(worst_gap, 3) +
                 " (tol 1e-6); empirical mean " +
                 detail::fmt(rep.empirical / double(N), 6) + " vs constant " +
                 detail::fmt(constant1.value, 6) + ", ratio " + detail::fmt(rep.ratio, 6) +
                 " (tol 5%)";
    return res;
}

// Extraction of shifted-function coefficients: for the sigma ratio at s=1
// and shifts h in {1,2,6}, the extracted rank-r coefficients match the
// shifted family's formula within 5% for r <= 6 at x = 1e6. Ranks whose
// predicted coefficient is exactly zero are held to 5% of the unshifted
// coefficient's magnitude instead.
inline CheckResult check_shifted_extraction() {
    detail::Stopwatch sw;
    const std::uint64_t x = 1000000;
    CoefficientFamily base = CoefficientFamily::sigma_family(2, 1);
    auto fv = tabulate(FunctionDescriptor::parse("sigma:a=2"), 1, x + 6);
    bool ok = true;
    double worst = 0.0;
    std::string zero_note;
    for (std::uint64_t h : {1, 2, 6}) {
        CoefficientFamily shifted = shift_family(base, h);
        std::vector<double> gv(x + 1, 0.0);
        for (std::uint64_t n = 1; n <= x; ++n) gv[n] = fv[n + h];
        for (std::uint64_t r = 1; r <= 6; ++r) {
            double got = extract_coeff(gv, r, 1, x);
            double pred = shifted.coeff(r).value;
            if (pred != 0.0) {
                double rel = std::abs(got / pred - 1.0);
                worst = std::max(worst, rel);
                if (rel > 0.05) ok = false;
            } else {
                double scale = std::abs(base.coeff(r).value);
                if (std::abs(got) > 0.05 * scale) ok = false;
                zero_note = "; zero-predicted h=" + std::to_string(h) +
                            ",r=" + std::to_string(r) + " |extracted| " +
                            detail::fmt(std::abs(got), 3) + " <= " +
                            detail::fmt(0.05 * scale, 3);
            }
        }
    }
    CheckResult res;
    res.name = "shifted-extraction";
    res.seconds = sw.elapsed();
    res.passed = ok;
    res.detail = "h in {1,2,6}, r<=6: worst rel err " + detail::fmt(worst, 3) + " (tol 5%)" +
                 zero_note;
    return res;
}

// Full default lemma grids: the three hard inequalities hold with zero
// violations; the residual report's empirical constant is finite and logged
// per N.
inline CheckResult check_lemma_grids() {
    detail::Stopwatch sw;
    auto violations = [](const std::vector<BoundCheckRecord>& recs) {
        std::size_t v = 0;
        for (const auto& r : recs)
            if (!r.satisfied) ++v;
        return v;
    };

    LemmaGrid g1;
    g1.N_values = {100, 1000, 10000};
    auto r1 = verify_lemma_bounds("lem1", g1);

    LemmaGrid g3;
    g3.h_values = {1, 2, 5};
    g3.N_values = {100, 1000};
    auto r3 = verify_lemma_bounds("lem3", g3);

    LemmaGrid g4;
    g4.N_values = {100, 1000};
    auto r4 = verify_lemma_bounds("lem4", g4);

    LemmaGrid g2;
    g2.h_values = {0, 1, 5};
    g2.N_values = {100, 1000, 10000};
    auto r2 = verify_lemma_bounds("lem2", g2);
    bool finite = true;
    std::string residuals;
    for (std::uint64_t N : g2.N_values) {
        double max_ratio = 0.0;
        for (const auto& rec : r2)
            if (rec.N == N) max_ratio = std::max(max_ratio, rec.residual_ratio);
        if (!std::isfinite(max_ratio)) finite = false;
        if (!residuals.empty()) residuals += " ";
        residuals += "N=" + std::to_string(N) + ":" + detail::fmt(max_ratio, 4);
    }

    std::size_t v1 = violations(r1), v3 = violations(r3), v4 = violations(r4);
    CheckResult res;
    res.name = "lemma-grids";
    res.seconds = sw.elapsed();
    res.passed = v1 == 0 && v3 == 0 && v4 == 0 && finite;
    res.detail = "lem1 " + std::to_string(r1.size()) + " records/" + std::to_string(v1) +
                 " violations; lem3 " + std::to_string(r3.size()) + "/" + std::to_string(v3) +
                 "; lem4 " + std::to_string(r4.size()) + "/" + std::to_string(v4) +
                 "; lem2 max residual ratio " + residuals;
    return res;
}

struct NamedCheck {
    const char* name;
    CheckResult (*fn)();
};

inline const std::vector<NamedCheck>& acceptance_checks() {
    static const std::vector<NamedCheck> checks = {
        {"oracle-equivalence", check_oracle_equivalence},
        {"exact-identities", check_exact_identities},
        {"sigma-expansion", check_sigma_expansion},
        {"jordan-expansion", check_jordan_expansion},
        {"coefficient-extraction", check_coefficient_extraction},
        {"shifted-correlation", check_shifted_correlation},
        {"diagonal-correlation", check_diagonal_correlation},
        {"jordan-correlation", check_jordan_correlation},
        {"shifted-extraction", check_shifted_extraction},
        {"lemma-grids", check_lemma_grids},
    };
    return checks;
}

// Runs one named check; exceptions become a failed result, never a crash.
inline CheckResult run_check(const std::string& name) {
    for (const NamedCheck& entry : acceptance_checks()) {
        if (name != entry.name) continue;
        try {
            return entry.fn();
        } catch (const std::exception& e) {
            CheckResult res;
            res.name = entry.name;
            res.passed = false;
            res.detail = std::string("exception: ") + e.what();
            return res;
        }
    }
    throw DomainError("run_check: unknown check '" + name + "'");
}

inline std::vector<CheckResult> run_acceptance(void (*on_result)(const CheckResult&) = nullptr) {
    std::vector<CheckResult> results;
    for (const NamedCheck& entry : acceptance_checks()) {
        results.push_back(run_check(entry.name));
        if (on_result) on_result(results.back());
    }
    return results;
}

}  // namespace crs
