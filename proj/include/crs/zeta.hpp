#pragma once

// Real zeta values and the Euler constant, with explicit error bounds.
//
// zeta(x) sums the series directly to a cutoff M and closes the tail with the
// integral M^{1-x}/(x-1) plus the first two Euler-Maclaurin corrections; the
// reported bound is the magnitude of the first omitted correction term plus
// rounding slack. For x >= 2 this lands far below 1e-12.

#include <cmath>
#include <cstdint>
#include <limits>

#include "crs/primes.hpp"
#include "crs/real_approx.hpp"
#include "crs/summation.hpp"

namespace crs {

inline RealApprox zeta(double x) {
    if (!(x > 1.0)) throw DomainError("zeta: requires x > 1");
    const double M = 10000.0;
    NeumaierSum acc;
    for (double n = M; n >= 1.0; n -= 1.0) acc.add(std::pow(n, -x));
    double tail = std::pow(M, 1.0 - x) / (x - 1.0)  // integral part
                  - 0.5 * std::pow(M, -x)           // trapezoid correction
                  + x / 12.0 * std::pow(M, -x - 1.0);
    double value = acc.value() + tail;
    double em_remainder = x * (x + 1.0) * (x + 2.0) / 720.0 * std::pow(M, -x - 3.0);
    double fp_slack = 8.0 * std::numeric_limits<double>::epsilon() * value;
    return RealApprox(value, em_remainder + fp_slack);
}

// Truncated Euler product over primes <= plimit; cross-check path only, the
// series above is the evaluator of record. Tail bounded through
// sum_{n > P} n^{-x} <= P^{1-x}/(x-1) applied to -log(1 - p^{-x}) <= 2 p^{-x}.
inline RealApprox zeta_euler_product(double x, std::uint32_t plimit) {
    if (!(x > 1.0)) throw DomainError("zeta_euler_product: requires x > 1");
    NeumaierSum logsum;
    for (std::uint32_t p : primes_up_to(plimit)) logsum.add(-std::log1p(-std::pow(double(p), -x)));
    double value = std::exp(logsum.value());
    double log_tail = 2.0 * std::pow(double(plimit), 1.0 - x) / (x - 1.0);
    double bound = value * std::expm1(log_tail) + 16.0 * std::numeric_limits<double>::epsilon() * value;
    return RealApprox(value, bound);
}

// sum_{n <= x} 1/n, compensated.
inline double harmonic_sum(std::uint64_t x) {
    NeumaierSum acc;
    for (std::uint64_t n = x; n >= 1; --n) acc.add(1.0 / double(n));
    return acc.value();
}

// Euler's constant via lim (H_M - log M), accelerated by the 1/(2M) and
// -1/(12M^2) correction terms; the next term 1/(120M^4) bounds the remainder.
inline RealApprox euler_gamma() {
    const std::uint64_t M = 1000000;
    double h = harmonic_sum(M);
    double m = double(M);
    double value = h - std::log(m) - 0.5 / m + 1.0 / (12.0 * m * m);
    double bound = 1.0 / (120.0 * m * m * m * m) + 64.0 * std::numeric_limits<double>::epsilon();
    return RealApprox(value, bound);
}

}  // namespace crs
