#pragma once

// A double together with an explicit absolute error bound. Analytic routines
// (zeta values, truncated series, Euler products) return these so callers can
// propagate accuracy claims instead of guessing.

#include <cmath>

#include "crs/int128.hpp"

namespace crs {

struct RealApprox {
    double value = 0.0;
    double abs_error_bound = 0.0;

    RealApprox() = default;
    RealApprox(double v, double bound) : value(v), abs_error_bound(bound) {
        if (!(bound >= 0.0) || !std::isfinite(v) || !std::isfinite(bound))
            throw DomainError("RealApprox: bound must be finite and non-negative");
    }

    static RealApprox exact(double v) { return RealApprox(v, 0.0); }

    RealApprox operator+(const RealApprox& o) const {
        return RealApprox(value + o.value, abs_error_bound + o.abs_error_bound);
    }
    RealApprox operator-(const RealApprox& o) const {
        return RealApprox(value - o.value, abs_error_bound + o.abs_error_bound);
    }
    RealApprox operator*(const RealApprox& o) const {
        // |ab' - a'b| <= |a|eb + |b'|ea  with a' = a+-ea, b' = b+-eb.
        double bound = std::abs(value) * o.abs_error_bound +
                       std::abs(o.value) * abs_error_bound +
                       abs_error_bound * o.abs_error_bound;
        return RealApprox(value * o.value, bound);
    }
    RealApprox scaled(double c) const {
        return RealApprox(value * c, abs_error_bound * std::abs(c));
    }

    // Reciprocal, valid only when the interval excludes zero.
    RealApprox inverse() const {
        double lo = std::abs(value) - abs_error_bound;
        if (!(lo > 0.0)) throw DomainError("RealApprox: inverse of interval containing zero");
        return RealApprox(1.0 / value, abs_error_bound / (std::abs(value) * lo));
    }

    bool contains(double x) const { return std::abs(x - value) <= abs_error_bound; }
};

}  // namespace crs
