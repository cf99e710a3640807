#pragma once

// Exact rational arithmetic on 128-bit integers. Used wherever the contract
// promises exact values (divisor sums with negative exponents, coefficient
// numerators) so rounding only ever happens at an explicit to_double() call.

#include <string>

#include "crs/int128.hpp"

namespace crs {

class Rational {
public:
    Rational() = default;
    Rational(i128 num, i128 den) : num_(num), den_(den) {
        if (den_ == 0) throw DomainError("Rational: zero denominator");
        normalize();
    }
    Rational(i128 n) : num_(n), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(int n) : num_(n), den_(1) {}

    i128 num() const { return num_; }
    i128 den() const { return den_; }

    Rational operator+(const Rational& o) const {
        // num/den + onum/oden over the reduced common denominator.
        i128 g = i128(gcd_u128(u128(den_), u128(o.den_)));
        i128 da = den_ / g;
        i128 db = o.den_ / g;
        i128 n = checked_add(checked_mul(num_, db), checked_mul(o.num_, da));
        i128 d = checked_mul(den_, db);
        return Rational(n, d);
    }
    Rational operator-() const { return Rational(-num_, den_); }
    Rational operator-(const Rational& o) const { return *this + (-o); }
    Rational operator*(const Rational& o) const {
        // Cross-reduce first so intermediates stay small.
        i128 g1 = i128(gcd_u128(u128(abs_i128(num_)), u128(o.den_)));
        i128 g2 = i128(gcd_u128(u128(abs_i128(o.num_)), u128(den_)));
        if (g1 == 0) g1 = 1;
        if (g2 == 0) g2 = 1;
        i128 n = checked_mul(num_ / g1, o.num_ / g2);
        i128 d = checked_mul(den_ / g2, o.den_ / g1);
        return Rational(n, d);
    }
    Rational operator/(const Rational& o) const {
        if (o.num_ == 0) throw DomainError("Rational: division by zero");
        return *this * Rational(o.den_, o.num_);
    }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const {
        return checked_mul(num_, o.den_) < checked_mul(o.num_, den_);
    }

    double to_double() const { return double(num_) / double(den_); }

    bool is_integer() const { return den_ == 1; }

    // "p" for integers, "p/q" otherwise.
    std::string str() const {
        if (den_ == 1) return to_string_i128(num_);
        return to_string_i128(num_) + "/" + to_string_i128(den_);
    }

    static Rational parse(const std::string& text) {
        auto slash = text.find('/');
        if (slash == std::string::npos) return Rational(parse_i128(text), 1);
        i128 n = parse_i128(text.substr(0, slash));
        i128 d = parse_i128(text.substr(slash + 1));
        if (d == 0) throw ParseError("rational literal with zero denominator: '" + text + "'");
        return Rational(n, d);
    }

private:
    void normalize() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        if (num_ == 0) {
            den_ = 1;
            return;
        }
        i128 g = i128(gcd_u128(u128(abs_i128(num_)), u128(den_)));
        num_ /= g;
        den_ /= g;
    }

    i128 num_ = 0;
    i128 den_ = 1;
};

inline Rational pow(const Rational& base, unsigned exp) {
    Rational r(1);
    Rational acc = base;
    while (exp > 0) {
        if (exp & 1u) r = r * acc;
        exp >>= 1u;
        if (exp > 0) acc = acc * acc;
    }
    return r;
}

}  // namespace crs
