#pragma once

// Checked 128-bit integer helpers. Every arithmetic path that could leave the
// representable range throws instead of wrapping; callers that stay inside
// documented preconditions never see these throws.

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace crs {

using i128 = __int128;
using u128 = unsigned __int128;

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Inputs outside a documented precondition (bad domain, unusable value).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

// A computation left the 128-bit (or stated) range.
class OverflowError : public Error {
public:
    explicit OverflowError(const std::string& what) : Error(what) {}
};

// A floating-point oracle failed its own accuracy contract.
class ToleranceError : public Error {
public:
    explicit ToleranceError(const std::string& what) : Error(what) {}
};

// Malformed textual input (CSV, rational literals, config echoes).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

inline std::string to_string_i128(i128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    // Negate via u128 so i128 min does not overflow.
    u128 u = neg ? u128(0) - u128(v) : u128(v);
    char buf[48];
    int pos = 48;
    while (u > 0) {
        buf[--pos] = char('0' + int(u % 10));
        u /= 10;
    }
    std::string s(buf + pos, 48 - pos);
    return neg ? "-" + s : s;
}

inline std::string to_string_u128(u128 u) {
    if (u == 0) return "0";
    char buf[48];
    int pos = 48;
    while (u > 0) {
        buf[--pos] = char('0' + int(u % 10));
        u /= 10;
    }
    return std::string(buf + pos, 48 - pos);
}

inline i128 parse_i128(const std::string& s) {
    if (s.empty()) throw ParseError("empty integer literal");
    std::size_t i = 0;
    bool neg = false;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        i = 1;
    }
    if (i == s.size()) throw ParseError("sign without digits: '" + s + "'");
    u128 acc = 0;
    const u128 limit = neg ? (u128(1) << 127) : (u128(1) << 127) - 1;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c < '0' || c > '9') throw ParseError("bad digit in integer literal: '" + s + "'");
        u128 next = acc * 10 + u128(c - '0');
        if (next / 10 != acc || next > limit)
            throw OverflowError("integer literal out of 128-bit range: '" + s + "'");
        acc = next;
    }
    if (neg && acc == (u128(1) << 127)) return -i128(acc - 1) - 1;
    return neg ? -i128(acc) : i128(acc);
}

inline i128 checked_add(i128 a, i128 b) {
    i128 r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("128-bit add overflow");
    return r;
}

inline i128 checked_sub(i128 a, i128 b) {
    i128 r;
    if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("128-bit subtract overflow");
    return r;
}

inline i128 checked_mul(i128 a, i128 b) {
    i128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("128-bit multiply overflow");
    return r;
}

// base^exp with overflow detection at every step.
inline i128 checked_pow(i128 base, unsigned exp) {
    i128 result = 1;
    i128 acc = base;
    while (exp > 0) {
        if (exp & 1u) result = checked_mul(result, acc);
        exp >>= 1u;
        if (exp > 0) acc = checked_mul(acc, acc);
    }
    return result;
}

// An s-th power kept together with its base so later code can recover either
// side without guessing roots.
struct SPower {
    std::uint64_t base = 0;
    unsigned s = 1;
    i128 value = 0;

    SPower() = default;
    SPower(std::uint64_t base_, unsigned s_) : base(base_), s(s_) {
        if (s_ == 0) throw DomainError("SPower: exponent s must be >= 1");
        value = checked_pow(i128(base_), s_);
    }
};

inline u128 gcd_u128(u128 a, u128 b) {
    while (b != 0) {
        u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline i128 abs_i128(i128 v) { return v < 0 ? -v : v; }

inline double to_double(i128 v) { return double(v); }

}  // namespace crs
