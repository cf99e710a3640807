#pragma once

// CSV exchange format for 1-based arithmetic-function tables: a literal
// "n,value" header, then one row per n starting at n = 1 with no gaps.
// Values are decimal literals or exact "p/q" rationals.

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "crs/int128.hpp"
#include "crs/rational.hpp"

namespace crs {

namespace detail {

inline std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

inline double parse_value_field(const std::string& field, std::size_t lineno) {
    if (field.find('/') != std::string::npos) return Rational::parse(field).to_double();
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(field, &used);
    } catch (const std::exception&) {
        throw ParseError("csv line " + std::to_string(lineno) + ": bad value '" + field + "'");
    }
    if (used != field.size())
        throw ParseError("csv line " + std::to_string(lineno) + ": bad value '" + field + "'");
    return v;
}

// Exact reading: integers, p/q, or plain decimals (scaled to a power of ten).
inline Rational parse_rational_field(const std::string& field, std::size_t lineno) {
    if (field.find('/') != std::string::npos) {
        try {
            return Rational::parse(field);
        } catch (const Error&) {
            throw ParseError("csv line " + std::to_string(lineno) + ": bad rational '" + field +
                             "'");
        }
    }
    auto dot = field.find('.');
    std::string digits = dot == std::string::npos ? field : field.substr(0, dot) + field.substr(dot + 1);
    std::size_t frac_len = dot == std::string::npos ? 0 : field.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+")
        throw ParseError("csv line " + std::to_string(lineno) + ": bad value '" + field + "'");
    try {
        i128 num = parse_i128(digits);
        i128 den = 1;
        for (std::size_t i = 0; i < frac_len; ++i) den = checked_mul(den, i128(10));
        return Rational(num, den);
    } catch (const Error&) {
        throw ParseError("csv line " + std::to_string(lineno) + ": bad value '" + field + "'");
    }
}

template <typename Value, typename FieldParser>
std::vector<Value> read_series(std::istream& in, FieldParser parse_field) {
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != "n,value")
        throw ParseError("csv: missing 'n,value' header");
    std::vector<Value> out;
    out.push_back(Value());  // index 0 unused
    std::size_t lineno = 1;
    std::uint64_t expected = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError("csv line " + std::to_string(lineno) + ": expected 'n,value'");
        std::string n_field = line.substr(0, comma);
        std::uint64_t n;
        try {
            std::size_t used = 0;
            n = std::stoull(n_field, &used);
            if (used != n_field.size()) throw ParseError("trailing junk");
        } catch (const std::exception&) {
            throw ParseError("csv line " + std::to_string(lineno) + ": bad index '" + n_field +
                             "'");
        }
        if (n != expected)
            throw ParseError("csv line " + std::to_string(lineno) + ": index " + n_field +
                             " out of order (expected " + std::to_string(expected) + ")");
        out.push_back(parse_field(line.substr(comma + 1), lineno));
        ++expected;
    }
    if (out.size() == 1) throw ParseError("csv: no data rows");
    return out;
}

}  // namespace detail

// values[n] holds row n; values[0] is a placeholder.
inline std::vector<double> read_series_csv(std::istream& in) {
    return detail::read_series<double>(in, detail::parse_value_field);
}

inline std::vector<double> read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open csv file '" + path + "'");
    return read_series_csv(in);
}

inline std::vector<Rational> read_rational_series_csv(std::istream& in) {
    return detail::read_series<Rational>(in, detail::parse_rational_field);
}

inline std::vector<Rational> read_rational_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open csv file '" + path + "'");
    return read_rational_series_csv(in);
}

// Writes rows 1..values.size()-1; round-trips doubles exactly.
inline void write_series_csv(std::ostream& out, const std::vector<double>& values) {
    out << "n,value\n";
    out << std::setprecision(17);
    for (std::size_t n = 1; n < values.size(); ++n) out << n << "," << values[n] << "\n";
}

inline void write_series_csv(const std::string& path, const std::vector<double>& values) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write csv file '" + path + "'");
    write_series_csv(out, values);
}

inline void write_rational_series_csv(std::ostream& out, const std::vector<Rational>& values) {
    out << "n,value\n";
    for (std::size_t n = 1; n < values.size(); ++n) out << n << "," << values[n].str() << "\n";
}

inline void write_rational_series_csv(const std::string& path, const std::vector<Rational>& values) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write csv file '" + path + "'");
    write_rational_series_csv(out, values);
}

}  // namespace crs
