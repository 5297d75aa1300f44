#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cctype>
#include <string>
#include <string_view>

#include "qpr/error.hpp"

namespace qpr {

using BigInt = boost::multiprecision::cpp_int;

// Exact fraction, always in lowest terms with positive denominator
// (cpp_rational canonicalizes on every operation; zero is 0/1).
using Rational = boost::multiprecision::cpp_rational;

inline BigInt num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt den(const Rational& r) { return boost::multiprecision::denominator(r); }

inline bool is_integer(const Rational& r) { return den(r) == 1; }

/// Canonical text form: "p" when integral, "p/q" otherwise.
inline std::string to_string(const Rational& r) {
    std::string s = num(r).str();
    if (!is_integer(r)) {
        s += '/';
        s += den(r).str();
    }
    return s;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// r^e for integer e; negative exponents require r != 0.
inline Rational rat_pow(const Rational& r, long e) {
    if (e == 0) return Rational(1);
    if (r == 0) {
        if (e < 0) throw Error("zero raised to a negative power");
        return Rational(0);
    }
    bool invert = e < 0;
    unsigned long k = invert ? static_cast<unsigned long>(-(e + 1)) + 1UL
                             : static_cast<unsigned long>(e);
    BigInt p = boost::multiprecision::pow(num(r), static_cast<unsigned>(k));
    BigInt q = boost::multiprecision::pow(den(r), static_cast<unsigned>(k));
    return invert ? Rational(q, p) : Rational(p, q);
}

/// Parses "p", "p/q" or a finite decimal ("-1.25") exactly.
inline Rational parse_rational(std::string_view text) {
    auto bad = [&] { return Error("not a rational literal: \"" + std::string(text) + "\""); };
    std::size_t i = 0, n = text.size();
    auto skip_ws = [&] { while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i; };
    skip_ws();
    bool neg = false;
    if (i < n && (text[i] == '+' || text[i] == '-')) neg = text[i++] == '-';
    auto read_digits = [&]() -> std::string {
        std::string d;
        while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) d += text[i++];
        return d;
    };
    std::string whole = read_digits();
    if (whole.empty()) throw bad();
    BigInt p(whole), q(1);
    if (i < n && text[i] == '.') {
        ++i;
        std::string frac = read_digits();
        if (frac.empty()) throw bad();
        for (char c : frac) {
            p = p * 10 + (c - '0');
            q *= 10;
        }
    } else if (i < n && text[i] == '/') {
        ++i;
        std::string d = read_digits();
        if (d.empty()) throw bad();
        q = BigInt(d);
        if (q == 0) throw Error("zero denominator in \"" + std::string(text) + "\"");
    }
    skip_ws();
    if (i != n) throw bad();
    if (neg) p = -p;
    return Rational(p, q);
}

}  // namespace qpr
