#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lorentz {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Exact integer power of a rational; `e` may be negative when `base != 0`.
inline Rational pow_int(const Rational& base, long e) {
    if (e == 0) return Rational(1);
    if (base == 0) {
        if (e < 0) throw std::domain_error("pow_int: zero base with negative exponent");
        return Rational(0);
    }
    bool invert = e < 0;
    unsigned long n = invert ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    Rational acc(1), b = base;
    while (n) {
        if (n & 1) acc *= b;
        b *= b;
        n >>= 1;
    }
    if (invert) acc = Rational(1) / acc;
    return acc;
}

/// Canonical text form: "n" when the denominator is 1, else "n/d".
inline std::string rat_to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

namespace detail {

// cpp_int's string constructor treats a leading 0 as an octal prefix, so
// digit strings must be normalized before conversion.
inline Integer digits_to_integer(std::string_view digits, bool negative) {
    std::size_t first = digits.find_first_not_of('0');
    if (first == std::string_view::npos) return Integer(0);
    Integer v(std::string(digits.substr(first)));
    return negative ? -v : v;
}

inline Integer parse_integer_token(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty integer token");
    bool neg = false;
    if (s.front() == '+' || s.front() == '-') {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }
    if (s.empty()) throw std::invalid_argument("sign without digits");
    for (char c : s)
        if (c < '0' || c > '9') throw std::invalid_argument("bad digit in integer token");
    return digits_to_integer(s, neg);
}

} // namespace detail

/// Parses "n", "n/d", plain decimals ("0.25") and scientific notation
/// ("1e-6", "2.5e3") into an exact rational. Throws std::invalid_argument
/// on malformed input or a zero denominator.
inline Rational rat_from_string(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = s.find('/');
    if (slash != std::string_view::npos) {
        Integer num = detail::parse_integer_token(s.substr(0, slash));
        Integer den = detail::parse_integer_token(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in rational literal");
        return Rational(num, den);
    }
    // decimal / scientific form
    std::string_view mant = s;
    long exp10 = 0;
    auto epos = s.find_first_of("eE");
    if (epos != std::string_view::npos) {
        mant = s.substr(0, epos);
        std::string_view etok = s.substr(epos + 1);
        if (etok.empty()) throw std::invalid_argument("empty exponent in rational literal");
        exp10 = std::stol(std::string(etok));
    }
    bool neg = false;
    if (!mant.empty() && (mant.front() == '+' || mant.front() == '-')) {
        neg = mant.front() == '-';
        mant.remove_prefix(1);
    }
    auto dot = mant.find('.');
    std::string digits;
    long frac_len = 0;
    if (dot == std::string_view::npos) {
        digits = std::string(mant);
    } else {
        digits = std::string(mant.substr(0, dot)) + std::string(mant.substr(dot + 1));
        frac_len = static_cast<long>(mant.size() - dot - 1);
    }
    if (digits.empty()) throw std::invalid_argument("no digits in rational literal");
    for (char c : digits)
        if (c < '0' || c > '9') throw std::invalid_argument("bad digit in rational literal");
    Rational r(detail::digits_to_integer(digits, neg), 1);
    long net = exp10 - frac_len;
    if (net != 0) r *= pow_int(Rational(10), net);
    return r;
}

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rational(Integer(num), Integer(den));
}

} // namespace lorentz
