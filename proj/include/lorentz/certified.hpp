#pragma once

#include "lorentz/rational.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <stdexcept>
#include <string>

namespace lorentz {

/// 50-decimal-digit binary float used for all inexact evaluation.  The
/// relative rounding error of a single arithmetic operation is below 1e-49,
/// so the conservative per-operation bound below leaves ample slack for the
/// transcendental kernels (exp/log based pow).
using Real = boost::multiprecision::cpp_bin_float_50;

inline constexpr double kUnitRoundoff = 1e-45;

inline Real to_real(const Rational& r) { return Real(r); }

/// A nonnegative quantity with an explicit absolute-error bound: the true
/// value lies in [value - abs_error, value + abs_error].
struct CertifiedReal {
    Real value{0};
    Real abs_error{0};

    bool is_exact_zero() const { return value == 0 && abs_error == 0; }

    /// True value certainly >= bound.
    bool certainly_geq(const Real& bound) const { return value - abs_error >= bound; }
    /// True value certainly <= bound.
    bool certainly_leq(const Real& bound) const { return value + abs_error <= bound; }
};

inline CertifiedReal cr_exact(const Rational& r) {
    if (r < 0) throw std::domain_error("CertifiedReal models nonnegative quantities");
    // A rational -> float conversion rounds once.
    Real v = to_real(r);
    return {v, v * Real(kUnitRoundoff)};
}

inline CertifiedReal cr_add(const CertifiedReal& a, const CertifiedReal& b) {
    Real v = a.value + b.value;
    return {v, a.abs_error + b.abs_error + v * Real(kUnitRoundoff)};
}

inline CertifiedReal cr_scale(const CertifiedReal& a, const Rational& c) {
    if (c < 0) throw std::domain_error("cr_scale: negative factor");
    Real f = to_real(c);
    Real v = a.value * f;
    return {v, a.abs_error * f + v * Real(kUnitRoundoff)};
}

/// a / b for b certainly positive; throws when b could be zero.
inline CertifiedReal cr_div(const CertifiedReal& a, const CertifiedReal& b) {
    if (!(b.value - b.abs_error > 0))
        throw std::domain_error("cr_div: divisor not certainly positive");
    Real v = a.value / b.value;
    Real lo = (a.value - a.abs_error) / (b.value + b.abs_error);
    Real hi = (a.value + a.abs_error) / (b.value - b.abs_error);
    Real err = hi - v > v - lo ? hi - v : v - lo;
    return {v, err + v * Real(kUnitRoundoff)};
}

inline CertifiedReal cr_mul(const CertifiedReal& a, const CertifiedReal& b) {
    Real v = a.value * b.value;
    Real err = a.value * b.abs_error + b.value * a.abs_error + a.abs_error * b.abs_error;
    return {v, err + v * Real(kUnitRoundoff)};
}

/// a - b for quantities known to satisfy a >= b; errors add.
inline CertifiedReal cr_diff(const CertifiedReal& a, const CertifiedReal& b) {
    Real v = a.value - b.value;
    if (v < 0) v = 0; // roundoff below the certified gap
    return {v, a.abs_error + b.abs_error + v * Real(kUnitRoundoff)};
}

namespace detail {

inline Real real_sqrt(const Real& x) {
    using boost::multiprecision::sqrt;
    return sqrt(x);
}

inline Real real_pow(const Real& x, const Real& e) {
    using boost::multiprecision::pow;
    return pow(x, e);
}

} // namespace detail

/// base^e for base >= 0 and rational e, with a certified error bound.
///
/// Fast paths keep the hot loops exact or near-exact:
///   * integer e            -> exact rational power, single rounding;
///   * half-integer e       -> exact integer power then one sqrt
///     (sqrt is an order of magnitude cheaper than pow at this precision);
///   * general rational e   -> exp/log pow with a conservative error bound.
inline CertifiedReal rpow(const Rational& base, const Rational& e) {
    if (base < 0) throw std::domain_error("rpow: negative base");
    if (base == 0) {
        if (e <= 0) throw std::domain_error("rpow: 0 raised to a nonpositive power");
        return {Real(0), Real(0)};
    }
    const Integer& en = numerator(e);
    const Integer& ed = denominator(e);
    if (ed == 1) {
        Rational exact = pow_int(base, en.convert_to<long>());
        return cr_exact(exact);
    }
    if (ed == 2) {
        // base^(n/2) = sqrt(base^n), computed exactly before the square root.
        Rational inner = pow_int(base, en.convert_to<long>());
        Real v = detail::real_sqrt(to_real(inner));
        return {v, v * Real(4 * kUnitRoundoff)};
    }
    Real v = detail::real_pow(to_real(base), to_real(e));
    // exp/log amplifies relative error by roughly |e * log(base)|; bound it
    // crudely but safely via the bit sizes of the operands.
    double mag = 64.0 + static_cast<double>(msb(ed + 1) + msb(abs(en) + 1)) +
                 static_cast<double>(msb(numerator(base) + 1) + msb(denominator(base) + 1));
    return {v, v * Real(mag * kUnitRoundoff)};
}

/// q-th root of a certified nonnegative quantity (q >= 1).  The relative
/// error of the input shrinks by a factor q; the root kernel itself adds a
/// few ulps.
inline CertifiedReal cr_root(const CertifiedReal& a, long q) {
    if (q < 1) throw std::domain_error("cr_root: order must be >= 1");
    if (q == 1) return a;
    if (a.value == 0) {
        Real e = a.abs_error == 0 ? Real(0)
                                  : detail::real_pow(a.abs_error, Real(1) / Real(q));
        return {Real(0), e};
    }
    Real v = q == 2 ? detail::real_sqrt(a.value)
                    : detail::real_pow(a.value, Real(1) / Real(q));
    Real err = v * (a.abs_error / (a.value * q)) + v * Real(32 * kUnitRoundoff);
    return {v, err};
}

/// ln(num/den) for num >= den > 0, certified.
inline CertifiedReal cr_log_ratio(const Rational& num, const Rational& den) {
    if (den <= 0 || num < den) throw std::domain_error("cr_log_ratio: need num >= den > 0");
    using boost::multiprecision::log;
    Real v = log(to_real(Rational(num) / den));
    return {v, (v + 1) * Real(8 * kUnitRoundoff)};
}

/// Nearest dyadic rational with the given number of fractional bits.
/// Used to produce exactly-representable normalization factors.
inline Rational dyadic_approx(const Real& x, unsigned bits) {
    Real scaled = x * detail::real_pow(Real(2), Real(bits));
    Integer rounded = boost::multiprecision::round(scaled).convert_to<Integer>();
    Rational den = pow_int(Rational(2), static_cast<long>(bits));
    return Rational(rounded, 1) / den;
}

inline std::string real_to_string(const Real& x, int digits = 30) {
    return x.str(digits);
}

} // namespace lorentz
