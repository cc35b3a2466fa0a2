#pragma once

#include "lorentz/certified.hpp"
#include "lorentz/rational.hpp"
#include "lorentz/simple_function.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace lorentz {

/// Index pair (p, q) of a Lorentz space L^{pq}: p in (1, infinity] and
/// q in [1, infinity], where p = infinity forces q = infinity.
struct LorentzIndex {
    bool p_infinite = false;
    bool q_infinite = false;
    Rational p; // meaningful when !p_infinite; always > 1
    Rational q; // meaningful when !q_infinite; always >= 1

    /// Conjugate exponent p' = p/(p-1); equals 1 for p = infinity.
    Rational conjugate() const {
        if (p_infinite) return Rational(1);
        return p / (p - 1);
    }

    friend bool operator==(const LorentzIndex&, const LorentzIndex&) = default;
};

inline LorentzIndex make_lorentz_index(const std::optional<Rational>& p,
                                       const std::optional<Rational>& q) {
    LorentzIndex idx;
    idx.p_infinite = !p.has_value();
    idx.q_infinite = !q.has_value();
    if (idx.p_infinite && !idx.q_infinite)
        throw std::invalid_argument("lorentz index: p = infinity requires q = infinity");
    if (!idx.p_infinite) {
        if (*p <= 1) throw std::invalid_argument("lorentz index: p must exceed 1");
        idx.p = *p;
    }
    if (!idx.q_infinite) {
        if (*q < 1) throw std::invalid_argument("lorentz index: q must be at least 1");
        idx.q = *q;
    }
    return idx;
}

/// Parses "p" and "q" given as rational literals or "inf".
inline LorentzIndex index_from_strings(const std::string& p, const std::string& q) {
    auto parse = [](const std::string& s) -> std::optional<Rational> {
        if (s == "inf" || s == "infinity") return std::nullopt;
        return rat_from_string(s);
    };
    return make_lorentz_index(parse(p), parse(q));
}

inline std::string index_p_string(const LorentzIndex& idx) {
    return idx.p_infinite ? "inf" : rat_to_string(idx.p);
}
inline std::string index_q_string(const LorentzIndex& idx) {
    return idx.q_infinite ? "inf" : rat_to_string(idx.q);
}

namespace detail {

inline Integer binomial(long n, long k) {
    Integer num(1), den(1);
    for (long j = 0; j < k; ++j) {
        num *= Integer(n - j);
        den *= Integer(j + 1);
    }
    return num / den;
}

// ---- closed form for integer q -------------------------------------------
//
// With alpha = q/p, the q-th power of the norm is
//     alpha * Integral_0^inf t^{alpha-1} g**(t)^q dt.
// On a plateau [t0, t1] of g* the running integral of g* is affine,
// S(t) = C + v t with C = S(t0) - v t0 >= 0, so the integrand equals
// t^{alpha-q-1} (C + v t)^q.  Expanding the binomial gives exponents
// e_j = alpha - q + j, each contributing a power-rule antiderivative
// (a logarithm when e_j = 0).  Every summand is nonnegative, so no
// cancellation occurs and the certified errors simply accumulate.

struct Plateau {
    Rational t0, t1; // plateau endpoints (cumulative measures)
    Rational v;      // value of g* on the plateau
    Rational c;      // S(t0) - v * t0
};

inline CertifiedReal plateau_integral_int_q(const Plateau& pl, const Rational& alpha,
                                            long q) {
    if (pl.c == 0) {
        // pure power plateau: v^q * (t1^alpha - t0^alpha) / alpha
        CertifiedReal diff = cr_diff(rpow(pl.t1, alpha),
                                     pl.t0 == 0 ? CertifiedReal{} : rpow(pl.t0, alpha));
        return cr_scale(diff, pow_int(pl.v, q) / alpha);
    }
    CertifiedReal acc{};
    for (long j = 0; j <= q; ++j) {
        Rational e = alpha - q + j;
        Rational coef = Rational(binomial(q, j)) * pow_int(pl.c, q - j) * pow_int(pl.v, j);
        CertifiedReal factor;
        if (e == 0) {
            factor = cr_log_ratio(pl.t1, pl.t0);
        } else if (e > 0) {
            factor = cr_scale(cr_diff(rpow(pl.t1, e), rpow(pl.t0, e)), 1 / e);
        } else {
            factor = cr_scale(cr_diff(rpow(pl.t0, e), rpow(pl.t1, e)), -1 / e);
        }
        acc = cr_add(acc, cr_scale(factor, coef));
    }
    return acc;
}

// ---- adaptive quadrature for non-integer q --------------------------------

template <typename F>
CertifiedReal adaptive_simpson(const F& f, const Real& a, const Real& b, const Real& fa,
                               const Real& fm, const Real& fb, const Real& whole,
                               const Real& tol, int depth) {
    Real m = (a + b) / 2;
    Real lm = (a + m) / 2, rm = (m + b) / 2;
    Real flm = f(lm), frm = f(rm);
    Real left = (m - a) / 6 * (fa + 4 * flm + fm);
    Real right = (b - m) / 6 * (fm + 4 * frm + fb);
    Real delta = left + right - whole;
    Real adelta = delta < 0 ? Real(-delta) : delta;
    if (depth <= 0 || adelta <= 15 * tol) {
        Real v = left + right + delta / 15;
        return {v, adelta / 15 + (v < 0 ? Real(-v) : v) * Real(kUnitRoundoff)};
    }
    CertifiedReal l = adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1);
    CertifiedReal r = adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
    return cr_add(l, r);
}

inline CertifiedReal plateau_integral_quad(const Plateau& pl, const Rational& alpha,
                                           const Rational& q) {
    Real ra = to_real(pl.t0), rb = to_real(pl.t1);
    Real rc = to_real(pl.c), rv = to_real(pl.v);
    Real re = to_real(alpha - q - 1), rq = to_real(q);
    auto f = [&](const Real& t) {
        using boost::multiprecision::pow;
        return pow(t, re) * pow(rc + rv * t, rq);
    };
    Real fa = f(ra), fb = f(rb), fm = f((ra + rb) / 2);
    Real whole = (rb - ra) / 6 * (fa + 4 * fm + fb);
    // 1e-12 relative is orders of magnitude tighter than any downstream
    // tolerance while keeping the recursion shallow in 50-digit arithmetic
    Real tol = (whole < 0 ? Real(-whole) : whole) * Real(1e-12) + Real(1e-24);
    CertifiedReal r = adaptive_simpson(f, ra, rb, fa, fm, fb, whole, tol, 20);
    // pow kernel error on each evaluation, folded in as a relative bound
    r.abs_error += r.value * Real(512 * kUnitRoundoff);
    return r;
}

} // namespace detail

/// Lorentz norm of an exact decreasing step function (a rearrangement).
///
/// q = infinity uses the supremum formula sup_t t^{1/p} g**(t); since each
/// plateau function has an interior minimum, the supremum is attained at a
/// breakpoint and is compared exactly through integer powers.  Integer q
/// uses the closed binomial form; non-integer q falls back to adaptive
/// Simpson quadrature on the interior plateaus with closed first plateau
/// and tail.
inline CertifiedReal lorentz_norm_of_rearrangement(const StepFunction& sf,
                                                   const LorentzIndex& idx) {
    if (sf.is_zero()) return {};

    if (idx.q_infinite) {
        if (idx.p_infinite) return cr_exact(sf.values.front()); // L^{inf,inf} = sup
        long u = numerator(idx.p).convert_to<long>();
        long w = denominator(idx.p).convert_to<long>();
        // key_i = (t_i^{1/p} g**(t_i))^u = S_i^u t_i^{w-u}, an exact rational
        Rational best(-1);
        Rational s(0), prev(0);
        for (std::size_t i = 0; i < sf.breaks.size(); ++i) {
            s += sf.values[i] * (sf.breaks[i] - prev);
            prev = sf.breaks[i];
            Rational key = pow_int(s, u) * pow_int(sf.breaks[i], w - u);
            if (key > best) best = key;
        }
        return rpow(best, Rational(1, u));
    }

    const Rational alpha = idx.q / idx.p; // q/p > 0
    const bool integer_q = denominator(idx.q) == 1;
    const long qi = integer_q ? numerator(idx.q).convert_to<long>() : 0;

    CertifiedReal total{};
    Rational s(0), prev(0);
    for (std::size_t i = 0; i < sf.breaks.size(); ++i) {
        detail::Plateau pl;
        pl.t0 = prev;
        pl.t1 = sf.breaks[i];
        pl.v = sf.values[i];
        pl.c = s - pl.v * pl.t0;
        s += pl.v * (pl.t1 - pl.t0);
        prev = pl.t1;
        if (integer_q) {
            total = cr_add(total, detail::plateau_integral_int_q(pl, alpha, qi));
        } else if (pl.c == 0) {
            // power-rule plateau, exact in closed form for any q
            CertifiedReal diff = cr_diff(rpow(pl.t1, alpha),
                                         pl.t0 == 0 ? CertifiedReal{} : rpow(pl.t0, alpha));
            total = cr_add(total, cr_scale(cr_mul(diff, rpow(pl.v, idx.q)), 1 / alpha));
        } else {
            total = cr_add(total, detail::plateau_integral_quad(pl, alpha, idx.q));
        }
    }
    // tail beyond the support: g**(t) = S/t, integral = S^q t_m^{alpha-q}/(q-alpha),
    // convergent because q > alpha, i.e. p > 1
    const Rational tm = sf.breaks.back();
    CertifiedReal tail = cr_mul(rpow(s, idx.q), rpow(tm, alpha - idx.q));
    total = cr_add(total, cr_scale(tail, 1 / (idx.q - alpha)));

    total = cr_scale(total, alpha); // the q/p prefactor
    if (integer_q) return cr_root(total, qi);

    // non-integer q: root with fractional exponent 1/q
    if (total.value == 0) return total;
    using boost::multiprecision::pow;
    Real v = pow(total.value, to_real(1 / idx.q));
    Real err = v * (total.abs_error / total.value) / to_real(idx.q) +
               v * Real(64 * kUnitRoundoff);
    return {v, err};
}

/// Lorentz norm of a simple function over an atomic space, certified.
inline CertifiedReal lorentz_norm(const MeasureSpace& space, const SimpleFunction& g,
                                  const LorentzIndex& idx) {
    if (g.is_zero()) return {};
    return lorentz_norm_of_rearrangement(decreasing_rearrangement(space, g), idx);
}

/// Closed-form norm of an indicator of a set with measure mu:
/// (p')^{1/q} mu^{1/p} for finite q, mu^{1/p} for q = infinity
/// (1 for p = q = infinity when mu > 0).
inline CertifiedReal indicator_norm(const Rational& mu, const LorentzIndex& idx) {
    if (mu < 0) throw std::invalid_argument("indicator_norm: negative measure");
    if (mu == 0) return {};
    if (idx.q_infinite) {
        if (idx.p_infinite) return cr_exact(Rational(1));
        return rpow(mu, 1 / idx.p);
    }
    return cr_mul(rpow(idx.conjugate(), 1 / idx.q), rpow(mu, 1 / idx.p));
}

} // namespace lorentz
