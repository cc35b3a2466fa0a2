#pragma once

#include "lorentz/lorentz_norm.hpp"
#include "lorentz/measure_space.hpp"
#include "lorentz/simple_function.hpp"
#include "lorentz/transformation.hpp"

#include <map>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

namespace lorentz {

/// Composition operator C_tau g = g o tau, acting on simple functions by
/// transporting level sets through exact preimages.
struct CompositionOperator {
    MeasureSpace space;
    Transformation tau;
};

/// Multiplication operator M_theta g = theta * g.  Only |theta| matters for
/// every quantity computed here (supports, distribution functions, norms),
/// so the stored values are magnitudes; entries absent from the table fall
/// back to the default magnitude.
struct MultiplicationOperator {
    MeasureSpace space;
    std::map<AtomId, Rational> magnitudes;
    Rational default_magnitude;

    Rational magnitude_at(const AtomId& a) const {
        auto it = magnitudes.find(a);
        return it == magnitudes.end() ? default_magnitude : it->second;
    }
};

inline MultiplicationOperator make_multiplication_operator(
    const MeasureSpace& space, const std::vector<std::pair<AtomId, Rational>>& theta,
    const Rational& default_value) {
    MultiplicationOperator op;
    op.space = space;
    op.default_magnitude = default_value < 0 ? -default_value : default_value;
    for (const auto& [a, v] : theta) {
        if (!space.contains(a))
            throw std::invalid_argument("multiplication operator: atom " +
                                        atom_to_string(a) + " is not in the space");
        Rational mag = v < 0 ? -v : v;
        if (!op.magnitudes.emplace(a, mag).second)
            throw std::invalid_argument("multiplication operator: duplicate atom " +
                                        atom_to_string(a));
    }
    return op;
}

/// (C_tau)^n g computed exactly: each level set {g = v} pulls back to its
/// n-step preimage, on which the result takes the value v.  Level sets of
/// distinct values have disjoint preimages, so no collisions can occur.
inline SimpleFunction compose_apply(const CompositionOperator& op, const SimpleFunction& g,
                                    int n) {
    if (n < 0) throw std::invalid_argument("compose_apply: negative power");
    detail::require_supported(op.space, g, "compose_apply");
    if (n == 0 || g.is_zero()) return g;
    std::map<Rational, std::vector<AtomId>> levels;
    for (const auto& [a, v] : g.entries) levels[v].push_back(a);
    std::vector<std::pair<AtomId, Rational>> out;
    for (const auto& [v, atoms] : levels) {
        MeasurableSet pre = preimage_n(op.space, op.tau, MeasurableSet(atoms), n);
        for (const auto& a : pre.atoms) out.emplace_back(a, v);
    }
    return make_simple_function(std::move(out));
}

/// |M_theta^n g| = |theta|^n |g|, exact.
inline SimpleFunction multiply_apply(const MultiplicationOperator& op,
                                     const SimpleFunction& g, int n) {
    if (n < 0) throw std::invalid_argument("multiply_apply: negative power");
    detail::require_supported(op.space, g, "multiply_apply");
    if (n == 0 || g.is_zero()) return g;
    std::vector<std::pair<AtomId, Rational>> out;
    out.reserve(g.entries.size());
    for (const auto& [a, v] : g.entries) {
        Rational m = op.magnitude_at(a);
        if (m == 0) continue;
        out.emplace_back(a, v * pow_int(m, n));
    }
    return make_simple_function(std::move(out));
}

using LinearOperator = std::variant<CompositionOperator, MultiplicationOperator>;

inline const MeasureSpace& operator_space(const LinearOperator& op) {
    return std::visit([](const auto& o) -> const MeasureSpace& { return o.space; }, op);
}

inline SimpleFunction apply_once(const LinearOperator& op, const SimpleFunction& g) {
    if (std::holds_alternative<CompositionOperator>(op))
        return compose_apply(std::get<CompositionOperator>(op), g, 1);
    return multiply_apply(std::get<MultiplicationOperator>(op), g, 1);
}

struct OrbitEntry {
    int n = 0;
    Rational support_measure;
    CertifiedReal norm;
};

struct OrbitTrace {
    LorentzIndex index;
    std::vector<OrbitEntry> entries; // n = 0 .. horizon
};

/// Exact orbit g, Tg, T^2 g, ..., T^horizon g with support measures and
/// certified norms.  Empty supports stay empty, so the tail after a death
/// is exactly zero.
inline OrbitTrace orbit_trace(const LinearOperator& op, const SimpleFunction& g,
                              const LorentzIndex& idx, int horizon) {
    if (horizon < 0) throw std::invalid_argument("orbit_trace: negative horizon");
    const MeasureSpace& space = operator_space(op);
    OrbitTrace tr;
    tr.index = idx;
    tr.entries.reserve(horizon + 1);
    SimpleFunction cur = g;
    for (int n = 0;; ++n) {
        OrbitEntry e;
        e.n = n;
        e.support_measure = measure_of(space, cur.support());
        e.norm = lorentz_norm(space, cur, idx);
        tr.entries.push_back(std::move(e));
        if (n == horizon) break;
        cur = apply_once(op, cur);
    }
    return tr;
}

enum class OrbitClass { Regular, SemiIrregular, Irregular };

inline std::string orbit_class_to_string(OrbitClass c) {
    switch (c) {
        case OrbitClass::Regular: return "REGULAR";
        case OrbitClass::SemiIrregular: return "SEMI_IRREGULAR";
        case OrbitClass::Irregular: return "IRREGULAR";
    }
    throw std::logic_error("unknown orbit class");
}

/// Fraction of the initial norm that the orbit must revisit for the
/// "does not tend to zero" half of semi-irregularity.
inline const Rational kSemiIrregularFloor = Rational(1, 2);

struct OrbitClassification {
    OrbitClass cls = OrbitClass::Regular;
    int argmin = 0; // n >= 1 attaining the smallest norm
    int argmax = 0; // n >= 1 attaining the largest norm
    CertifiedReal min_norm;
    CertifiedReal max_norm;
};

/// Classifies an orbit against absolute norm thresholds: irregular when it
/// certainly dips to `low` and certainly climbs to `high`; semi-irregular
/// when it dips to `low` and still revisits at least half the initial norm.
/// Norms at n >= 1 are compared by value, ties resolved at the smaller n.
inline OrbitClassification classify_orbit(const OrbitTrace& trace, const Real& low,
                                          const Real& high) {
    if (trace.entries.size() < 2)
        throw std::invalid_argument("classify_orbit: need at least one step");
    OrbitClassification c;
    c.argmin = c.argmax = 1;
    c.min_norm = c.max_norm = trace.entries[1].norm;
    for (std::size_t k = 2; k < trace.entries.size(); ++k) {
        const auto& e = trace.entries[k];
        if (e.norm.value < c.min_norm.value) {
            c.min_norm = e.norm;
            c.argmin = e.n;
        }
        if (e.norm.value > c.max_norm.value) {
            c.max_norm = e.norm;
            c.argmax = e.n;
        }
    }
    const CertifiedReal& initial = trace.entries[0].norm;
    bool dips = c.min_norm.certainly_leq(low);
    bool explodes = c.max_norm.certainly_geq(high);
    Real floor = initial.value * to_real(kSemiIrregularFloor);
    if (dips && explodes)
        c.cls = OrbitClass::Irregular;
    else if (dips && c.max_norm.certainly_geq(floor))
        c.cls = OrbitClass::SemiIrregular;
    else
        c.cls = OrbitClass::Regular;
    return c;
}

struct CompositionBound {
    Rational sup_measure_ratio; // max over the window of mu(fiber(a)) / mu({a})
    AtomId argmax;
    CertifiedReal norm_bound; // sup_measure_ratio^{1/p}
    std::size_t atoms_checked = 0;
};

/// Window-supremum of the one-step measure expansion mu(tau^{-1}{a})/mu({a})
/// and the induced bound M^{1/p} on the operator norm of C_tau on L^{pq}
/// (any q): mu(tau^{-1}A) <= M mu(A) implies (g o tau)*(t) <= g*(t/M).
inline CompositionBound composition_bound(const MeasureSpace& space,
                                          const Transformation& tau,
                                          const LorentzIndex& idx,
                                          std::size_t window_size) {
    SpaceWindow w = space.window(window_size);
    if (w.atoms.empty()) throw std::invalid_argument("composition_bound: empty window");
    CompositionBound b;
    b.sup_measure_ratio = -1;
    b.atoms_checked = w.atoms.size();
    for (const auto& a : w.atoms) {
        Rational fiber_mass(0);
        for (const auto& s : tau.fiber(a)) fiber_mass += space.weight(s);
        Rational ratio = fiber_mass / space.weight(a);
        if (ratio > b.sup_measure_ratio) {
            b.sup_measure_ratio = ratio;
            b.argmax = a;
        }
    }
    if (idx.p_infinite)
        b.norm_bound = cr_exact(Rational(1)); // composition never expands sup norms
    else if (b.sup_measure_ratio == 0)
        b.norm_bound = {};
    else
        b.norm_bound = rpow(b.sup_measure_ratio, 1 / idx.p);
    return b;
}

struct SphereSample {
    SimpleFunction g;
    CertifiedReal norm; // certified to lie within kSphereTolerance of 1
};

inline const Rational kSphereTolerance = Rational(1, 1000000000); // 1e-9

/// Rescales g onto the unit sphere of L^{pq} by an exactly representable
/// dyadic factor, certifying | ||g|| - 1 | <= 1e-9.
inline SphereSample make_sphere_sample(const MeasureSpace& space, const SimpleFunction& g,
                                       const LorentzIndex& idx) {
    if (g.is_zero())
        throw std::invalid_argument("make_sphere_sample: zero function has no direction");
    CertifiedReal n0 = lorentz_norm(space, g, idx);
    Real tol = to_real(kSphereTolerance);
    auto within = [&](const CertifiedReal& n) {
        Real gap = n.value - 1;
        if (gap < 0) gap = -gap;
        return gap + n.abs_error <= tol;
    };
    if (within(n0)) return {g, n0};
    for (unsigned bits = 48; bits <= 768; bits *= 2) {
        Rational c = dyadic_approx(Real(1) / n0.value, bits);
        if (c <= 0) continue;
        SimpleFunction scaled_g = scale(g, c);
        CertifiedReal n1 = cr_scale(n0, c);
        if (within(n1)) return {std::move(scaled_g), n1};
    }
    throw std::runtime_error("make_sphere_sample: could not certify normalization");
}

} // namespace lorentz
