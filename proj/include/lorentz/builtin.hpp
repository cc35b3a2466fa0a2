#pragma once

#include "lorentz/measure_space.hpp"
#include "lorentz/rational.hpp"
#include "lorentz/transformation.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace lorentz {

/// A space together with the self-map that drives the composition operator.
struct DynamicalSystem {
    MeasureSpace space;
    Transformation tau;
};

enum class BuiltinFamily {
    TwoRowFiber,  // two-row space with geometric fibers attached to Z
    UnilateralShift, // N = {1,2,...}, weight r^n, tau(n) = n+1
    BilateralShift,  // Z, weight r^i, tau(i) = i+1
    BilateralValley, // Z, weight r^|i|, tau(i) = i+1
};

inline BuiltinFamily builtin_family_from_string(const std::string& s) {
    if (s == "two_row_fiber") return BuiltinFamily::TwoRowFiber;
    if (s == "unilateral_shift") return BuiltinFamily::UnilateralShift;
    if (s == "bilateral_shift") return BuiltinFamily::BilateralShift;
    if (s == "bilateral_valley") return BuiltinFamily::BilateralValley;
    throw std::invalid_argument("unknown builtin family: " + s);
}

namespace detail {

// Enumeration of Z in canonical order: 0, -1, 1, -2, 2, ...
inline std::int64_t zigzag(std::size_t k) {
    if (k == 0) return 0;
    if (k % 2 == 1) return -static_cast<std::int64_t>((k + 1) / 2);
    return static_cast<std::int64_t>(k / 2);
}

// ---- two-row family ------------------------------------------------------
//
// Atoms are pairs.  The base row {(i,0) : i in Z} carries weight 3^{-|i|}
// and shifts by two: tau(i,0) = (i+2,0).  Above every i >= 1 hangs a finite
// fiber {(i,1),...,(i,i)} that feeds into the base row one step at a time:
// tau(i,j) = (i,j-1).  The fiber weights grow geometrically towards the top,
// weight(i,j) = 3^{-(i-j)} for j < i and weight(i,i) = 1.

inline bool two_row_contains(const AtomId& id) {
    if (!id.is_pair) return false;
    if (id.b == 0) return true;
    return id.a >= 1 && 1 <= id.b && id.b <= id.a;
}

inline Rational two_row_weight(const AtomId& id) {
    if (id.b == 0) {
        std::int64_t m = id.a < 0 ? -id.a : id.a;
        return pow_int(Rational(1, 3), static_cast<long>(m));
    }
    if (id.b == id.a) return Rational(1);
    return pow_int(Rational(1, 3), static_cast<long>(id.a - id.b));
}

// Layer s holds the atoms with |a+b| = s, sorted by (a,b):
//   (-s,0), then fiber atoms (n, s-n) for ceil(s/2) <= n <= s-1, then (s,0).
inline std::size_t two_row_layer_size(std::int64_t s) {
    if (s == 0) return 1;
    return 2 + static_cast<std::size_t>(s / 2);
}

inline AtomId two_row_atom_at(std::size_t k) {
    std::int64_t s = 0;
    std::size_t skipped = 0;
    while (skipped + two_row_layer_size(s) <= k) {
        skipped += two_row_layer_size(s);
        ++s;
    }
    std::size_t pos = k - skipped;
    if (s == 0) return AtomId(0, 0);
    if (pos == 0) return AtomId(-s, 0);
    std::size_t fiber_count = static_cast<std::size_t>(s / 2);
    if (pos <= fiber_count) {
        std::int64_t n = (s + 1) / 2 + static_cast<std::int64_t>(pos) - 1;
        return AtomId(n, s - n);
    }
    return AtomId(s, 0);
}

} // namespace detail

/// Constructs one of the structured example systems.  The shift families
/// take a positive rational base r != 1; the two-row family takes none.
inline DynamicalSystem make_builtin_system(BuiltinFamily family,
                                           std::optional<Rational> base = std::nullopt) {
    auto impl = std::make_shared<MeasureSpace::Impl>();
    Transformation tau;

    if (family == BuiltinFamily::TwoRowFiber) {
        if (base)
            throw std::invalid_argument("two_row_fiber takes no base parameter");
        impl->family = "two_row_fiber";
        impl->contains_fn = detail::two_row_contains;
        impl->weight_fn = detail::two_row_weight;
        impl->atom_at_fn = detail::two_row_atom_at;
        // total mass is infinite: every fiber top has weight 1

        tau.forward = [](const AtomId& a) -> AtomId {
            if (!detail::two_row_contains(a))
                throw std::invalid_argument("tau: atom " + atom_to_string(a) +
                                            " is not in the space");
            if (a.b == 0) return AtomId(a.a + 2, 0);
            return AtomId(a.a, a.b - 1);
        };
        tau.fiber = [](const AtomId& a) -> std::vector<AtomId> {
            if (!detail::two_row_contains(a))
                throw std::invalid_argument("fiber: atom " + atom_to_string(a) +
                                            " is not in the space");
            if (a.b == 0) {
                std::vector<AtomId> f{AtomId(a.a - 2, 0)};
                if (a.a >= 1) f.push_back(AtomId(a.a, 1));
                return f;
            }
            if (a.b + 1 <= a.a) return {AtomId(a.a, a.b + 1)};
            return {};
        };
        return {MeasureSpace(std::move(impl)), std::move(tau)};
    }

    if (!base) throw std::invalid_argument("shift family requires a base parameter");
    Rational r = *base;
    if (r <= 0) throw std::invalid_argument("shift base must be positive");
    if (r == 1)
        throw std::invalid_argument("shift base 1 gives constant weights; not a valid family");
    impl->parameter = rat_to_string(r);

    switch (family) {
        case BuiltinFamily::UnilateralShift: {
            impl->family = "unilateral_shift";
            impl->contains_fn = [](const AtomId& a) { return !a.is_pair && a.a >= 1; };
            impl->weight_fn = [r](const AtomId& a) {
                return pow_int(r, static_cast<long>(a.a));
            };
            impl->atom_at_fn = [](std::size_t k) {
                return AtomId(static_cast<std::int64_t>(k + 1));
            };
            if (r < 1) impl->total = r / (1 - r);
            break;
        }
        case BuiltinFamily::BilateralShift: {
            impl->family = "bilateral_shift";
            impl->contains_fn = [](const AtomId& a) { return !a.is_pair; };
            impl->weight_fn = [r](const AtomId& a) {
                return pow_int(r, static_cast<long>(a.a));
            };
            impl->atom_at_fn = [](std::size_t k) { return AtomId(detail::zigzag(k)); };
            break;
        }
        case BuiltinFamily::BilateralValley: {
            impl->family = "bilateral_valley";
            impl->contains_fn = [](const AtomId& a) { return !a.is_pair; };
            impl->weight_fn = [r](const AtomId& a) {
                std::int64_t m = a.a < 0 ? -a.a : a.a;
                return pow_int(r, static_cast<long>(m));
            };
            impl->atom_at_fn = [](std::size_t k) { return AtomId(detail::zigzag(k)); };
            if (r < 1) impl->total = (1 + r) / (1 - r);
            break;
        }
        default:
            throw std::logic_error("unhandled builtin family");
    }

    if (impl->total) {
        auto weight_fn = impl->weight_fn;
        auto atom_at_fn = impl->atom_at_fn;
        Rational total = *impl->total;
        impl->tail_fn = [weight_fn, atom_at_fn, total](std::size_t k) {
            Rational used(0);
            for (std::size_t i = 0; i < k; ++i) used += weight_fn(atom_at_fn(i));
            return total - used;
        };
    }

    bool unilateral = family == BuiltinFamily::UnilateralShift;
    auto contains = impl->contains_fn;
    tau.forward = [contains](const AtomId& a) -> AtomId {
        if (!contains(a))
            throw std::invalid_argument("tau: atom " + atom_to_string(a) +
                                        " is not in the space");
        return AtomId(a.a + 1);
    };
    tau.fiber = [contains, unilateral](const AtomId& a) -> std::vector<AtomId> {
        if (!contains(a))
            throw std::invalid_argument("fiber: atom " + atom_to_string(a) +
                                        " is not in the space");
        if (unilateral && a.a == 1) return {}; // nothing shifts onto the first atom
        return {AtomId(a.a - 1)};
    };
    if (!unilateral) {
        tau.inverse = [contains](const AtomId& a) -> AtomId {
            if (!contains(a))
                throw std::invalid_argument("tau inverse: atom " + atom_to_string(a) +
                                            " is not in the space");
            return AtomId(a.a - 1);
        };
        tau.invertible = true;
    }
    return {MeasureSpace(std::move(impl)), std::move(tau)};
}

} // namespace lorentz
