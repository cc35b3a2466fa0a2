#pragma once

#include "lorentz/atom.hpp"
#include "lorentz/measure_space.hpp"
#include "lorentz/rational.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lorentz {

/// Nonnegative simple function with finite support, stored as
/// (atom, value) pairs in canonical atom order.  Zero values are dropped,
/// so the support is exactly the stored atom list.
struct SimpleFunction {
    std::vector<std::pair<AtomId, Rational>> entries;

    bool is_zero() const { return entries.empty(); }

    Rational value_at(const AtomId& a) const {
        auto it = std::lower_bound(entries.begin(), entries.end(), a,
                                   [](const auto& e, const AtomId& id) { return e.first < id; });
        if (it != entries.end() && it->first == a) return it->second;
        return Rational(0);
    }

    MeasurableSet support() const {
        std::vector<AtomId> ids;
        ids.reserve(entries.size());
        for (const auto& [a, v] : entries) ids.push_back(a);
        return MeasurableSet(std::move(ids));
    }

    friend bool operator==(const SimpleFunction&, const SimpleFunction&) = default;
};

/// Builds a simple function from (atom, value) pairs.  Values must be
/// nonnegative; zeros are dropped; duplicate atoms are rejected.
inline SimpleFunction make_simple_function(std::vector<std::pair<AtomId, Rational>> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    SimpleFunction g;
    g.entries.reserve(entries.size());
    for (auto& [a, v] : entries) {
        if (v < 0)
            throw std::invalid_argument("make_simple_function: negative value at atom " +
                                        atom_to_string(a));
        if (!g.entries.empty() && g.entries.back().first == a)
            throw std::invalid_argument("make_simple_function: duplicate atom " +
                                        atom_to_string(a));
        if (v > 0) g.entries.emplace_back(a, std::move(v));
    }
    return g;
}

inline SimpleFunction indicator(const MeasurableSet& s) {
    SimpleFunction g;
    g.entries.reserve(s.atoms.size());
    for (const auto& a : s.atoms) g.entries.emplace_back(a, Rational(1));
    return g;
}

inline SimpleFunction scale(const SimpleFunction& g, const Rational& c) {
    if (c < 0) throw std::invalid_argument("scale: negative factor");
    SimpleFunction out;
    if (c == 0) return out;
    out.entries.reserve(g.entries.size());
    for (const auto& [a, v] : g.entries) out.entries.emplace_back(a, v * c);
    return out;
}

namespace detail {

inline void require_supported(const MeasureSpace& space, const SimpleFunction& g,
                              const char* who) {
    for (const auto& [a, v] : g.entries)
        if (!space.contains(a))
            throw std::invalid_argument(std::string(who) + ": atom " + atom_to_string(a) +
                                        " is not in the space");
}

} // namespace detail

/// Distribution function: mu{ |g| > lambda }, exact.
inline Rational distribution_function(const MeasureSpace& space, const SimpleFunction& g,
                                      const Rational& lambda) {
    if (lambda < 0) throw std::invalid_argument("distribution_function: negative level");
    detail::require_supported(space, g, "distribution_function");
    Rational m(0);
    for (const auto& [a, v] : g.entries)
        if (v > lambda) m += space.weight(a);
    return m;
}

/// Right-continuous decreasing step function on (0, infinity): value
/// values[i] on [breaks[i-1], breaks[i]) with breaks[-1] := 0, and 0 beyond
/// breaks.back().  Breakpoints are the exact cumulative measures of the
/// super-level sets; values are strictly decreasing and positive.
struct StepFunction {
    std::vector<Rational> breaks;
    std::vector<Rational> values;

    bool is_zero() const { return breaks.empty(); }

    /// g*(t) for t >= 0 (right-continuous).
    Rational value_at(const Rational& t) const {
        if (t < 0) throw std::invalid_argument("StepFunction: negative argument");
        for (std::size_t i = 0; i < breaks.size(); ++i)
            if (t < breaks[i]) return values[i];
        return Rational(0);
    }

    /// Exact integral over [0, t].
    Rational integral_to(const Rational& t) const {
        if (t < 0) throw std::invalid_argument("StepFunction: negative argument");
        Rational acc(0), prev(0);
        for (std::size_t i = 0; i < breaks.size(); ++i) {
            if (t <= breaks[i]) return acc + values[i] * (t - prev);
            acc += values[i] * (breaks[i] - prev);
            prev = breaks[i];
        }
        return acc;
    }

    friend bool operator==(const StepFunction&, const StepFunction&) = default;
};

/// Decreasing rearrangement g* as an exact step function: plateau lengths
/// are the total weights of the level sets, taken in decreasing value order.
inline StepFunction decreasing_rearrangement(const MeasureSpace& space,
                                             const SimpleFunction& g) {
    detail::require_supported(space, g, "decreasing_rearrangement");
    std::map<Rational, Rational, std::greater<Rational>> mass_by_value;
    for (const auto& [a, v] : g.entries) mass_by_value[v] += space.weight(a);
    StepFunction sf;
    Rational cum(0);
    for (const auto& [v, m] : mass_by_value) {
        cum += m;
        sf.breaks.push_back(cum);
        sf.values.push_back(v);
    }
    return sf;
}

/// Maximal average g**(t) = (1/t) * integral of g* over [0,t], exact for
/// rational t > 0.
inline Rational maximal_average(const StepFunction& rearr, const Rational& t) {
    if (t <= 0) throw std::invalid_argument("maximal_average: t must be positive");
    return rearr.integral_to(t) / t;
}

} // namespace lorentz
