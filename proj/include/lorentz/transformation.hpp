#pragma once

#include "lorentz/atom.hpp"
#include "lorentz/measure_space.hpp"
#include "lorentz/verdict.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lorentz {

/// Measurable self-map of an atomic space, described by its forward action
/// and by exact fibers (one-step preimages).  `inverse` is set only when
/// the map is a bijection of the atom set.
struct Transformation {
    std::function<AtomId(const AtomId&)> forward;
    std::function<std::vector<AtomId>(const AtomId&)> fiber;
    std::function<AtomId(const AtomId&)> inverse; // empty unless invertible
    bool invertible = false;
};

namespace detail {

inline void require_in_space(const MeasureSpace& space, const MeasurableSet& s,
                             const char* who) {
    for (const auto& a : s.atoms)
        if (!space.contains(a))
            throw std::invalid_argument(std::string(who) + ": atom " + atom_to_string(a) +
                                        " is not in the space");
}

} // namespace detail

/// Exact n-step preimage tau^{-n}(S).  n = 0 returns S itself.
inline MeasurableSet preimage_n(const MeasureSpace& space, const Transformation& tau,
                                const MeasurableSet& s, int n) {
    if (n < 0) throw std::invalid_argument("preimage_n: negative step count");
    detail::require_in_space(space, s, "preimage_n");
    MeasurableSet cur = s;
    for (int k = 0; k < n; ++k) {
        std::vector<AtomId> next;
        for (const auto& a : cur.atoms) {
            auto f = tau.fiber(a);
            next.insert(next.end(), f.begin(), f.end());
        }
        cur = MeasurableSet(std::move(next));
        if (cur.empty()) break; // the empty set is invariant under preimages
    }
    return cur;
}

/// Exact n-step forward image tau^{n}(S).
inline MeasurableSet forward_image_n(const MeasureSpace& space, const Transformation& tau,
                                     const MeasurableSet& s, int n) {
    if (n < 0) throw std::invalid_argument("forward_image_n: negative step count");
    detail::require_in_space(space, s, "forward_image_n");
    MeasurableSet cur = s;
    for (int k = 0; k < n; ++k) {
        std::vector<AtomId> next;
        next.reserve(cur.atoms.size());
        for (const auto& a : cur.atoms) next.push_back(tau.forward(a));
        cur = MeasurableSet(std::move(next));
    }
    return cur;
}

/// Checks injectivity of tau on the first `window_size` atoms.  CONFIRMED
/// is window-qualified; REFUTED carries an exact colliding pair.
inline Verdict check_injective(const MeasureSpace& space, const Transformation& tau,
                               std::size_t window_size) {
    Verdict v;
    v.horizon = static_cast<int>(window_size);
    SpaceWindow w = space.window(window_size);
    std::map<AtomId, AtomId> seen; // image -> first source
    for (const auto& a : w.atoms) {
        AtomId img = tau.forward(a);
        auto [it, fresh] = seen.emplace(img, a);
        if (!fresh) {
            v.status = Status::Refuted;
            v.detail = "collision: " + atom_to_string(it->second) + " and " +
                       atom_to_string(a) + " both map to " + atom_to_string(img);
            v.witness = Json{{"first", atom_to_string(it->second)},
                             {"second", atom_to_string(a)},
                             {"image", atom_to_string(img)}};
            return v;
        }
    }
    v.status = Status::Confirmed;
    v.detail = "no collisions among the first " + std::to_string(w.atoms.size()) + " atoms";
    v.witness = Json{{"atoms_checked", w.atoms.size()}};
    return v;
}

/// Builds a transformation of a finite space from an explicit atom map.
/// The map must be total on the space and land inside it; the fibers are
/// derived exactly, and an inverse is attached when the map is a bijection.
inline Transformation make_finite_transformation(
    const MeasureSpace& space, const std::vector<std::pair<AtomId, AtomId>>& pairs) {
    if (!space.has_finitely_many_atoms())
        throw std::invalid_argument("make_finite_transformation: space is not finite");
    auto fwd = std::make_shared<std::map<AtomId, AtomId>>();
    auto fib = std::make_shared<std::map<AtomId, std::vector<AtomId>>>();
    for (const auto& [from, to] : pairs) {
        if (!space.contains(from))
            throw std::invalid_argument("make_finite_transformation: source atom " +
                                        atom_to_string(from) + " is not in the space");
        if (!space.contains(to))
            throw std::invalid_argument("make_finite_transformation: image atom " +
                                        atom_to_string(to) + " is not in the space");
        if (!fwd->emplace(from, to).second)
            throw std::invalid_argument("make_finite_transformation: atom " +
                                        atom_to_string(from) + " mapped twice");
        (*fib)[to].push_back(from);
    }
    std::size_t n = *space.atom_count();
    if (fwd->size() != n)
        throw std::invalid_argument("make_finite_transformation: map is not total "
                                    "(every atom needs an image)");
    for (auto& [img, sources] : *fib) std::sort(sources.begin(), sources.end());

    Transformation t;
    t.forward = [fwd](const AtomId& a) {
        auto it = fwd->find(a);
        if (it == fwd->end())
            throw std::invalid_argument("transformation: atom " + atom_to_string(a) +
                                        " has no image");
        return it->second;
    };
    t.fiber = [fib](const AtomId& a) -> std::vector<AtomId> {
        auto it = fib->find(a);
        if (it == fib->end()) return {};
        return it->second;
    };
    bool bijective = fib->size() == n;
    if (bijective) {
        auto inv = std::make_shared<std::map<AtomId, AtomId>>();
        for (const auto& [img, sources] : *fib) inv->emplace(img, sources.front());
        t.inverse = [inv](const AtomId& a) {
            auto it = inv->find(a);
            if (it == inv->end())
                throw std::invalid_argument("transformation inverse: atom " +
                                            atom_to_string(a) + " has no preimage");
            return it->second;
        };
        t.invertible = true;
    }
    return t;
}

} // namespace lorentz
