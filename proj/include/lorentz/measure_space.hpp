#pragma once

#include "lorentz/atom.hpp"
#include "lorentz/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lorentz {

/// A finite, canonically ordered prefix of the atom enumeration together
/// with the exact mass that lies outside it (when the space has finite
/// total mass).
struct SpaceWindow {
    std::vector<AtomId> atoms;
    std::optional<Rational> omitted_mass;
};

/// Purely atomic measure space with strictly positive atom weights.
/// Immutable; copies share the underlying description.  Finite spaces store
/// an explicit table, structured infinite families are described by
/// closures plus a canonical enumeration of their atoms.
class MeasureSpace {
public:
    struct Impl {
        std::string family;
        std::string parameter; // base ratio for the shift families, "" otherwise
        bool finitely_many_atoms = false;
        std::optional<Rational> total; // finite total mass, if it is finite
        // finite case
        std::vector<AtomId> atoms;
        std::unordered_map<AtomId, Rational, AtomIdHash> table;
        // structured case
        std::function<bool(const AtomId&)> contains_fn;
        std::function<Rational(const AtomId&)> weight_fn;
        std::function<AtomId(std::size_t)> atom_at_fn;
        // mass beyond the first k enumerated atoms (exact), when total is finite
        std::function<Rational(std::size_t)> tail_fn;
    };

    /// Default: an empty finite space (no atoms, zero mass).  Real spaces
    /// come from make_finite_space / make_builtin_system.
    MeasureSpace() {
        auto impl = std::make_shared<Impl>();
        impl->family = "empty";
        impl->finitely_many_atoms = true;
        impl->total = Rational(0);
        impl_ = std::move(impl);
    }

    explicit MeasureSpace(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

    const std::string& family() const { return impl_->family; }
    const std::string& parameter() const { return impl_->parameter; }
    bool has_finitely_many_atoms() const { return impl_->finitely_many_atoms; }

    std::optional<std::size_t> atom_count() const {
        if (impl_->finitely_many_atoms) return impl_->atoms.size();
        return std::nullopt;
    }

    /// Exact total mass when finite, std::nullopt when infinite.
    const std::optional<Rational>& total_mass() const { return impl_->total; }

    bool contains(const AtomId& a) const {
        if (impl_->finitely_many_atoms) return impl_->table.count(a) > 0;
        return impl_->contains_fn(a);
    }

    Rational weight(const AtomId& a) const {
        if (impl_->finitely_many_atoms) {
            auto it = impl_->table.find(a);
            if (it == impl_->table.end())
                throw std::invalid_argument("weight: atom " + atom_to_string(a) +
                                            " is not in the space");
            return it->second;
        }
        if (!impl_->contains_fn(a))
            throw std::invalid_argument("weight: atom " + atom_to_string(a) +
                                        " is not in the space");
        return impl_->weight_fn(a);
    }

    /// k-th atom in canonical enumeration order (0-based).
    AtomId atom_at(std::size_t k) const {
        if (impl_->finitely_many_atoms) {
            if (k >= impl_->atoms.size())
                throw std::out_of_range("atom_at: index beyond finite space");
            return impl_->atoms[k];
        }
        return impl_->atom_at_fn(k);
    }

    /// First min(size, #atoms) atoms plus the exact omitted mass when the
    /// total mass is finite.
    SpaceWindow window(std::size_t size) const {
        SpaceWindow w;
        if (impl_->finitely_many_atoms) {
            std::size_t n = std::min(size, impl_->atoms.size());
            w.atoms.assign(impl_->atoms.begin(), impl_->atoms.begin() + n);
            if (impl_->total) {
                Rational used(0);
                for (const auto& a : w.atoms) used += impl_->table.at(a);
                w.omitted_mass = *impl_->total - used;
            }
            return w;
        }
        w.atoms.reserve(size);
        for (std::size_t k = 0; k < size; ++k) w.atoms.push_back(impl_->atom_at_fn(k));
        if (impl_->total && impl_->tail_fn) w.omitted_mass = impl_->tail_fn(size);
        return w;
    }

private:
    std::shared_ptr<const Impl> impl_;
};

/// Finite set of atoms in canonical order, without duplicates.
/// Membership in a particular space is validated by the operations that
/// pair a set with a space.
struct MeasurableSet {
    std::vector<AtomId> atoms; // sorted canonically, unique

    MeasurableSet() = default;
    explicit MeasurableSet(std::vector<AtomId> ids) : atoms(std::move(ids)) {
        std::sort(atoms.begin(), atoms.end());
        atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    }

    bool empty() const { return atoms.empty(); }
    std::size_t size() const { return atoms.size(); }
    bool contains(const AtomId& a) const {
        return std::binary_search(atoms.begin(), atoms.end(), a);
    }

    friend bool operator==(const MeasurableSet&, const MeasurableSet&) = default;
};

inline std::string set_to_string(const MeasurableSet& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.atoms.size(); ++i) {
        if (i) out += ",";
        out += atom_to_string(s.atoms[i]);
    }
    return out + "}";
}

/// Exact measure of a finite set; every atom must belong to the space.
inline Rational measure_of(const MeasureSpace& space, const MeasurableSet& s) {
    Rational m(0);
    for (const auto& a : s.atoms) m += space.weight(a);
    return m;
}

/// Builds a finite space from (atom, weight) pairs.  Rejects duplicate
/// atoms and weights that are not strictly positive.
inline MeasureSpace make_finite_space(const std::vector<std::pair<AtomId, Rational>>& entries) {
    if (entries.empty()) throw std::invalid_argument("make_finite_space: no atoms");
    auto impl = std::make_shared<MeasureSpace::Impl>();
    impl->family = "finite";
    impl->finitely_many_atoms = true;
    Rational total(0);
    for (const auto& [id, wt] : entries) {
        if (wt <= 0)
            throw std::invalid_argument("make_finite_space: weight of atom " +
                                        atom_to_string(id) + " must be positive");
        if (!impl->table.emplace(id, wt).second)
            throw std::invalid_argument("make_finite_space: duplicate atom " +
                                        atom_to_string(id));
        impl->atoms.push_back(id);
        total += wt;
    }
    std::sort(impl->atoms.begin(), impl->atoms.end());
    impl->total = total;
    return MeasureSpace(std::move(impl));
}

} // namespace lorentz
