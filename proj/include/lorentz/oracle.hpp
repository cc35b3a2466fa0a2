#pragma once

#include "lorentz/operators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lorentz::oracle {

/// Decreasing rearrangement computed the pedestrian way: list every atom's
/// (value, weight) pair, sort by value, and fold equal values while
/// accumulating cumulative measure.  Deliberately avoids the map-based
/// grouping used by the analytic path so the two can check each other.
inline StepFunction rearrangement_by_sort(const MeasureSpace& space,
                                          const SimpleFunction& g) {
    detail::require_supported(space, g, "rearrangement_by_sort");
    std::vector<std::pair<Rational, Rational>> items; // (value, weight)
    items.reserve(g.entries.size());
    for (const auto& [a, v] : g.entries) items.emplace_back(v, space.weight(a));
    std::sort(items.begin(), items.end(),
              [](const auto& x, const auto& y) { return x.first > y.first; });
    StepFunction sf;
    Rational cum(0);
    std::size_t i = 0;
    while (i < items.size()) {
        Rational v = items[i].first;
        Rational mass(0);
        while (i < items.size() && items[i].first == v) {
            mass += items[i].second;
            ++i;
        }
        cum += mass;
        sf.breaks.push_back(cum);
        sf.values.push_back(v);
    }
    return sf;
}

namespace detail2 {

// Composite Simpson with a fixed panel count on [a, b], in double precision:
// the oracle only needs to confirm the certified path to ~1e-9 relative, so
// hardware floats with an explicit Richardson error estimate are plenty.
template <typename F>
double composite_simpson(const F& f, double a, double b, int panels) {
    double h = (b - a) / (2 * panels);
    double acc = f(a) + f(b);
    for (int k = 1; k < 2 * panels; ++k) acc += f(a + h * k) * (k % 2 ? 4 : 2);
    return acc * h / 3;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

} // namespace detail2

/// Mesh-doubling quadrature evaluation of the Lorentz norm for finite q.
///
/// The first plateau and the tail are power-rule integrals and are taken in
/// closed form; every interior plateau is integrated by composite Simpson,
/// doubling the mesh until two successive estimates agree, with the last
/// difference retained as the error estimate (times a safety factor) plus a
/// margin for double-precision roundoff.
inline CertifiedReal norm_by_quadrature(const MeasureSpace& space, const SimpleFunction& g,
                                        const LorentzIndex& idx, int mesh = 64) {
    if (idx.q_infinite)
        throw std::invalid_argument("norm_by_quadrature: finite q required");
    if (mesh < 8) throw std::invalid_argument("norm_by_quadrature: mesh too coarse");
    if (g.is_zero()) return {};

    StepFunction sf = rearrangement_by_sort(space, g);
    const double alpha = detail2::to_double(idx.q / idx.p);
    const double q = detail2::to_double(idx.q);

    // first plateau: integrand v1^q t^{alpha-1}, integral v1^q t1^alpha / alpha
    double total = std::pow(detail2::to_double(sf.values[0]), q) *
                   std::pow(detail2::to_double(sf.breaks[0]), alpha) / alpha;
    double err = 0;

    Rational s = sf.values[0] * sf.breaks[0];
    for (std::size_t i = 1; i < sf.breaks.size(); ++i) {
        Rational t0 = sf.breaks[i - 1], t1 = sf.breaks[i];
        Rational v = sf.values[i];
        Rational c = s - v * t0;
        s += v * (t1 - t0);
        double a = detail2::to_double(t0), b = detail2::to_double(t1);
        double dc = detail2::to_double(c), dv = detail2::to_double(v);
        double e = alpha - q - 1;
        auto f = [&](double t) { return std::pow(t, e) * std::pow(dc + dv * t, q); };
        double prev = detail2::composite_simpson(f, a, b, mesh);
        double cur = prev, delta = 0;
        int panels = mesh;
        for (int round = 0; round < 8; ++round) {
            panels *= 2;
            cur = detail2::composite_simpson(f, a, b, panels);
            delta = std::abs(cur - prev);
            if (delta <= std::abs(cur) * 1e-13) break;
            prev = cur;
        }
        total += cur;
        err += delta * 4;
    }

    // tail: (S/t)^q t^{alpha-1} integrates to S^q t_m^{alpha-q} / (q - alpha)
    total += std::pow(detail2::to_double(s), q) *
             std::pow(detail2::to_double(sf.breaks.back()), alpha - q) / (q - alpha);
    total *= alpha;
    err *= alpha;
    err += std::abs(total) * 1e-12; // double pow / summation roundoff margin

    double root = std::pow(total, 1 / q);
    double root_err = total > 0 ? root * (err / total) / q + root * 1e-13 : err;
    return {Real(root), Real(root_err)};
}

/// C^n g evaluated straight from the definition, (C^n g)(a) = g(tau^n a),
/// atom by atom over a window.  Checks the level-set transport used by
/// compose_apply.
inline SimpleFunction pointwise_compose(const MeasureSpace& space, const Transformation& tau,
                                        const SimpleFunction& g, int n,
                                        std::size_t window_size) {
    if (n < 0) throw std::invalid_argument("pointwise_compose: negative power");
    detail::require_supported(space, g, "pointwise_compose");
    SpaceWindow w = space.window(window_size);
    std::vector<std::pair<AtomId, Rational>> out;
    for (const auto& a : w.atoms) {
        AtomId img = a;
        for (int k = 0; k < n; ++k) img = tau.forward(img);
        Rational v = g.value_at(img);
        if (v > 0) out.emplace_back(a, v);
    }
    return make_simple_function(std::move(out));
}

struct DefinitionScan {
    std::size_t subsets_scanned = 0;
    Real min_sup_ratio{0};            // smallest over subsets of max_n ||C^n x|| / ||x||
    MeasurableSet min_witness;        // subset attaining it
    int min_witness_argmax = 0;       // step at which that subset peaks
    Real max_sup_ratio{0};
    MeasurableSet max_witness;
    std::vector<MeasurableSet> dying; // subsets whose orbit is eventually exactly zero
};

namespace detail2 {

inline void enumerate_subsets(const std::vector<AtomId>& atoms, std::size_t max_size,
                              std::vector<AtomId>& cur, std::size_t from,
                              const std::function<void(const std::vector<AtomId>&)>& emit) {
    if (!cur.empty()) emit(cur);
    if (cur.size() == max_size) return;
    for (std::size_t i = from; i < atoms.size(); ++i) {
        cur.push_back(atoms[i]);
        enumerate_subsets(atoms, max_size, cur, i + 1, emit);
        cur.pop_back();
    }
}

} // namespace detail2

/// Brute-force scan of Definition-style expansivity evidence: for every
/// nonempty subset S of the window with at most max_set_size atoms, the
/// orbit of the indicator of S is traced and the normalized supremum
/// max_n ||C^n chi_S|| / ||chi_S|| recorded.  Guarded to at most 10^4
/// subsets.
inline DefinitionScan criterion_by_definition(const MeasureSpace& space,
                                              const Transformation& tau,
                                              const LorentzIndex& idx,
                                              std::size_t window_size, int horizon,
                                              std::size_t max_set_size) {
    if (max_set_size == 0)
        throw std::invalid_argument("criterion_by_definition: max_set_size must be >= 1");
    SpaceWindow w = space.window(window_size);
    // subset count: sum_{s<=k} C(W, s) must stay within the guard
    Rational count(0);
    for (std::size_t s = 1; s <= std::min(max_set_size, w.atoms.size()); ++s) {
        Rational c(detail::binomial(static_cast<long>(w.atoms.size()), static_cast<long>(s)));
        count += c;
    }
    if (count > 10000)
        throw std::invalid_argument(
            "criterion_by_definition: subset family too large (" + rat_to_string(count) +
            " > 10000); shrink the window or max_set_size");

    CompositionOperator op{space, tau};
    DefinitionScan scan;
    bool first = true;
    std::vector<AtomId> cur;
    std::function<void(const std::vector<AtomId>&)> emit = [&](const std::vector<AtomId>& ids) {
        MeasurableSet set{std::vector<AtomId>(ids)};
        OrbitTrace tr = orbit_trace(LinearOperator{op}, indicator(set), idx, horizon);
        Real n0 = tr.entries[0].norm.value;
        Real sup(0);
        int argmax = 0;
        bool dies = false;
        for (const auto& e : tr.entries) {
            if (e.norm.value > sup) {
                sup = e.norm.value;
                argmax = e.n;
            }
            if (e.n > 0 && e.support_measure == 0) dies = true;
        }
        Real ratio = sup / n0;
        ++scan.subsets_scanned;
        if (dies) scan.dying.push_back(set);
        if (first || ratio < scan.min_sup_ratio) {
            scan.min_sup_ratio = ratio;
            scan.min_witness = set;
            scan.min_witness_argmax = argmax;
        }
        if (first || ratio > scan.max_sup_ratio) {
            scan.max_sup_ratio = ratio;
            scan.max_witness = set;
        }
        first = false;
    };
    detail2::enumerate_subsets(w.atoms, max_set_size, cur, 0, emit);
    return scan;
}

} // namespace lorentz::oracle
