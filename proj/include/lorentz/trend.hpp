#pragma once

#include "lorentz/measure_space.hpp"
#include "lorentz/transformation.hpp"
#include "lorentz/verdict.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace lorentz {

/// Exact structural facts about a finite sequence of nonnegative rationals
/// (typically measures of an orbit of sets).
struct SequenceAnalysis {
    /// First index of the all-zero suffix, when the sequence ends in zeros.
    std::optional<int> zero_from;
    /// Maximal exact-geometric run ending at the last positive entry.
    /// Present only when it spans at least kMinTrendRun ratio steps.
    std::optional<TrendCertificate> tail_trend;
    Rational max_value{0};
    int argmax = 0;
    Rational min_value{0};
    int argmin = 0;
};

inline SequenceAnalysis analyze_sequence(const std::vector<Rational>& v) {
    if (v.empty()) throw std::invalid_argument("analyze_sequence: empty sequence");
    SequenceAnalysis a;
    a.max_value = a.min_value = v[0];
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (v[k] > a.max_value) {
            a.max_value = v[k];
            a.argmax = static_cast<int>(k);
        }
        if (v[k] < a.min_value) {
            a.min_value = v[k];
            a.argmin = static_cast<int>(k);
        }
    }
    // all-zero suffix
    int last_positive = -1;
    for (int k = static_cast<int>(v.size()) - 1; k >= 0; --k) {
        if (v[k] != 0) {
            last_positive = k;
            break;
        }
    }
    if (last_positive < static_cast<int>(v.size()) - 1) a.zero_from = last_positive + 1;
    // maximal constant-ratio run of positive entries ending at last_positive
    if (last_positive >= 1 && v[last_positive] > 0) {
        int start = last_positive;
        std::optional<Rational> ratio;
        while (start >= 1 && v[start - 1] > 0) {
            Rational r = v[start] / v[start - 1];
            if (ratio && r != *ratio) break;
            ratio = r;
            --start;
        }
        int length = last_positive - start;
        if (ratio && length >= kMinTrendRun)
            a.tail_trend = TrendCertificate{*ratio, start, length};
    }
    return a;
}

/// True when the trend run reaches the final entry of a sequence of length
/// horizon+1 and no zero suffix interrupts it: the certificate then speaks
/// about the behavior at the horizon boundary.
inline bool trend_reaches_horizon(const SequenceAnalysis& a, int horizon) {
    return a.tail_trend && !a.zero_from &&
           a.tail_trend->start + a.tail_trend->length == horizon;
}

/// Orbit of a set under exact preimages or forward images, with measures
/// and set-recurrence detection.  A detected cycle is a genuine certificate:
/// iteration is deterministic, so sets[k + period] = sets[k] for every
/// k >= cycle_start, forever.
struct SetOrbit {
    std::vector<MeasurableSet> sets; // n = 0 .. horizon (shorter when truncated)
    std::vector<Rational> measures;
    std::optional<int> cycle_start;
    std::optional<int> cycle_period;
    /// Set when tracing stopped early because a set outgrew the atom cap;
    /// entries beyond this step were not computed.
    std::optional<int> truncated_at;
    SequenceAnalysis seq;

    /// Exact bounds over one full period, valid for the entire future.
    Rational cycle_min() const {
        Rational m = measures[*cycle_start];
        for (int k = *cycle_start; k < *cycle_start + *cycle_period; ++k)
            if (measures[k] < m) m = measures[k];
        return m;
    }
    Rational cycle_max() const {
        Rational m = measures[*cycle_start];
        for (int k = *cycle_start; k < *cycle_start + *cycle_period; ++k)
            if (measures[k] > m) m = measures[k];
        return m;
    }
};

namespace detail {

template <typename Step>
SetOrbit trace_set_orbit(const MeasureSpace& space, const MeasurableSet& start, int horizon,
                         const Step& step, std::size_t max_atoms) {
    if (horizon < 1) throw std::invalid_argument("trace_set_orbit: horizon must be >= 1");
    SetOrbit orbit;
    orbit.sets.reserve(horizon + 1);
    orbit.measures.reserve(horizon + 1);
    std::map<std::vector<AtomId>, int> first_seen;
    MeasurableSet cur = start;
    for (int n = 0; n <= horizon; ++n) {
        if (n > 0) cur = step(cur);
        if (max_atoms > 0 && cur.atoms.size() > max_atoms) {
            orbit.truncated_at = n;
            break;
        }
        if (!cur.empty()) {
            auto [it, fresh] = first_seen.emplace(cur.atoms, n);
            if (!fresh && !orbit.cycle_start) {
                orbit.cycle_start = it->second;
                orbit.cycle_period = n - it->second;
            }
        }
        orbit.sets.push_back(cur);
        orbit.measures.push_back(measure_of(space, cur));
    }
    orbit.seq = analyze_sequence(orbit.measures);
    return orbit;
}

} // namespace detail

/// Default cap on how large a traced set may grow before the trace is cut
/// short; preimages can double in size every step on branching maps.
inline constexpr std::size_t kDefaultOrbitAtomCap = 50000;

/// Measures mu(tau^{-n} A) for n = 0..horizon, exactly.  When a preimage
/// outgrows `max_atoms` the orbit is truncated (see SetOrbit::truncated_at);
/// pass max_atoms = 0 to disable the cap.
inline SetOrbit trace_preimage_orbit(const MeasureSpace& space, const Transformation& tau,
                                     const MeasurableSet& a, int horizon,
                                     std::size_t max_atoms = kDefaultOrbitAtomCap) {
    detail::require_in_space(space, a, "trace_preimage_orbit");
    return detail::trace_set_orbit(space, a, horizon, [&](const MeasurableSet& s) {
        return preimage_n(space, tau, s, 1);
    }, max_atoms);
}

/// Measures mu(tau^{n} A) for n = 0..horizon, exactly.
inline SetOrbit trace_forward_orbit(const MeasureSpace& space, const Transformation& tau,
                                    const MeasurableSet& a, int horizon,
                                    std::size_t max_atoms = kDefaultOrbitAtomCap) {
    detail::require_in_space(space, a, "trace_forward_orbit");
    return detail::trace_set_orbit(space, a, horizon, [&](const MeasurableSet& s) {
        return forward_image_n(space, tau, s, 1);
    }, max_atoms);
}

// ---- witness serialization helpers ----------------------------------------

inline Json rationals_to_json(const std::vector<Rational>& v) {
    Json j = Json::array();
    for (const auto& r : v) j.push_back(rat_to_string(r));
    return j;
}

inline Json set_to_json(const MeasurableSet& s) {
    Json j = Json::array();
    for (const auto& a : s.atoms) j.push_back(atom_to_string(a));
    return j;
}

} // namespace lorentz
