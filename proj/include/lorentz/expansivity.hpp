#pragma once

#include "lorentz/chaos.hpp"
#include "lorentz/lorentz_norm.hpp"
#include "lorentz/measure_space.hpp"
#include "lorentz/operators.hpp"
#include "lorentz/transformation.hpp"
#include "lorentz/trend.hpp"
#include "lorentz/verdict.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lorentz {

// Positive expansivity of C_tau is equivalent to: every set of positive
// measure satisfies sup_n mu(tau^{-n} A) = infinity.  On an atomic space it
// suffices to test atoms: every nonempty set contains one, and preimage
// measures are monotone under inclusion.  Verdicts are therefore scoped to
// the atoms of the inspected window and qualified by the horizon.

namespace detail {

/// Evidence that one orbit's measures are unbounded (strict geometric growth
/// through the horizon) or bounded forever (death, recurrence, or a
/// non-increasing trend through the horizon).
struct GrowthEvidence {
    bool unbounded = false;
    bool bounded = false;
    std::string note;
};

inline GrowthEvidence growth_evidence(const SetOrbit& o, const Thresholds& th) {
    GrowthEvidence g;
    if (o.truncated_at || o.measures.size() < 2) {
        g.note = "orbit not fully inspected (atom cap)";
        return g;
    }
    OrbitEvidence ev = orbit_evidence(o, th);
    if (ev.growth_to_horizon && *ev.run_ratio > 1) {
        g.unbounded = true;
        g.note = "measures grow geometrically (ratio " + rat_to_string(*ev.run_ratio) +
                 ") through the horizon";
    } else if (ev.zero_tail) {
        g.bounded = true;
        g.note = "sets are empty from step " + std::to_string(*o.seq.zero_from) +
                 " on; the supremum is exactly " + rat_to_string(ev.mu0 > ev.max_tail
                                                                     ? ev.mu0
                                                                     : ev.max_tail);
    } else if (ev.cycle) {
        g.bounded = true;
        g.note = "sets recur with exact period " + std::to_string(*o.cycle_period) +
                 "; the supremum is exactly " + rat_to_string(o.seq.max_value);
    } else if (ev.decay_to_horizon || (ev.growth_to_horizon && *ev.run_ratio == 1)) {
        g.bounded = true;
        g.note = "measures follow a non-increasing geometric trend (ratio " +
                 rat_to_string(*ev.run_ratio) + ") through the horizon; the supremum is " +
                 rat_to_string(o.seq.max_value);
    } else {
        g.note = "no growth or boundedness certificate within the horizon";
    }
    return g;
}

} // namespace detail

struct AtomGrowthReport {
    AtomId atom;
    detail::GrowthEvidence preimage;
    std::optional<detail::GrowthEvidence> forward; // two-sided tests only
};

struct ExpansivityReport {
    Verdict verdict;
    std::vector<AtomGrowthReport> atoms;
    std::optional<AtomId> witness; // atom deciding a REFUTED verdict
};

namespace detail {

inline Json growth_to_json(const GrowthEvidence& g) {
    return Json{{"unbounded", g.unbounded}, {"bounded", g.bounded}, {"note", g.note}};
}

inline Json atom_growth_json(const AtomGrowthReport& r) {
    Json j;
    j["atom"] = atom_to_string(r.atom);
    j["preimage"] = growth_to_json(r.preimage);
    if (r.forward) j["forward"] = growth_to_json(*r.forward);
    return j;
}

} // namespace detail

/// Positive expansivity: CONFIRMED when every window atom's preimage
/// measures are certified unbounded, REFUTED when some atom's are certified
/// bounded forever (that atom spans a set violating the criterion).
inline ExpansivityReport positively_expansive(const MeasureSpace& space,
                                              const Transformation& tau,
                                              std::size_t window_size, int horizon,
                                              const Thresholds& th = {},
                                              std::size_t max_atoms = kDefaultOrbitAtomCap) {
    SpaceWindow w = space.window(window_size);
    if (w.atoms.empty()) throw std::invalid_argument("positively_expansive: empty window");
    ExpansivityReport rep;
    rep.atoms.reserve(w.atoms.size());
    int unbounded = 0;
    for (const AtomId& a : w.atoms) {
        SetOrbit o = trace_preimage_orbit(space, tau, MeasurableSet{{a}}, horizon, max_atoms);
        AtomGrowthReport ar{a, detail::growth_evidence(o, th), std::nullopt};
        if (ar.preimage.unbounded) ++unbounded;
        if (ar.preimage.bounded && !rep.witness) rep.witness = a;
        rep.atoms.push_back(std::move(ar));
    }
    Verdict v;
    v.horizon = horizon;
    Json ev = Json::array();
    for (const auto& r : rep.atoms) ev.push_back(detail::atom_growth_json(r));
    v.witness["atoms"] = ev;
    if (rep.witness) {
        v.status = Status::Refuted;
        const auto& r = *std::find_if(rep.atoms.begin(), rep.atoms.end(),
                                      [&](const AtomGrowthReport& x) {
                                          return x.atom == *rep.witness;
                                      });
        v.detail = "not positively expansive: the preimage measures of atom " +
                   atom_to_string(*rep.witness) + " are bounded forever (" +
                   r.preimage.note + ")";
        v.witness["witness_atom"] = atom_to_string(*rep.witness);
    } else if (unbounded == static_cast<int>(rep.atoms.size())) {
        v.status = Status::Confirmed;
        v.detail = "positively expansive on the inspected window: all " +
                   std::to_string(rep.atoms.size()) +
                   " atoms have preimage measures growing geometrically through the horizon";
    } else {
        v.status = Status::InconclusiveAtHorizon;
        v.detail = std::to_string(rep.atoms.size() - unbounded) + " of " +
                   std::to_string(rep.atoms.size()) +
                   " atoms lack a growth or boundedness certificate";
    }
    rep.verdict = std::move(v);
    return rep;
}

/// Two-sided expansivity for invertible tau: the supremum runs over both
/// iteration directions, so an atom only defeats the criterion when both its
/// preimage and forward measures are certified bounded.  Throws when tau
/// carries no inverse.
inline ExpansivityReport expansive_invertible(const MeasureSpace& space,
                                              const Transformation& tau,
                                              std::size_t window_size, int horizon,
                                              const Thresholds& th = {},
                                              std::size_t max_atoms = kDefaultOrbitAtomCap) {
    if (!tau.invertible || !tau.inverse)
        throw std::invalid_argument("expansive_invertible: tau is not invertible");
    SpaceWindow w = space.window(window_size);
    if (w.atoms.empty()) throw std::invalid_argument("expansive_invertible: empty window");
    ExpansivityReport rep;
    rep.atoms.reserve(w.atoms.size());
    int unbounded = 0;
    for (const AtomId& a : w.atoms) {
        SetOrbit pre = trace_preimage_orbit(space, tau, MeasurableSet{{a}}, horizon, max_atoms);
        SetOrbit fwd = trace_forward_orbit(space, tau, MeasurableSet{{a}}, horizon, max_atoms);
        AtomGrowthReport ar{a, detail::growth_evidence(pre, th),
                            detail::growth_evidence(fwd, th)};
        if (ar.preimage.unbounded || ar.forward->unbounded) ++unbounded;
        if (ar.preimage.bounded && ar.forward->bounded && !rep.witness) rep.witness = a;
        rep.atoms.push_back(std::move(ar));
    }
    Verdict v;
    v.horizon = horizon;
    Json ev = Json::array();
    for (const auto& r : rep.atoms) ev.push_back(detail::atom_growth_json(r));
    v.witness["atoms"] = ev;
    if (rep.witness) {
        v.status = Status::Refuted;
        v.detail = "not expansive: atom " + atom_to_string(*rep.witness) +
                   " has bounded measures in both iteration directions";
        v.witness["witness_atom"] = atom_to_string(*rep.witness);
    } else if (unbounded == static_cast<int>(rep.atoms.size())) {
        v.status = Status::Confirmed;
        v.detail = "expansive on the inspected window: every atom's measures grow "
                   "geometrically in at least one iteration direction";
    } else {
        v.status = Status::InconclusiveAtHorizon;
        v.detail = std::to_string(rep.atoms.size() - unbounded) + " of " +
                   std::to_string(rep.atoms.size()) +
                   " atoms lack a growth certificate in either direction";
    }
    rep.verdict = std::move(v);
    return rep;
}

struct UniformExpansivityReport {
    Verdict verdict;
    /// m_n = min over window atoms of mu(tau^{-n}{a}) / mu({a}), exactly.
    std::vector<Rational> min_ratios;
    SequenceAnalysis seq;
    std::optional<AtomId> witness; // atom pinning a REFUTED verdict, when one does
};

/// Uniform positive expansivity: mu(tau^{-n}A)/mu(A) must diverge uniformly
/// over all sets of positive measure.  The ratio of a union is at least the
/// smallest atomic ratio, so the exact minimum sequence over window atoms is
/// the uniform lower bound; CONFIRMED when it grows geometrically through
/// the horizon past the explosion threshold, REFUTED when it collapses to
/// zero or follows a non-increasing trend.
inline UniformExpansivityReport uniformly_positively_expansive(
    const MeasureSpace& space, const Transformation& tau, std::size_t window_size, int horizon,
    const Thresholds& th = {}, std::size_t max_atoms = kDefaultOrbitAtomCap) {
    SpaceWindow w = space.window(window_size);
    if (w.atoms.empty())
        throw std::invalid_argument("uniformly_positively_expansive: empty window");
    UniformExpansivityReport rep;
    rep.min_ratios.assign(horizon + 1, Rational(0));
    std::vector<bool> has(horizon + 1, false);
    std::vector<AtomId> argmin(horizon + 1, w.atoms.front());
    bool any_truncated = false;
    for (const AtomId& a : w.atoms) {
        SetOrbit o = trace_preimage_orbit(space, tau, MeasurableSet{{a}}, horizon, max_atoms);
        if (o.truncated_at) {
            any_truncated = true;
            continue;
        }
        Rational mu0 = o.measures[0];
        for (int n = 0; n <= horizon; ++n) {
            Rational r = o.measures[n] / mu0;
            if (!has[n] || r < rep.min_ratios[n]) {
                rep.min_ratios[n] = r;
                has[n] = true;
                argmin[n] = a;
            }
        }
    }
    Verdict v;
    v.horizon = horizon;
    if (any_truncated) {
        v.status = Status::InconclusiveAtHorizon;
        v.detail = "some atom orbits outgrew the atom cap; the uniform bound is incomplete";
        rep.verdict = std::move(v);
        return rep;
    }
    rep.seq = analyze_sequence(rep.min_ratios);
    v.witness["min_ratios"] = rationals_to_json(rep.min_ratios);
    bool trend_h = trend_reaches_horizon(rep.seq, horizon);
    if (rep.seq.zero_from) {
        v.status = Status::Refuted;
        rep.witness = argmin[*rep.seq.zero_from];
        v.detail = "not uniformly positively expansive: the uniform lower bound is exactly "
                   "zero from step " + std::to_string(*rep.seq.zero_from) + " on (atom " +
                   atom_to_string(*rep.witness) + " has empty preimages)";
        v.witness["witness_atom"] = atom_to_string(*rep.witness);
        v.witness["zero_from"] = *rep.seq.zero_from;
    } else if (trend_h && rep.seq.tail_trend->ratio <= 1) {
        v.status = Status::Refuted;
        rep.witness = argmin[horizon];
        v.detail = "not uniformly positively expansive: the uniform lower bound follows a "
                   "non-increasing geometric trend (ratio " +
                   rat_to_string(rep.seq.tail_trend->ratio) + ") through the horizon (atom " +
                   atom_to_string(*rep.witness) + " attains it)";
        v.trend = rep.seq.tail_trend;
        v.witness["witness_atom"] = atom_to_string(*rep.witness);
    } else if (trend_h && rep.seq.tail_trend->ratio > 1 && rep.seq.max_value >= th.high) {
        v.status = Status::Confirmed;
        v.detail = "uniformly positively expansive on the inspected window: the uniform "
                   "lower bound grows geometrically (ratio " +
                   rat_to_string(rep.seq.tail_trend->ratio) +
                   ") through the horizon and reaches " + rat_to_string(rep.seq.max_value);
        v.trend = rep.seq.tail_trend;
    } else {
        v.status = Status::InconclusiveAtHorizon;
        v.detail = "the uniform lower bound carries no qualifying trend certificate "
                   "at this horizon";
    }
    rep.verdict = std::move(v);
    return rep;
}

struct SplitReport {
    Verdict verdict;
    std::vector<AtomId> class_b;      // forward measures grow from the first step
    std::vector<AtomId> class_c;      // preimage measures grow from the first step
    std::vector<AtomId> unclassified; // neither direction grows monotonically
    std::vector<Rational> min_b;      // uniform forward bound over class_b
    std::vector<Rational> min_c;      // uniform preimage bound over class_c
    SequenceAnalysis seq_b, seq_c;
    std::optional<AtomId> witness; // atom bounded in both directions (REFUTED)
};

/// Uniform expansivity for invertible tau via an explicit two-class split of
/// the window: atoms whose forward measure ratios are nondecreasing over the
/// whole horizon go to class B (ties prefer B), atoms whose preimage ratios
/// are go to class C.  CONFIRMED when both classes' uniform bounds grow
/// geometrically through the horizon past the explosion threshold -- every
/// set then diverges uniformly in at least one direction once split along
/// B and C.
inline SplitReport uniformly_expansive_split(const MeasureSpace& space,
                                             const Transformation& tau,
                                             std::size_t window_size, int horizon,
                                             const Thresholds& th = {},
                                             std::size_t max_atoms = kDefaultOrbitAtomCap) {
    if (!tau.invertible || !tau.inverse)
        throw std::invalid_argument("uniformly_expansive_split: tau is not invertible");
    SpaceWindow w = space.window(window_size);
    if (w.atoms.empty()) throw std::invalid_argument("uniformly_expansive_split: empty window");
    SplitReport rep;
    rep.min_b.assign(horizon + 1, Rational(0));
    rep.min_c.assign(horizon + 1, Rational(0));
    bool has_b = false, has_c = false;
    auto monotone_growth = [](const std::vector<Rational>& m) {
        for (std::size_t n = 1; n < m.size(); ++n)
            if (m[n] < m[n - 1]) return false;
        return m.back() > m.front();
    };
    for (const AtomId& a : w.atoms) {
        SetOrbit pre = trace_preimage_orbit(space, tau, MeasurableSet{{a}}, horizon, max_atoms);
        SetOrbit fwd = trace_forward_orbit(space, tau, MeasurableSet{{a}}, horizon, max_atoms);
        if (pre.truncated_at || fwd.truncated_at) {
            rep.unclassified.push_back(a);
            continue;
        }
        if (!rep.witness) {
            detail::GrowthEvidence gp = detail::growth_evidence(pre, th);
            detail::GrowthEvidence gf = detail::growth_evidence(fwd, th);
            if (gp.bounded && gf.bounded) rep.witness = a;
        }
        Rational mu0 = fwd.measures[0];
        if (monotone_growth(fwd.measures)) {
            rep.class_b.push_back(a);
            for (int n = 0; n <= horizon; ++n) {
                Rational r = fwd.measures[n] / mu0;
                if (!has_b || r < rep.min_b[n]) rep.min_b[n] = has_b ? std::min(rep.min_b[n], r) : r;
            }
            if (!has_b) has_b = true;
        } else if (monotone_growth(pre.measures)) {
            rep.class_c.push_back(a);
            for (int n = 0; n <= horizon; ++n) {
                Rational r = pre.measures[n] / mu0;
                if (!has_c || r < rep.min_c[n]) rep.min_c[n] = has_c ? std::min(rep.min_c[n], r) : r;
            }
            if (!has_c) has_c = true;
        } else {
            rep.unclassified.push_back(a);
        }
    }
    Verdict v;
    v.horizon = horizon;
    v.witness["class_b_size"] = rep.class_b.size();
    v.witness["class_c_size"] = rep.class_c.size();
    v.witness["unclassified"] = rep.unclassified.size();
    auto class_ok = [&](bool has, const std::vector<Rational>& m, SequenceAnalysis& seq) {
        if (!has) return true; // an empty class imposes no constraint
        seq = analyze_sequence(m);
        return trend_reaches_horizon(seq, horizon) && seq.tail_trend->ratio > 1 &&
               seq.max_value >= th.high;
    };
    bool ok_b = class_ok(has_b, rep.min_b, rep.seq_b);
    bool ok_c = class_ok(has_c, rep.min_c, rep.seq_c);
    if (has_b) v.witness["min_b"] = rationals_to_json(rep.min_b);
    if (has_c) v.witness["min_c"] = rationals_to_json(rep.min_c);
    if (rep.witness) {
        v.status = Status::Refuted;
        v.detail = "not uniformly expansive: the measures of atom " +
                   atom_to_string(*rep.witness) +
                   " are bounded forever in both iteration directions, so no split "
                   "can make its ratios diverge";
        v.witness["witness_atom"] = atom_to_string(*rep.witness);
    } else if (!rep.unclassified.empty()) {
        v.status = Status::InconclusiveAtHorizon;
        v.detail = std::to_string(rep.unclassified.size()) +
                   " atoms fit neither class (no monotone growth in either direction); "
                   "the split is incomplete";
    } else if (ok_b && ok_c) {
        v.status = Status::Confirmed;
        v.detail = "uniformly expansive on the inspected window: the forward bound over " +
                   std::to_string(rep.class_b.size()) + " atoms and the preimage bound over " +
                   std::to_string(rep.class_c.size()) +
                   " atoms both grow geometrically through the horizon";
        v.trend = has_b ? rep.seq_b.tail_trend : rep.seq_c.tail_trend;
    } else {
        v.status = Status::InconclusiveAtHorizon;
        v.detail = std::string("the uniform bound of class ") + (ok_b ? "C" : "B") +
                   " lacks a qualifying growth trend at this horizon";
    }
    rep.verdict = std::move(v);
    return rep;
}

// ---- sphere divergence probe ------------------------------------------------

/// Norm level a unit vector's orbit must reach to count as having left the
/// sphere's neighborhood, and the relative slack applied to the comparison.
inline const Rational kDivergenceThreshold = Rational(2);
inline constexpr double kDivergenceSlack = 1e-8;

struct FirstPassage {
    SimpleFunction sample;  // normalized to the unit sphere
    bool passed = false;
    int step = -1;          // first n with ||C^n g|| certainly >= threshold
    CertifiedReal norm;     // norm at that step (or the max seen when !passed)
    bool dies = false;      // orbit is exactly zero from some step on
};

struct DivergenceProbeReport {
    Verdict verdict;
    std::vector<FirstPassage> passages;
};

/// Normalizes each sample onto the unit sphere and records the first step at
/// which its orbit norm certainly exceeds the divergence threshold.
/// CONFIRMED when every sample passes; REFUTED when some orbit dies before
/// passing (its norms are exactly zero forever after); inconclusive
/// otherwise.  Under uniform expansivity every unit vector must pass.
inline DivergenceProbeReport sphere_divergence_probe(const MeasureSpace& space,
                                                     const Transformation& tau,
                                                     const LorentzIndex& idx,
                                                     const std::vector<SimpleFunction>& samples,
                                                     int horizon,
                                                     const Rational& threshold =
                                                         kDivergenceThreshold) {
    if (samples.empty())
        throw std::invalid_argument("sphere_divergence_probe: need at least one sample");
    if (threshold <= 0)
        throw std::invalid_argument("sphere_divergence_probe: threshold must be positive");
    DivergenceProbeReport rep;
    rep.passages.reserve(samples.size());
    CompositionOperator op{space, tau};
    Real bar = to_real(threshold) * (Real(1) - Real(kDivergenceSlack));
    int passed = 0;
    std::optional<int> dead_sample;
    for (const SimpleFunction& raw : samples) {
        SphereSample s = make_sphere_sample(space, raw, idx);
        OrbitTrace tr = orbit_trace(LinearOperator{op}, s.g, idx, horizon);
        FirstPassage fp;
        fp.sample = s.g;
        fp.norm = tr.entries[0].norm;
        for (const OrbitEntry& e : tr.entries) {
            if (e.n >= 1 && e.norm.value > fp.norm.value) fp.norm = e.norm;
            if (e.norm.certainly_geq(bar)) {
                fp.passed = true;
                fp.step = e.n;
                fp.norm = e.norm;
                break;
            }
            if (e.support_measure == 0 && e.n >= 1) {
                fp.dies = true;
                break;
            }
        }
        if (fp.passed) ++passed;
        if (fp.dies && !dead_sample) dead_sample = static_cast<int>(rep.passages.size());
        rep.passages.push_back(std::move(fp));
    }
    Verdict v;
    v.horizon = horizon;
    Json arr = Json::array();
    for (const auto& fp : rep.passages)
        arr.push_back(Json{{"passed", fp.passed},
                           {"step", fp.step},
                           {"dies", fp.dies},
                           {"norm", real_to_string(fp.norm.value, 12)}});
    v.witness["samples"] = arr;
    v.witness["threshold"] = rat_to_string(threshold);
    if (dead_sample) {
        v.status = Status::Refuted;
        v.detail = "sample " + std::to_string(*dead_sample) +
                   "'s orbit is exactly zero before reaching the divergence threshold; "
                   "unit vectors do not uniformly diverge";
        v.witness["witness_sample"] = *dead_sample;
    } else if (passed == static_cast<int>(rep.passages.size())) {
        v.status = Status::Confirmed;
        v.detail = "every probed unit vector's orbit certainly exceeded norm " +
                   rat_to_string(threshold) + " within the horizon";
    } else {
        v.status = Status::InconclusiveAtHorizon;
        v.detail = std::to_string(rep.passages.size() - passed) + " of " +
                   std::to_string(rep.passages.size()) +
                   " probed unit vectors did not certify a passage within the horizon";
    }
    rep.verdict = std::move(v);
    return rep;
}

} // namespace lorentz
