#pragma once

#include "lorentz/lorentz_norm.hpp"
#include "lorentz/measure_space.hpp"
#include "lorentz/operators.hpp"
#include "lorentz/transformation.hpp"
#include "lorentz/trend.hpp"
#include "lorentz/verdict.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lorentz {

/// Measure a set must recover to (as a multiple of its initial measure)
/// before "limsup > 0" threshold evidence is accepted.
inline const Rational kRecoveryFactor = Rational(1);

// ---- shared evidence extraction --------------------------------------------

namespace detail {

/// Structural facts about one traced set orbit, every comparison exact.
/// Extrema are taken over steps n >= 1; step 0 is the probed set itself.
struct OrbitEvidence {
    Rational mu0;         // measure of the probed set
    Rational max_tail{0}; // max_{n>=1}
    int argmax = 1;
    Rational min_tail{0}; // min_{n>=1}
    int argmin = 1;
    int last = 0;         // index of the last computed entry

    bool dips = false;     // min_tail <= low * mu0
    bool recovers = false; // max_tail >= kRecoveryFactor * mu0

    bool zero_tail = false;         // certified: sets empty from seq.zero_from on
    bool decay_to_horizon = false;  // exact geometric ratio < 1 through the last entry
    bool growth_to_horizon = false; // exact geometric ratio >= 1 through the last entry
    std::optional<Rational> run_ratio; // ratio of the trend run, wherever it ends
    bool cycle = false;
    Rational cycle_floor{0}; // exact min over one period, valid forever

    /// Certified that the measures tend to zero (exactly dead, or decaying
    /// geometrically through the horizon).
    bool vanishes() const { return zero_tail || decay_to_horizon; }
};

inline OrbitEvidence orbit_evidence(const SetOrbit& o, const Thresholds& th) {
    if (o.measures.size() < 2)
        throw std::invalid_argument("orbit_evidence: need at least one step");
    OrbitEvidence ev;
    ev.mu0 = o.measures[0];
    ev.last = static_cast<int>(o.measures.size()) - 1;
    ev.max_tail = ev.min_tail = o.measures[1];
    for (std::size_t n = 2; n < o.measures.size(); ++n) {
        const Rational& m = o.measures[n];
        if (m > ev.max_tail) {
            ev.max_tail = m;
            ev.argmax = static_cast<int>(n);
        }
        if (m < ev.min_tail) {
            ev.min_tail = m;
            ev.argmin = static_cast<int>(n);
        }
    }
    ev.dips = ev.min_tail <= th.low * ev.mu0;
    ev.recovers = ev.max_tail >= kRecoveryFactor * ev.mu0;
    ev.zero_tail = o.seq.zero_from.has_value();
    if (o.seq.tail_trend) ev.run_ratio = o.seq.tail_trend->ratio;
    if (trend_reaches_horizon(o.seq, ev.last)) {
        if (*ev.run_ratio < 1)
            ev.decay_to_horizon = true;
        else
            ev.growth_to_horizon = true;
    }
    if (o.cycle_start) {
        ev.cycle = true;
        ev.cycle_floor = o.cycle_min();
    }
    return ev;
}

/// Threshold evidence that liminf_n of the measures is zero.
inline bool liminf_zero_evidence(const OrbitEvidence& ev) {
    return ev.zero_tail || ev.decay_to_horizon || ev.dips;
}

/// Certificate that the measures stay bounded away from zero: no dip was
/// observed and either a recurrence floor above the dip threshold or a
/// non-decreasing trend through the horizon pins the tail down.
inline bool liminf_positive_evidence(const OrbitEvidence& ev, const Thresholds& th) {
    if (ev.dips || ev.zero_tail) return false;
    if (ev.cycle && ev.cycle_floor > th.low * ev.mu0) return true;
    return ev.growth_to_horizon;
}

// Certified scaled comparisons between nonnegative certified quantities.

/// x <= c * y certainly (c >= 0 exact).
inline bool certainly_leq_scaled(const CertifiedReal& x, const Rational& c,
                                 const CertifiedReal& y) {
    if (x.is_exact_zero()) return true;
    return x.value + x.abs_error <= to_real(c) * (y.value - y.abs_error);
}

/// x >= c * y certainly (c >= 0 exact).
inline bool certainly_geq_scaled(const CertifiedReal& x, const Rational& c,
                                 const CertifiedReal& y) {
    return x.value - x.abs_error >= to_real(c) * (y.value + y.abs_error);
}

/// x > c * y certainly (c >= 0 exact).
inline bool certainly_gt_scaled(const CertifiedReal& x, const Rational& c,
                                const CertifiedReal& y) {
    return x.value - x.abs_error > to_real(c) * (y.value + y.abs_error);
}

/// x < c * y certainly (c >= 0 exact).
inline bool certainly_lt_scaled(const CertifiedReal& x, const Rational& c,
                                const CertifiedReal& y) {
    if (x.is_exact_zero()) return to_real(c) * (y.value - y.abs_error) > 0;
    return x.value + x.abs_error < to_real(c) * (y.value - y.abs_error);
}

} // namespace detail

// ---- Li-Yorke criterion over candidate sets --------------------------------

/// How one candidate set behaves under iterated preimages.
enum class CandidateClass {
    /// Certified to vanish and certified to dip, with the peak measure ratio
    /// below the explosion threshold: not a witness.
    VanishingTame,
    /// Certified to vanish, dips below low * mu(A), and the measures reach
    /// at least high * mu(A) on the way: a witness of the criterion.
    VanishingExplosive,
    /// Certified bounded away from zero (recurrence or a non-decreasing
    /// trend through the horizon): not a witness.
    NonVanishing,
    /// No certificate either way within the horizon.
    Undecided,
};

inline std::string candidate_class_to_string(CandidateClass c) {
    switch (c) {
        case CandidateClass::VanishingTame: return "VANISHING_TAME";
        case CandidateClass::VanishingExplosive: return "VANISHING_EXPLOSIVE";
        case CandidateClass::NonVanishing: return "NON_VANISHING";
        case CandidateClass::Undecided: return "UNDECIDED";
    }
    throw std::logic_error("unknown candidate class");
}

struct CandidateReport {
    MeasurableSet set;
    SetOrbit orbit;
    CandidateClass cls = CandidateClass::Undecided;
    Rational max_ratio{0}; // max_{n>=1} mu(tau^{-n}A) / mu(A) over computed steps
    int ratio_argmax = 0;
    bool dips = false;
    std::string note; // one-line reason for the class
};

inline CandidateReport classify_preimage_candidate(const MeasureSpace& space,
                                                   const Transformation& tau,
                                                   const MeasurableSet& a, int horizon,
                                                   const Thresholds& th,
                                                   std::size_t max_atoms = kDefaultOrbitAtomCap) {
    if (a.empty())
        throw std::invalid_argument("li_yorke_criterion: candidate sets must be nonempty");
    CandidateReport r;
    r.set = a;
    r.orbit = trace_preimage_orbit(space, tau, a, horizon, max_atoms);
    if (r.orbit.measures.size() >= 2) {
        detail::OrbitEvidence ev = detail::orbit_evidence(r.orbit, th);
        r.max_ratio = ev.max_tail / ev.mu0;
        r.ratio_argmax = ev.argmax;
        r.dips = ev.dips;
        if (r.orbit.truncated_at) {
            r.note = "preimage sets outgrew the atom cap at step " +
                     std::to_string(*r.orbit.truncated_at) + "; orbit not fully inspected";
            return r; // Undecided
        }
        if (ev.vanishes() && ev.dips && r.max_ratio >= th.high) {
            r.cls = CandidateClass::VanishingExplosive;
            r.note = "measures dip below low * mu(A) and reach " + rat_to_string(r.max_ratio) +
                     " * mu(A) at step " + std::to_string(ev.argmax) +
                     (ev.zero_tail ? "; preimages die out" : "; decay trend certified");
        } else if (ev.vanishes() && ev.dips) {
            r.cls = CandidateClass::VanishingTame;
            r.note = "measures vanish but the peak ratio " + rat_to_string(r.max_ratio) +
                     " stays below the explosion threshold";
        } else if (ev.vanishes()) {
            r.note = "measures decay but have not crossed the dip threshold "
                     "within the horizon";
        } else if (detail::liminf_positive_evidence(ev, th)) {
            r.cls = CandidateClass::NonVanishing;
            r.note = ev.cycle ? "preimage sets recur with exact period " +
                                    std::to_string(*r.orbit.cycle_period) +
                                    "; measures never fall below " +
                                    rat_to_string(ev.cycle_floor)
                              : "measures follow a non-decreasing geometric trend "
                                "through the horizon";
        } else {
            r.note = "no vanishing or recurrence certificate within the horizon";
        }
    } else {
        r.note = "preimage sets outgrew the atom cap at step " +
                 std::to_string(*r.orbit.truncated_at) + "; orbit not fully inspected";
    }
    return r;
}

struct LiYorkeReport {
    Verdict verdict;
    std::vector<CandidateReport> candidates;
    Rational sup_ratio{0}; // largest observed mu(tau^{-n}A)/mu(A) over all candidates
    int sup_index = -1;    // candidate attaining it
    int sup_step = 0;      // step attaining it
};

inline Json candidate_to_json(const CandidateReport& r) {
    Json j;
    j["set"] = set_to_json(r.set);
    j["class"] = candidate_class_to_string(r.cls);
    j["measure"] = rat_to_string(r.orbit.measures.at(0));
    j["max_ratio"] = rat_to_string(r.max_ratio);
    j["ratio_step"] = r.ratio_argmax;
    j["dips"] = r.dips;
    if (r.orbit.seq.zero_from) j["zero_from"] = *r.orbit.seq.zero_from;
    if (r.orbit.cycle_start) {
        j["cycle_start"] = *r.orbit.cycle_start;
        j["cycle_period"] = *r.orbit.cycle_period;
    }
    if (r.orbit.truncated_at) j["truncated_at"] = *r.orbit.truncated_at;
    if (r.orbit.seq.tail_trend) j["trend"] = trend_to_json(*r.orbit.seq.tail_trend);
    j["note"] = r.note;
    return j;
}

/// Li-Yorke chaos test for C_tau over an explicit list of candidate sets:
/// CONFIRMED when some candidate's preimage measures provably vanish yet
/// climb past high * mu(A) on the way; REFUTED when every candidate is
/// certified tame or non-vanishing (a verdict about the supplied list);
/// inconclusive otherwise.  The result does not depend on (p, q): indicator
/// orbits dip or explode in norm exactly when their measures do.
inline LiYorkeReport li_yorke_criterion(const MeasureSpace& space, const Transformation& tau,
                                        const std::vector<MeasurableSet>& candidates,
                                        int horizon, const Thresholds& th = {},
                                        std::size_t max_atoms = kDefaultOrbitAtomCap) {
    if (candidates.empty())
        throw std::invalid_argument("li_yorke_criterion: need at least one candidate set");
    LiYorkeReport rep;
    rep.candidates.reserve(candidates.size());
    int first_explosive = -1;
    int decided = 0;
    for (const auto& a : candidates) {
        CandidateReport r = classify_preimage_candidate(space, tau, a, horizon, th, max_atoms);
        int k = static_cast<int>(rep.candidates.size());
        if (rep.sup_index < 0 || r.max_ratio > rep.sup_ratio) {
            rep.sup_ratio = r.max_ratio;
            rep.sup_index = k;
            rep.sup_step = r.ratio_argmax;
        }
        if (r.cls == CandidateClass::VanishingExplosive && first_explosive < 0)
            first_explosive = k;
        if (r.cls == CandidateClass::VanishingTame || r.cls == CandidateClass::NonVanishing)
            ++decided;
        rep.candidates.push_back(std::move(r));
    }
    Verdict v;
    v.horizon = horizon;
    Json w;
    w["thresholds"] = Json{{"low", rat_to_string(th.low)}, {"high", rat_to_string(th.high)}};
    w["sup_ratio"] = rat_to_string(rep.sup_ratio);
    w["sup_candidate"] = rep.sup_index;
    w["sup_step"] = rep.sup_step;
    Json arr = Json::array();
    for (const auto& r : rep.candidates) arr.push_back(candidate_to_json(r));
    w["candidates"] = arr;
    if (first_explosive >= 0) {
        const CandidateReport& r = rep.candidates[first_explosive];
        v.status = Status::Confirmed;
        v.detail = "Li-Yorke chaos witnessed by " + set_to_string(r.set) +
                   ": preimage measures vanish and peak at " + rat_to_string(r.max_ratio) +
                   " * mu(A) at step " + std::to_string(r.ratio_argmax);
        v.trend = r.orbit.seq.tail_trend;
        w["witness_candidate"] = first_explosive;
    } else if (decided == static_cast<int>(rep.candidates.size())) {
        v.status = Status::Refuted;
        v.detail = "none of the " + std::to_string(rep.candidates.size()) +
                   " candidate sets witnesses the criterion: every orbit is certified "
                   "tame or non-vanishing; largest ratio observed is " +
                   rat_to_string(rep.sup_ratio) + " at step " + std::to_string(rep.sup_step);
        if (rep.sup_index >= 0) v.trend = rep.candidates[rep.sup_index].orbit.seq.tail_trend;
    } else {
        v.status = Status::InconclusiveAtHorizon;
        v.detail = std::to_string(rep.candidates.size() - decided) + " of " +
                   std::to_string(rep.candidates.size()) +
                   " candidates remain undecided at the horizon";
    }
    v.witness = std::move(w);
    rep.verdict = std::move(v);
    return rep;
}

// ---- sufficient condition for injective tau --------------------------------

struct PairRatio {
    Rational value{0};
    int n = 0; // earlier step (numerator)
    int m = 0; // later step (denominator)
};

struct SufficiencyReport {
    Verdict condition_a; // liminf_n mu(tau^{-n}A) = 0
    Verdict condition_b; // sup over n < m of mu(tau^n A)/mu(tau^m A) is infinite
    Verdict verdict;     // combined combined verdict for this set
    SetOrbit preimage_orbit;
    SetOrbit forward_orbit;
    PairRatio best_pair;
};

/// Tests the two halves of the sufficient condition on one set A:
/// (a) the preimage measures have liminf zero, and (b) the forward measures
/// admit arbitrarily large ratios mu(tau^n A)/mu(tau^m A) with n < m.
/// Both confirmed makes C_tau Li-Yorke chaotic -- but only when tau is
/// injective, which this operation does not check (see
/// injective_li_yorke_criterion for the guarded form).  A REFUTED half only
/// says this particular set is not a witness.
inline SufficiencyReport injective_sufficient_conditions(const MeasureSpace& space,
                                                      const Transformation& tau,
                                                      const MeasurableSet& a, int horizon,
                                                      const Thresholds& th = {},
                                                      std::size_t max_atoms = kDefaultOrbitAtomCap) {
    if (a.empty())
        throw std::invalid_argument("injective_sufficient_conditions: set must be nonempty");
    SufficiencyReport rep;
    rep.preimage_orbit = trace_preimage_orbit(space, tau, a, horizon, max_atoms);
    rep.forward_orbit = trace_forward_orbit(space, tau, a, horizon, max_atoms);

    // ---- (a): liminf of the preimage measures is zero ----
    Verdict va;
    va.horizon = horizon;
    if (rep.preimage_orbit.truncated_at || rep.preimage_orbit.measures.size() < 2) {
        va.status = Status::InconclusiveAtHorizon;
        va.detail = "preimage sets outgrew the atom cap; orbit not fully inspected";
    } else {
        detail::OrbitEvidence ev = detail::orbit_evidence(rep.preimage_orbit, th);
        va.witness["mu"] = rat_to_string(ev.mu0);
        va.witness["min"] = rat_to_string(ev.min_tail);
        va.witness["min_step"] = ev.argmin;
        if (ev.zero_tail) {
            va.status = Status::Confirmed;
            va.detail = "preimages are empty from step " +
                        std::to_string(*rep.preimage_orbit.seq.zero_from) + " on";
            va.witness["zero_from"] = *rep.preimage_orbit.seq.zero_from;
        } else if (ev.decay_to_horizon) {
            va.status = Status::Confirmed;
            va.detail = "preimage measures decay geometrically (ratio " +
                        rat_to_string(*ev.run_ratio) + ") through the horizon";
            va.trend = rep.preimage_orbit.seq.tail_trend;
        } else if (ev.dips) {
            va.status = Status::Confirmed;
            va.detail = "preimage measure dips to " + rat_to_string(ev.min_tail) +
                        " <= low * mu(A) at step " + std::to_string(ev.argmin);
        } else if (detail::liminf_positive_evidence(ev, th)) {
            va.status = Status::Refuted;
            if (ev.cycle) {
                va.detail = "preimage sets recur with exact period " +
                            std::to_string(*rep.preimage_orbit.cycle_period) +
                            "; measures never fall below " + rat_to_string(ev.cycle_floor);
                va.witness["cycle_start"] = *rep.preimage_orbit.cycle_start;
                va.witness["cycle_period"] = *rep.preimage_orbit.cycle_period;
            } else {
                va.detail = "preimage measures follow a non-decreasing geometric trend "
                            "(ratio " + rat_to_string(*ev.run_ratio) + ") through the horizon";
                va.trend = rep.preimage_orbit.seq.tail_trend;
            }
        } else {
            va.status = Status::InconclusiveAtHorizon;
            va.detail = "preimage measures neither dipped below low * mu(A) nor "
                        "produced a recurrence or trend certificate";
        }
    }

    // ---- (b): forward ratios mu(tau^n A)/mu(tau^m A), n < m, unbounded ----
    Verdict vb;
    vb.horizon = horizon;
    const std::vector<Rational>& s = rep.forward_orbit.measures;
    if (rep.forward_orbit.truncated_at || s.size() < 2) {
        vb.status = Status::InconclusiveAtHorizon;
        vb.detail = "forward images outgrew the atom cap; orbit not fully inspected";
    } else {
        Rational prefix = s[0];
        int prefix_at = 0;
        for (std::size_t m = 1; m < s.size(); ++m) {
            if (s[m] == 0)
                throw std::logic_error("forward image of a nonempty set became empty");
            Rational ratio = prefix / s[m];
            if (ratio > rep.best_pair.value) {
                rep.best_pair.value = ratio;
                rep.best_pair.n = prefix_at;
                rep.best_pair.m = static_cast<int>(m);
            }
            if (s[m] > prefix) {
                prefix = s[m];
                prefix_at = static_cast<int>(m);
            }
        }
        detail::OrbitEvidence ev = detail::orbit_evidence(rep.forward_orbit, th);
        vb.witness["best_ratio"] = rat_to_string(rep.best_pair.value);
        vb.witness["pair"] = Json{{"n", rep.best_pair.n}, {"m", rep.best_pair.m}};
        bool crossed = rep.best_pair.value >= th.high;
        if (crossed && ev.decay_to_horizon) {
            vb.status = Status::Confirmed;
            vb.detail = "forward ratio mu(tau^" + std::to_string(rep.best_pair.n) +
                        " A)/mu(tau^" + std::to_string(rep.best_pair.m) + " A) = " +
                        rat_to_string(rep.best_pair.value) +
                        " crosses the explosion threshold, and the forward measures keep "
                        "decaying geometrically (ratio " + rat_to_string(*ev.run_ratio) + ")";
            vb.trend = rep.forward_orbit.seq.tail_trend;
        } else if (ev.cycle) {
            SequenceAnalysis all = rep.forward_orbit.seq;
            Rational bound = all.max_value / rep.forward_orbit.cycle_min();
            if (bound < rep.best_pair.value) bound = rep.best_pair.value;
            vb.status = Status::Refuted;
            vb.detail = "forward sets recur with exact period " +
                        std::to_string(*rep.forward_orbit.cycle_period) +
                        "; every ratio is at most " + rat_to_string(bound);
            vb.witness["bound"] = rat_to_string(bound);
            vb.witness["cycle_start"] = *rep.forward_orbit.cycle_start;
            vb.witness["cycle_period"] = *rep.forward_orbit.cycle_period;
        } else if (ev.growth_to_horizon) {
            Rational bound = rep.best_pair.value < 1 ? Rational(1) : rep.best_pair.value;
            vb.status = Status::Refuted;
            vb.detail = "forward measures follow a non-decreasing geometric trend (ratio " +
                        rat_to_string(*ev.run_ratio) +
                        ") through the horizon; every ratio is at most " + rat_to_string(bound);
            vb.witness["bound"] = rat_to_string(bound);
            vb.trend = rep.forward_orbit.seq.tail_trend;
        } else if (crossed) {
            vb.status = Status::InconclusiveAtHorizon;
            vb.detail = "a ratio of " + rat_to_string(rep.best_pair.value) +
                        " was observed but the tail behavior is uncertified";
        } else if (ev.decay_to_horizon) {
            vb.status = Status::InconclusiveAtHorizon;
            vb.detail = "forward measures decay geometrically but the best ratio " +
                        rat_to_string(rep.best_pair.value) +
                        " has not reached the explosion threshold";
            vb.trend = rep.forward_orbit.seq.tail_trend;
        } else {
            vb.status = Status::InconclusiveAtHorizon;
            vb.detail = "no certificate for or against unbounded forward ratios";
        }
    }

    // ---- combined ----
    Verdict vc;
    vc.horizon = horizon;
    vc.witness["condition_a"] = verdict_to_json(va);
    vc.witness["condition_b"] = verdict_to_json(vb);
    if (va.confirmed() && vb.confirmed()) {
        vc.status = Status::Confirmed;
        vc.detail = "both halves of the sufficient condition hold for " + set_to_string(a) +
                    ": C_tau is Li-Yorke chaotic provided tau is injective";
        vc.trend = va.trend ? va.trend : vb.trend;
    } else if (va.refuted() || vb.refuted()) {
        vc.status = Status::Refuted;
        vc.detail = "the set " + set_to_string(a) +
                    " does not witness the sufficient condition (" +
                    std::string(va.refuted() ? "preimage measures stay bounded away from zero"
                                             : "forward ratios are certified bounded") + ")";
    } else {
        vc.status = Status::InconclusiveAtHorizon;
        vc.detail = "the sufficient condition is undecided for " + set_to_string(a) +
                    " at this horizon";
    }
    rep.condition_a = std::move(va);
    rep.condition_b = std::move(vb);
    rep.verdict = std::move(vc);
    return rep;
}

struct InjectiveLiYorkeReport {
    Verdict injectivity;
    SufficiencyReport sufficiency;
    Verdict verdict;
};

/// Sufficient-condition test guarded by an injectivity check on the first
/// `window_size` atoms; throws std::invalid_argument when tau is provably
/// not injective there (the criterion presupposes injectivity).
inline InjectiveLiYorkeReport injective_li_yorke_criterion(
    const MeasureSpace& space, const Transformation& tau, const MeasurableSet& a, int horizon,
    std::size_t window_size, const Thresholds& th = {},
    std::size_t max_atoms = kDefaultOrbitAtomCap) {
    InjectiveLiYorkeReport rep;
    rep.injectivity = check_injective(space, tau, window_size);
    if (rep.injectivity.refuted())
        throw std::invalid_argument(
            "injective_li_yorke_criterion: tau is not injective (" + rep.injectivity.detail +
            "); the sufficient condition does not apply -- conditions (a) and (b) may hold "
            "while C_tau fails to be Li-Yorke chaotic. Use li_yorke_criterion instead.");
    rep.sufficiency = injective_sufficient_conditions(space, tau, a, horizon, th, max_atoms);
    rep.verdict = rep.sufficiency.verdict;
    rep.verdict.detail += " [injectivity verified on " + std::to_string(window_size) + " atoms]";
    rep.verdict.witness["injectivity"] = verdict_to_json(rep.injectivity);
    return rep;
}

// ---- equivalent conditions under a finite measure --------------------------

struct ConditionReport {
    std::string key;       // stable identifier, e.g. "preimage-limit-zero"
    std::string statement; // human-readable condition
    Verdict verdict;
};

struct EquivalenceReport {
    std::vector<ConditionReport> conditions;
    bool consistent = true; // no condition confirmed while another is refuted
    Verdict overall;
};

namespace detail {

enum class Ev { Conf, Ref, Unknown };

struct ProbeData {
    MeasurableSet set;
    SetOrbit pre, fwd;
    std::optional<OrbitEvidence> pre_ev, fwd_ev; // nullopt when truncated
    // Indicator norms along the preimage orbit (empty when truncated).
    std::vector<CertifiedReal> norms;
    CertifiedReal norm0;
    CertifiedReal min_norm, max_norm; // over n >= 1
    int norm_argmin = 1, norm_argmax = 1;
};

inline ProbeData probe_data(const MeasureSpace& space, const Transformation& tau,
                            const MeasurableSet& a, int horizon, const LorentzIndex& idx,
                            const Thresholds& th, std::size_t max_atoms) {
    ProbeData p;
    p.set = a;
    p.pre = trace_preimage_orbit(space, tau, a, horizon, max_atoms);
    p.fwd = trace_forward_orbit(space, tau, a, horizon, max_atoms);
    if (!p.pre.truncated_at && p.pre.measures.size() >= 2) {
        p.pre_ev = orbit_evidence(p.pre, th);
        p.norms.reserve(p.pre.measures.size());
        for (const Rational& m : p.pre.measures)
            p.norms.push_back(m == 0 ? CertifiedReal{} : indicator_norm(m, idx));
        p.norm0 = p.norms[0];
        p.min_norm = p.max_norm = p.norms[1];
        for (std::size_t n = 2; n < p.norms.size(); ++n) {
            if (p.norms[n].value < p.min_norm.value) {
                p.min_norm = p.norms[n];
                p.norm_argmin = static_cast<int>(n);
            }
            if (p.norms[n].value > p.max_norm.value) {
                p.max_norm = p.norms[n];
                p.norm_argmax = static_cast<int>(n);
            }
        }
    }
    if (!p.fwd.truncated_at && p.fwd.measures.size() >= 2) p.fwd_ev = orbit_evidence(p.fwd, th);
    return p;
}

/// liminf ||C^n chi_A|| = 0 for the probe's indicator.  A cycle repeats the
/// observed norms forever and a non-decreasing trend only raises them, so
/// either one pins the liminf above an observed floor.
inline Ev ev_norm_liminf_zero(const ProbeData& p, const Thresholds& th) {
    if (!p.pre_ev) return Ev::Unknown;
    const OrbitEvidence& ev = *p.pre_ev;
    if (ev.zero_tail || ev.decay_to_horizon) return Ev::Conf;
    if (certainly_leq_scaled(p.min_norm, th.low, p.norm0)) return Ev::Conf;
    bool never_dips = certainly_gt_scaled(p.min_norm, th.low, p.norm0);
    if (never_dips && (ev.cycle || ev.growth_to_horizon)) return Ev::Ref;
    return Ev::Unknown;
}

/// lim of the given orbit's measures is zero.
inline Ev ev_measure_limit_zero(const std::optional<OrbitEvidence>& oev) {
    if (!oev) return Ev::Unknown;
    if (oev->vanishes()) return Ev::Conf;
    if (oev->cycle || oev->growth_to_horizon) return Ev::Ref;
    return Ev::Unknown;
}

/// liminf mu(tau^{-n}A) = 0 and liminf mu(tau^{n}A) = 0.
inline Ev ev_two_sided_liminf_zero(const ProbeData& p, const Thresholds& th) {
    if (!p.pre_ev || !p.fwd_ev) return Ev::Unknown;
    if (liminf_zero_evidence(*p.pre_ev) && liminf_zero_evidence(*p.fwd_ev)) return Ev::Conf;
    if (liminf_positive_evidence(*p.pre_ev, th) || liminf_positive_evidence(*p.fwd_ev, th))
        return Ev::Ref;
    return Ev::Unknown;
}

/// liminf mu(tau^{-n}A) = 0 while limsup mu(tau^{-n}A) > 0.  A probe whose
/// measures both dip below low * mu(A) and recover to mu(A) exhibits the
/// pattern; a finite probe is read as a truncated stand-in for the sparse
/// infinite sets that realize it exactly, so recovery before an eventual
/// death still counts in favor.
inline Ev ev_dip_and_recover(const ProbeData& p, const Thresholds& th) {
    if (!p.pre_ev) return Ev::Unknown;
    const OrbitEvidence& ev = *p.pre_ev;
    if (liminf_zero_evidence(ev) && ev.recovers) return Ev::Conf;
    if (liminf_positive_evidence(ev, th)) return Ev::Ref;
    if (ev.vanishes() && !ev.recovers) return Ev::Ref; // limsup certified zero
    return Ev::Unknown;
}

/// The indicator orbit is semi-irregular (or better): norms dip toward zero
/// yet revisit at least half the initial norm.
inline Ev ev_semi_irregular(const ProbeData& p, const Thresholds& th) {
    if (!p.pre_ev) return Ev::Unknown;
    const OrbitEvidence& ev = *p.pre_ev;
    bool norm_dip = ev.zero_tail || ev.decay_to_horizon ||
                    certainly_leq_scaled(p.min_norm, th.low, p.norm0);
    if (norm_dip && certainly_geq_scaled(p.max_norm, kSemiIrregularFloor, p.norm0))
        return Ev::Conf;
    bool never_dips = certainly_gt_scaled(p.min_norm, th.low, p.norm0);
    if (never_dips && (ev.cycle || ev.growth_to_horizon) && !ev.dips) return Ev::Ref;
    if (ev.vanishes() && certainly_lt_scaled(p.max_norm, kSemiIrregularFloor, p.norm0))
        return Ev::Ref; // the orbit tends to zero without ever recovering
    return Ev::Unknown;
}

} // namespace detail

/// Decides the equivalent characterizations of Li-Yorke chaos for C_tau on a
/// finite measure space with injective tau.  Each condition is evaluated on
/// every probe set; an existential condition is CONFIRMED by one witnessing
/// probe and REFUTED (relative to the probe list) when every probe certifiably
/// fails it.  Throws std::invalid_argument when the total mass is infinite or
/// tau is provably not injective on the inspected window.
inline EquivalenceReport finite_measure_equivalences(
    const MeasureSpace& space, const Transformation& tau, const LorentzIndex& idx,
    const std::vector<MeasurableSet>& probes, int horizon, std::size_t window_size,
    const Thresholds& th = {}, std::size_t max_atoms = kDefaultOrbitAtomCap) {
    if (!space.total_mass())
        throw std::invalid_argument(
            "finite_measure_equivalences: requires a finite measure space");
    if (probes.empty())
        throw std::invalid_argument("finite_measure_equivalences: need at least one probe set");
    for (const auto& a : probes)
        if (a.empty())
            throw std::invalid_argument("finite_measure_equivalences: probes must be nonempty");
    Verdict inj = check_injective(space, tau, window_size);
    if (inj.refuted())
        throw std::invalid_argument("finite_measure_equivalences: " + inj.detail);

    std::vector<detail::ProbeData> data;
    data.reserve(probes.size());
    for (const auto& a : probes)
        data.push_back(detail::probe_data(space, tau, a, horizon, idx, th, max_atoms));

    struct Cond {
        std::string key, statement;
        std::function<detail::Ev(const detail::ProbeData&)> eval;
    };
    const std::vector<Cond> specs = {
        {"norm-liminf-zero", "some nonzero vector g has liminf ||C^n g|| = 0",
         [&](const detail::ProbeData& p) { return detail::ev_norm_liminf_zero(p, th); }},
        {"preimage-limit-zero", "some set A of positive measure has lim mu(tau^{-n} A) = 0",
         [&](const detail::ProbeData& p) { return detail::ev_measure_limit_zero(p.pre_ev); }},
        {"image-limit-zero", "some set A of positive measure has lim mu(tau^{n} A) = 0",
         [&](const detail::ProbeData& p) { return detail::ev_measure_limit_zero(p.fwd_ev); }},
        {"two-sided-liminf-zero",
         "some set A of positive measure has liminf mu(tau^{-n} A) = 0 and "
         "liminf mu(tau^{n} A) = 0",
         [&](const detail::ProbeData& p) { return detail::ev_two_sided_liminf_zero(p, th); }},
        {"dip-and-recover",
         "some set A of positive measure has liminf mu(tau^{-n} A) = 0 and "
         "limsup mu(tau^{-n} A) > 0",
         [&](const detail::ProbeData& p) { return detail::ev_dip_and_recover(p, th); }},
        {"semi-irregular-orbit",
         "the composition operator admits a semi-irregular or irregular orbit",
         [&](const detail::ProbeData& p) { return detail::ev_semi_irregular(p, th); }},
    };

    EquivalenceReport rep;
    bool any_conf = false, any_ref = false;
    std::string conf_key;
    for (const auto& c : specs) {
        ConditionReport cr;
        cr.key = c.key;
        cr.statement = c.statement;
        cr.verdict.horizon = horizon;
        int witness = -1, refs = 0;
        for (std::size_t k = 0; k < data.size(); ++k) {
            detail::Ev e = c.eval(data[k]);
            if (e == detail::Ev::Conf && witness < 0) witness = static_cast<int>(k);
            if (e == detail::Ev::Ref) ++refs;
        }
        if (witness >= 0) {
            cr.verdict.status = Status::Confirmed;
            cr.verdict.detail = "witnessed by probe " + set_to_string(probes[witness]);
            cr.verdict.witness["probe"] = witness;
            any_conf = true;
            if (conf_key.empty()) conf_key = c.key;
        } else if (refs == static_cast<int>(data.size())) {
            cr.verdict.status = Status::Refuted;
            cr.verdict.detail = "every inspected probe certifiably fails the condition";
            any_ref = true;
        } else {
            cr.verdict.status = Status::InconclusiveAtHorizon;
            cr.verdict.detail = "no probe witnesses the condition and " +
                                std::to_string(data.size() - refs) +
                                " probes remain undecided";
        }
        rep.conditions.push_back(std::move(cr));
    }

    rep.consistent = !(any_conf && any_ref);
    Verdict overall;
    overall.horizon = horizon;
    Json w;
    w["probes"] = Json::array();
    for (const auto& a : probes) w["probes"].push_back(set_to_json(a));
    Json conds = Json::array();
    for (const auto& c : rep.conditions)
        conds.push_back(Json{{"key", c.key},
                             {"statement", c.statement},
                             {"status", status_to_string(c.verdict.status)},
                             {"detail", c.verdict.detail}});
    w["conditions"] = conds;
    w["consistent"] = rep.consistent;
    if (!rep.consistent) {
        overall.status = Status::InconclusiveAtHorizon;
        overall.detail = "evidence is inconsistent across equivalent conditions; "
                         "no verdict is issued";
    } else if (any_conf) {
        overall.status = Status::Confirmed;
        overall.detail = "C_tau is Li-Yorke chaotic: condition '" + conf_key +
                         "' holds, and under a finite measure with injective tau all "
                         "listed conditions are equivalent";
    } else if (any_ref && std::all_of(rep.conditions.begin(), rep.conditions.end(),
                                      [](const ConditionReport& c) {
                                          return c.verdict.refuted();
                                      })) {
        overall.status = Status::Refuted;
        overall.detail = "no inspected probe witnesses any of the equivalent conditions";
    } else {
        overall.status = Status::InconclusiveAtHorizon;
        overall.detail = "the equivalent conditions remain undecided on the inspected probes";
    }
    overall.witness = std::move(w);
    rep.overall = std::move(overall);
    return rep;
}

// ---- multiplication operators are never Li-Yorke chaotic -------------------

struct MultiplicationReport {
    Verdict verdict;
    std::vector<AtomId> contracting; // |theta(a)| < 1 on the inspected window
    std::vector<AtomId> unimodular;  // |theta(a)| = 1
    std::vector<AtomId> expanding;   // |theta(a)| > 1
};

/// Structural refutation: |M_theta^n g| = |theta|^n |g| pointwise, so an
/// orbit with liminf ||M^n g|| = 0 must concentrate where |theta| < 1 and
/// its norms then decrease to zero monotonically -- the dip can never be
/// followed by a return.  The verdict is REFUTED for every theta; the window
/// partition is reported as the supporting evidence.
inline MultiplicationReport multiplication_li_yorke(const MultiplicationOperator& op,
                                                    std::size_t window_size) {
    MultiplicationReport rep;
    SpaceWindow w = op.space.window(window_size);
    for (const AtomId& a : w.atoms) {
        Rational m = op.magnitude_at(a);
        if (m < 1)
            rep.contracting.push_back(a);
        else if (m == 1)
            rep.unimodular.push_back(a);
        else
            rep.expanding.push_back(a);
    }
    Verdict v;
    v.status = Status::Refuted;
    v.horizon = static_cast<int>(w.atoms.size());
    v.detail = "multiplication operators are never Li-Yorke chaotic: orbit values scale "
               "by |theta|^n pointwise, so norms are eventually monotone on every "
               "magnitude class and a vanishing orbit cannot return";
    auto atoms_json = [](const std::vector<AtomId>& v_) {
        Json j = Json::array();
        for (const auto& a : v_) j.push_back(atom_to_string(a));
        return j;
    };
    v.witness["contracting"] = atoms_json(rep.contracting);
    v.witness["unimodular"] = atoms_json(rep.unimodular);
    v.witness["expanding"] = atoms_json(rep.expanding);
    v.witness["default_magnitude"] = rat_to_string(op.default_magnitude);
    rep.verdict = std::move(v);
    return rep;
}

// ---- irregular vector construction ------------------------------------------

struct SpikeChoice {
    AtomId atom;
    int death = 0;        // first step at which the atom's preimages are empty
    int slot = 0;         // death step the construction aimed for
    Rational coefficient; // intended norm contribution of the spike
    Rational value;       // value placed on the atom
};

struct IrregularSearchReport {
    SimpleFunction vector;
    OrbitTrace trace;
    OrbitClassification classification;
    std::vector<SpikeChoice> spikes;
    bool ratio_infinite = false; // the minimal orbit norm is exactly zero
    Real achieved_ratio{0};      // certified lower bound on max/min when finite
    Verdict verdict;
};

/// Searches the canonical window for atoms whose preimages die, staggers
/// their deaths near the slots 4, 9, 16, ... and combines them with
/// geometrically growing coefficients into one vector whose orbit both
/// explodes and collapses.  CONFIRMED when the certified max/min orbit-norm
/// ratio reaches the explosion threshold (or the minimum is exactly zero);
/// a failed search is merely inconclusive.
inline IrregularSearchReport irregular_vector_search(
    const MeasureSpace& space, const Transformation& tau, const LorentzIndex& idx, int horizon,
    std::size_t window_size, const Thresholds& th = {},
    std::size_t max_atoms = kDefaultOrbitAtomCap) {
    if (horizon < 4)
        throw std::invalid_argument("irregular_vector_search: horizon must be at least 4");
    struct Cand {
        AtomId atom;
        int death = 0;
        std::size_t pos = 0;
    };
    std::vector<Cand> cands;
    SpaceWindow w = space.window(window_size);
    for (std::size_t k = 0; k < w.atoms.size(); ++k) {
        SetOrbit orbit = trace_preimage_orbit(space, tau, MeasurableSet{{w.atoms[k]}}, horizon,
                                              max_atoms);
        if (!orbit.truncated_at && orbit.seq.zero_from)
            cands.push_back({w.atoms[k], *orbit.seq.zero_from, k});
    }

    IrregularSearchReport rep;
    rep.verdict.horizon = horizon;
    if (cands.empty()) {
        rep.verdict.status = Status::InconclusiveAtHorizon;
        rep.verdict.detail = "no atom in the first " + std::to_string(w.atoms.size()) +
                             " atoms has dying preimages; no spike vector constructed";
        return rep;
    }

    std::vector<int> slots;
    for (int m = 2; m * m < horizon; ++m) slots.push_back(m * m);
    if (slots.empty()) slots.push_back(horizon / 2);

    std::vector<bool> used(cands.size(), false);
    std::vector<std::pair<AtomId, Rational>> entries;
    Rational coeff(2);
    for (std::size_t si = 0; si < slots.size(); ++si) {
        int slot = slots[si];
        int best = -1;
        long best_gap = 0;
        for (std::size_t c = 0; c < cands.size(); ++c) {
            if (used[c]) continue;
            long gap = std::labs(static_cast<long>(cands[c].death) - slot);
            if (best < 0 || gap < best_gap) {
                best = static_cast<int>(c);
                best_gap = gap;
            }
        }
        if (best < 0) break;
        used[best] = true;
        coeff *= 2; // spike m carries weight 2^m so later spikes dominate
        CertifiedReal unit = indicator_norm(space.weight(cands[best].atom), idx);
        Rational inv(0);
        for (unsigned bits = 48; inv == 0 && bits <= 4096; bits *= 2)
            inv = dyadic_approx(Real(1) / unit.value, bits);
        Rational value = coeff * inv;
        entries.emplace_back(cands[best].atom, value);
        rep.spikes.push_back({cands[best].atom, cands[best].death, slot, coeff, value});
    }

    rep.vector = make_simple_function(std::move(entries));
    CompositionOperator op{space, tau};
    rep.trace = orbit_trace(LinearOperator{op}, rep.vector, idx, horizon);
    const CertifiedReal& norm0 = rep.trace.entries[0].norm;
    rep.classification = classify_orbit(rep.trace, to_real(th.low) * norm0.value,
                                        to_real(th.high) * norm0.value);
    const CertifiedReal& mn = rep.classification.min_norm;
    const CertifiedReal& mx = rep.classification.max_norm;
    rep.ratio_infinite = mn.is_exact_zero();
    if (!rep.ratio_infinite && mn.value - mn.abs_error > 0)
        rep.achieved_ratio = (mx.value - mx.abs_error) / (mn.value + mn.abs_error);

    Json w_;
    w_["orbit_class"] = orbit_class_to_string(rep.classification.cls);
    w_["min_step"] = rep.classification.argmin;
    w_["max_step"] = rep.classification.argmax;
    w_["min_norm"] = real_to_string(mn.value);
    w_["max_norm"] = real_to_string(mx.value);
    Json spikes_json = Json::array();
    for (const auto& s : rep.spikes)
        spikes_json.push_back(Json{{"atom", atom_to_string(s.atom)},
                                   {"death", s.death},
                                   {"slot", s.slot},
                                   {"coefficient", rat_to_string(s.coefficient)},
                                   {"value", rat_to_string(s.value)}});
    w_["spikes"] = spikes_json;
    bool explodes = mx.value - mx.abs_error > 0;
    if (rep.ratio_infinite && explodes) {
        rep.verdict.status = Status::Confirmed;
        rep.verdict.detail = "constructed vector's orbit reaches norm " +
                             real_to_string(mx.value, 12) + " at step " +
                             std::to_string(rep.classification.argmax) +
                             " and is exactly zero at step " +
                             std::to_string(rep.classification.argmin) +
                             ": the max/min norm ratio is unbounded";
    } else if (!rep.ratio_infinite && rep.achieved_ratio >= to_real(th.high)) {
        rep.verdict.status = Status::Confirmed;
        rep.verdict.detail = "constructed vector's orbit has certified max/min norm ratio " +
                             real_to_string(rep.achieved_ratio, 12) + " between steps " +
                             std::to_string(rep.classification.argmax) + " and " +
                             std::to_string(rep.classification.argmin);
    } else {
        rep.verdict.status = Status::InconclusiveAtHorizon;
        rep.verdict.detail = "the constructed vector did not certify an explosive "
                             "max/min norm ratio at this horizon";
    }
    rep.verdict.witness = std::move(w_);
    return rep;
}

} // namespace lorentz
