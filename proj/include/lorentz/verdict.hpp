#pragma once

#include "lorentz/rational.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace lorentz {

using Json = nlohmann::ordered_json;

/// Outcome of a finite-horizon decision procedure.
///
/// CONFIRMED / REFUTED mean the criterion was decided *with a certificate*:
/// either exact finite evidence (empty-set tails, set recurrence) or exact
/// data extrapolated by a trend certificate, in which case the verdict is
/// qualified by the horizon it was computed at.  INCONCLUSIVE_AT_HORIZON
/// means the evidence gathered up to the horizon certifies neither side.
enum class Status {
    Confirmed,
    Refuted,
    InconclusiveAtHorizon,
};

inline std::string status_to_string(Status s) {
    switch (s) {
        case Status::Confirmed: return "CONFIRMED";
        case Status::Refuted: return "REFUTED";
        case Status::InconclusiveAtHorizon: return "INCONCLUSIVE_AT_HORIZON";
    }
    throw std::logic_error("unknown status");
}

inline Status status_from_string(const std::string& s) {
    if (s == "CONFIRMED") return Status::Confirmed;
    if (s == "REFUTED") return Status::Refuted;
    if (s == "INCONCLUSIVE_AT_HORIZON") return Status::InconclusiveAtHorizon;
    throw std::invalid_argument("unknown status: " + s);
}

/// Exact geometric trend: entries s(start), ..., s(start+length) satisfy
/// s(k+1) = ratio * s(k) exactly.  `length` counts ratio steps, so the run
/// spans length+1 entries and the certificate requires length >= 1.
struct TrendCertificate {
    Rational ratio;
    int start = 0;
    int length = 0;

    friend bool operator==(const TrendCertificate&, const TrendCertificate&) = default;
};

/// Minimum number of exact ratio steps required before a geometric trend
/// counts as a certificate.
inline constexpr int kMinTrendRun = 5;

/// Evidence thresholds shared by every analyzer.  A quantity "vanishes" in
/// the threshold sense when it falls to at most `low` times its reference
/// value, and "explodes" when it reaches at least `high` times it.  Both are
/// exact rationals so threshold comparisons against exact measures never
/// involve rounding.
struct Thresholds {
    Rational low = Rational(1, 1000000);
    Rational high = Rational(1000000);
};

struct Verdict {
    Status status = Status::InconclusiveAtHorizon;
    int horizon = 0;
    std::string detail;                    // one-line human summary
    std::optional<TrendCertificate> trend; // certificate backing the verdict, if any
    Json witness = Json::object();         // exact replayable evidence

    bool confirmed() const { return status == Status::Confirmed; }
    bool refuted() const { return status == Status::Refuted; }
};

inline Json trend_to_json(const TrendCertificate& t) {
    return Json{{"ratio", rat_to_string(t.ratio)}, {"start", t.start}, {"length", t.length}};
}

inline Json verdict_to_json(const Verdict& v) {
    Json j;
    j["status"] = status_to_string(v.status);
    j["horizon"] = v.horizon;
    j["detail"] = v.detail;
    if (v.trend) j["trend"] = trend_to_json(*v.trend);
    j["witness"] = v.witness;
    return j;
}

} // namespace lorentz
