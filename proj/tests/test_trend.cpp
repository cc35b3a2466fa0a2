#include "lorentz/builtin.hpp"
#include "lorentz/trend.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace lorentz;

namespace {

MeasureSpace rotation_space() {
    return make_finite_space({{AtomId(1), make_rational(1)},
                              {AtomId(2), make_rational(1, 2)},
                              {AtomId(3), make_rational(1, 4)}});
}

Transformation rotation_map(const MeasureSpace& s) {
    return make_finite_transformation(
        s, {{AtomId(1), AtomId(2)}, {AtomId(2), AtomId(3)}, {AtomId(3), AtomId(1)}});
}

} // namespace

TEST_CASE("analyze_sequence finds zero suffixes and extrema") {
    std::vector<Rational> v{make_rational(1), make_rational(1, 2), make_rational(1, 4),
                            make_rational(0), make_rational(0)};
    SequenceAnalysis a = analyze_sequence(v);
    REQUIRE(a.zero_from.has_value());
    CHECK(*a.zero_from == 3);
    CHECK(a.max_value == 1);
    CHECK(a.argmax == 0);
    CHECK(a.min_value == 0);
    CHECK(a.argmin == 3);
    CHECK_FALSE(a.tail_trend.has_value()); // only two ratio steps, below the minimum run

    CHECK_THROWS_AS(analyze_sequence({}), std::invalid_argument);
}

TEST_CASE("analyze_sequence certifies geometric runs of at least five steps") {
    std::vector<Rational> doubling;
    for (int k = 0; k <= 6; ++k) doubling.push_back(pow_int(make_rational(2), k));
    SequenceAnalysis a = analyze_sequence(doubling);
    REQUIRE(a.tail_trend.has_value());
    CHECK(a.tail_trend->ratio == 2);
    CHECK(a.tail_trend->start == 0);
    CHECK(a.tail_trend->length == 6);
    CHECK(trend_reaches_horizon(a, 6));
    CHECK_FALSE(trend_reaches_horizon(a, 7));

    std::vector<Rational> constant(8, make_rational(3, 7));
    SequenceAnalysis c = analyze_sequence(constant);
    REQUIRE(c.tail_trend.has_value());
    CHECK(c.tail_trend->ratio == 1);
    CHECK(trend_reaches_horizon(c, 7));

    // A broken tail keeps the run too short for a certificate.
    std::vector<Rational> broken{make_rational(1), make_rational(2), make_rational(4),
                                 make_rational(8), make_rational(16), make_rational(31)};
    CHECK_FALSE(analyze_sequence(broken).tail_trend.has_value());

    SequenceAnalysis single = analyze_sequence({make_rational(5)});
    CHECK(single.max_value == 5);
    CHECK_FALSE(single.tail_trend.has_value());
    CHECK_FALSE(single.zero_from.has_value());
}

TEST_CASE("preimage orbits record exact deaths on the unilateral shift") {
    DynamicalSystem sys = make_builtin_system(BuiltinFamily::UnilateralShift, make_rational(1, 2));
    SetOrbit o = trace_preimage_orbit(sys.space, sys.tau, MeasurableSet{{AtomId(5)}}, 10);
    REQUIRE(o.measures.size() == 11);
    CHECK(o.measures[0] == make_rational(1, 32));
    CHECK(o.measures[4] == make_rational(1, 2));
    CHECK(o.measures[5] == 0);
    REQUIRE(o.seq.zero_from.has_value());
    CHECK(*o.seq.zero_from == 5);
    CHECK(o.seq.max_value == make_rational(1, 2));
    CHECK(o.seq.argmax == 4);
    CHECK_FALSE(o.cycle_start.has_value());
    CHECK_FALSE(o.truncated_at.has_value());
    // Four doubling steps end at the last positive entry: below the minimum run.
    CHECK_FALSE(o.seq.tail_trend.has_value());

    SetOrbit deeper = trace_preimage_orbit(sys.space, sys.tau, MeasurableSet{{AtomId(8)}}, 10);
    REQUIRE(deeper.seq.tail_trend.has_value());
    CHECK(deeper.seq.tail_trend->ratio == 2);
    CHECK(deeper.seq.tail_trend->start == 0);
    CHECK(deeper.seq.tail_trend->length == 7);
}

TEST_CASE("forward orbits certify geometric growth on the bilateral shift") {
    DynamicalSystem sys = make_builtin_system(BuiltinFamily::BilateralShift, make_rational(2));
    SetOrbit o = trace_forward_orbit(sys.space, sys.tau, MeasurableSet{{AtomId(0)}}, 12);
    REQUIRE(o.measures.size() == 13);
    CHECK(o.measures[0] == 1);
    CHECK(o.measures[12] == pow_int(make_rational(2), 12));
    REQUIRE(o.seq.tail_trend.has_value());
    CHECK(o.seq.tail_trend->ratio == 2);
    CHECK(trend_reaches_horizon(o.seq, 12));
    CHECK_FALSE(o.seq.zero_from.has_value());
    CHECK_FALSE(o.cycle_start.has_value());
}

TEST_CASE("set recurrence is detected as an exact cycle") {
    MeasureSpace s = rotation_space();
    Transformation tau = rotation_map(s);
    SetOrbit o = trace_preimage_orbit(s, tau, MeasurableSet{{AtomId(1)}}, 9);
    REQUIRE(o.cycle_start.has_value());
    CHECK(*o.cycle_start == 0);
    CHECK(*o.cycle_period == 3);
    CHECK(o.cycle_min() == make_rational(1, 4));
    CHECK(o.cycle_max() == 1);
    // tau^{-1}{1} = {3}, so the orbit walks the cycle backwards.
    CHECK(o.measures[1] == make_rational(1, 4));
    CHECK(o.measures[2] == make_rational(1, 2));
    CHECK(o.measures[3] == 1);
}

TEST_CASE("orbit tracing is truncated when sets outgrow the atom cap") {
    MeasureSpace s = make_finite_space({{AtomId(1), make_rational(1)},
                                        {AtomId(2), make_rational(1)},
                                        {AtomId(3), make_rational(1)}});
    Transformation tau = make_finite_transformation(
        s, {{AtomId(1), AtomId(3)}, {AtomId(2), AtomId(3)}, {AtomId(3), AtomId(3)}});
    SetOrbit o = trace_preimage_orbit(s, tau, MeasurableSet{{AtomId(3)}}, 8, 2);
    REQUIRE(o.truncated_at.has_value());
    CHECK(*o.truncated_at == 1);
    CHECK(o.measures.size() == 1);

    // Without the cap the orbit stabilizes and the recurrence is certified.
    SetOrbit full = trace_preimage_orbit(s, tau, MeasurableSet{{AtomId(3)}}, 8, 0);
    REQUIRE(full.cycle_start.has_value());
    CHECK(*full.cycle_start == 1);
    CHECK(*full.cycle_period == 1);
    CHECK(full.measures[1] == 3);
}

TEST_CASE("orbit tracing validates its inputs") {
    DynamicalSystem sys = make_builtin_system(BuiltinFamily::UnilateralShift, make_rational(1, 2));
    CHECK_THROWS_AS(trace_preimage_orbit(sys.space, sys.tau, MeasurableSet{{AtomId(0)}}, 4),
                    std::invalid_argument);
    CHECK_THROWS_AS(trace_forward_orbit(sys.space, sys.tau, MeasurableSet{{AtomId(3)}}, 0),
                    std::invalid_argument);
}
