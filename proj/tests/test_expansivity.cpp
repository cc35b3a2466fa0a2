#include "lorentz/builtin.hpp"
#include "lorentz/expansivity.hpp"

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

TEST_CASE("positive expansivity across the builtin families") {
    SECTION("unilateral shift: the first atom's preimages die, refuting it") {
        DynamicalSystem sys = make_builtin_system(BuiltinFamily::UnilateralShift,
                                                  make_rational(1, 2));
        ExpansivityReport rep = positively_expansive(sys.space, sys.tau, 16, 32);
        CHECK(rep.verdict.refuted());
        REQUIRE(rep.witness.has_value());
        CHECK(*rep.witness == AtomId(1));
        CHECK(rep.atoms[0].preimage.bounded);
    }
    SECTION("bilateral shift with shrinking weights: every preimage doubles") {
        DynamicalSystem sys = make_builtin_system(BuiltinFamily::BilateralShift,
                                                  make_rational(1, 2));
        ExpansivityReport rep = positively_expansive(sys.space, sys.tau, 32, 32);
        CHECK(rep.verdict.confirmed());
        for (const auto& a : rep.atoms) CHECK(a.preimage.unbounded);
    }
    SECTION("valley weights: growth certifies once the window sits inside the horizon") {
        DynamicalSystem sys = make_builtin_system(BuiltinFamily::BilateralValley,
                                                  make_rational(2));
        ExpansivityReport rep = positively_expansive(sys.space, sys.tau, 33, 64);
        CHECK(rep.verdict.confirmed());
        CHECK(rep.atoms.size() == 33);
    }
    SECTION("bilateral shift with growing weights: preimages only shrink") {
        DynamicalSystem sys = make_builtin_system(BuiltinFamily::BilateralShift,
                                                  make_rational(2));
        ExpansivityReport rep = positively_expansive(sys.space, sys.tau, 16, 32);
        CHECK(rep.verdict.refuted());
        REQUIRE(rep.witness.has_value());
        CHECK(*rep.witness == AtomId(0)); // first window atom already decays
    }
}

TEST_CASE("two-sided expansivity uses whichever direction grows") {
    SECTION("growing bilateral shift: preimages shrink but images explode") {
        DynamicalSystem sys = make_builtin_system(BuiltinFamily::BilateralShift,
                                                  make_rational(2));
        ExpansivityReport rep = expansive_invertible(sys.space, sys.tau, 32, 32);
        CHECK(rep.verdict.confirmed());
        CHECK(rep.atoms[0].preimage.bounded);
        REQUIRE(rep.atoms[0].forward.has_value());
        CHECK(rep.atoms[0].forward->unbounded);
    }
    SECTION("non-invertible maps are rejected") {
        DynamicalSystem sys = make_builtin_system(BuiltinFamily::UnilateralShift,
                                                  make_rational(1, 2));
        CHECK_THROWS_AS(expansive_invertible(sys.space, sys.tau, 16, 16),
                        std::invalid_argument);
    }
    SECTION("a rotation recurs in both directions") {
        MeasureSpace s = rotation_space();
        Transformation tau = rotation_map(s);
        ExpansivityReport rep = expansive_invertible(s, tau, 8, 24);
        CHECK(rep.verdict.refuted());
        REQUIRE(rep.witness.has_value());
        CHECK(*rep.witness == AtomId(1));
    }
}

TEST_CASE("uniform positive expansivity tracks the exact minimum ratio sequence") {
    SECTION("bilateral shift with shrinking weights is uniformly expansive") {
        DynamicalSystem sys = make_builtin_system(BuiltinFamily::BilateralShift,
                                                  make_rational(1, 2));
        UniformExpansivityReport rep = uniformly_positively_expansive(sys.space, sys.tau,
                                                                      64, 64);
        CHECK(rep.verdict.confirmed());
        CHECK(rep.min_ratios[10] == make_rational(1024));
        REQUIRE(rep.seq.tail_trend.has_value());
        CHECK(rep.seq.tail_trend->ratio == 2);
    }
    SECTION("valley weights fail uniformly when the window outruns the horizon") {
        DynamicalSystem sys = make_builtin_system(BuiltinFamily::BilateralValley,
                                                  make_rational(2));
        UniformExpansivityReport rep = uniformly_positively_expansive(sys.space, sys.tau,
                                                                      256, 64);
        CHECK(rep.verdict.refuted());
        CHECK(rep.min_ratios[10] == make_rational(1, 1024)); // atom at depth n halves n times
        REQUIRE(rep.witness.has_value());
        CHECK(*rep.witness == AtomId(64));
        REQUIRE(rep.verdict.trend.has_value());
        CHECK(rep.verdict.trend->ratio == make_rational(1, 2));
    }
    SECTION("a dying atom collapses the uniform bound to exact zero") {
        DynamicalSystem sys = make_builtin_system(BuiltinFamily::UnilateralShift,
                                                  make_rational(1, 2));
        UniformExpansivityReport rep = uniformly_positively_expansive(sys.space, sys.tau,
                                                                      16, 16);
        CHECK(rep.verdict.refuted());
        REQUIRE(rep.seq.zero_from.has_value());
        CHECK(*rep.seq.zero_from == 1);
        REQUIRE(rep.witness.has_value());
        CHECK(*rep.witness == AtomId(1));
    }
}

TEST_CASE("two-class split certifies uniform expansivity for invertible maps") {
    SECTION("valley weights split into right and left half-lines") {
        DynamicalSystem sys = make_builtin_system(BuiltinFamily::BilateralValley,
                                                  make_rational(2));
        SplitReport rep = uniformly_expansive_split(sys.space, sys.tau, 33, 64);
        CHECK(rep.verdict.confirmed());
        CHECK(rep.class_b.size() == 17); // atoms 0..16: forward measures grow
        CHECK(rep.class_c.size() == 16); // atoms -16..-1: preimage measures grow
        CHECK(rep.unclassified.empty());
        CHECK(rep.min_b[5] == make_rational(32));
        CHECK(rep.min_c[5] == make_rational(32));
    }
    SECTION("growing bilateral shift puts every atom in the forward class") {
        DynamicalSystem sys = make_builtin_system(BuiltinFamily::BilateralShift,
                                                  make_rational(2));
        SplitReport rep = uniformly_expansive_split(sys.space, sys.tau, 32, 32);
        CHECK(rep.verdict.confirmed());
        CHECK(rep.class_b.size() == 32);
        CHECK(rep.class_c.empty());
        CHECK(rep.min_b[5] == make_rational(32));
    }
    SECTION("shrinking bilateral shift puts every atom in the preimage class") {
        DynamicalSystem sys = make_builtin_system(BuiltinFamily::BilateralShift,
                                                  make_rational(1, 2));
        SplitReport rep = uniformly_expansive_split(sys.space, sys.tau, 32, 32);
        CHECK(rep.verdict.confirmed());
        CHECK(rep.class_b.empty());
        CHECK(rep.class_c.size() == 32);
    }
    SECTION("non-invertible maps are rejected") {
        DynamicalSystem sys = make_builtin_system(BuiltinFamily::UnilateralShift,
                                                  make_rational(1, 2));
        CHECK_THROWS_AS(uniformly_expansive_split(sys.space, sys.tau, 16, 16),
                        std::invalid_argument);
    }
    SECTION("a rotation is refuted: every atom recurs in both directions") {
        MeasureSpace s = rotation_space();
        Transformation tau = rotation_map(s);
        SplitReport rep = uniformly_expansive_split(s, tau, 8, 24);
        CHECK(rep.verdict.refuted());
        REQUIRE(rep.witness.has_value());
        CHECK(*rep.witness == AtomId(1));
        CHECK(rep.unclassified.size() == 3);
    }
}

TEST_CASE("sphere divergence probe follows normalized samples to the threshold") {
    const LorentzIndex idx = make_lorentz_index(make_rational(2), make_rational(2));
    SECTION("on a uniformly expansive shift every sample passes") {
        DynamicalSystem sys = make_builtin_system(BuiltinFamily::BilateralShift,
                                                  make_rational(1, 2));
        std::vector<SimpleFunction> samples{
            make_simple_function({{AtomId(0), make_rational(1)}}),
            make_simple_function({{AtomId(1), make_rational(3)},
                                  {AtomId(-2), make_rational(1)}})};
        DivergenceProbeReport rep = sphere_divergence_probe(sys.space, sys.tau, idx,
                                                            samples, 32);
        CHECK(rep.verdict.confirmed());
        REQUIRE(rep.passages.size() == 2);
        for (const auto& fp : rep.passages) {
            CHECK(fp.passed);
            CHECK(fp.step >= 1);
            CHECK(fp.norm.certainly_geq(Real(1.9)));
        }
        // The single-spike sample's norm doubles every two steps exactly.
        CHECK(rep.passages[0].step == 2);
    }
    SECTION("a dying sample refutes uniform divergence") {
        DynamicalSystem sys = make_builtin_system(BuiltinFamily::UnilateralShift,
                                                  make_rational(1, 2));
        std::vector<SimpleFunction> samples{
            make_simple_function({{AtomId(2), make_rational(5)}})};
        DivergenceProbeReport rep = sphere_divergence_probe(sys.space, sys.tau, idx,
                                                            samples, 16);
        CHECK(rep.verdict.refuted());
        REQUIRE(rep.passages.size() == 1);
        CHECK(rep.passages[0].dies);
        CHECK_FALSE(rep.passages[0].passed);
        CHECK(rep.verdict.witness["witness_sample"] == 0);
    }
    SECTION("at least one sample is required") {
        DynamicalSystem sys = make_builtin_system(BuiltinFamily::BilateralShift,
                                                  make_rational(1, 2));
        CHECK_THROWS_AS(sphere_divergence_probe(sys.space, sys.tau, idx, {}, 16),
                        std::invalid_argument);
    }
}
