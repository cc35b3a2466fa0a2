#include "lorentz/builtin.hpp"
#include "lorentz/measure_space.hpp"
#include "lorentz/rational.hpp"
#include "lorentz/transformation.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace lorentz;

TEST_CASE("rational literals parse exactly") {
    CHECK(rat_from_string("3/4") == make_rational(3, 4));
    CHECK(rat_from_string("-7") == make_rational(-7));
    CHECK(rat_from_string("0.25") == make_rational(1, 4));
    CHECK(rat_from_string("1e-6") == make_rational(1, 1000000));
    CHECK(rat_from_string("1e6") == make_rational(1000000));
    CHECK(rat_from_string("2.5e3") == make_rational(2500));
    CHECK(rat_from_string("-2.5e1") == make_rational(-25));
    CHECK(rat_from_string("-0.125") == make_rational(-1, 8));
    CHECK(rat_to_string(make_rational(6, 4)) == "3/2");
    CHECK(rat_to_string(make_rational(5)) == "5");

    CHECK_THROWS_AS(rat_from_string(""), std::invalid_argument);
    CHECK_THROWS_AS(rat_from_string("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(rat_from_string("x"), std::invalid_argument);
    CHECK_THROWS_AS(rat_from_string("1.2.3"), std::invalid_argument);
}

TEST_CASE("pow_int handles negative exponents and zero") {
    CHECK(pow_int(make_rational(1, 3), 2) == make_rational(1, 9));
    CHECK(pow_int(make_rational(2), -3) == make_rational(1, 8));
    CHECK(pow_int(make_rational(5), 0) == 1);
    CHECK(pow_int(make_rational(0), 4) == 0);
    CHECK_THROWS_AS(pow_int(make_rational(0), -1), std::domain_error);
}

TEST_CASE("atom ids order canonically and round-trip through text") {
    std::vector<AtomId> ints{AtomId(2), AtomId(0), AtomId(-1), AtomId(1), AtomId(-2)};
    std::sort(ints.begin(), ints.end());
    CHECK(ints == std::vector<AtomId>{AtomId(0), AtomId(-1), AtomId(1), AtomId(-2), AtomId(2)});

    CHECK(atom_from_string("-42") == AtomId(-42));
    CHECK(atom_from_string("(3,1)") == AtomId(3, 1));
    CHECK(atom_to_string(AtomId(-5, 0)) == "(-5,0)");
    CHECK(atom_from_string(atom_to_string(AtomId(7))) == AtomId(7));
    CHECK_THROWS_AS(atom_from_string("(1;2)"), std::invalid_argument);
    CHECK_THROWS_AS(atom_from_string("(1,2"), std::invalid_argument);
}

TEST_CASE("finite spaces validate their data") {
    auto sp = make_finite_space({{AtomId(0), make_rational(1, 2)},
                                 {AtomId(1), make_rational(1, 3)},
                                 {AtomId(2), make_rational(1, 6)}});
    CHECK(sp.total_mass().value() == 1);
    CHECK(sp.atom_count().value() == 3);
    CHECK(sp.weight(AtomId(1)) == make_rational(1, 3));
    CHECK_FALSE(sp.contains(AtomId(9)));
    CHECK_THROWS_AS(sp.weight(AtomId(9)), std::invalid_argument);

    CHECK_THROWS_AS(make_finite_space({}), std::invalid_argument);
    CHECK_THROWS_AS(make_finite_space({{AtomId(0), make_rational(1)},
                                       {AtomId(0), make_rational(2)}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_finite_space({{AtomId(0), make_rational(0)}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_finite_space({{AtomId(0), make_rational(-1, 2)}}),
                    std::invalid_argument);
}

TEST_CASE("measure_of sums weights exactly and validates membership") {
    auto sp = make_finite_space({{AtomId(0), make_rational(1, 2)},
                                 {AtomId(1), make_rational(1, 3)}});
    CHECK(measure_of(sp, MeasurableSet({AtomId(0), AtomId(1)})) == make_rational(5, 6));
    CHECK(measure_of(sp, MeasurableSet{}) == 0);
    CHECK_THROWS_AS(measure_of(sp, MeasurableSet({AtomId(7)})), std::invalid_argument);
}

TEST_CASE("two-row builtin matches the published weights") {
    auto [space, tau] = make_builtin_system(BuiltinFamily::TwoRowFiber);
    CHECK(space.weight(AtomId(0, 0)) == 1);
    CHECK(space.weight(AtomId(-2, 0)) == make_rational(1, 9));
    CHECK(space.weight(AtomId(2, 1)) == make_rational(1, 3));
    CHECK(space.weight(AtomId(1, 1)) == 1);
    CHECK(space.weight(AtomId(5, 2)) == make_rational(1, 27));
    CHECK(space.weight(AtomId(5, 5)) == 1);
    CHECK_FALSE(space.contains(AtomId(0, 1)));
    CHECK_FALSE(space.contains(AtomId(3, 4)));
    CHECK_FALSE(space.contains(AtomId(7)));
    CHECK_FALSE(space.total_mass().has_value());

    // enumeration: layers of constant |a+b|, each sorted by (a,b)
    SpaceWindow w = space.window(6);
    CHECK(w.atoms == std::vector<AtomId>{AtomId(0, 0), AtomId(-1, 0), AtomId(1, 0),
                                         AtomId(-2, 0), AtomId(1, 1), AtomId(2, 0)});
    CHECK_FALSE(w.omitted_mass.has_value());

    // forward action and fibers
    CHECK(tau.forward(AtomId(3, 0)) == AtomId(5, 0));
    CHECK(tau.forward(AtomId(4, 2)) == AtomId(4, 1));
    CHECK(tau.forward(AtomId(4, 1)) == AtomId(4, 0));
    CHECK_FALSE(tau.invertible);

    auto pre1 = preimage_n(space, tau, MeasurableSet({AtomId(0, 0)}), 1);
    CHECK(pre1 == MeasurableSet({AtomId(-2, 0)}));
    CHECK(measure_of(space, pre1) == make_rational(1, 9));

    auto pre = preimage_n(space, tau, MeasurableSet({AtomId(1, 0)}), 1);
    CHECK(pre == MeasurableSet({AtomId(-1, 0), AtomId(1, 1)}));
    CHECK(measure_of(space, pre) == make_rational(4, 3));
}

TEST_CASE("two-row left tail contracts by 1/9 per step") {
    auto [space, tau] = make_builtin_system(BuiltinFamily::TwoRowFiber);
    MeasurableSet a({AtomId(0, 0)});
    Rational expect(1);
    for (int n = 1; n <= 6; ++n) {
        a = preimage_n(space, tau, a, 1);
        expect /= 9;
        CHECK(measure_of(space, a) == expect);
        CHECK(a.size() == 1);
    }
    // and in one shot via the n-step form
    auto direct = preimage_n(space, tau, MeasurableSet({AtomId(0, 0)}), 6);
    CHECK(measure_of(space, direct) == pow_int(make_rational(1, 9), 6));
}

TEST_CASE("shift builtins enumerate, weigh and shift correctly") {
    auto uni = make_builtin_system(BuiltinFamily::UnilateralShift, make_rational(1, 2));
    CHECK(uni.space.weight(AtomId(3)) == make_rational(1, 8));
    CHECK_FALSE(uni.space.contains(AtomId(0)));
    CHECK(uni.space.total_mass().value() == 1);
    SpaceWindow w = uni.space.window(10);
    CHECK(w.atoms.front() == AtomId(1));
    CHECK(w.atoms.back() == AtomId(10));
    CHECK(w.omitted_mass.value() == make_rational(1, 1024));

    CHECK(uni.tau.forward(AtomId(4)) == AtomId(5));
    CHECK(uni.tau.fiber(AtomId(1)).empty());
    CHECK_FALSE(uni.tau.invertible);
    // the first atom has an empty fiber, so singletons die after |atom| steps
    auto dead = preimage_n(uni.space, uni.tau, MeasurableSet({AtomId(3)}), 3);
    CHECK(dead.empty());
    auto alive = preimage_n(uni.space, uni.tau, MeasurableSet({AtomId(3)}), 2);
    CHECK(measure_of(uni.space, alive) == make_rational(1, 2));

    auto bil = make_builtin_system(BuiltinFamily::BilateralShift, make_rational(2));
    CHECK(bil.space.weight(AtomId(-3)) == make_rational(1, 8));
    CHECK(bil.tau.invertible);
    CHECK(bil.tau.inverse(AtomId(0)) == AtomId(-1));
    CHECK_FALSE(bil.space.total_mass().has_value());
    SpaceWindow bw = bil.space.window(5);
    CHECK(bw.atoms == std::vector<AtomId>{AtomId(0), AtomId(-1), AtomId(1),
                                          AtomId(-2), AtomId(2)});

    auto val = make_builtin_system(BuiltinFamily::BilateralValley, make_rational(2));
    CHECK(val.space.weight(AtomId(-4)) == 16);
    CHECK(val.space.weight(AtomId(4)) == 16);
    CHECK(val.tau.invertible);

    auto hill = make_builtin_system(BuiltinFamily::BilateralValley, make_rational(1, 2));
    CHECK(hill.space.total_mass().value() == 3);

    CHECK_THROWS_AS(make_builtin_system(BuiltinFamily::BilateralShift, make_rational(1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_builtin_system(BuiltinFamily::BilateralShift, make_rational(-2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_builtin_system(BuiltinFamily::BilateralShift), std::invalid_argument);
    CHECK_THROWS_AS(make_builtin_system(BuiltinFamily::TwoRowFiber, make_rational(2)),
                    std::invalid_argument);
}

TEST_CASE("forward images iterate the map") {
    auto [space, tau] = make_builtin_system(BuiltinFamily::UnilateralShift,
                                            make_rational(1, 2));
    auto img = forward_image_n(space, tau, MeasurableSet({AtomId(5)}), 3);
    CHECK(img == MeasurableSet({AtomId(8)}));
    CHECK(measure_of(space, img) == make_rational(1, 256));
    CHECK(forward_image_n(space, tau, MeasurableSet({AtomId(5)}), 0) ==
          MeasurableSet({AtomId(5)}));
    CHECK_THROWS_AS(forward_image_n(space, tau, MeasurableSet({AtomId(5)}), -1),
                    std::invalid_argument);
}

TEST_CASE("injectivity check finds exact collisions") {
    auto two_row = make_builtin_system(BuiltinFamily::TwoRowFiber);
    Verdict v = check_injective(two_row.space, two_row.tau, 64);
    CHECK(v.status == Status::Refuted);
    // tau(-1,0) = (1,0) = tau(1,1): recorded pair must collide under tau
    AtomId x = atom_from_string(v.witness.at("first").get<std::string>());
    AtomId y = atom_from_string(v.witness.at("second").get<std::string>());
    CHECK(two_row.tau.forward(x) == two_row.tau.forward(y));
    CHECK_FALSE(x == y);

    auto bil = make_builtin_system(BuiltinFamily::BilateralShift, make_rational(1, 2));
    CHECK(check_injective(bil.space, bil.tau, 128).status == Status::Confirmed);
}

TEST_CASE("finite transformations validate totality and detect bijections") {
    auto sp = make_finite_space({{AtomId(0), make_rational(1, 2)},
                                 {AtomId(1), make_rational(1, 3)},
                                 {AtomId(2), make_rational(1, 6)}});
    // a 3-cycle: bijective
    auto rot = make_finite_transformation(sp, {{AtomId(0), AtomId(1)},
                                               {AtomId(1), AtomId(2)},
                                               {AtomId(2), AtomId(0)}});
    CHECK(rot.invertible);
    CHECK(rot.inverse(AtomId(0)) == AtomId(2));
    CHECK(preimage_n(sp, rot, MeasurableSet({AtomId(1)}), 1) == MeasurableSet({AtomId(0)}));

    // a collapse: not invertible, fibers still exact
    auto col = make_finite_transformation(sp, {{AtomId(0), AtomId(1)},
                                               {AtomId(1), AtomId(1)},
                                               {AtomId(2), AtomId(1)}});
    CHECK_FALSE(col.invertible);
    CHECK(preimage_n(sp, col, MeasurableSet({AtomId(1)}), 1) ==
          MeasurableSet({AtomId(0), AtomId(1), AtomId(2)}));
    CHECK(preimage_n(sp, col, MeasurableSet({AtomId(0)}), 1).empty());

    CHECK_THROWS_AS(make_finite_transformation(sp, {{AtomId(0), AtomId(1)}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_finite_transformation(sp, {{AtomId(0), AtomId(1)},
                                                    {AtomId(1), AtomId(2)},
                                                    {AtomId(2), AtomId(9)}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_finite_transformation(sp, {{AtomId(0), AtomId(1)},
                                                    {AtomId(0), AtomId(2)},
                                                    {AtomId(2), AtomId(0)}}),
                    std::invalid_argument);
}
