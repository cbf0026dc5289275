#include <catch2/catch_amalgamated.hpp>

#include <phigamma/characters.hpp>

#include "oracles.hpp"

using namespace phigamma;

namespace {

const PrecisionPolicy kPol{};

PadicCharacter<> random_character(oracle::Rng& rng, long p, int prec = 30) {
    PadicScalar vp = PadicScalar::from_rational(
        p, mpq_class(rng.pick(1, p - 1) + p * rng.pick(-6, 6)), prec);
    vp = vp * PadicScalar::from_integer(p, p, prec + 4).pow(rng.pick(-2, 2));
    PadicScalar princ =
        PadicScalar::from_integer(p, 1 + p * rng.pick(-40, 40), prec);
    return {vp, rng.pick(0, p - 2), princ};
}

} // namespace

TEST_CASE("weights of the basic characters") {
    long p = 5;
    WeightReport id = weight(power_character(p, 1, 30), kPol);
    CHECK(definitely_equal(id.s, PadicScalar::from_integer(p, -1, 30), kPol));
    REQUIRE(id.is_integer);
    CHECK(id.n == -1);

    for (long n = 1; n <= 4; ++n) {
        WeightReport w = weight(power_character(p, -n, 30), kPol);
        REQUIRE(w.is_integer);
        CHECK(w.n == n);
    }

    WeightReport triv = weight(trivial_character(p, 30), kPol);
    REQUIRE(triv.is_integer);
    CHECK(triv.n == 0);
    CHECK(triv.s.is_zeroish());

    WeightReport nm = weight(norm_character(p, 30), kPol);
    REQUIRE(nm.is_integer);
    CHECK(nm.n == 0);
}

TEST_CASE("weight is additive and generator independent") {
    oracle::Rng rng(0xD001);
    long p = 5;
    for (int trial = 0; trial < 60; ++trial) {
        PadicCharacter<> a = random_character(rng, p);
        PadicCharacter<> b = random_character(rng, p);
        WeightReport wa = weight(a, kPol);
        WeightReport wb = weight(b, kPol);
        WeightReport wab = weight(char_mul(a, b), kPol);
        CHECK(definitely_equal(wab.s, wa.s + wb.s, kPol));
    }
    // recompute against the alternative generator (1+p)^2 of the 1-units:
    // delta((1+p)^2) = principal^2, and the log ratio is unchanged
    PadicCharacter<> d = random_character(rng, p);
    PadicScalar g2 = PadicScalar::from_integer(p, 1 + p, 34).pow(2);
    PadicScalar s2 = -padic_log(d.principal_value() * d.principal_value()) /
                     padic_log(g2);
    CHECK(definitely_equal(weight(d, kPol).s, s2, kPol));
}

TEST_CASE("exceptional classification on the named examples") {
    long p = 5;
    ExceptionalReport cube = is_exceptional(power_character(p, 3, 30), kPol);
    CHECK(cube.exceptional);
    CHECK(cube.kind == ExceptionalClass::Power);
    CHECK(cube.n == 3);

    ExceptionalReport cn =
        is_exceptional(char_mul(power_character(p, 3, 30),
                                norm_character(p, 30)),
                       kPol);
    CHECK(cn.exceptional);
    CHECK(cn.kind == ExceptionalClass::PowerTimesNorm);
    CHECK(cn.n == 3);

    PadicCharacter<> two(PadicScalar::from_integer(p, 2, 30), 0,
                         PadicScalar::from_integer(p, 1, 30));
    ExceptionalReport r2 = is_exceptional(two, kPol);
    CHECK_FALSE(r2.exceptional);
    CHECK(r2.kind == ExceptionalClass::None);

    ExceptionalReport triv = is_exceptional(trivial_character(p, 30), kPol);
    CHECK(triv.exceptional);
    CHECK(triv.kind == ExceptionalClass::Power);
    CHECK(triv.n == 0);

    ExceptionalReport nm = is_exceptional(norm_character(p, 30), kPol);
    CHECK(nm.exceptional);
    CHECK(nm.kind == ExceptionalClass::PowerTimesNorm);
    CHECK(nm.n == 0);

    for (long n = 1; n <= 2; ++n) {
        ExceptionalReport r =
            is_exceptional(power_character(p, -n, 30), kPol);
        CHECK(r.exceptional);
        CHECK(r.kind == ExceptionalClass::Power);
        CHECK(r.n == -n);
    }

    // p * unit at p with trivial unit action: integer weight but wrong value
    PadicCharacter<> pu(PadicScalar::from_integer(p, 10, 30), 0,
                        PadicScalar::from_integer(p, 1, 30));
    CHECK_FALSE(is_exceptional(pu, kPol).exceptional);

    // non-integer weight: principal 1 + p^2 is not on the (1+p)^Z line
    PadicCharacter<> off(PadicScalar::from_integer(p, 1, 30), 0,
                         PadicScalar::from_integer(p, 1 + p * p, 30));
    CHECK_FALSE(is_exceptional(off, kPol).exceptional);

    // starved precision cannot certify integrality
    PadicCharacter<> shallow(PadicScalar::from_integer(p, 1, 3), 0,
                             PadicScalar::from_integer(p, 1 + p, 3));
    CHECK_THROWS_AS(is_exceptional(shallow, kPol), AmbiguousAtPrecision);
}

TEST_CASE("products and the t-inverse twist") {
    long p = 5;
    PadicCharacter<> x2 = power_character(p, 2, 30);
    PadicCharacter<> x3 = power_character(p, 3, 30);
    PadicCharacter<> x5 = char_mul(x2, x3);
    CHECK(definitely_equal(x5.value_at_p(),
                           power_character(p, 5, 30).value_at_p(), kPol));
    CHECK(x5.torsion_exponent() == power_character(p, 5, 30).torsion_exponent());
    CHECK(definitely_equal(x5.principal_value(),
                           power_character(p, 5, 30).principal_value(), kPol));

    PadicCharacter<> tw = twist_by_t_inverse(trivial_character(p, 30));
    PadicCharacter<> xm1 = power_character(p, -1, 30);
    CHECK(definitely_equal(tw.value_at_p(), xm1.value_at_p(), kPol));
    CHECK(tw.torsion_exponent() == xm1.torsion_exponent());
    CHECK(definitely_equal(tw.principal_value(), xm1.principal_value(), kPol));
    WeightReport wt = weight(tw, kPol);
    REQUIRE(wt.is_integer);
    CHECK(wt.n == 1);

    oracle::Rng rng(0xD002);
    for (int trial = 0; trial < 30; ++trial) {
        PadicCharacter<> d = random_character(rng, p);
        PadicCharacter<> td = twist_by_t_inverse(d);
        CHECK(definitely_equal(
            weight(td, kPol).s,
            weight(d, kPol).s + PadicScalar::from_integer(p, 1, 30), kPol));
    }

    // an n-fold twist divides the value at p by p^n
    PadicCharacter<> d = random_character(rng, p);
    PadicCharacter<> t3 = twist_by_t_inverse(
        twist_by_t_inverse(twist_by_t_inverse(d)));
    CHECK(definitely_equal(
        t3.value_at_p() * PadicScalar::from_integer(p, p, 40).pow(3),
        d.value_at_p(), kPol));

    // the exceptional pattern slides: x^{-2} twists to x^{-3}
    ExceptionalReport slid =
        is_exceptional(twist_by_t_inverse(power_character(p, -2, 30)), kPol);
    CHECK(slid.exceptional);
    CHECK(slid.kind == ExceptionalClass::Power);
    CHECK(slid.n == -3);
}

TEST_CASE("the duality partner reflects weights across -1/2") {
    long p = 5;
    // dual of the trivial character is x|x|: value 1 at p, torsion 1
    PadicCharacter<> dt = dual_character(trivial_character(p, 30));
    CHECK(definitely_equal(dt.value_at_p(),
                           PadicScalar::from_integer(p, 1, 30), kPol));
    CHECK(dt.torsion_exponent() == 1);
    CHECK(definitely_equal(dt.principal_value(),
                           PadicScalar::from_integer(p, 1 + p, 30), kPol));
    WeightReport wt = weight(dt, kPol);
    REQUIRE(wt.is_integer);
    CHECK(wt.n == -1);

    oracle::Rng rng(0xD0A1);
    for (int trial = 0; trial < 30; ++trial) {
        PadicCharacter<> d = random_character(rng, p);
        PadicCharacter<> du = dual_character(d);
        // s(dual) + s(delta) = -1, and the pairing is an involution
        CHECK(definitely_equal(
            weight(du, kPol).s + weight(d, kPol).s,
            -PadicScalar::from_integer(p, 1, 30), kPol));
        PadicCharacter<> back = dual_character(du);
        CHECK(definitely_equal(back.value_at_p(), d.value_at_p(), kPol));
        CHECK(back.torsion_exponent() == d.torsion_exponent());
        CHECK(definitely_equal(back.principal_value(), d.principal_value(),
                               kPol));
    }
}

TEST_CASE("construction rejects malformed data") {
    long p = 5;
    // unit at 1+p that is not a 1-unit
    CHECK_THROWS_AS(PadicCharacter<>(PadicScalar::from_integer(p, 1, 30), 0,
                                     PadicScalar::from_integer(p, 2, 30)),
                    DomainError);
    // non-invertible value at p
    CHECK_THROWS_AS(PadicCharacter<>(PadicScalar::zero_at(p, 10), 0,
                                     PadicScalar::from_integer(p, 1, 30)),
                    DomainError);
    // valuation at 1+p
    CHECK_THROWS_AS(PadicCharacter<>(PadicScalar::from_integer(p, 1, 30), 0,
                                     PadicScalar::from_integer(p, p, 30)),
                    DomainError);
    // torsion exponent is normalized mod p-1
    PadicCharacter<> d(PadicScalar::from_integer(p, 1, 30), -3,
                       PadicScalar::from_integer(p, 1, 30));
    CHECK(d.torsion_exponent() == 1);
}

TEST_CASE("evaluation against the splitting of Q_p^*") {
    long p = 5;
    CHECK(primitive_root_mod_p2(5) == 2);
    CHECK(primitive_root_mod_p2(3) == 2);
    CHECK(primitive_root_mod_p2(7) == 3);

    PadicCharacter<> id = power_character(p, 1, 30);
    oracle::Rng rng(0xD003);
    for (int trial = 0; trial < 12; ++trial) {
        long uraw = rng.pick(1, p - 1) + p * rng.pick(-30, 30);
        PadicScalar x =
            PadicScalar::from_integer(p, uraw, 30) *
            PadicScalar::from_integer(p, p, 34).pow(rng.pick(-2, 2));
        CHECK(definitely_equal(evaluate(id, x), x, kPol));
    }

    PadicCharacter<> x3 = power_character(p, 3, 30);
    PadicScalar u = PadicScalar::from_integer(p, 7, 30);
    CHECK(definitely_equal(evaluate(x3, u), u.pow(3), kPol));

    PadicCharacter<> nm = norm_character(p, 30);
    PadicScalar pu = PadicScalar::from_integer(p, 5 * 3, 30);
    CHECK(definitely_equal(
        evaluate(nm, pu),
        PadicScalar::from_integer(p, p, 30).inverse(), kPol));

    PadicScalar g0 = PadicScalar::from_integer(p, primitive_root_mod_p2(p), 30);
    PadicCharacter<> a = random_character(rng, p);
    PadicCharacter<> b = random_character(rng, p);
    CHECK(definitely_equal(value_at_unit(char_mul(a, b), g0),
                           value_at_unit(a, g0) * value_at_unit(b, g0), kPol));
    CHECK(definitely_equal(value_at_unit(trivial_character(p, 30), g0),
                           PadicScalar::from_integer(p, 1, 30), kPol));
    // torsion alone: the Teichmueller lift of g0 to the j-th power
    PadicCharacter<> tors(PadicScalar::from_integer(p, 1, 30), 2,
                          PadicScalar::from_integer(p, 1, 30));
    CHECK(definitely_equal(value_at_unit(tors, g0),
                           teichmuller(g0).pow(2), kPol));
}

TEST_CASE("character text records round-trip") {
    long p = 5;
    oracle::Rng rng(0xD004);
    for (int trial = 0; trial < 10; ++trial) {
        PadicCharacter<> d = random_character(rng, p);
        PadicCharacter<> back = char_from_text(char_to_text(d), p, 30);
        CHECK(back.value_at_p().to_text() == d.value_at_p().to_text());
        CHECK(back.torsion_exponent() == d.torsion_exponent());
        CHECK(back.principal_value().to_text() == d.principal_value().to_text());
    }
    CHECK_THROWS_AS(char_from_text("1+O(5^30) ; tors=1", 5, 30), ParseError);
    CHECK_THROWS_AS(char_from_text("nonsense ; tors=1 ; princ=1+O(5^30)", 5, 30),
                    ParseError);
}

TEST_CASE("characters valued in a quadratic extension") {
    long p = 5, d = 5; // ramified
    QuadraticScalar root(PadicScalar::exact_zero(p, 30),
                         PadicScalar::from_integer(p, 1, 30), d);
    PadicCharacter<QuadraticScalar> delta(
        root, 0, PadicScalar::from_integer(p, 1, 30));
    CHECK(weight(delta, kPol).n == 0);
    CHECK_FALSE(is_exceptional(delta, kPol).exceptional);

    PadicCharacter<QuadraticScalar> sq = char_mul(delta, delta);
    CHECK(zero_test(sq.value_at_p() -
                        QuadraticScalar(PadicScalar::from_integer(p, 5, 30), d),
                    kPol) == ZeroTest::DefinitelyZero);

    PadicCharacter<QuadraticScalar> tw = twist_by_t_inverse(delta);
    CHECK(tw.value_at_p().valuation() == mpq_class(-1, 2));
}
