#include <catch2/catch_amalgamated.hpp>

#include <phigamma/robba.hpp>

#include "oracles.hpp"

using namespace phigamma;

namespace {

const PrecisionPolicy kPol{};
using RE = RobbaElement<PadicScalar>;
using QE = RobbaElement<QuadraticScalar>;

PadicScalar sc(long p, const mpq_class& q, int prec = 30) {
    return PadicScalar::from_rational(p, q, prec);
}

RE t_pow(long p, long k, int prec = 30) {
    return RE::monomial(PadicScalar::from_integer(p, 1, prec), k,
                        k >= 0 ? SubringTag::RPlus : SubringTag::FullRobba);
}

// random exact polynomial on [0, deg] with controlled coefficient valuations
RE random_poly(oracle::Rng& rng, long p, long deg, long vlo = -2, long vhi = 2,
               SubringTag tag = SubringTag::RPlus) {
    std::map<long, PadicScalar> c;
    for (long i = 0; i <= deg; ++i) {
        long n = rng.pick(1, p - 1) + p * rng.pick(-4, 4);
        long e = rng.pick(vlo, vhi);
        mpq_class q(n);
        if (e >= 0) q *= pow_ui(p, static_cast<unsigned long>(e));
        else q /= pow_ui(p, static_cast<unsigned long>(-e));
        c.emplace(i, sc(p, q));
    }
    std::optional<mpq_class> floor;
    if (tag_bounded(tag)) floor = mpq_class(vlo);
    return RE::laurent(p, std::move(c), tag, floor);
}

std::vector<mpq_class> rational_coeffs(oracle::Rng& rng, long deg) {
    std::vector<mpq_class> v(static_cast<size_t>(deg + 1));
    for (auto& q : v) q = rng.pick(-9, 9);
    return v;
}

void check_agree(const RE& f, const RE& g, long lo, long hi,
                 long min_bound = 25) {
    for (long i = lo; i <= hi; ++i) {
        PadicScalar d = f.coeff(i) - g.coeff(i);
        INFO("index " << i << ": " << d.to_text());
        CHECK(d.is_zeroish());
        CHECK(d.valuation_lower_bound() >= min_bound);
    }
}

} // namespace

TEST_CASE("multiplication windows: geometric inverse of 1+T") {
    long p = 5;
    const long K = 12;
    std::map<long, PadicScalar> g;
    for (long n = 0; n <= K; ++n) g.emplace(n, sc(p, (n % 2) ? -1 : 1));
    RE geo = RE::windowed(p, 0, K, std::move(g), SubringTag::RPlus, true,
                          false);
    RE one_plus = RE::laurent(
        p, {{0, sc(p, 1)}, {1, sc(p, 1)}}, SubringTag::EPlus, mpq_class(0));
    RE prod = one_plus * geo;
    REQUIRE(prod.hi() >= K - 1);
    CHECK(prod.lo() == 0);
    CHECK_FALSE(prod.exact_above());
    CHECK(definitely_equal(prod.coeff(0), sc(p, 1), kPol));
    for (long i = 1; i <= K - 1; ++i)
        CHECK(definitely_zero(prod.coeff(i), kPol));
}

TEST_CASE("multiplication of monomials adds degrees") {
    long p = 5;
    RE x = t_pow(p, 3) * t_pow(p, -7);
    CHECK(x.lo() == -4);
    CHECK(x.hi() == -4);
    CHECK(x.exact_below());
    CHECK(x.exact_above());
    CHECK(definitely_equal(x.coeff(-4), sc(p, 1), kPol));
}

TEST_CASE("gauss weight is multiplicative on random exact pairs") {
    oracle::Rng rng(0xC001);
    GaussWeight s{mpq_class(1)};
    for (int trial = 0; trial < 80; ++trial) {
        RE f = random_poly(rng, 5, rng.pick(0, 6));
        RE g = random_poly(rng, 5, rng.pick(0, 6));
        GaussValue wf = gauss_valuation(f, s);
        GaussValue wg = gauss_valuation(g, s);
        GaussValue wfg = gauss_valuation(f * g, s);
        CHECK(wfg.value == wf.value + wg.value);
        CHECK_FALSE(wfg.tail_could_lower);
    }
}

TEST_CASE("gauss weight examples and subadditivity") {
    long p = 5;
    RE f = RE::laurent(p, {{0, sc(p, 5)}, {1, sc(p, 1)}});
    GaussValue v = gauss_valuation(f, GaussWeight{mpq_class(1, 2)});
    CHECK(v.value == mpq_class(1, 2));
    CHECK_FALSE(v.tail_could_lower);

    CHECK(gauss_valuation(t_pow(p, -1), GaussWeight{mpq_class(1)}).value ==
          mpq_class(-1));

    RE q3 = phi_act(t_pow(3, 1));
    CHECK(gauss_valuation(q3, GaussWeight{mpq_class(1)}).value ==
          mpq_class(2));

    oracle::Rng rng(0xC002);
    GaussWeight s{mpq_class(2)};
    for (int trial = 0; trial < 40; ++trial) {
        RE f1 = random_poly(rng, 5, rng.pick(0, 5));
        RE f2 = random_poly(rng, 5, rng.pick(0, 5));
        GaussValue sum = gauss_valuation(f1 + f2, s);
        CHECK(sum.value >=
              std::min(gauss_valuation(f1, s).value,
                       gauss_valuation(f2, s).value));
    }

    CHECK_THROWS_AS(GaussWeight{mpq_class(0)}, DomainError);
    CHECK_THROWS_AS(gauss_valuation(RE::zero_element(5), GaussWeight{mpq_class(1)}),
                    DomainError);
}

TEST_CASE("unknown tails poison the gauss weight flag but not the value") {
    long p = 5;
    RE f = RE::windowed(p, 0, 4, {{0, sc(p, 1)}, {4, sc(p, 25)}},
                        SubringTag::RPlus, true, false);
    GaussValue v = gauss_valuation(f, GaussWeight{mpq_class(1)});
    CHECK(v.value == 0);
    CHECK(v.tail_could_lower); // RPlus carries no coefficient floor
    RE g = RE::windowed(p, 0, 4, {{0, sc(p, 1)}}, SubringTag::EPlus, true,
                        false, mpq_class(0));
    GaussValue w = gauss_valuation(g, GaussWeight{mpq_class(1)});
    CHECK(w.value == 0);
    CHECK_FALSE(w.tail_could_lower); // floor 0 + s*5 cannot undercut 0
}

TEST_CASE("phi on T matches the binomial expansion") {
    RE q = phi_act(t_pow(3, 1));
    CHECK(q.lo() == 1);
    CHECK(q.hi() == 3);
    CHECK(definitely_equal(q.coeff(1), sc(3, 3), kPol));
    CHECK(definitely_equal(q.coeff(2), sc(3, 3), kPol));
    CHECK(definitely_equal(q.coeff(3), sc(3, 1), kPol));
    CHECK(q.exact_below());
    CHECK(q.exact_above());
}

TEST_CASE("phi on T^-1 leads with T^-p and inverts Q") {
    long p = 3;
    RE w = phi_act(t_pow(p, -1), -20L);
    CHECK(w.hi() == -p);
    CHECK(w.lo() == -20);
    CHECK(w.exact_above());
    CHECK_FALSE(w.exact_below());
    CHECK(definitely_equal(w.coeff(-p), sc(p, 1), kPol));
    // the certified tail really is the series inverse of Q = phi(T)
    RE prod = w * phi_act(t_pow(p, 1));
    CHECK(definitely_equal(prod.coeff(0), sc(p, 1), kPol));
    for (long i = prod.lo(); i < 0; ++i)
        CHECK(definitely_zero(prod.coeff(i), kPol));
}

TEST_CASE("phi fixes constants and respects products") {
    long p = 5;
    RE c = RE::monomial(sc(p, mpq_class(7, 3)), 0);
    RE fc = phi_act(c);
    CHECK(definitely_equal(fc.coeff(0), sc(p, mpq_class(7, 3)), kPol));
    CHECK(fc.lo() == 0);
    CHECK(fc.hi() == 0);

    oracle::Rng rng(0xC003);
    for (int trial = 0; trial < 25; ++trial) {
        RE f = random_poly(rng, p, rng.pick(0, 5));
        RE g = random_poly(rng, p, rng.pick(0, 5));
        RE lhs = phi_act(f * g);
        RE rhs = phi_act(f) * phi_act(g);
        check_agree(lhs, rhs, lhs.lo(), lhs.hi());
    }
}

TEST_CASE("phi window bookkeeping on truncated input") {
    long p = 5;
    RE f = RE::windowed(p, 0, 6, {{0, sc(p, 2)}, {6, sc(p, 1)}},
                        SubringTag::RPlus, true, false);
    RE ff = phi_act(f);
    CHECK(ff.lo() == 0);
    CHECK(ff.hi() == 6); // unknown tail caps the certified degrees
    CHECK_FALSE(ff.exact_above());

    RE neg = RE::windowed(p, -2, 3, {{-2, sc(p, 1)}, {3, sc(p, 1)}},
                          SubringTag::FullRobba, true, false);
    CHECK_THROWS_AS(phi_act(neg), WindowOverflow);

    RE pole = RE::windowed(p, -2, -1, {{-1, sc(p, 1)}}, SubringTag::FullRobba,
                           false, true);
    CHECK_THROWS_AS(phi_act(pole, -40L), WindowOverflow);
    CHECK_NOTHROW(phi_act(pole, -p * 2L));
}

TEST_CASE("phi preserves subring tags and floors") {
    long p = 5;
    RE f = RE::laurent(p, {{0, sc(p, 5)}, {2, sc(p, 3)}}, SubringTag::EPlus,
                       mpq_class(0));
    RE ff = phi_act(f);
    CHECK(ff.subring_tag() == SubringTag::EPlus);
    REQUIRE(ff.val_floor());
    CHECK(*ff.val_floor() == 0);

    RE g = RE::laurent(p, {{-1, sc(p, 1)}, {1, sc(p, 1)}}, SubringTag::EDagger,
                       mpq_class(0));
    RE fg = phi_act(g, -15L);
    CHECK(fg.subring_tag() == SubringTag::EDagger);
    REQUIRE(fg.val_floor());
    CHECK(*fg.val_floor() == 0);
}

TEST_CASE("gamma with integer exponents") {
    long p = 5;
    RE t = t_pow(p, 1);
    RE id = gamma_act(t, 1L);
    CHECK(definitely_equal(id.coeff(1), sc(p, 1), kPol));
    CHECK(id.hi() == 1);

    RE two = gamma_act(t, 2L);
    CHECK(two.hi() == 2);
    CHECK(definitely_equal(two.coeff(1), sc(p, 2), kPol));
    CHECK(definitely_equal(two.coeff(2), sc(p, 1), kPol));

    oracle::Rng rng(0xC004);
    for (int trial = 0; trial < 20; ++trial) {
        RE f = random_poly(rng, p, rng.pick(0, 4));
        RE g = random_poly(rng, p, rng.pick(0, 4));
        RE lhs = gamma_act(f * g, 3L);
        RE rhs = gamma_act(f, 3L) * gamma_act(g, 3L);
        check_agree(lhs, rhs, lhs.lo(), lhs.hi());
        // composition gamma_2 . gamma_3 = gamma_6
        RE comp = gamma_act(gamma_act(f, 3L), 2L);
        RE direct = gamma_act(f, 6L);
        check_agree(comp, direct, comp.lo(), comp.hi());
    }

    CHECK_THROWS_AS(gamma_act(t, 0L), DomainError);
    CHECK_THROWS_AS(gamma_act(t, p), DomainError);
    CHECK_THROWS_AS(gamma_act(t_pow(p, -1), 2L), DomainError);
}

TEST_CASE("gamma with Z_p exponents certifies its integer approximation") {
    long p = 5;
    PadicScalar a = PadicScalar::from_rational(p, mpq_class(1, 2), 40);
    oracle::Rng rng(0xC005);
    RE f = random_poly(rng, p, 6);
    RE g = gamma_act(f, a, kPol);
    CHECK(g.lo() == f.lo());
    CHECK(g.hi() == f.hi());
    CHECK_FALSE(g.exact_above());

    // gamma_a(T) has linear coefficient exactly a
    RE t = t_pow(p, 1, 40);
    PadicScalar one_plus_p = PadicScalar::from_integer(p, 1 + p, 45);
    RE gt = gamma_act(t, one_plus_p, kPol, 8L);
    PadicScalar diff = gt.coeff(1) - PadicScalar::from_integer(p, 1 + p, 30);
    CHECK(diff.is_zeroish());
    CHECK(diff.valuation_lower_bound() >= 30);

    // composition against an independent product of exponents
    PadicScalar b = PadicScalar::from_rational(p, mpq_class(7, 3), 45);
    RE lhs = gamma_act(gamma_act(f, a, kPol), b, kPol);
    RE rhs = gamma_act(f, a * b, kPol);
    check_agree(lhs, rhs, lhs.lo(), std::min(lhs.hi(), rhs.hi()));

    PadicScalar shallow = PadicScalar::from_rational(p, mpq_class(1, 2), 5);
    CHECK_THROWS_AS(gamma_act(f, shallow, kPol), ApproximationNotConverged);
    PadicScalar nonunit = PadicScalar::from_integer(p, p, 40);
    CHECK_THROWS_AS(gamma_act(f, nonunit, kPol), DomainError);
}

TEST_CASE("gamma on exact Laurent data preserves pole orders") {
    long p = 5;
    RE f = RE::laurent(p, {{-2, sc(p, 3)}, {-1, sc(p, 1)}, {1, sc(p, 2)}},
                       SubringTag::EDagger, mpq_class(0));
    RE g = gamma_act_laurent(f, 2L, 6L);
    CHECK(g.lo() == -2);
    CHECK(g.hi() == 6);
    CHECK(g.exact_below());
    CHECK_FALSE(g.exact_above());
    // gamma_2(T)^{-1} * gamma_2(T) = 1 certifies the inverse series
    RE gt = gamma_act_laurent(t_pow(p, -1), 2L, 8L);
    RE prod = gt * gamma_act(t_pow(p, 1), 2L);
    CHECK(definitely_equal(prod.coeff(0), sc(p, 1), kPol));
    for (long i = 1; i <= prod.hi(); ++i)
        CHECK(definitely_zero(prod.coeff(i), kPol));
    // and gamma respects multiplication across the polar split
    RE h = RE::laurent(p, {{-1, sc(p, 1)}, {0, sc(p, 2)}});
    RE lhs = gamma_act_laurent(f * h, 2L, 4L);
    RE rhs = gamma_act_laurent(f, 2L, 8L) * gamma_act_laurent(h, 2L, 8L);
    check_agree(lhs, rhs, lhs.lo(), std::min(lhs.hi(), rhs.hi()));
}

TEST_CASE("psi inverts phi and satisfies the projection formula") {
    long p = 5;
    oracle::Rng rng(0xC006);
    for (int trial = 0; trial < 30; ++trial) {
        RE f = random_poly(rng, p, rng.pick(0, 6));
        RE back = psi_act(phi_act(f));
        check_agree(back, f, 0, f.hi());

        RE g = random_poly(rng, p, rng.pick(0, 6));
        RE lhs = psi_act(phi_act(f) * g);
        RE rhs = f * psi_act(g);
        check_agree(lhs, rhs, lhs.lo(), std::min(lhs.hi(), rhs.hi()));
    }
    CHECK_THROWS_AS(
        psi_act(RE::windowed(p, 0, 3, {{0, sc(p, 1)}}, SubringTag::RPlus,
                             true, false)),
        DomainError);
}

TEST_CASE("psi on binomial powers matches the averaging oracle") {
    long p = 3;
    std::map<long, PadicScalar> six =
        detail::one_plus_T_pow<PadicScalar>(p, 0, 6, 6, 30);
    RE f6 = RE::laurent(p, std::move(six), SubringTag::RPlus);
    RE p6 = psi_act(f6);
    // psi((1+T)^6) = (1+T)^2
    CHECK(p6.hi() == 2);
    CHECK(definitely_equal(p6.coeff(0), sc(p, 1), kPol));
    CHECK(definitely_equal(p6.coeff(1), sc(p, 2), kPol));
    CHECK(definitely_equal(p6.coeff(2), sc(p, 1), kPol));

    std::map<long, PadicScalar> two =
        detail::one_plus_T_pow<PadicScalar>(p, 0, 2, 2, 30);
    RE p2 = psi_act(RE::laurent(p, std::move(two), SubringTag::RPlus));
    for (long i = 0; i <= p2.hi(); ++i)
        CHECK(definitely_zero(p2.coeff(i), kPol));

    for (long prime : {3L, 5L}) {
        long K = prime == 3 ? 9 : 10;
        std::vector<std::vector<mpq_class>> Psi =
            oracle::psi_matrix_q(prime, K);
        oracle::Rng rng(0xC007 + prime);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<mpq_class> xs = rational_coeffs(rng, K);
            std::map<long, PadicScalar> c;
            for (long i = 0; i <= K; ++i) c.emplace(i, sc(prime, xs[i]));
            RE mine = psi_act(RE::laurent(prime, std::move(c), SubringTag::RPlus));
            for (long j = 0; j <= mine.hi(); ++j) {
                mpq_class want = 0;
                for (long i = 0; i <= K; ++i) want += Psi[j][i] * xs[i];
                CHECK(definitely_equal(mine.coeff(j), sc(prime, want), kPol));
            }
        }
    }
}

TEST_CASE("psi extends to Laurent polynomials") {
    long p = 5;
    // psi(T^-m) has polar coefficient p^{m-1} at T^-m
    for (long m = 1; m <= 4; ++m) {
        RE pm = psi_act_laurent(t_pow(p, -m));
        CHECK(pm.lo() == -m);
        CHECK(definitely_equal(pm.coeff(-m),
                               sc(p, mpq_class(pow_ui(p, m - 1))), kPol));
    }
    // psi . phi = id holds through the polar sector
    oracle::Rng rng(0xC008);
    for (int trial = 0; trial < 10; ++trial) {
        std::map<long, PadicScalar> c;
        for (long i = -3; i <= 3; ++i)
            c.emplace(i, sc(p, rng.pick(-9, 9)));
        RE f = RE::laurent(p, std::move(c));
        RE ff = phi_act(f, -3 * p - (p - 1) * 8L);
        RE g = random_poly(rng, p, 3);
        RE fg_prod = ff * g;
        // phi(f) is only certified down to a finite depth. The dropped tail
        // only feeds output degrees far below rhs.lo(), so treating the
        // certified window as exact is faithful on the compared range.
        std::map<long, PadicScalar> cert(fg_prod.coeffs().begin(),
                                         fg_prod.coeffs().end());
        RE lhs = psi_act_laurent(RE::laurent(p, std::move(cert)));
        RE rhs = f * psi_act(g);
        check_agree(lhs, rhs, rhs.lo(), std::min(lhs.hi(), rhs.hi()), 20);
    }
}

TEST_CASE("psi zero basis spans and is annihilated") {
    CHECK_THROWS_AS(psi_zero_basis(3, 2, 30), DomainError);
    std::vector<RE> b4 = psi_zero_basis(3, 4, 30);
    REQUIRE(b4.size() == 3); // n = 1, 2, 4
    CHECK(b4[0].hi() == 1);
    CHECK(b4[1].hi() == 2);
    CHECK(b4[2].hi() == 4); // (1+T) phi(1+T) = (1+T)^4
    RE prod = RE::laurent(3, {{0, sc(3, 1)}, {1, sc(3, 1)}},
                          SubringTag::RPlus) *
              phi_act(RE::laurent(3, {{0, sc(3, 1)}, {1, sc(3, 1)}},
                                  SubringTag::RPlus));
    check_agree(b4[2], prod, 0, 4);
    for (const RE& e : b4) {
        RE pe = psi_act(e);
        for (long i = 0; i <= pe.hi(); ++i)
            CHECK(definitely_zero(pe.coeff(i), kPol));
    }
    // counting: dimension of the psi = 0 subspace in degrees <= 6 at p = 3
    std::vector<RE> b6 = psi_zero_basis(3, 6, 30);
    std::vector<std::vector<mpq_class>> Psi = oracle::psi_matrix_q(3, 6);
    CHECK(b6.size() == static_cast<size_t>(oracle::kernel_q(Psi).size()));
}

TEST_CASE("log(1+T) is a phi and gamma eigenvector") {
    long p = 5;
    const long K = 20;
    RE t = log_one_plus_T(p, K, 30);
    CHECK(definitely_equal(t.coeff(1), sc(p, 1), kPol));
    CHECK(t.subring_tag() == SubringTag::RPlus);

    RE pt = sc(p, p) * t;
    RE ft = phi_act(t);
    check_agree(ft, pt, 1, K, 20);

    PadicScalar a = PadicScalar::from_integer(p, 1 + p, 45);
    RE gt = gamma_act(t, a, kPol);
    RE at = PadicScalar::from_integer(p, 1 + p, 30) * t;
    check_agree(gt, at, 1, std::min(gt.hi(), at.hi()), 20);
}

TEST_CASE("window algebra surfaces impossible requests") {
    long p = 5;
    RE trunc = RE::windowed(p, 0, 3, {{0, sc(p, 1)}, {3, sc(p, 2)}},
                            SubringTag::RPlus, true, false);
    RE tail = RE::windowed(p, -5, -2, {{-2, sc(p, 1)}}, SubringTag::FullRobba,
                           false, true);
    CHECK_THROWS_AS(trunc * tail, EmptyWindow);
    CHECK_NOTHROW(tail * tail); // exact-above pair: mirror formula applies
    RE sq = tail * tail;
    CHECK(sq.hi() == -4);
    CHECK(sq.lo() == -7); // max(lo_f + hi_g, lo_g + hi_f)
    CHECK_THROWS_AS(RE::windowed(p, 2, 1, {}, SubringTag::RPlus, true, true),
                    EmptyWindow);
}

TEST_CASE("shift and restrict adjust tags honestly") {
    long p = 5;
    RE f = RE::laurent(p, {{0, sc(p, 1)}, {2, sc(p, 5)}}, SubringTag::EPlus,
                       mpq_class(0));
    RE down = f.shifted(-1);
    CHECK(down.subring_tag() == SubringTag::EDagger);
    REQUIRE(down.val_floor());
    RE up = f.shifted(3);
    CHECK(up.subring_tag() == SubringTag::EPlus);

    RE g = RE::laurent(p, {{0, sc(p, 1)}, {4, sc(p, 2)}}, SubringTag::RPlus);
    RE cut = g.restricted(2, 4);
    CHECK(cut.subring_tag() == SubringTag::FullRobba); // lost the lower margin
    CHECK_FALSE(cut.exact_below());
    CHECK(cut.exact_above());
    RE keep = g.restricted(0, 2);
    CHECK(keep.subring_tag() == SubringTag::RPlus);
    CHECK_FALSE(keep.exact_above());
}

TEST_CASE("text records round-trip") {
    long p = 5;
    RE f = RE::windowed(p, -3, 4,
                        {{-3, sc(p, mpq_class(2, 25))},
                         {0, PadicScalar::zero_at(p, 12)},
                         {4, sc(p, -7)}},
                        SubringTag::EDagger, false, true, mpq_class(-2));
    std::string rec = robba_to_text(f);
    RE back = robba_from_text(rec);
    CHECK(robba_to_text(back) == rec);
    CHECK(back.lo() == f.lo());
    CHECK(back.hi() == f.hi());
    CHECK(back.subring_tag() == f.subring_tag());
    CHECK(back.exact_below() == f.exact_below());
    CHECK(back.exact_above() == f.exact_above());
    REQUIRE(back.val_floor());
    CHECK(*back.val_floor() == mpq_class(-2));
    CHECK_THROWS_AS(robba_from_text("R{p=5;lo=0}"), ParseError);
    CHECK_THROWS_AS(robba_from_text("garbage"), ParseError);
}

TEST_CASE("quadratic scalar coefficients flow through the actions") {
    long p = 5, d = 10;
    auto qs = [&](long a, long b) {
        return QuadraticScalar(PadicScalar::from_integer(p, a, 30),
                               PadicScalar::from_integer(p, b, 30), d);
    };
    QE f = QE::laurent(p, {{0, qs(1, 2)}, {1, qs(0, 1)}, {2, qs(3, 0)}},
                       SubringTag::RPlus, std::nullopt, d);
    QE g = QE::laurent(p, {{0, qs(2, -1)}, {1, qs(1, 1)}},
                       SubringTag::RPlus, std::nullopt, d);
    QE lhs = phi_act(f * g);
    QE rhs = phi_act(f) * phi_act(g);
    for (long i = lhs.lo(); i <= lhs.hi(); ++i)
        CHECK(zero_test(lhs.coeff(i) - rhs.coeff(i), kPol) ==
              ZeroTest::DefinitelyZero);
    QE back = psi_act(phi_act(f));
    for (long i = 0; i <= f.hi(); ++i)
        CHECK(zero_test(back.coeff(i) - f.coeff(i), kPol) ==
              ZeroTest::DefinitelyZero);
    QE gam = gamma_act(f, 2L);
    CHECK(gam.hi() == 4);
    CHECK(gam.disc() == d);
}
