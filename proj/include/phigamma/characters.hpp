#pragma once

#include <phigamma/quadratic.hpp>

namespace phigamma {

/* Continuous characters delta: Q_p^* -> L^*, stored through the splitting
 * Q_p^* = p^Z x mu_{p-1} x (1+pZ_p): the value at p, the exponent on the
 * Teichmueller roots, and the value at 1+p.  The value at 1+p must be a
 * 1-unit (p-power-order torsion in delta(1+p) is out of scope); values in a
 * quadratic extension are allowed at p only, so weights stay base-field. */
template <class S = PadicScalar>
class PadicCharacter {
public:
    PadicCharacter(S value_at_p, long torsion_exponent,
                   PadicScalar principal_value)
        : vp_(std::move(value_at_p)), princ_(std::move(principal_value)) {
        p_ = princ_.prime();
        if (prime_of(vp_) != p_)
            throw DomainError("PadicCharacter: prime mismatch");
        if (!vp_.has_known_valuation())
            throw DomainError("PadicCharacter: value at p must be invertible");
        if (!princ_.has_known_valuation() || princ_.valuation() != 0)
            throw DomainError("PadicCharacter: value at 1+p must be a unit");
        PadicScalar z =
            princ_ - PadicScalar::from_integer(p_, 1, princ_.abs_precision());
        if (!z.is_exact_zero() && !z.is_zeroish() && z.valuation() < 1)
            throw DomainError("PadicCharacter: value at 1+p must be a 1-unit");
        j_ = torsion_exponent % (p_ - 1);
        if (j_ < 0) j_ += p_ - 1;
    }

    long prime() const { return p_; }
    const S& value_at_p() const { return vp_; }
    long torsion_exponent() const { return j_; }
    const PadicScalar& principal_value() const { return princ_; }

private:
    long p_ = 0;
    long j_ = 0;
    S vp_;
    PadicScalar princ_;
};

inline PadicScalar one_plus_p_power(long p, long n, int prec) {
    return PadicScalar::from_integer(p, 1 + p, prec + 2).pow(n);
}

// x |-> x^n (n = 1 is the identity character x |-> x)
inline PadicCharacter<> power_character(long p, long n, int prec) {
    PadicScalar vp = PadicScalar::from_integer(p, p, prec + 2).pow(n);
    return {vp, n, one_plus_p_power(p, n, prec)};
}

inline PadicCharacter<> trivial_character(long p, int prec) {
    return power_character(p, 0, prec);
}

// |x|: p |-> 1/p, trivial on units
inline PadicCharacter<> norm_character(long p, int prec) {
    return {PadicScalar::from_integer(p, p, prec + 2).inverse(), 0,
            PadicScalar::from_integer(p, 1, prec)};
}

struct WeightReport {
    PadicScalar s;          // -log delta(1+p) / log(1+p)
    bool is_integer = false;
    long long n = 0;        // the detected integer when is_integer
};

/* The weight is the negative of the derivative at 1.  On the 1-unit line the
 * derivative is log delta(1+p) / log(1+p); the ratio is unchanged under any
 * other topological generator (1+p)^k of the 1-units, since both logarithms
 * scale by k. */
template <class S>
WeightReport weight(const PadicCharacter<S>& delta,
                    const PrecisionPolicy& pol = {}) {
    long p = delta.prime();
    int n = delta.principal_value().abs_precision();
    PadicScalar lp =
        padic_log(PadicScalar::from_integer(p, 1 + p, std::max(n, 4)));
    WeightReport rep{-padic_log(delta.principal_value()) / lp, false, 0};
    IntegerDetection det = detect_integer(rep.s, pol);
    if (det.detected) {
        rep.is_integer = true;
        rep.n = det.n;
    }
    return rep;
}

enum class ExceptionalClass { None, Power, PowerTimesNorm };

struct ExceptionalReport {
    bool exceptional = false;
    ExceptionalClass kind = ExceptionalClass::None;
    long n = 0; // the power: x^n, or x^n|x|
};

namespace detail {

// three-way equality at precision; Ambiguous is surfaced to the caller
template <class S>
ZeroTest eq_test(const S& x, const S& y, const PrecisionPolicy& pol) {
    return zero_test(x - y, pol);
}

} // namespace detail

/* Classification against the two exceptional families x^n and x^n|x|.  All
 * three coordinates must match: integer weight -n, torsion congruent to n,
 * exact 1-unit value (1+p)^n; then the value at p separates the families
 * (p^n against p^{n-1}, because |p| = p^{-1}). */
template <class S>
ExceptionalReport is_exceptional(const PadicCharacter<S>& delta,
                                 const PrecisionPolicy& pol = {}) {
    long p = delta.prime();
    ExceptionalReport rep;
    WeightReport w = weight(delta, pol);
    IntegerDetection det = detect_integer(w.s, pol);
    if (!det.detected) return rep;
    if (!det.certified)
        throw AmbiguousAtPrecision(
            "is_exceptional: weight integrality undecided at this precision");
    long n = static_cast<long>(-det.n);
    long jn = n % (p - 1);
    if (jn < 0) jn += p - 1;
    if (delta.torsion_exponent() != jn) return rep;
    int prec = delta.principal_value().abs_precision();
    ZeroTest pr = detail::eq_test(delta.principal_value(),
                                  one_plus_p_power(p, n, prec), pol);
    if (pr == ZeroTest::Ambiguous)
        throw AmbiguousAtPrecision(
            "is_exceptional: value at 1+p undecided at this precision");
    if (pr == ZeroTest::DefinitelyNonzero) return rep;
    int vprec = detail::prec_of(delta.value_at_p());
    S pn = ScalarTraits<S>::from_integer(p, p, vprec + 2, disc_of(delta.value_at_p()))
               .pow(n);
    ZeroTest as_power = detail::eq_test(delta.value_at_p(), pn, pol);
    S pn1 = ScalarTraits<S>::from_integer(p, p, vprec + 2,
                                          disc_of(delta.value_at_p()))
                .pow(n - 1);
    ZeroTest as_norm = detail::eq_test(delta.value_at_p(), pn1, pol);
    if (as_power == ZeroTest::DefinitelyZero) {
        rep.exceptional = true;
        rep.kind = ExceptionalClass::Power;
        rep.n = n;
        return rep;
    }
    if (as_norm == ZeroTest::DefinitelyZero) {
        rep.exceptional = true;
        rep.kind = ExceptionalClass::PowerTimesNorm;
        rep.n = n;
        return rep;
    }
    if (as_power == ZeroTest::Ambiguous || as_norm == ZeroTest::Ambiguous)
        throw AmbiguousAtPrecision(
            "is_exceptional: value at p undecided at this precision");
    return rep;
}

template <class S>
PadicCharacter<S> char_mul(const PadicCharacter<S>& a,
                           const PadicCharacter<S>& b) {
    if (a.prime() != b.prime()) throw DomainError("char_mul: prime mismatch");
    return {a.value_at_p() * b.value_at_p(),
            a.torsion_exponent() + b.torsion_exponent(),
            a.principal_value() * b.principal_value()};
}

// delta |-> t^{-1} delta, dividing by the identity character; weight goes up
// by exactly 1.
template <class S>
PadicCharacter<S> twist_by_t_inverse(const PadicCharacter<S>& delta) {
    long p = delta.prime();
    int vprec = detail::prec_of(delta.value_at_p());
    S pval = ScalarTraits<S>::from_integer(p, p, vprec + 2,
                                           disc_of(delta.value_at_p()));
    int prec = delta.principal_value().abs_precision();
    return {delta.value_at_p() / pval, delta.torsion_exponent() - 1,
            delta.principal_value() /
                PadicScalar::from_integer(p, 1 + p, prec + 2)};
}

/* x|x| / delta: the duality partner of delta. The top cohomology of the
 * rank-one module attached to delta pairs perfectly with the invariants of
 * the module attached to this character, so h2(delta) = h0(dual). At p the
 * factor x|x| contributes p * 1/p = 1, leaving 1/delta(p); on units the
 * torsion exponent flips around 1 and the principal value divides into
 * 1 + p. */
template <class S>
PadicCharacter<S> dual_character(const PadicCharacter<S>& delta) {
    long p = delta.prime();
    int vprec = detail::prec_of(delta.value_at_p());
    S one = ScalarTraits<S>::from_integer(p, 1, vprec + 2,
                                          disc_of(delta.value_at_p()));
    int prec = delta.principal_value().abs_precision();
    return {one / delta.value_at_p(), 1 - delta.torsion_exponent(),
            PadicScalar::from_integer(p, 1 + p, prec + 2) /
                delta.principal_value()};
}

// Smallest positive integer generating (Z/p^2)^*; it then generates the
// groups (Z/p^k)^* for every k, hence tops a consistent generator tower.
inline long primitive_root_mod_p2(long p) {
    mpz_class mod = mpz_class(p) * p;
    long order = p * (p - 1);
    std::vector<long> qs;
    long rest = order;
    for (long q = 2; q * q <= rest; ++q)
        while (rest % q == 0) {
            if (qs.empty() || qs.back() != q) qs.push_back(q);
            rest /= q;
        }
    if (rest > 1) qs.push_back(rest);
    for (long g = 2; g < p * p; ++g) {
        if (g % p == 0) continue;
        bool primitive = true;
        for (long q : qs) {
            mpz_class r;
            mpz_class base(g), e(order / q);
            mpz_powm(r.get_mpz_t(), base.get_mpz_t(), e.get_mpz_t(),
                     mod.get_mpz_t());
            if (r == 1) {
                primitive = false;
                break;
            }
        }
        if (primitive) return g;
    }
    throw DomainError("primitive_root_mod_p2: none found");
}

/* Evaluation at a unit u via the splitting u = omega(u) <u>:
 * delta(u) = omega(u)^j exp(c log<u>) with c = log delta(1+p) / log(1+p). */
template <class S>
PadicScalar value_at_unit(const PadicCharacter<S>& delta,
                          const PadicScalar& u) {
    long p = delta.prime();
    if (u.prime() != p) throw DomainError("value_at_unit: prime mismatch");
    if (!u.has_known_valuation() || u.valuation() != 0)
        throw DomainError("value_at_unit: argument must be a unit");
    PadicScalar omega = teichmuller(u);
    PadicScalar one_unit = u / omega;
    int n = std::max(u.abs_precision(),
                     delta.principal_value().abs_precision());
    PadicScalar lp = padic_log(PadicScalar::from_integer(p, 1 + p, n + 2));
    PadicScalar c = padic_log(delta.principal_value()) / lp;
    PadicScalar arg = c * padic_log(one_unit);
    return omega.pow(delta.torsion_exponent()) * padic_exp(arg);
}

// Full evaluation at x = p^v u in Q_p^*.
template <class S>
S evaluate(const PadicCharacter<S>& delta, const PadicScalar& x) {
    if (!x.has_known_valuation())
        throw DomainError("evaluate: argument must be invertible");
    long p = delta.prime();
    long v = x.valuation();
    PadicScalar u = x / PadicScalar::from_integer(p, p, x.abs_precision() + 2)
                            .pow(v);
    S unit_part = ScalarTraits<S>::from_base(value_at_unit(delta, u),
                                             disc_of(delta.value_at_p()));
    return delta.value_at_p().pow(v) * unit_part;
}

template <class S>
std::string char_to_text(const PadicCharacter<S>& delta) {
    return delta.value_at_p().to_text() +
           " ; tors=" + std::to_string(delta.torsion_exponent()) +
           " ; princ=" + delta.principal_value().to_text();
}

inline PadicCharacter<> char_from_text(const std::string& s, long p,
                                       int fallback_prec) {
    auto trim = [](std::string t) {
        size_t a = t.find_first_not_of(" \t");
        size_t b = t.find_last_not_of(" \t");
        if (a == std::string::npos) return std::string();
        return t.substr(a, b - a + 1);
    };
    size_t c1 = s.find(';');
    size_t c2 = c1 == std::string::npos ? std::string::npos
                                        : s.find(';', c1 + 1);
    if (c2 == std::string::npos)
        throw ParseError("character record needs three fields: " + s);
    std::string vp = trim(s.substr(0, c1));
    std::string tors = trim(s.substr(c1 + 1, c2 - c1 - 1));
    std::string princ = trim(s.substr(c2 + 1));
    if (tors.rfind("tors=", 0) != 0 || princ.rfind("princ=", 0) != 0)
        throw ParseError("character record needs tors= and princ=: " + s);
    long j = std::stol(tors.substr(5));
    return {padic_from_text(vp, p, fallback_prec), j,
            padic_from_text(princ.substr(6), p, fallback_prec)};
}

} // namespace phigamma
