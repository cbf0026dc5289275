#pragma once

/* Quadratic extensions Q_p(sqrt d) with capped-precision components. The
 * discriminant d is kept in one of the canonical non-square classes r, p, rp
 * (r = least quadratic non-residue mod p), so two values in "the same"
 * extension always share a representation. Valuations are half-integers,
 * computed exactly from the component valuations: the two halves of a norm
 * a^2 - d b^2 can never cancel (residue or parity obstruction).
 */

#include <gmpxx.h>

#include <algorithm>
#include <optional>
#include <string>
#include <variant>

#include "errors.hpp"
#include "padic.hpp"
#include "rational.hpp"

namespace phigamma {

inline bool is_quadratic_residue(long a, long p) {
    a %= p;
    if (a < 0) a += p;
    if (a == 0) throw std::invalid_argument("is_quadratic_residue: 0 mod p");
    mpz_class r;
    mpz_powm_ui(r.get_mpz_t(), mpz_class(a).get_mpz_t(),
                static_cast<unsigned long>((p - 1) / 2),
                mpz_class(p).get_mpz_t());
    return r == 1;
}

inline long least_nonresidue(long p) {
    for (long r = 2; r < p; ++r)
        if (!is_quadratic_residue(r, p)) return r;
    throw std::invalid_argument("least_nonresidue: no non-residue found");
}

class QuadraticScalar {
public:
    QuadraticScalar() = default;

    QuadraticScalar(const PadicScalar& a, const PadicScalar& b, long d)
        : a_(a), b_(b), d_(d) {
        if (a.prime() != b.prime())
            throw std::invalid_argument("QuadraticScalar: mixed primes");
        check_disc(a.prime(), d);
    }

    // base-field embedding; the ambient discriminant still has to be chosen
    QuadraticScalar(const PadicScalar& a, long d)
        : QuadraticScalar(a, PadicScalar::exact_zero(a.prime(),
                                                     a.abs_precision()), d) {}

    long prime() const { return a_.prime(); }
    long disc() const { return d_; }
    const PadicScalar& re() const { return a_; }
    const PadicScalar& im() const { return b_; }
    bool ramified() const { return d_ % prime() == 0; }

    bool is_zeroish() const { return a_.is_zeroish() && b_.is_zeroish(); }
    bool is_exact_zero() const {
        return a_.is_exact_zero() && b_.is_exact_zero();
    }

    bool has_known_valuation() const {
        if (!ramified())
            return a_.has_known_valuation() || b_.has_known_valuation()
                       ? known_min_ok()
                       : false;
        return known_min_ok();
    }

    // Valuation in (1/2)Z, exact: no cancellation is possible between the
    // component contributions (see header note).
    mpq_class valuation() const {
        std::optional<mpq_class> va, vb;
        if (a_.has_known_valuation()) va = mpq_class(a_.valuation());
        if (b_.has_known_valuation()) {
            vb = mpq_class(b_.valuation());
            if (ramified()) *vb += mpq_class(1, 2);
        }
        std::optional<mpq_class> best;
        if (va) best = va;
        if (vb && (!best || *vb < *best)) best = vb;
        if (!best)
            throw InsufficientPrecision(
                "QuadraticScalar::valuation: both components zero at precision");
        // an undetermined component is harmless unless its valuation bound
        // sits strictly below the current minimum
        if (!a_.has_known_valuation() && !a_.is_exact_zero() &&
            mpq_class(a_.abs_precision()) < *best)
            throw InsufficientPrecision(
                "QuadraticScalar::valuation: rational part undetermined");
        if (!b_.has_known_valuation() && !b_.is_exact_zero()) {
            mpq_class bb(b_.abs_precision());
            if (ramified()) bb += mpq_class(1, 2);
            if (bb < *best)
                throw InsufficientPrecision(
                    "QuadraticScalar::valuation: sqrt part undetermined");
        }
        return *best;
    }

    QuadraticScalar conj() const { return QuadraticScalar(a_, -b_, d_); }

    PadicScalar norm() const {
        PadicScalar d = PadicScalar::from_integer(
            prime(), d_, std::max(a_.abs_precision(), b_.abs_precision()));
        return a_ * a_ - d * b_ * b_;
    }

    QuadraticScalar operator-() const {
        return QuadraticScalar(-a_, -b_, d_);
    }

    friend QuadraticScalar operator+(const QuadraticScalar& x,
                                     const QuadraticScalar& y) {
        check_compatible(x, y);
        return QuadraticScalar(x.a_ + y.a_, x.b_ + y.b_, x.d_);
    }
    friend QuadraticScalar operator-(const QuadraticScalar& x,
                                     const QuadraticScalar& y) {
        check_compatible(x, y);
        return QuadraticScalar(x.a_ - y.a_, x.b_ - y.b_, x.d_);
    }
    friend QuadraticScalar operator*(const QuadraticScalar& x,
                                     const QuadraticScalar& y) {
        check_compatible(x, y);
        PadicScalar d = PadicScalar::from_integer(
            x.prime(), x.d_,
            std::max(x.a_.abs_precision(), y.a_.abs_precision()));
        return QuadraticScalar(x.a_ * y.a_ + d * (x.b_ * y.b_),
                               x.a_ * y.b_ + x.b_ * y.a_, x.d_);
    }
    friend QuadraticScalar operator/(const QuadraticScalar& x,
                                     const QuadraticScalar& y) {
        check_compatible(x, y);
        PadicScalar n = y.norm();
        if (!n.has_known_valuation())
            throw DivisionByZeroAtPrecision(
                "quadratic division by value indistinguishable from 0");
        QuadraticScalar t = x * y.conj();
        return QuadraticScalar(t.a_ / n, t.b_ / n, x.d_);
    }

    QuadraticScalar inverse() const {
        PadicScalar one =
            PadicScalar::from_integer(prime(), 1, a_.abs_precision());
        return QuadraticScalar(one, d_) / *this;
    }

    QuadraticScalar pow(long e) const {
        if (e < 0) return inverse().pow(-e);
        QuadraticScalar r;
        QuadraticScalar b = *this;
        bool first = true;
        for (unsigned long ue = static_cast<unsigned long>(e); ue; ue >>= 1) {
            if (ue & 1) { r = first ? b : r * b; first = false; }
            if (ue > 1) b = b * b;
        }
        if (first)
            return QuadraticScalar(
                PadicScalar::from_integer(prime(), 1, a_.abs_precision()), d_);
        return r;
    }

    std::string to_text() const {
        return a_.to_text() + " + (" + b_.to_text() + ")*sqrt(" +
               std::to_string(d_) + ")";
    }

private:
    PadicScalar a_, b_;
    long d_ = 0;

    bool known_min_ok() const {
        try {
            (void)valuation();
            return true;
        } catch (const InsufficientPrecision&) {
            return false;
        }
    }

    static void check_disc(long p, long d) {
        if (d == 0) throw std::invalid_argument("QuadraticScalar: d = 0");
        long v = 0;
        long dd = d;
        while (dd % p == 0) { dd /= p; ++v; }
        if (v > 1)
            throw std::invalid_argument(
                "QuadraticScalar: discriminant must be squarefree at p");
        if (v == 0 && is_quadratic_residue(dd, p))
            throw std::invalid_argument(
                "QuadraticScalar: discriminant is a square in Q_p");
    }
    static void check_compatible(const QuadraticScalar& x,
                                 const QuadraticScalar& y) {
        if (x.prime() != y.prime() || x.d_ != y.d_)
            throw std::invalid_argument(
                "QuadraticScalar: incompatible extensions");
    }
};

inline ZeroTest zero_test(const QuadraticScalar& x,
                          const PrecisionPolicy& pol) {
    ZeroTest za = zero_test(x.re(), pol);
    ZeroTest zb = zero_test(x.im(), pol);
    if (za == ZeroTest::DefinitelyNonzero || zb == ZeroTest::DefinitelyNonzero)
        return ZeroTest::DefinitelyNonzero;
    if (za == ZeroTest::DefinitelyZero && zb == ZeroTest::DefinitelyZero)
        return ZeroTest::DefinitelyZero;
    return ZeroTest::Ambiguous;
}

inline bool definitely_zero(const QuadraticScalar& x,
                            const PrecisionPolicy& pol) {
    return zero_test(x, pol) == ZeroTest::DefinitelyZero;
}

// sqrt of a scalar inside Q_p or a canonical quadratic extension:
// x = d * b^2 with d in {1, r, p, rp}. d = 1 means sqrt(x) = b in Q_p.
struct SqrtDecomposition {
    long d = 1;     // canonical square class
    PadicScalar b;  // sqrt(x/d)
};

inline SqrtDecomposition sqrt_decompose(const PadicScalar& x) {
    if (!x.has_known_valuation())
        throw InsufficientPrecision("sqrt_decompose: valuation undetermined");
    long p = x.prime();
    long v = x.valuation();
    long r = least_nonresidue(p);
    // strip p^v exactly: the unit part at its full relative precision
    PadicScalar u = PadicScalar::from_unit(p, 0, x.unit_digits(), x.rel_prec());
    long u0 = mpz_class(u.lift_mod(1)).get_si();
    bool qr = is_quadratic_residue(u0, p);
    long unit_class = qr ? 1 : r;
    PadicScalar w = qr ? u
                       : u / PadicScalar::from_integer(p, r,
                                                       u.abs_precision() + 2);
    // Hensel square root of the residue-1 unit w
    long seed = 0;
    long w0 = mpz_class(w.lift_mod(1)).get_si();
    for (long s = 1; s < p; ++s)
        if ((s * s) % p == w0) { seed = s; break; }
    std::vector<PadicScalar> poly = {
        -w, PadicScalar::exact_zero(p, w.abs_precision()),
        PadicScalar::from_integer(p, 1, w.abs_precision())};
    PadicScalar root = hensel_root(poly, seed);
    SqrtDecomposition out;
    long vhalf = (v >= 0 ? v : v - 1) / 2; // floor(v/2)
    bool odd = (v % 2 + 2) % 2 == 1;
    out.d = unit_class * (odd ? p : 1);
    PadicScalar shift = PadicScalar::from_rational(
        p, vhalf >= 0 ? mpq_class(pow_ui(p, vhalf))
                      : mpq_class(1, pow_ui(p, -vhalf)),
        root.abs_precision() + static_cast<int>(std::abs(vhalf)) + 2);
    out.b = root * shift;
    return out;
}

// Roots of X^2 - s X + q. Either two PadicScalar roots or a conjugate pair in
// a canonical quadratic extension.
struct QuadraticRoots {
    bool rational = false;
    PadicScalar r1, r2;          // when rational
    QuadraticScalar q1, q2;      // when irrational
};

inline QuadraticRoots solve_quadratic(const PadicScalar& s,
                                      const PadicScalar& q) {
    long p = s.prime();
    int n = std::min(s.abs_precision(), q.abs_precision());
    PadicScalar four = PadicScalar::from_integer(p, 4, n + 4);
    PadicScalar disc = s * s - four * q;
    PadicScalar two = PadicScalar::from_integer(p, 2, n + 4);
    QuadraticRoots out;
    if (disc.is_exact_zero()) {
        out.rational = true;
        out.r1 = out.r2 = s / two;
        return out;
    }
    SqrtDecomposition sd = sqrt_decompose(disc);
    if (sd.d == 1) {
        out.rational = true;
        out.r1 = (s + sd.b) / two;
        out.r2 = (s - sd.b) / two;
        return out;
    }
    PadicScalar half_s = s / two;
    PadicScalar half_b = sd.b / two;
    out.q1 = QuadraticScalar(half_s, half_b, sd.d);
    out.q2 = QuadraticScalar(half_s, -half_b, sd.d);
    return out;
}

/* Uniform scalar access for code templated over PadicScalar/QuadraticScalar:
 * construction from base-field values, valuations as exact rationals, and the
 * policy-driven zero test. */
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<PadicScalar> {
    static constexpr bool is_extension = false;
    static PadicScalar from_base(const PadicScalar& x, long /*d*/ = 0) {
        return x;
    }
    static PadicScalar one(long p, int n, long /*d*/ = 0) {
        return PadicScalar::from_integer(p, 1, n);
    }
    static PadicScalar zero(long p, int n, long /*d*/ = 0) {
        return PadicScalar::exact_zero(p, n);
    }
    static PadicScalar from_integer(long p, const mpz_class& m, int n,
                                    long /*d*/ = 0) {
        return PadicScalar::from_integer(p, m, n);
    }
    static mpq_class valuation(const PadicScalar& x) {
        return mpq_class(x.valuation());
    }
    // Certified lower bound on the valuation; nullopt for an exact zero.
    static std::optional<mpq_class> val_lower_bound(const PadicScalar& x) {
        if (x.is_exact_zero()) return std::nullopt;
        return mpq_class(x.valuation_lower_bound());
    }
};

template <>
struct ScalarTraits<QuadraticScalar> {
    static constexpr bool is_extension = true;
    static QuadraticScalar from_base(const PadicScalar& x, long d) {
        return QuadraticScalar(x, d);
    }
    static QuadraticScalar one(long p, int n, long d) {
        return QuadraticScalar(PadicScalar::from_integer(p, 1, n), d);
    }
    static QuadraticScalar zero(long p, int n, long d) {
        return QuadraticScalar(PadicScalar::exact_zero(p, n), d);
    }
    static QuadraticScalar from_integer(long p, const mpz_class& m, int n,
                                        long d) {
        return QuadraticScalar(PadicScalar::from_integer(p, m, n), d);
    }
    static mpq_class valuation(const QuadraticScalar& x) {
        return x.valuation();
    }
    static std::optional<mpq_class> val_lower_bound(const QuadraticScalar& x) {
        std::optional<mpq_class> best;
        if (!x.re().is_exact_zero()) best = mpq_class(x.re().valuation_lower_bound());
        if (!x.im().is_exact_zero()) {
            mpq_class vb(x.im().valuation_lower_bound());
            if (x.ramified()) vb += mpq_class(1, 2);
            if (!best || vb < *best) best = vb;
        }
        return best;
    }
};

inline long prime_of(const PadicScalar& x) { return x.prime(); }
inline long prime_of(const QuadraticScalar& x) { return x.prime(); }
inline long disc_of(const PadicScalar&) { return 0; }
inline long disc_of(const QuadraticScalar& x) { return x.disc(); }

namespace detail {

inline int prec_of(const PadicScalar& x) { return x.abs_precision(); }
inline int prec_of(const QuadraticScalar& x) {
    return std::max(x.re().abs_precision(), x.im().abs_precision());
}

} // namespace detail

} // namespace phigamma
