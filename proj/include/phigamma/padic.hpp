#pragma once

/* Capped-precision arithmetic in Q_p. Every scalar carries its own absolute
 * precision N: the value is known modulo p^N and nothing more. Operations
 * propagate precision honestly (never increasing a claim), and all
 * zero/equality decisions go through a PrecisionPolicy so the guard-digit
 * convention is applied in exactly one place.
 *
 * Representation: a non-zero value is p^v * u with the unit u reduced modulo
 * p^{N-v} and coprime to p. A value whose digits vanish up to its own
 * precision collapses to "zero at precision N" (true valuation >= N,
 * unknown). Exact zero is kept distinct so constants do not poison precision.
 */

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace phigamma {

struct PrecisionPolicy {
    int abs_precision = 30;    // N: scalars known modulo p^N
    int guard_digits = 5;      // g: valuation >= N-g counts as zero in decisions
    long integer_window = 100; // w: |n| <= w for detected rational integers

    int zero_threshold() const { return abs_precision - guard_digits; }

    void validate() const {
        if (!(0 < guard_digits && guard_digits < abs_precision))
            throw std::invalid_argument("PrecisionPolicy: need 0 < g < N");
        if (integer_window < 1)
            throw std::invalid_argument("PrecisionPolicy: need w >= 1");
    }
};

enum class ZeroTest { DefinitelyZero, DefinitelyNonzero, Ambiguous };

// floor(log_p(n)) for n >= 1
inline int ilog_p(long p, long n) {
    int k = 0;
    while (n >= p) { n /= p; ++k; }
    return k;
}

class PadicScalar {
public:
    PadicScalar() = default;

    static PadicScalar from_integer(long p, const mpz_class& n, int abs_prec) {
        check_prime(p);
        check_prec(abs_prec);
        if (n == 0) return exact_zero(p, abs_prec);
        return normalized(p, 0, n, abs_prec);
    }

    static PadicScalar from_integer(long p, long n, int abs_prec) {
        return from_integer(p, mpz_class(n), abs_prec);
    }

    static PadicScalar from_rational(long p, const mpq_class& q, int abs_prec) {
        check_prime(p);
        check_prec(abs_prec);
        if (q == 0) return exact_zero(p, abs_prec);
        mpz_class num = q.get_num(), den = q.get_den();
        long vn = z_valuation(num, p), vd = z_valuation(den, p);
        long v = vn - vd;
        if (v >= abs_prec) return zero_at(p, abs_prec);
        mpz_class un = num / pow_ui(p, vn), ud = den / pow_ui(p, vd);
        mpz_class mod = pow_ui(p, abs_prec - v);
        mpz_class inv;
        mpz_invert(inv.get_mpz_t(), ud.get_mpz_t(), mod.get_mpz_t());
        mpz_class u = (un * inv) % mod;
        if (u < 0) u += mod;
        return make(p, v, u, abs_prec);
    }

    // p^val * unit (unit normalized here if divisible by p).
    static PadicScalar from_unit(long p, long val, const mpz_class& unit,
                                 int abs_prec) {
        check_prime(p);
        check_prec(abs_prec);
        if (unit == 0) return zero_at(p, abs_prec);
        return normalized(p, val, unit, abs_prec);
    }

    // O(p^N): known to vanish modulo p^N, true valuation unknown.
    static PadicScalar zero_at(long p, int abs_prec) {
        check_prime(p);
        check_prec(abs_prec);
        PadicScalar x;
        x.p_ = p;
        x.v_ = abs_prec;
        x.N_ = abs_prec;
        return x;
    }

    static PadicScalar exact_zero(long p, int abs_prec) {
        check_prime(p);
        check_prec(abs_prec);
        PadicScalar x;
        x.p_ = p;
        x.v_ = kInfinity;
        x.N_ = abs_prec;
        return x;
    }

    long prime() const { return p_; }
    int abs_precision() const { return N_; }

    bool is_exact_zero() const { return v_ == kInfinity; }
    bool is_zeroish() const { return u_ == 0; } // exact zero or O(p^N)
    bool has_known_valuation() const { return u_ != 0; }

    long valuation() const {
        if (u_ == 0)
            throw InsufficientPrecision(
                "valuation: value is zero at precision " + std::to_string(N_));
        return v_;
    }

    // Certified lower bound on the valuation (kInfinity for exact zero).
    long valuation_lower_bound() const { return v_; }
    static constexpr long kInfinity = std::numeric_limits<long>::max() / 4;

    const mpz_class& unit_digits() const { return u_; }

    PadicScalar operator-() const {
        if (u_ == 0) return *this;
        PadicScalar r = *this;
        r.u_ = pow_ui(p_, N_ - v_) - u_;
        return r;
    }

    friend PadicScalar operator+(const PadicScalar& x, const PadicScalar& y) {
        check_same_prime(x, y);
        if (x.is_exact_zero()) return y;
        if (y.is_exact_zero()) return x;
        int n = std::min(x.N_, y.N_);
        if (x.is_zeroish() && y.is_zeroish())
            return zero_at(x.p_, n);
        if (x.is_zeroish()) return y.capped(n);
        if (y.is_zeroish()) return x.capped(n);
        long m = std::min(x.v_, y.v_);
        if (m >= n) return zero_at(x.p_, n);
        mpz_class mod = pow_ui(x.p_, n - m);
        mpz_class u = (x.u_ * pow_ui(x.p_, x.v_ - m) +
                       y.u_ * pow_ui(x.p_, y.v_ - m)) % mod;
        return normalized(x.p_, m, u, n);
    }

    friend PadicScalar operator-(const PadicScalar& x, const PadicScalar& y) {
        return x + (-y);
    }

    friend PadicScalar operator*(const PadicScalar& x, const PadicScalar& y) {
        check_same_prime(x, y);
        if (x.is_exact_zero() || y.is_exact_zero())
            return exact_zero(x.p_, std::min(x.N_, y.N_));
        // O(p^a) * p^v u = O(p^{a+v}); O(p^a) * O(p^b) = O(p^{a+b})
        if (x.is_zeroish() || y.is_zeroish())
            return zero_at(x.p_, checked_prec(static_cast<long>(x.v_) + y.v_));
        long v = x.v_ + y.v_;
        int rel = std::min(x.rel_prec(), y.rel_prec());
        mpz_class u = (x.u_ * y.u_) % pow_ui(x.p_, rel);
        return make(x.p_, v, u, checked_prec(v + rel));
    }

    friend PadicScalar operator/(const PadicScalar& x, const PadicScalar& y) {
        check_same_prime(x, y);
        if (!y.has_known_valuation())
            throw DivisionByZeroAtPrecision(
                "division by value indistinguishable from 0: " + y.to_text());
        if (x.is_exact_zero()) return exact_zero(x.p_, x.N_);
        if (x.is_zeroish())
            return zero_at(x.p_, checked_prec(static_cast<long>(x.v_) - y.v_));
        long v = x.v_ - y.v_;
        int rel = std::min(x.rel_prec(), y.rel_prec());
        mpz_class mod = pow_ui(x.p_, rel);
        mpz_class inv;
        mpz_invert(inv.get_mpz_t(), y.u_.get_mpz_t(), mod.get_mpz_t());
        mpz_class u = (x.u_ * inv) % mod;
        return make(x.p_, v, u, checked_prec(v + rel));
    }

    PadicScalar inverse() const { return from_integer(p_, 1, N_) / *this; }

    PadicScalar pow(long e) const {
        if (e < 0) return inverse().pow(-e);
        if (e == 0) return from_integer(p_, 1, N_);
        PadicScalar r;
        PadicScalar b = *this;
        bool first = true;
        for (unsigned long ue = static_cast<unsigned long>(e); ue; ue >>= 1) {
            if (ue & 1) { r = first ? b : r * b; first = false; }
            if (ue > 1) b = b * b;
        }
        return r;
    }

    // Integer representative of the value modulo p^m (needs valuation >= 0).
    mpz_class lift_mod(int m) const {
        if (m <= 0) return 0;
        if (u_ == 0) {
            if (v_ < m)
                throw InsufficientPrecision("lift_mod: precision below modulus");
            return 0;
        }
        if (v_ < 0) throw DomainError("lift_mod: negative valuation");
        if (N_ < m)
            throw InsufficientPrecision("lift_mod: precision below modulus");
        if (v_ >= m) return 0;
        return (u_ * pow_ui(p_, v_)) % pow_ui(p_, m);
    }

    int rel_prec() const { return u_ == 0 ? 0 : N_ - static_cast<int>(v_); }

    // Lower the absolute precision claim (never raises it).
    PadicScalar capped(int n) const {
        check_prec(n);
        if (n >= N_ || is_exact_zero()) {
            PadicScalar r = *this;
            r.N_ = std::min(r.N_, n);
            if (r.is_exact_zero()) r.N_ = n;
            return r;
        }
        if (is_zeroish()) return zero_at(p_, n);
        if (v_ >= n) return zero_at(p_, n);
        return normalized(p_, v_, u_, n);
    }

    std::string to_text() const {
        if (is_exact_zero()) return "0";
        std::string tail =
            "O(" + std::to_string(p_) + "^" + std::to_string(N_) + ")";
        if (is_zeroish()) return tail;
        std::string head;
        if (v_ == 0) head = u_.get_str();
        else head = std::to_string(p_) + "^" + std::to_string(v_) + "*" +
                    u_.get_str();
        return head + "+" + tail;
    }

private:
    long p_ = 0;
    long v_ = 0;      // valuation; == N_ for O(p^N); kInfinity for exact zero
    mpz_class u_ = 0; // unit part, reduced mod p^{N-v}; 0 for zeroish values
    int N_ = 0;       // absolute precision

    static void check_prime(long p) {
        if (p < 3 || p % 2 == 0)
            throw std::invalid_argument("prime must be odd and >= 3");
    }
    static void check_prec(int n) {
        if (n < 1 || n > kMaxPrec)
            throw std::invalid_argument("absolute precision out of range");
    }
    static void check_same_prime(const PadicScalar& x, const PadicScalar& y) {
        if (x.p_ != y.p_ || x.p_ == 0)
            throw std::invalid_argument("operands over different primes");
    }
    static constexpr int kMaxPrec = 1 << 20;
    static int checked_prec(long n) {
        if (n < 1)
            throw PrecisionError("operation lost all certified digits");
        return static_cast<int>(std::min<long>(n, kMaxPrec));
    }

    static PadicScalar make(long p, long v, const mpz_class& u, int n) {
        PadicScalar x;
        x.p_ = p;
        x.v_ = v;
        x.u_ = u;
        x.N_ = n;
        return x;
    }

    // Strip p-powers from u, reduce, collapse to zero-at-precision if empty.
    static PadicScalar normalized(long p, long v, mpz_class u, int n) {
        if (u == 0) return zero_at(p, n);
        long rel = n - v;
        if (rel <= 0) return zero_at(p, n);
        u %= pow_ui(p, rel);
        if (u < 0) u += pow_ui(p, rel);
        if (u == 0) return zero_at(p, n);
        long k = z_valuation(u, p);
        if (k > 0) {
            v += k;
            rel -= k;
            if (rel <= 0) return zero_at(p, n);
            u /= pow_ui(p, k);
        }
        return make(p, v, u, n);
    }
};

inline ZeroTest zero_test(const PadicScalar& x, const PrecisionPolicy& pol) {
    int tau = pol.zero_threshold();
    if (x.is_exact_zero()) return ZeroTest::DefinitelyZero;
    if (x.has_known_valuation())
        return x.valuation() < tau ? ZeroTest::DefinitelyNonzero
                                   : ZeroTest::DefinitelyZero;
    // zero at its own precision: decisive only if that reaches the threshold
    return x.abs_precision() >= tau ? ZeroTest::DefinitelyZero
                                    : ZeroTest::Ambiguous;
}

inline bool definitely_zero(const PadicScalar& x, const PrecisionPolicy& pol) {
    return zero_test(x, pol) == ZeroTest::DefinitelyZero;
}

inline bool definitely_equal(const PadicScalar& x, const PadicScalar& y,
                             const PrecisionPolicy& pol) {
    return definitely_zero(x - y, pol);
}

struct IntegerDetection {
    bool detected = false;  // x agrees with the integer n on the digits it has
    bool certified = false; // the verdict holds through the guard threshold
    long long n = 0;
};

// Recognize x as a rational integer n with |n| <= w; agreement is required
// modulo p^{N-g} (threshold tau). A mismatch on fewer digits already rules an
// integer out for certain; a match on fewer digits is an uncertified guess.
inline IntegerDetection detect_integer(const PadicScalar& x,
                                       const PrecisionPolicy& pol) {
    IntegerDetection out;
    int tau = pol.zero_threshold();
    if (x.is_exact_zero()) {
        out.detected = out.certified = true;
        return out;
    }
    if (x.is_zeroish()) {
        out.detected = true;
        out.n = 0;
        out.certified = x.abs_precision() >= tau;
        return out;
    }
    if (x.valuation() < 0) {
        out.certified = true; // certainly not an integer
        return out;
    }
    int m = std::min(x.abs_precision(), tau);
    mpz_class mod = pow_ui(x.prime(), m);
    mpz_class balanced = x.lift_mod(m);
    if (balanced * 2 > mod) balanced -= mod;
    if (abs(balanced) <= pol.integer_window && balanced.fits_slong_p()) {
        out.detected = true;
        out.n = balanced.get_si();
        out.certified = x.abs_precision() >= tau;
    } else {
        out.certified = true; // mismatch at m digits persists at tau digits
    }
    return out;
}

// Teichmueller representative of a unit: the (p-1)-st root of unity congruent
// to x mod p, computed as the limit of x^{p^k}.
inline PadicScalar teichmuller(const PadicScalar& x) {
    if (!x.has_known_valuation() || x.valuation() != 0)
        throw DomainError("teichmuller: input must be a p-adic unit");
    long p = x.prime();
    int n = x.abs_precision();
    mpz_class mod = pow_ui(p, n);
    mpz_class z = x.lift_mod(n);
    for (int k = 0; k < n; ++k)
        mpz_powm_ui(z.get_mpz_t(), z.get_mpz_t(),
                    static_cast<unsigned long>(p), mod.get_mpz_t());
    return PadicScalar::from_unit(p, 0, z, n);
}

// log on 1-units, as the alternating series in z = x-1. The tail beyond the
// fixed iteration count has valuation k - log_p k >= N, so the precision
// claim of the accumulated sum is honest.
inline PadicScalar padic_log(const PadicScalar& x) {
    long p = x.prime();
    int n = x.abs_precision();
    PadicScalar z = x - PadicScalar::from_integer(p, 1, n);
    if (z.is_exact_zero()) return z;
    if (z.has_known_valuation() && z.valuation() < 1)
        throw DomainError("padic_log: input is not a 1-unit");
    if (z.is_zeroish()) return z;
    long kmax = n + 2L * ilog_p(p, std::max(4, n)) + 4;
    PadicScalar acc = PadicScalar::zero_at(p, n); // tail marker O(p^n)
    PadicScalar zp = z;
    for (long k = 1; k <= kmax; ++k) {
        PadicScalar term =
            zp * PadicScalar::from_rational(
                     p, mpq_class((k % 2) ? 1 : -1, k),
                     n + ilog_p(p, k) + 2);
        acc = acc + term;
        if (k < kmax) zp = zp * z;
    }
    return acc;
}

// exp on values with valuation >= 1 (p odd). Tail terms have valuation
// k - (k-1)/(p-1) >= N within the fixed iteration count.
inline PadicScalar padic_exp(const PadicScalar& x) {
    long p = x.prime();
    if (x.is_exact_zero())
        return PadicScalar::from_integer(p, 1, x.abs_precision());
    if (x.has_known_valuation() && x.valuation() < 1)
        throw DomainError("padic_exp: need valuation >= 1");
    int n = x.abs_precision();
    long kmax = 2L * n + 6;
    PadicScalar acc =
        PadicScalar::from_integer(p, 1, n) + PadicScalar::zero_at(p, n);
    PadicScalar term = PadicScalar::from_integer(p, 1, 2 * n + 10);
    for (long k = 1; k <= kmax; ++k) {
        term = term * x /
               PadicScalar::from_integer(p, k, 2 * n + 10);
        acc = acc + term;
    }
    return acc;
}

// Newton iteration for a simple root of an integral polynomial; coeffs[i] is
// the coefficient of X^i, the seed a residue mod p.
inline PadicScalar hensel_root(const std::vector<PadicScalar>& coeffs,
                               long seed) {
    if (coeffs.size() < 2)
        throw std::invalid_argument("hensel_root: need degree >= 1");
    long p = coeffs.front().prime();
    int n = coeffs.front().abs_precision();
    for (const PadicScalar& a : coeffs) {
        if (a.prime() != p)
            throw std::invalid_argument("hensel_root: mixed primes");
        n = std::min(n, a.abs_precision());
    }
    std::vector<mpz_class> c(coeffs.size());
    for (size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i].is_zeroish()) continue;
        if (coeffs[i].valuation() < 0)
            throw DomainError("hensel_root: polynomial must be integral");
        c[i] = coeffs[i].lift_mod(n);
    }
    auto eval = [](const std::vector<mpz_class>& poly, const mpz_class& z,
                   const mpz_class& m) {
        mpz_class r = 0;
        for (size_t i = poly.size(); i-- > 0;) r = (r * z + poly[i]) % m;
        return r;
    };
    std::vector<mpz_class> d(c.size() - 1);
    for (size_t i = 1; i < c.size(); ++i)
        d[i - 1] = c[i] * static_cast<long>(i);
    mpz_class z = ((seed % p) + p) % p;
    if (eval(c, z, mpz_class(p)) != 0)
        throw NoLift("hensel_root: seed is not a root modulo p");
    if (eval(d, z, mpz_class(p)) == 0)
        throw NoLift("hensel_root: derivative vanishes at seed modulo p");
    int k = 1;
    while (k < n) {
        k = std::min(2 * k, n);
        mpz_class mk = pow_ui(p, k);
        mpz_class fz = eval(c, z, mk), dz = eval(d, z, mk);
        mpz_class inv; // derivative is a unit mod p, hence invertible mod p^k
        mpz_invert(inv.get_mpz_t(), dz.get_mpz_t(), mk.get_mpz_t());
        z = (z - fz * inv) % mk;
        if (z < 0) z += mk;
    }
    return PadicScalar::from_unit(p, 0, z, n);
}

// Root valuations read off the lower convex hull of coefficient valuations;
// each value repeated by the horizontal run of its hull segment.
inline std::vector<mpq_class> newton_slopes(
    const std::vector<PadicScalar>& coeffs) {
    if (coeffs.size() < 2)
        throw std::invalid_argument("newton_slopes: need degree >= 1");
    if (coeffs.front().is_exact_zero() ||
        !coeffs.front().has_known_valuation())
        throw InsufficientPrecision(
            "newton_slopes: constant coefficient not certified non-zero");
    if (coeffs.back().is_exact_zero() || !coeffs.back().has_known_valuation())
        throw InsufficientPrecision(
            "newton_slopes: leading coefficient not certified non-zero");
    struct Pt { long i; long v; };
    std::vector<Pt> known, uncertain; // uncertain: v is only a lower bound
    for (size_t i = 0; i < coeffs.size(); ++i) {
        const PadicScalar& a = coeffs[i];
        if (a.is_exact_zero()) continue;
        if (a.has_known_valuation())
            known.push_back({static_cast<long>(i), a.valuation()});
        else
            uncertain.push_back(
                {static_cast<long>(i), static_cast<long>(a.abs_precision())});
    }
    std::vector<Pt> hull;
    for (const Pt& q : known) {
        while (hull.size() >= 2) {
            const Pt& a = hull[hull.size() - 2];
            const Pt& b = hull.back();
            if (mpq_class(b.v - a.v) * (q.i - a.i) >=
                mpq_class(q.v - a.v) * (b.i - a.i))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(q);
    }
    auto hull_y = [&](long i) -> mpq_class {
        for (size_t k = 0; k + 1 < hull.size(); ++k)
            if (hull[k].i <= i && i <= hull[k + 1].i)
                return mpq_class(hull[k].v) +
                       mpq_class(hull[k + 1].v - hull[k].v) *
                           (i - hull[k].i) / (hull[k + 1].i - hull[k].i);
        return mpq_class(hull.back().v);
    };
    for (const Pt& q : uncertain)
        if (mpq_class(q.v) < hull_y(q.i))
            throw InsufficientPrecision(
                "newton_slopes: undetermined coefficient may lie below the "
                "hull at X^" + std::to_string(q.i));
    std::vector<mpq_class> out;
    for (size_t k = 0; k + 1 < hull.size(); ++k) {
        long run = hull[k + 1].i - hull[k].i;
        mpq_class val = mpq_class(hull[k].v - hull[k + 1].v, run);
        val.canonicalize();
        for (long r = 0; r < run; ++r) out.push_back(val);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Parses the to_text forms: "0", "O(p^N)", "u+O(p^N)", "p^v*u+O(p^N)".
// "0" carries no precision of its own, hence the fallback argument.
inline PadicScalar padic_from_text(const std::string& s, long p,
                                   int fallback_prec) {
    auto fail = [&]() -> ParseError {
        return ParseError("unreadable scalar: " + s);
    };
    if (s == "0") return PadicScalar::exact_zero(p, fallback_prec);
    size_t at = s.find("O(");
    if (at == std::string::npos || s.back() != ')') throw fail();
    std::string tail = s.substr(at + 2, s.size() - at - 3);
    size_t caret = tail.find('^');
    if (caret == std::string::npos) throw fail();
    if (mpz_class(tail.substr(0, caret)) != p)
        throw ParseError("prime mismatch in scalar: " + s);
    int n = 0;
    try {
        n = std::stoi(tail.substr(caret + 1));
    } catch (const std::exception&) {
        throw fail();
    }
    if (at == 0) return PadicScalar::zero_at(p, n);
    if (s[at - 1] != '+') throw fail();
    std::string head = s.substr(0, at - 1);
    long v = 0;
    size_t star = head.find('*');
    std::string digits = head;
    if (star != std::string::npos) {
        size_t hc = head.find('^');
        if (hc == std::string::npos || hc > star) throw fail();
        if (mpz_class(head.substr(0, hc)) != p)
            throw ParseError("prime mismatch in scalar: " + s);
        try {
            v = std::stol(head.substr(hc + 1, star - hc - 1));
        } catch (const std::exception&) {
            throw fail();
        }
        digits = head.substr(star + 1);
    }
    mpz_class u;
    try {
        u = mpz_class(digits);
    } catch (const std::invalid_argument&) {
        throw fail();
    }
    if (u == 0) throw fail();
    return PadicScalar::from_unit(p, v, u, n);
}

} // namespace phigamma
