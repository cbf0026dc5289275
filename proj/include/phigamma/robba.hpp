#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <phigamma/quadratic.hpp>

namespace phigamma {

/* Truncated Laurent-series model of the Robba ring.
 *
 * An element stores certified coefficients on a window [lo, hi].  Indices
 * below lo are exactly zero when exact_below is set, unknown otherwise;
 * symmetrically for indices above hi and exact_above.  Every operation
 * computes the sub-window on which its output is fully determined by the
 * determined parts of the inputs, so a reported coefficient is always a
 * faithful (precision-capped) value of the infinite object. */

enum class SubringTag { EPlus, EDagger, RPlus, FullRobba };

inline const char* tag_name(SubringTag t) {
    switch (t) {
        case SubringTag::EPlus: return "EPlus";
        case SubringTag::EDagger: return "EDagger";
        case SubringTag::RPlus: return "RPlus";
        case SubringTag::FullRobba: return "FullRobba";
    }
    return "?";
}

inline SubringTag tag_from_name(const std::string& s) {
    if (s == "EPlus") return SubringTag::EPlus;
    if (s == "EDagger") return SubringTag::EDagger;
    if (s == "RPlus") return SubringTag::RPlus;
    if (s == "FullRobba") return SubringTag::FullRobba;
    throw ParseError("unknown subring tag: " + s);
}

// bounded coefficients (a valuation floor exists, tail included)
inline bool tag_bounded(SubringTag t) {
    return t == SubringTag::EPlus || t == SubringTag::EDagger;
}
// no negative indices
inline bool tag_nonneg(SubringTag t) {
    return t == SubringTag::EPlus || t == SubringTag::RPlus;
}

// Smallest common superring in EPlus < {RPlus, EDagger} < FullRobba.
inline SubringTag tag_meet(SubringTag a, SubringTag b) {
    if (a == b) return a;
    if (a == SubringTag::EPlus) return b;
    if (b == SubringTag::EPlus) return a;
    return SubringTag::FullRobba;
}

// Additive radius parameter: |T| = p^{-s}, so w_s(f) = min_i (v_p(a_i) + s*i).
struct GaussWeight {
    mpq_class s;
    explicit GaussWeight(mpq_class s_) : s(std::move(s_)) {
        if (s <= 0) throw DomainError("GaussWeight: radius parameter s <= 0");
    }
};

struct GaussValue {
    mpq_class value;
    bool tail_could_lower; // truncated tail might hide a smaller term
};

// Window index bookkeeping saturates at +-kIdxInf ("no bound this side").
inline constexpr long kIdxInf = 1L << 40;

inline long idx_add(long a, long b) {
    if (a >= kIdxInf || b >= kIdxInf) return kIdxInf;
    if (a <= -kIdxInf || b <= -kIdxInf) return -kIdxInf;
    return a + b;
}

namespace detail {

template <class S>
void add_into(std::map<long, S>& m, long i, const S& x) {
    if (x.is_exact_zero()) return;
    auto it = m.find(i);
    if (it == m.end()) m.emplace(i, x);
    else it->second = it->second + x;
}

template <class S>
std::map<long, S> raw_mul(const std::map<long, S>& a,
                          const std::map<long, S>& b, long lo_cap,
                          long hi_cap) {
    std::map<long, S> out;
    for (const auto& [j, x] : a)
        for (const auto& [k, y] : b) {
            long i = j + k;
            if (i < lo_cap || i > hi_cap) continue;
            add_into(out, i, x * y);
        }
    return out;
}

// (1+T)^e mod T^{cap+1}, e >= 0, by repeated squaring; exact coefficients.
template <class S>
std::map<long, S> one_plus_T_pow(long p, long d, const mpz_class& e, long cap,
                                 int prec) {
    std::map<long, S> acc{{0, ScalarTraits<S>::one(p, prec, d)}};
    if (e == 0 || cap < 0) return acc;
    std::map<long, S> base = acc;
    add_into(base, 1, ScalarTraits<S>::one(p, prec, d));
    size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
    for (size_t k = bits; k-- > 0;) {
        acc = raw_mul(acc, acc, 0, cap);
        if (mpz_tstbit(e.get_mpz_t(), k)) acc = raw_mul(acc, base, 0, cap);
    }
    return acc;
}

} // namespace detail

template <class S>
class RobbaElement {
public:
    using Scalar = S;

    static RobbaElement windowed(long p, long lo, long hi, std::map<long, S> c,
                                 SubringTag tag, bool exact_below,
                                 bool exact_above,
                                 std::optional<mpq_class> floor = std::nullopt,
                                 long d = 0) {
        if (p < 2) throw DomainError("RobbaElement: bad prime");
        if (lo > hi) throw EmptyWindow("RobbaElement: window [" +
                                       std::to_string(lo) + ", " +
                                       std::to_string(hi) + "]");
        RobbaElement f;
        f.p_ = p;
        f.d_ = d;
        f.tag_ = tag;
        f.exact_below_ = exact_below;
        f.exact_above_ = exact_above;
        f.prec_hint_ = 0;
        for (auto it = c.begin(); it != c.end();) {
            if (it->first < lo || it->first > hi)
                throw DomainError("RobbaElement: coefficient outside window");
            if (prime_of(it->second) != p)
                throw DomainError("RobbaElement: prime mismatch");
            long dc = disc_of(it->second);
            if (dc != 0 && d != 0 && dc != d)
                throw DomainError("RobbaElement: field mismatch");
            if (dc != 0) f.d_ = dc;
            if (it->second.is_exact_zero()) it = c.erase(it);
            else {
                f.prec_hint_ =
                    std::max(f.prec_hint_, detail::prec_of(it->second));
                ++it;
            }
        }
        if (f.prec_hint_ == 0) f.prec_hint_ = 30;
        // tighten the window against exactly-known zero margins
        if (c.empty()) {
            if (exact_below && exact_above) lo = hi = 0;
            else if (exact_below) lo = hi;
            else if (exact_above) hi = lo;
        } else {
            if (exact_below) lo = c.begin()->first;
            if (exact_above) hi = c.rbegin()->first;
        }
        f.lo_ = lo;
        f.hi_ = hi;
        f.c_ = std::move(c);
        if (tag_nonneg(tag)) {
            if (lo < 0)
                throw DomainError("RobbaElement: negative index under " +
                                  std::string(tag_name(tag)));
            if (!exact_below)
                throw DomainError(
                    "RobbaElement: nonnegative subring needs an exact lower "
                    "margin");
        }
        if (tag_bounded(tag)) {
            if (!floor)
                throw DomainError("RobbaElement: bounded subring without a "
                                  "valuation floor");
            for (const auto& [i, x] : f.c_) {
                auto b = ScalarTraits<S>::val_lower_bound(x);
                if (b && *b < *floor)
                    throw DomainError(
                        "RobbaElement: coefficient below declared floor at "
                        "T^" + std::to_string(i));
            }
            f.floor_ = std::move(floor);
        }
        return f;
    }

    // Exact Laurent polynomial: zero outside the hull of the support.
    static RobbaElement laurent(long p, std::map<long, S> c,
                                SubringTag tag = SubringTag::FullRobba,
                                std::optional<mpq_class> floor = std::nullopt,
                                long d = 0) {
        long lo = 0, hi = 0;
        if (!c.empty()) {
            lo = c.begin()->first;
            hi = c.rbegin()->first;
        }
        return windowed(p, lo, hi, std::move(c), tag, true, true,
                        std::move(floor), d);
    }

    static RobbaElement monomial(const S& coeff, long deg,
                                 SubringTag tag = SubringTag::FullRobba,
                                 std::optional<mpq_class> floor = std::nullopt) {
        return laurent(prime_of(coeff), {{deg, coeff}}, tag, std::move(floor),
                       disc_of(coeff));
    }

    static RobbaElement zero_element(long p, long d = 0) {
        return windowed(p, 0, 0, {}, SubringTag::EPlus, true, true,
                        mpq_class(0), d);
    }

    long prime() const { return p_; }
    long disc() const { return d_; }
    long lo() const { return lo_; }
    long hi() const { return hi_; }
    SubringTag subring_tag() const { return tag_; }
    bool exact_below() const { return exact_below_; }
    bool exact_above() const { return exact_above_; }
    const std::optional<mpq_class>& val_floor() const { return floor_; }
    const std::map<long, S>& coeffs() const { return c_; }
    int prec_hint() const { return prec_hint_; }
    bool known_zero() const {
        return c_.empty() && exact_below_ && exact_above_;
    }

    bool is_determined(long i) const {
        if (i < lo_) return exact_below_;
        if (i > hi_) return exact_above_;
        return true;
    }

    S coeff(long i) const {
        if (!is_determined(i))
            throw DomainError("RobbaElement: coefficient of T^" +
                              std::to_string(i) + " not determined");
        auto it = c_.find(i);
        if (it != c_.end()) return it->second;
        return ScalarTraits<S>::zero(p_, prec_hint_, d_);
    }

    // lowest / highest possibly-nonzero index
    long supp_lo() const { return exact_below_ ? lo_ : -kIdxInf; }
    long supp_hi() const { return exact_above_ ? hi_ : kIdxInf; }
    // bounds of the contiguous determined region
    long det_lo() const { return exact_below_ ? -kIdxInf : lo_; }
    long det_hi() const { return exact_above_ ? kIdxInf : hi_; }

    RobbaElement operator-() const {
        RobbaElement r = *this;
        for (auto& [i, x] : r.c_) x = -x;
        return r;
    }

    friend RobbaElement operator+(const RobbaElement& f, const RobbaElement& g) {
        check_compat(f, g);
        long lo = std::max(std::max(f.det_lo(), g.det_lo()),
                           std::min(f.supp_lo(), g.supp_lo()));
        long hi = std::min(std::min(f.det_hi(), g.det_hi()),
                           std::max(f.supp_hi(), g.supp_hi()));
        if (lo > hi)
            throw EmptyWindow("robba add: determined windows do not meet");
        std::map<long, S> out;
        for (const auto& [i, x] : f.c_)
            if (i >= lo && i <= hi) detail::add_into(out, i, x);
        for (const auto& [i, x] : g.c_)
            if (i >= lo && i <= hi) detail::add_into(out, i, x);
        SubringTag tag = tag_meet(f.tag_, g.tag_);
        std::optional<mpq_class> floor;
        if (tag_bounded(tag)) floor = mpq_class(std::min(*f.floor_, *g.floor_));
        return windowed(f.p_, lo, hi, std::move(out), tag,
                        f.exact_below_ && g.exact_below_,
                        f.exact_above_ && g.exact_above_, std::move(floor),
                        pick_disc(f, g));
    }

    friend RobbaElement operator-(const RobbaElement& f, const RobbaElement& g) {
        return f + (-g);
    }

    friend RobbaElement operator*(const RobbaElement& f, const RobbaElement& g) {
        check_compat(f, g);
        if (f.known_zero() || g.known_zero())
            return zero_element(f.p_, pick_disc(f, g));
        long hi = idx_add(f.supp_hi(), g.supp_hi());
        long lo = idx_add(f.supp_lo(), g.supp_lo());
        if (!f.exact_above_) hi = std::min(hi, idx_add(f.hi_, g.supp_lo()));
        if (!g.exact_above_) hi = std::min(hi, idx_add(g.hi_, f.supp_lo()));
        if (!f.exact_below_) lo = std::max(lo, idx_add(f.lo_, g.supp_hi()));
        if (!g.exact_below_) lo = std::max(lo, idx_add(g.lo_, f.supp_hi()));
        if (lo > hi || lo <= -kIdxInf || hi >= kIdxInf)
            throw EmptyWindow("robba_mul: no fully determined coefficient");
        std::map<long, S> out = detail::raw_mul(f.c_, g.c_, lo, hi);
        SubringTag tag = tag_meet(f.tag_, g.tag_);
        std::optional<mpq_class> floor;
        if (tag_bounded(tag)) floor = mpq_class(*f.floor_ + *g.floor_);
        return windowed(f.p_, lo, hi, std::move(out), tag,
                        f.exact_below_ && g.exact_below_,
                        f.exact_above_ && g.exact_above_, std::move(floor),
                        pick_disc(f, g));
    }

    friend RobbaElement operator*(const S& s, const RobbaElement& f) {
        if (s.is_exact_zero())
            return zero_element(f.p_, f.d_ ? f.d_ : disc_of(s));
        RobbaElement r = f;
        for (auto& [i, x] : r.c_) x = x * s;
        r.prec_hint_ = 0;
        for (auto& [i, x] : r.c_) {
            (void)i;
            r.prec_hint_ = std::max(r.prec_hint_, detail::prec_of(x));
        }
        if (r.prec_hint_ == 0) r.prec_hint_ = f.prec_hint_;
        if (r.floor_) {
            auto b = ScalarTraits<S>::val_lower_bound(s);
            *r.floor_ += b ? *b : mpq_class(0);
        }
        return r;
    }

    friend RobbaElement operator*(const RobbaElement& f, const S& s) {
        return s * f;
    }

    // Multiplication by T^k (exact reindexing).
    RobbaElement shifted(long k) const {
        RobbaElement r = *this;
        std::map<long, S> moved;
        for (auto& [i, x] : r.c_) moved.emplace(i + k, std::move(x));
        r.c_ = std::move(moved);
        r.lo_ += k;
        r.hi_ += k;
        if (r.lo_ < 0 && tag_nonneg(r.tag_))
            r.tag_ = r.tag_ == SubringTag::EPlus ? SubringTag::EDagger
                                                 : SubringTag::FullRobba;
        if (!tag_bounded(r.tag_)) r.floor_.reset();
        return r;
    }

    // Forget everything outside [lo2, hi2].
    RobbaElement restricted(long lo2, long hi2) const {
        long nl = std::max(lo_, lo2);
        long nh = std::min(hi_, hi2);
        if (nl > nh) throw EmptyWindow("restricted: empty window");
        std::map<long, S> kept;
        for (const auto& [i, x] : c_)
            if (i >= nl && i <= nh) kept.emplace(i, x);
        bool eb = exact_below_ && lo2 <= lo_;
        bool ea = exact_above_ && hi2 >= hi_;
        SubringTag tag = tag_;
        if (tag_nonneg(tag) && !eb)
            tag = tag == SubringTag::EPlus ? SubringTag::EDagger
                                           : SubringTag::FullRobba;
        std::optional<mpq_class> floor;
        if (tag_bounded(tag)) floor = floor_;
        return windowed(p_, nl, nh, std::move(kept), tag, eb, ea,
                        std::move(floor), d_);
    }

private:
    static void check_compat(const RobbaElement& f, const RobbaElement& g) {
        if (f.p_ != g.p_) throw DomainError("robba: prime mismatch");
        if (f.d_ != 0 && g.d_ != 0 && f.d_ != g.d_)
            throw DomainError("robba: field mismatch");
    }
    static long pick_disc(const RobbaElement& f, const RobbaElement& g) {
        return f.d_ ? f.d_ : g.d_;
    }

    long p_ = 0;
    long d_ = 0;
    long lo_ = 0, hi_ = 0;
    bool exact_below_ = true, exact_above_ = true;
    SubringTag tag_ = SubringTag::FullRobba;
    std::optional<mpq_class> floor_;
    std::map<long, S> c_;
    int prec_hint_ = 30;
};

template <class S>
RobbaElement<S> robba_mul(const RobbaElement<S>& f, const RobbaElement<S>& g) {
    return f * g;
}

template <class S>
GaussValue gauss_valuation(const RobbaElement<S>& f, const GaussWeight& w) {
    std::optional<mpq_class> best;
    for (const auto& [i, x] : f.coeffs()) {
        auto b = ScalarTraits<S>::val_lower_bound(x);
        if (!b) continue;
        mpq_class val = *b + w.s * i;
        if (!best || val < *best) best = val;
    }
    if (!best) {
        if (f.known_zero())
            throw DomainError("gauss_valuation: zero element");
        throw DomainError(
            "gauss_valuation: no determined nonzero coefficient");
    }
    bool could_lower = !f.exact_below();
    if (!f.exact_above()) {
        if (f.val_floor()) {
            mpq_class tail = *f.val_floor() + w.s * (f.hi() + 1);
            if (tail < *best) could_lower = true;
        } else {
            could_lower = true;
        }
    }
    return {*best, could_lower};
}

/* Frobenius substitution T -> (1+T)^p - 1 =: Q.
 *
 * Nonnegative indices expand through Horner in Q.  A negative index -m
 * contributes Q^{-m} = T^{-pm} (1+u)^{-m} with u = sum_{j<p} C(p,j) T^{j-p};
 * its coefficients are exact integers, each a finite sum, but the expansion
 * has an unbounded lower tail, so the output is certified down to `depth`
 * only (default p*lo).  Inputs whose upper tail is unknown must have a
 * nonnegative window: below zero such a tail contaminates every index. */
template <class S>
RobbaElement<S> phi_act(const RobbaElement<S>& f,
                        std::optional<long> depth = std::nullopt) {
    using RE = RobbaElement<S>;
    long p = f.prime(), d = f.disc();
    if (!f.exact_above() && f.lo() < 0)
        throw WindowOverflow(
            "phi_act: negative window with an unknown upper tail");
    if (f.known_zero()) return RE::zero_element(p, d);
    int prec = f.prec_hint() + 64;
    long hi_out = f.exact_above() ? p * f.hi() : f.hi();
    long lo_out;
    if (f.exact_below() && f.lo() >= 0) {
        lo_out = f.lo();
        if (depth) throw DomainError("phi_act: depth with no lower tail");
    } else {
        lo_out = depth.value_or(p * f.lo());
        if (!f.exact_below() && lo_out < p * f.lo() - p + 1)
            throw WindowOverflow(
                "phi_act: depth not certified by the input window");
    }
    if (lo_out > hi_out)
        throw WindowOverflow("phi_act: requested depth above window top");

    std::map<long, S> q = detail::one_plus_T_pow<S>(p, d, p, p, prec);
    q.erase(0); // constant term is exactly 1; erasing subtracts it exactly
    std::map<long, S> out;

    if (f.hi() >= 0) {
        std::map<long, S> acc;
        for (long i = f.hi(); i >= 0; --i) {
            acc = detail::raw_mul(acc, q, 0, hi_out);
            auto it = f.coeffs().find(i);
            if (it != f.coeffs().end()) detail::add_into(acc, 0, it->second);
        }
        for (auto& [i, x] : acc)
            if (i >= lo_out) detail::add_into(out, i, x);
    }

    // u = Q/T^p - 1, window [1-p, -1], integer coefficients with v_p >= 1
    std::map<long, S> u;
    for (long j = 1; j < p; ++j) {
        mpz_class b;
        mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(p),
                     static_cast<unsigned long>(j));
        u.emplace(j - p, ScalarTraits<S>::from_integer(p, b, prec, d));
    }
    for (const auto& [idx, a] : f.coeffs()) {
        if (idx >= 0) continue;
        long m = -idx;
        long kdeg = -p * m - lo_out;
        if (kdeg < 0) continue; // Q^{-m} lives entirely below the window
        std::map<long, S> w{{0, ScalarTraits<S>::one(p, prec, d)}};
        std::map<long, S> upow = w;
        for (long k = 1; k <= kdeg; ++k) {
            upow = detail::raw_mul(upow, u, lo_out + p * m, 0);
            mpz_class b;
            mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(m + k - 1),
                         static_cast<unsigned long>(k));
            if (k % 2) b = -b;
            S bs = ScalarTraits<S>::from_integer(p, b, prec, d);
            for (const auto& [j, y] : upow) detail::add_into(w, j, bs * y);
        }
        for (const auto& [j, y] : w) {
            long i = j - p * m;
            if (i >= lo_out && i <= hi_out) detail::add_into(out, i, a * y);
        }
    }

    bool eb = f.exact_below() && f.lo() >= 0;
    return RE::windowed(p, lo_out, hi_out, std::move(out), f.subring_tag(), eb,
                        f.exact_above(), f.val_floor(), d);
}

// gamma on a nonnegative window, exact integer exponent a >= 1, p coprime a.
template <class S>
RobbaElement<S> gamma_act(const RobbaElement<S>& f, long a) {
    using RE = RobbaElement<S>;
    long p = f.prime(), d = f.disc();
    if (!tag_nonneg(f.subring_tag()))
        throw DomainError("gamma_act: input not tagged RPlus/EPlus");
    if (a < 1 || a % p == 0)
        throw DomainError("gamma_act: exponent must be a positive unit");
    if (f.known_zero()) return RE::zero_element(p, d);
    int prec = f.prec_hint() + 64;
    long hi_out = f.exact_above() ? a * f.hi() : f.hi();
    if (a == 1) return f;
    std::map<long, S> g =
        detail::one_plus_T_pow<S>(p, d, mpz_class(a), hi_out, prec);
    g.erase(0);
    std::map<long, S> acc;
    for (long i = f.hi(); i >= 0; --i) {
        acc = detail::raw_mul(acc, g, 0, hi_out);
        auto it = f.coeffs().find(i);
        if (it != f.coeffs().end()) detail::add_into(acc, 0, it->second);
    }
    return RE::windowed(p, f.lo(), hi_out, std::move(acc), f.subring_tag(),
                        true, f.exact_above(), f.val_floor(), d);
}

/* gamma with exponent a in Z_p^*: computed as the exact action of the
 * integer a mod p^m, with m large enough that the discarded factor
 * (1+T)^{p^m u} - 1 sits below every coefficient's precision on the output
 * window (v_p C(p^m u, j) >= m - v_p(j)).  The output upper margin is never
 * exact: the true image is an infinite series. */
template <class S>
RobbaElement<S> gamma_act(const RobbaElement<S>& f, const PadicScalar& a,
                          const PrecisionPolicy& pol,
                          std::optional<long> hi_req = std::nullopt) {
    using RE = RobbaElement<S>;
    long p = f.prime(), d = f.disc();
    if (!tag_nonneg(f.subring_tag()))
        throw DomainError("gamma_act: input not tagged RPlus/EPlus");
    if (a.prime() != p) throw DomainError("gamma_act: prime mismatch");
    if (!a.has_known_valuation() || a.valuation() != 0)
        throw DomainError("gamma_act: exponent must be a unit");
    if (f.known_zero()) return RE::zero_element(p, d);
    long hi_out = hi_req.value_or(f.hi());
    if (!f.exact_above()) hi_out = std::min(hi_out, f.hi());
    if (hi_out < f.lo())
        throw WindowOverflow("gamma_act: window top below input support");
    // certified integer exponents act exactly
    IntegerDetection det = detect_integer(a, pol);
    if (det.detected && det.certified && det.n >= 1) {
        RE g = gamma_act(f, static_cast<long>(det.n));
        return g.hi() > hi_out ? g.restricted(g.lo(), hi_out) : g;
    }
    int target = std::max(f.prec_hint(), pol.abs_precision);
    long vneg = 0;
    for (const auto& [i, x] : f.coeffs()) {
        (void)i;
        auto b = ScalarTraits<S>::val_lower_bound(x);
        if (b && *b < 0) vneg = std::max(vneg, -q_floor(*b).get_si());
    }
    int m = target + static_cast<int>(vneg) + ilog_p(p, hi_out + 1) + 3;
    if (a.abs_precision() < m)
        throw ApproximationNotConverged(
            "gamma_act: exponent known mod p^" +
            std::to_string(a.abs_precision()) + ", certification needs p^" +
            std::to_string(m));
    mpz_class am = a.lift_mod(m);
    int prec = f.prec_hint() + 64;
    std::map<long, S> g = detail::one_plus_T_pow<S>(p, d, am, hi_out, prec);
    g.erase(0);
    std::map<long, S> acc;
    for (long i = f.hi(); i >= 0; --i) {
        acc = detail::raw_mul(acc, g, 0, hi_out);
        auto it = f.coeffs().find(i);
        if (it != f.coeffs().end()) detail::add_into(acc, 0, it->second);
    }
    return RE::windowed(p, f.lo(), hi_out, std::move(acc), f.subring_tag(),
                        true, false, f.val_floor(), d);
}

/* gamma with integer exponent on an exact Laurent polynomial.  Pole orders
 * are preserved: gamma_a(T^{-m}) = T^{-m} h^{-m} with h = ((1+T)^a - 1)/T a
 * unit power series, so the output is exact below but truncated above. */
template <class S>
RobbaElement<S> gamma_act_laurent(const RobbaElement<S>& f, long a,
                                  std::optional<long> hi_req = std::nullopt) {
    using RE = RobbaElement<S>;
    long p = f.prime(), d = f.disc();
    if (!(f.exact_below() && f.exact_above()))
        throw DomainError("gamma_act_laurent: input not an exact polynomial");
    if (a < 1 || a % p == 0)
        throw DomainError("gamma_act_laurent: exponent must be a positive unit");
    if (f.known_zero()) return RE::zero_element(p, d);
    if (f.lo() >= 0) {
        RE g = gamma_act(f, a);
        if (hi_req && *hi_req < g.hi()) return g.restricted(g.lo(), *hi_req);
        return g;
    }
    int prec = f.prec_hint() + 64;
    long hi_out = hi_req.value_or(a * std::max(f.hi(), 0L));
    long deep = -f.lo();
    long cap = hi_out + deep; // h^{-m} needed through degree hi_out + m
    // h = ((1+T)^a - 1)/T, h(0) = a
    std::map<long, S> g =
        detail::one_plus_T_pow<S>(p, d, mpz_class(a), cap + 1, prec);
    g.erase(0);
    std::map<long, S> h;
    for (const auto& [i, x] : g) h.emplace(i - 1, x);
    // series inversion against the unit constant term
    S h0 = h.at(0);
    std::map<long, S> hinv{{0, ScalarTraits<S>::one(p, prec, d) / h0}};
    for (long n = 1; n <= cap; ++n) {
        S s = ScalarTraits<S>::zero(p, prec, d);
        for (const auto& [i, x] : h) {
            if (i < 1 || i > n) continue;
            auto it = hinv.find(n - i);
            if (it != hinv.end()) s = s + x * it->second;
        }
        if (!s.is_exact_zero()) hinv.emplace(n, -s / h0);
    }
    std::map<long, S> out;
    if (f.hi() >= 0) {
        std::map<long, S> pos;
        for (const auto& [i, x] : f.coeffs())
            if (i >= 0) pos.emplace(i, x);
        std::map<long, S> acc;
        for (long i = f.hi(); i >= 0; --i) {
            acc = detail::raw_mul(acc, g, 0, hi_out);
            auto it = pos.find(i);
            if (it != pos.end()) detail::add_into(acc, 0, it->second);
        }
        out = std::move(acc);
    }
    std::map<long, S> hpow{{0, ScalarTraits<S>::one(p, prec, d)}};
    long cur = 0;
    for (auto it = f.coeffs().rbegin(); it != f.coeffs().rend(); ++it) {
        const auto& [idx, coeff] = *it;
        if (idx >= 0) continue;
        long m = -idx;
        while (cur < m) {
            hpow = detail::raw_mul(hpow, hinv, 0, cap);
            ++cur;
        }
        for (const auto& [j, y] : hpow) {
            long i = j - m;
            if (i <= hi_out) detail::add_into(out, i, coeff * y);
        }
    }
    return RE::windowed(p, f.lo(), hi_out, std::move(out), f.subring_tag(),
                        true, false, f.val_floor(), d);
}

/* psi: the left inverse of phi, psi((1+T)^n) = (1+T)^{n/p} when p | n and 0
 * otherwise.  Exact on polynomials via the binomial basis change. */
template <class S>
RobbaElement<S> psi_act(const RobbaElement<S>& f) {
    using RE = RobbaElement<S>;
    long p = f.prime(), d = f.disc();
    if (!tag_nonneg(f.subring_tag()) || !f.exact_above())
        throw DomainError("psi_act: input not a polynomial in T");
    if (f.known_zero()) return RE::zero_element(p, d);
    int prec = f.prec_hint() + 64;
    long K = f.hi();
    // b_n = sum_i (-1)^{i-n} C(i,n) a_i  gives f = sum b_n (1+T)^n
    std::map<long, S> b;
    for (const auto& [i, x] : f.coeffs()) {
        for (long n = 0; n <= i; ++n) {
            mpz_class c;
            mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(i),
                         static_cast<unsigned long>(n));
            if ((i - n) % 2) c = -c;
            detail::add_into(b, n,
                             x * ScalarTraits<S>::from_integer(p, c, prec, d));
        }
    }
    std::map<long, S> out;
    for (const auto& [n, y] : b) {
        if (n % p) continue;
        long q = n / p;
        for (long j = 0; j <= q; ++j) {
            mpz_class c;
            mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(q),
                         static_cast<unsigned long>(j));
            detail::add_into(out, j,
                             y * ScalarTraits<S>::from_integer(p, c, prec, d));
        }
    }
    return RE::windowed(p, 0, std::max(K / p, 0L), std::move(out),
                        f.subring_tag(), true, true, f.val_floor(), d);
}

// psi on an exact Laurent polynomial: psi(T^{-m}) = T^{-m} psi((Q/T)^m).
template <class S>
RobbaElement<S> psi_act_laurent(const RobbaElement<S>& f) {
    using RE = RobbaElement<S>;
    long p = f.prime(), d = f.disc();
    if (!(f.exact_below() && f.exact_above()))
        throw DomainError("psi_act_laurent: input not an exact polynomial");
    if (f.known_zero()) return RE::zero_element(p, d);
    if (f.lo() >= 0) return psi_act(f);
    int prec = f.prec_hint() + 64;
    std::map<long, S> pos;
    for (const auto& [i, x] : f.coeffs())
        if (i >= 0) pos.emplace(i, x);
    RE total = RE::zero_element(p, d);
    if (!pos.empty())
        total = psi_act(RE::laurent(p, std::move(pos), SubringTag::RPlus,
                                    std::nullopt, d));
    // (Q/T): degrees [0, p-1], constant term p
    std::map<long, S> qt;
    for (long j = 1; j <= p; ++j) {
        mpz_class c;
        mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(p),
                     static_cast<unsigned long>(j));
        qt.emplace(j - 1, ScalarTraits<S>::from_integer(p, c, prec, d));
    }
    std::map<long, S> qtpow{{0, ScalarTraits<S>::one(p, prec, d)}};
    long cur = 0;
    for (auto it = f.coeffs().rbegin(); it != f.coeffs().rend(); ++it) {
        const auto& [idx, coeff] = *it;
        if (idx >= 0) continue;
        long m = -idx;
        while (cur < m) {
            qtpow = detail::raw_mul(qtpow, qt, 0, kIdxInf - 1);
            ++cur;
        }
        RE piece = psi_act(RE::laurent(p, qtpow, SubringTag::RPlus,
                                       std::nullopt, d));
        total = total + (coeff * piece.shifted(-m));
    }
    return total;
}

/* Spanning set of the psi = 0 polynomials of degree <= D: the (1+T)^n with
 * 1 <= n <= D and p not dividing n (independent by distinct degrees; the
 * count D - floor(D/p) matches the kernel dimension). */
inline std::vector<RobbaElement<PadicScalar>> psi_zero_basis(long p, long D,
                                                             int prec) {
    if (D < p) throw DomainError("psi_zero_basis: degree bound below p");
    std::vector<RobbaElement<PadicScalar>> out;
    for (long n = 1; n <= D; ++n) {
        if (n % p == 0) continue;
        std::map<long, PadicScalar> c =
            detail::one_plus_T_pow<PadicScalar>(p, 0, mpz_class(n), n, prec);
        out.push_back(RobbaElement<PadicScalar>::laurent(
            p, std::move(c), SubringTag::EPlus, mpq_class(0)));
    }
    return out;
}

// t = log(1+T) truncated at degree K; phi(t) = p t and gamma_a(t) = a t.
inline RobbaElement<PadicScalar> log_one_plus_T(long p, long K, int prec) {
    if (K < 1) throw DomainError("log_one_plus_T: window too small");
    std::map<long, PadicScalar> c;
    for (long n = 1; n <= K; ++n) {
        mpq_class q(n % 2 ? 1 : -1, n);
        q.canonicalize();
        c.emplace(n, PadicScalar::from_rational(p, q, prec));
    }
    return RobbaElement<PadicScalar>::windowed(p, 1, K, std::move(c),
                                               SubringTag::RPlus, true, false);
}

template <class S>
std::string robba_to_text(const RobbaElement<S>& f) {
    std::string s = "R{p=" + std::to_string(f.prime()) +
                    ";d=" + std::to_string(f.disc()) +
                    ";lo=" + std::to_string(f.lo()) +
                    ";hi=" + std::to_string(f.hi()) +
                    ";tag=" + tag_name(f.subring_tag()) + ";floor=" +
                    (f.val_floor() ? q_to_string(*f.val_floor())
                                   : std::string("none")) +
                    ";exact=" + (f.exact_below() ? "1" : "0") +
                    (f.exact_above() ? "1" : "0") + ";c=";
    bool first = true;
    for (const auto& [i, x] : f.coeffs()) {
        if (!first) s += ',';
        first = false;
        s += std::to_string(i) + ":" + x.to_text();
    }
    return s + "}";
}

inline RobbaElement<PadicScalar> robba_from_text(const std::string& s) {
    if (s.size() < 3 || s.substr(0, 2) != "R{" || s.back() != '}')
        throw ParseError("unreadable series record: " + s);
    std::map<std::string, std::string> kv;
    std::string body = s.substr(2, s.size() - 3);
    size_t pos = 0;
    while (pos < body.size()) {
        size_t eq = body.find('=', pos);
        if (eq == std::string::npos)
            throw ParseError("unreadable series record: " + s);
        std::string key = body.substr(pos, eq - pos);
        size_t end = key == "c" ? body.size() : body.find(';', eq + 1);
        if (end == std::string::npos) end = body.size();
        kv[key] = body.substr(eq + 1, end - eq - 1);
        pos = end + 1;
        if (key == "c") break;
    }
    for (const char* k : {"p", "lo", "hi", "tag", "floor", "exact", "c"})
        if (!kv.count(k))
            throw ParseError("series record missing field " + std::string(k));
    long p = std::stol(kv["p"]);
    long lo = std::stol(kv["lo"]);
    long hi = std::stol(kv["hi"]);
    SubringTag tag = tag_from_name(kv["tag"]);
    std::optional<mpq_class> floor;
    if (kv["floor"] != "none") {
        mpq_class q(kv["floor"]);
        q.canonicalize();
        floor = q;
    }
    if (kv["exact"].size() != 2)
        throw ParseError("series record with bad exactness flags: " + s);
    bool eb = kv["exact"][0] == '1';
    bool ea = kv["exact"][1] == '1';
    std::map<long, PadicScalar> c;
    const std::string& list = kv["c"];
    size_t at = 0;
    while (at < list.size()) {
        size_t comma = list.find(',', at);
        if (comma == std::string::npos) comma = list.size();
        std::string entry = list.substr(at, comma - at);
        size_t colon = entry.find(':');
        if (colon == std::string::npos)
            throw ParseError("unreadable coefficient entry: " + entry);
        long idx = std::stol(entry.substr(0, colon));
        c.emplace(idx, padic_from_text(entry.substr(colon + 1), p, 30));
        at = comma + 1;
    }
    return RobbaElement<PadicScalar>::windowed(p, lo, hi, std::move(c), tag,
                                               eb, ea, std::move(floor));
}

} // namespace phigamma
