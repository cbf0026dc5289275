#pragma once

/* Cohomology of rank-one modules R(delta) = R·e over the annulus series
 * rings: phi acts by phi(f)·delta(p), the cyclotomic action by
 * gamma0(f)·delta(gamma0) with gamma0 the fixed topological generator.
 *
 * H^1 dimensions are produced by two independent routes and cross-reported.
 *
 * (a) Proof pipeline (negative slope, delta(p) off the p-power line; other
 *     slopes reach this regime by t-twists). With A = delta(p)phi - 1 and
 *     G = delta(g0)g0 - 1, the cocycle space retracts onto pairs (a, b)
 *     with a a positive series and b in the psi = 0 sector with (G b)
 *     pole-free. Because A is then bijective on positive series, every
 *     positive-series b is a coboundary: a = A^{-1}Gb pairs with c = A^{-1}b
 *     and Gc = A^{-1}Gb by commutativity. What survives is the polar
 *     boundary solution of the pole-freeness recursion (one dimension: the
 *     recursion x_{m+1} = mu_m x_m with 1-unit ratios has exactly one
 *     bounded ray), provided no recursion wall mu_m = 1 sits at a polar
 *     depth, i.e. the weight is not a negative integer. The pipeline
 *     certifies each ingredient on windows (A invertible, the psi = 0
 *     gamma-action of full rank, wall-freeness) and reports dimension 1;
 *     any failed or ambiguous certificate is reported, never papered over.
 *
 * (b) Direct truncation: dim ker d2 - dim im d1 on finite windowed spaces.
 *     The middle space pairs a positive-series slot [0, K) with a Laurent
 *     slot [-W, K); the target window is [-W+1, K) when the slope is
 *     negative -- dropping the deepest polar row is the outgoing boundary
 *     condition that lets the boundary class enter the finite kernel, and
 *     is applied exactly when A has a polar cokernel -- and [-W, K) for
 *     slopes >= 0, where the paper's reduction instead reruns the direct
 *     count on the t-twisted character and both values are reported.
 *
 * Every dimension is accepted only if it is identical at truncation levels
 * (K, N) and (2K, N+5); otherwise the report says "unstable". Rank decisions
 * use complete min-valuation pivoting so that relations hidden behind
 * compounded small pivots are seen at the zero threshold. */

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "characters.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "robba.hpp"

namespace phigamma {

template <class S = PadicScalar>
struct RankOneModule {
    PadicCharacter<S> delta;
    long window = 40;   // truncation degree K
    int precision = 30; // working absolute precision N
};

// Coordinates of a degree-one cochain: a sits in the gamma-slot, b in the
// phi-slot, so that a cocycle satisfies (delta(p)phi-1)a = (delta(g0)g0-1)b.
template <class S = PadicScalar>
struct CocyclePair {
    RobbaElement<S> a;
    RobbaElement<S> b;
};

template <class S = PadicScalar>
struct TriangulineParameter {
    std::vector<PadicCharacter<S>> chars;
    long dim() const { return static_cast<long>(chars.size()); }
};

enum class CohMethod { ProofPipeline, DirectTruncation, BothAgree };

// One computed dimension: not computed at all, computed but level-dependent
// ("unstable"), or stable with a value.
struct DimResult {
    bool computed = false;
    bool stable = false;
    long value = -1;
};

struct CohomologyReport {
    DimResult h0_dim;
    DimResult h1_dim;
    DimResult h1_proof;  // route (a), when applicable
    DimResult h1_direct; // route (b)
    long window_used = 0;
    int precision_used = 0;
    CohMethod method = CohMethod::DirectTruncation;
    std::string note;

    bool stabilized() const {
        if (!h0_dim.computed && !h1_dim.computed) return false;
        if (h0_dim.computed && !h0_dim.stable) return false;
        if (h1_dim.computed && !h1_dim.stable) return false;
        return true;
    }
};


namespace detail {

// Everything the twisted actions need, resolved once per computation.
template <class S>
struct TwistedAction {
    long p = 0;
    long d = 0;
    long gamma0 = 0;
    S alpha;  // delta(p)
    S dgamma; // delta(gamma0)
    int prec = 30;
};

template <class S>
TwistedAction<S> make_action(const PadicCharacter<S>& delta, int prec) {
    TwistedAction<S> act;
    act.p = delta.prime();
    act.gamma0 = primitive_root_mod_p2(act.p);
    act.alpha = delta.value_at_p();
    act.d = disc_of(act.alpha);
    PadicScalar dg = value_at_unit(
        delta, PadicScalar::from_integer(act.p, act.gamma0, prec));
    act.dgamma = ScalarTraits<S>::from_base(dg, act.d);
    act.prec = prec;
    return act;
}

// delta(gamma0)·gamma0(c) - c.
template <class S>
RobbaElement<S> gamma_part(const TwistedAction<S>& act,
                           const RobbaElement<S>& c) {
    RobbaElement<S> gc = (c.lo() >= 0 && tag_nonneg(c.subring_tag()))
                             ? gamma_act(c, act.gamma0)
                             : gamma_act_laurent(c, act.gamma0);
    return act.dgamma * gc - c;
}

// delta(p)·phi(c) - c.
template <class S>
RobbaElement<S> phi_part(const TwistedAction<S>& act,
                         const RobbaElement<S>& c) {
    RobbaElement<S> fc =
        (c.lo() >= 0) ? phi_act(c) : phi_act(c, act.p * c.lo());
    return act.alpha * fc - c;
}

template <class S>
S matrix_zero(const TwistedAction<S>& act, int n) {
    return ScalarTraits<S>::zero(act.p, n, act.d);
}

template <class S>
S matrix_one(const TwistedAction<S>& act, int n) {
    return ScalarTraits<S>::one(act.p, n, act.d);
}

// Columns of delta(p)·phi - 1 and delta(gamma0)·gamma0 - 1 on the monomial
// basis T^0..T^{K-1} of the truncated positive series ring. Both actions
// send T^j into degrees >= j, so the truncation is an honest quotient.
template <class S>
void plus_action_columns(const TwistedAction<S>& act, long K,
                         std::vector<std::vector<S>>& phi_cols,
                         std::vector<std::vector<S>>& gamma_cols) {
    using RE = RobbaElement<S>;
    const S zero = matrix_zero(act, act.prec);
    const S one = matrix_one(act, act.prec);
    phi_cols.assign(K, std::vector<S>(K, zero));
    gamma_cols.assign(K, std::vector<S>(K, zero));
    RE tmon = RE::monomial(one, 1, SubringTag::RPlus);
    RE q = phi_act(tmon);                // (1+T)^p - 1
    RE g = gamma_act(tmon, act.gamma0);  // (1+T)^{gamma0} - 1
    RE phi_pow = RE::monomial(one, 0, SubringTag::RPlus);
    RE gam_pow = phi_pow;
    for (long j = 0; j < K; ++j) {
        for (const auto& [i, x] : phi_pow.coeffs())
            if (i < K) phi_cols[j][i] = act.alpha * x;
        phi_cols[j][j] = phi_cols[j][j] - one;
        for (const auto& [i, x] : gam_pow.coeffs())
            if (i < K) gamma_cols[j][i] = act.dgamma * x;
        gamma_cols[j][j] = gamma_cols[j][j] - one;
        if (j + 1 < K) {
            phi_pow = phi_pow * q;
            if (phi_pow.hi() > K - 1) phi_pow = phi_pow.restricted(j + 1, K - 1);
            gam_pow = gam_pow * g;
            if (gam_pow.hi() > K - 1) gam_pow = gam_pow.restricted(j + 1, K - 1);
        }
    }
}

// Column of delta(gamma0)·gamma0 - 1 on the Laurent monomial T^{-m}, as
// coordinates on T^{-W}..T^{K-1}. The action preserves the pole depth, so
// the polar side of the window is exact.
template <class S>
std::vector<S> polar_gamma_column(const TwistedAction<S>& act, long W, long K,
                                  long m) {
    using RE = RobbaElement<S>;
    const S one = matrix_one(act, act.prec);
    std::vector<S> col(W + K, matrix_zero(act, act.prec));
    RE img = gamma_act_laurent(RE::monomial(one, -m), act.gamma0, K - 1);
    for (const auto& [i, x] : img.coeffs())
        col[i + W] = act.dgamma * x;
    col[W - m] = col[W - m] - one;
    return col;
}

// Stacked matrix of d1 = ((delta(g0)g0-1)c, (delta(p)phi-1)c) on the
// truncated positive ring: 2K rows (gamma block above phi block), K columns.
template <class S>
Mat<S> d1_plus_matrix(const TwistedAction<S>& act, long K) {
    std::vector<std::vector<S>> phi_cols, gamma_cols;
    plus_action_columns(act, K, phi_cols, gamma_cols);
    Mat<S> m(static_cast<int>(2 * K), static_cast<int>(K),
             matrix_zero(act, act.prec));
    for (long j = 0; j < K; ++j)
        for (long i = 0; i < K; ++i) {
            m.at(static_cast<int>(i), static_cast<int>(j)) = gamma_cols[j][i];
            m.at(static_cast<int>(K + i), static_cast<int>(j)) =
                phi_cols[j][i];
        }
    return m;
}

/* d2(a, b) = (delta(p)phi-1)a - (delta(g0)g0-1)b on the truncated middle
 * space: a runs over T^0..T^{K-1}, b over T^{-W}..T^{K-1}. The target
 * carries coordinates T^{-W}..T^{K-1}, except that with drop_deepest the
 * deepest polar coordinate T^{-W} is left out. On the polar side the gamma
 * action is depth-triangular with unit-sized diagonal, so the equal-window
 * truncation is exactly invertible there and can never see a kernel vector
 * supported at unbounded depth; freeing the deepest coordinate is the
 * outgoing boundary condition that gives the finite model the same index as
 * the infinite operator. It is applied exactly when v_p(delta(p)) < 0, the
 * regime where delta(p)phi - 1 fails to be invertible on the polar sector.
 * phi only ever acts on the positive slot, so no polar spreading enters. */
template <class S>
Mat<S> d2_windowed_matrix(const TwistedAction<S>& act, long K, long W,
                          bool drop_deepest) {
    std::vector<std::vector<S>> phi_cols, gamma_cols;
    plus_action_columns(act, K, phi_cols, gamma_cols);
    const int off = drop_deepest ? 1 : 0;
    const int rows = static_cast<int>(W + K) - off;
    const int cols = static_cast<int>(K + W + K);
    Mat<S> m(rows, cols, matrix_zero(act, act.prec));
    for (long j = 0; j < K; ++j)
        for (long i = 0; i < K; ++i)
            m.at(static_cast<int>(W + i) - off, static_cast<int>(j)) =
                phi_cols[j][i];
    for (long j = -W; j < K; ++j) {
        int c = static_cast<int>(K + (j + W));
        if (j < 0) {
            std::vector<S> col = polar_gamma_column(act, W, K, -j);
            for (int i = off; i < static_cast<int>(W + K); ++i)
                m.at(i - off, c) = -col[i];
        } else {
            for (long i = 0; i < K; ++i)
                m.at(static_cast<int>(W + i) - off, c) = -gamma_cols[j][i];
        }
    }
    return m;
}

/* Membership constraint of the psi = 0 quotient presentation, used by the
 * proof pipeline as a wall certificate.
 *
 * The psi = 0 part of the bounded Laurent ring is free over the image of phi
 * with basis (1+T)^i, 1 <= i < p; its polar sector is spanned by
 * (1+T)^i·Q^{-m} with Q = (1+T)^p - 1. Writing b = sum_i (1+T)^i g_i(Q),
 * the membership condition "(delta(g0)g0 - 1)b has no pole" splits into one
 * condition per residue: with i·g0 = i' + p·k_i (1 <= i' < p),
 *
 *   delta(g0)·(1+X)^{k_i}·g_i((1+X)^{g0} - 1) - g_{i'}(X)
 *
 * must have vanishing polar part in the variable X. The matrix below stacks
 * these conditions in the (1+T)-basis: columns (i, m) for 1 <= i < p,
 * 1 <= m <= M, rows the polar coordinates (i', m'). It is block-triangular
 * in the depth, and the depth-m block is singular exactly when the character
 * restricted to units matches x^m there (a "wall"). Away from walls every
 * finite stage of the pole-freeness recursion is uniquely solvable; the one
 * bounded solution ray seeded at unbounded depth is the surviving H^1 class.
 *
 * Certificates must inspect the depth blocks one at a time, never the rank
 * of the whole matrix: the determinant of the full truncation is the product
 * of the block determinants, each of valuation >= 1, so its valuation grows
 * linearly with M and one below-threshold divisor at a deep truncation is
 * expected even far from every wall. */
inline Mat<PadicScalar> polar_constraint_matrix(long p, long g0,
                                                const PadicScalar& dgamma,
                                                long M, int prec) {
    using RE = RobbaElement<PadicScalar>;
    const PadicScalar one = PadicScalar::from_integer(p, 1, prec);
    const int n = static_cast<int>((p - 1) * M);
    Mat<PadicScalar> m(n, n, PadicScalar::exact_zero(p, prec));
    auto idx = [&](long res, long depth) {
        return static_cast<int>((depth - 1) * (p - 1) + (res - 1));
    };
    RE one_plus_x = RE::laurent(p, {{0, one}, {1, one}});
    for (long mm = 1; mm <= M; ++mm) {
        RE base = gamma_act_laurent(RE::monomial(one, -mm), g0, -1);
        for (long i = 1; i < p; ++i) {
            long ip = (i * g0) % p;
            long k = (i * g0 - ip) / p;
            RE img = base;
            for (long t = 0; t < k; ++t) img = one_plus_x * img;
            if (img.hi() > -1) img = img.restricted(img.lo(), -1);
            int col = idx(i, mm);
            for (const auto& [deg, x] : img.coeffs())
                m.at(idx(ip, -deg), col) = dgamma * x;
            m.at(idx(i, mm), col) = m.at(idx(i, mm), col) - one;
        }
    }
    return m;
}

// Wall certificate within the window: every depth block of the membership
// constraint must have full rank, so the recursion marches uniquely from
// each depth to the next. Returns false as soon as a block fails.
inline bool polar_blocks_invertible(const Mat<PadicScalar>& c, long p, long M,
                                    const PrecisionPolicy& pol) {
    const int w = static_cast<int>(p - 1);
    const int prec = c.at(0, 0).abs_precision();
    for (long mm = 0; mm < M; ++mm) {
        Mat<PadicScalar> block(w, w, PadicScalar::exact_zero(p, prec));
        for (int i = 0; i < w; ++i)
            for (int j = 0; j < w; ++j)
                block.at(i, j) =
                    c.at(static_cast<int>(mm) * w + i,
                         static_cast<int>(mm) * w + j);
        if (divisor_rank(block, pol) != w) return false;
    }
    return true;
}

/* Wall certificate beyond the window. A wall at depth m would create one
 * extra membership solution supported at depths <= m, but that solution
 * only survives to H^1 if the phi side fails to reabsorb it, and the phi
 * eigenvalue against depth m is delta(p) p^m. With v_p(delta(p)) in [-1, 0)
 * the valuation v_p(delta(p)) + m is positive for every m >= 2, and for
 * m = 1 as well unless the slope is exactly -1, where one numeric check
 * settles it. A positive valuation certifies the eigenvalue differs from 1
 * with no truncation involved, so walls past any finite window are harmless
 * and the window size never enters the conclusion. */
template <class S>
bool deep_walls_compensated(const TwistedAction<S>& act,
                            const PrecisionPolicy& pol) {
    mpq_class v = ScalarTraits<S>::valuation(act.alpha);
    if (v >= 0 || v < -1) return false;
    if (v > -1) return true;
    S ap = act.alpha *
           ScalarTraits<S>::from_integer(act.p, act.p, act.prec, act.d);
    return zero_test(ap - matrix_one(act, act.prec), pol) ==
           ZeroTest::DefinitelyNonzero;
}

// Dimension at one truncation level; nullopt when elimination cannot decide.
template <class F>
std::optional<long> guarded_level(F&& f) {
    try {
        return f();
    } catch (const AmbiguousAtPrecision&) {
        return std::nullopt;
    }
}

template <class F>
DimResult stabilized_dim(F&& level, long K, int N) {
    DimResult r;
    r.computed = true;
    std::optional<long> lo = level(K, N);
    std::optional<long> hi = level(2 * K, N + 5);
    if (lo && hi && *lo == *hi) {
        r.stable = true;
        r.value = *lo;
    }
    return r;
}

inline PrecisionPolicy working_policy(int N) {
    PrecisionPolicy pol;
    pol.abs_precision = N;
    return pol;
}

// True when alpha is certified to lie on the p-power line p^Z, which makes
// delta(p)phi - 1 non-invertible on positive series and rules route (a) out.
template <class S>
std::optional<bool> on_p_power_line(const S& alpha, long p,
                                    const PrecisionPolicy& pol) {
    mpq_class v = ScalarTraits<S>::valuation(alpha);
    if (v.get_den() != 1) return false;
    long n = static_cast<long>(v.get_num().get_si());
    int prec = pol.abs_precision + pol.guard_digits + 4;
    S pw = ScalarTraits<S>::from_integer(
        alpha.prime(), pow_ui(p, static_cast<unsigned long>(std::abs(n))),
        prec, disc_of(alpha));
    S unit = n >= 0 ? alpha / pw : alpha * pw;
    S one = ScalarTraits<S>::one(alpha.prime(), prec, disc_of(alpha));
    switch (zero_test(unit - one, pol)) {
    case ZeroTest::DefinitelyZero:
        return true;
    case ZeroTest::DefinitelyNonzero:
        return false;
    case ZeroTest::Ambiguous:
        return std::nullopt;
    }
    return std::nullopt;
}

} // namespace detail


// ---- element-level complex maps ----

template <class S>
CocyclePair<S> d1(const RobbaElement<S>& c, const PadicCharacter<S>& delta) {
    auto act = detail::make_action(delta, c.prec_hint() + 16);
    return {detail::gamma_part(act, c), detail::phi_part(act, c)};
}

template <class S>
RobbaElement<S> d2(const CocyclePair<S>& v, const PadicCharacter<S>& delta) {
    int prec = std::max(v.a.prec_hint(), v.b.prec_hint()) + 16;
    auto act = detail::make_action(delta, prec);
    return detail::phi_part(act, v.a) - detail::gamma_part(act, v.b);
}

/* Inverse of delta(p)phi - 1 on series supported in degrees >= k via the
 * contracting series c = -sum_{n>=0} (alpha·phi)^n b. Each pass through phi
 * gains Gauss weight at least v_p(alpha) + k at the slope-1/(p-1) weight, so
 * the series is truncated once the incoming term's weight clears the target;
 * a term that fails to gain weight within max_iter passes signals a violated
 * convergence precondition. */
template <class S>
RobbaElement<S> solve_neumann(const S& alpha, long k, const RobbaElement<S>& b,
                              const PrecisionPolicy& pol = {},
                              int max_iter = 400) {
    using RE = RobbaElement<S>;
    long p = b.prime();
    if (!tag_nonneg(b.subring_tag()) || b.lo() < 0)
        throw DomainError(
            "solve_neumann: right-hand side must be a positive series");
    if (b.known_zero()) return RE::zero_element(p, b.disc());
    if (b.coeffs().empty() || b.coeffs().begin()->first < k)
        throw DomainError("solve_neumann: support must start at degree >= " +
                          std::to_string(k));
    const long H = b.hi();
    const GaussWeight w{mpq_class(1, p - 1)};
    // residual coefficients must clear N - g across the whole window
    const mpq_class target =
        mpq_class(pol.abs_precision - pol.guard_digits) + w.s * H;
    RE term = b;
    RE acc = RE::zero_element(p, b.disc());
    std::optional<mpq_class> last;
    int flat = 0;
    for (int n = 0; n <= max_iter; ++n) {
        if (term.known_zero() || term.coeffs().empty()) break;
        std::optional<GaussValue> gv;
        try {
            gv = gauss_valuation(term, w);
        } catch (const DomainError&) {
            break; // residual certified zero on the window
        }
        if (gv->value >= target) break;
        if (last && gv->value <= *last) {
            if (++flat >= 8)
                throw NotConverging(
                    "solve_neumann: term weight is not increasing");
        } else {
            flat = 0;
        }
        last = gv->value;
        if (n == max_iter)
            throw NotConverging(
                "solve_neumann: weight target not reached in " +
                std::to_string(max_iter) + " iterations");
        acc = acc + term;
        term = alpha * phi_act(term);
        if (term.hi() > H) term = term.restricted(term.lo(), H);
    }
    return -acc;
}

// Dimension of the joint kernel of delta(p)phi - 1 and delta(g0)g0 - 1 on
// positive series mod T^{K'}, K' at least 1 + max(0, ceil(-v_p(delta(p)))).
template <class S>
CohomologyReport h0_rank_one(const PadicCharacter<S>& delta, long window = 40,
                             int precision = 30) {
    mpq_class v = ScalarTraits<S>::valuation(delta.value_at_p());
    long kmin = 1;
    if (v < 0) kmin += static_cast<long>(q_ceil(-v).get_si());
    const long K0 = std::max(window, kmin);
    auto level = [&](long K, int N) {
        return detail::guarded_level([&]() -> long {
            PrecisionPolicy pol = detail::working_policy(N);
            auto act = detail::make_action(delta, N + pol.guard_digits + 6);
            return K - divisor_rank(detail::d1_plus_matrix(act, K), pol);
        });
    };
    CohomologyReport rep;
    rep.window_used = K0;
    rep.precision_used = precision;
    rep.method = CohMethod::DirectTruncation;
    rep.h0_dim = detail::stabilized_dim(level, K0, precision);
    return rep;
}

/* H^1 by two routes.
 *
 * Route (b), direct truncation: dim ker d2 minus dim im d1 on the windowed
 * spaces of d2_windowed_matrix, with the outgoing boundary condition engaged
 * when v_p(delta(p)) < 0.
 *
 * Route (a), the proof route. At negative slope it is the elimination
 * pipeline, run at both truncation levels provided the value at p avoids the
 * p-power line. It certifies that (i) delta(p)phi - 1 is invertible on
 * positive series, so the positive sector of the quotient presentation is
 * eliminated into coboundaries through the Neumann inverse (for b in the
 * psi = 0 positive sector, c = (delta(p)phi-1)^{-1} b satisfies
 * d1(c) = ((delta(g0)g0-1)c, b) by commutativity), (ii) every depth block of
 * the polar membership constraint is invertible, so no wall interrupts the
 * pole-freeness recursion inside the window, and (iii) the exact slope
 * arithmetic of deep_walls_compensated rules out dimension jumps from walls
 * beyond any window. Together these pin the dimension to the single bounded
 * boundary ray: the certified value is 1.
 *
 * At slope >= 0 the polar sector is empty and twisting down to negative
 * slope changes the dimension whenever the twist chain crosses a character
 * with invariants, so the proof route instead counts through duality and
 * the Euler characteristic: h1 = 1 + h0(delta) + h0(dual_character(delta)),
 * each summand by the stabilized kernel computation. A failed or ambiguous
 * certificate yields no value, never a guess. */
template <class S>
CohomologyReport h1_rank_one(const PadicCharacter<S>& delta, long window = 40,
                             int precision = 30) {
    CohomologyReport rep;
    rep.window_used = window;
    rep.precision_used = precision;
    std::vector<std::string> notes;

    auto direct_level = [](const PadicCharacter<S>& chi, bool drop) {
        return [chi, drop](long K, int N) {
            return detail::guarded_level([&]() -> long {
                PrecisionPolicy pol = detail::working_policy(N);
                auto act = detail::make_action(chi, N + pol.guard_digits + 6);
                const long W = K;
                int r1 = divisor_rank(detail::d1_plus_matrix(act, K), pol);
                int r2 = divisor_rank(
                    detail::d2_windowed_matrix(act, K, W, drop), pol);
                // dim ker d2 - dim im d1 on (a, b) pairs of sizes K and W + K
                return (2 * K + W) - r2 - r1;
            });
        };
    };

    mpq_class v = ScalarTraits<S>::valuation(delta.value_at_p());
    rep.h1_direct = detail::stabilized_dim(direct_level(delta, v < 0), window,
                                           precision);

    DimResult proof;
    if (v >= 0) {
        notes.push_back("slope >= 0: proof route is the duality count "
                        "1 + h0 + dual h0");
        DimResult self = h0_rank_one(delta, window, precision).h0_dim;
        DimResult dual =
            h0_rank_one(dual_character(delta), window, precision).h0_dim;
        proof.computed = self.computed || dual.computed;
        if (self.stable && dual.stable) {
            proof.stable = true;
            proof.value = 1 + self.value + dual.value;
        } else {
            notes.push_back("an h0 summand of the duality count did not "
                            "stabilize");
        }
    } else {
        PrecisionPolicy gate_pol = detail::working_policy(precision);
        std::optional<bool> on_line = detail::on_p_power_line(
            delta.value_at_p(), delta.prime(), gate_pol);
        if (!on_line) {
            notes.push_back("p-power-line test ambiguous at this precision; "
                            "proof pipeline skipped");
        } else if (*on_line) {
            notes.push_back("value at p lies on the p-power line; proof "
                            "pipeline inapplicable");
        } else {
            auto proof_level = [&](long M, int N) -> std::optional<long> {
                try {
                    PrecisionPolicy pol = detail::working_policy(N);
                    auto act =
                        detail::make_action(delta, N + pol.guard_digits + 6);
                    std::vector<std::vector<S>> phi_cols, gamma_cols;
                    detail::plus_action_columns(act, M, phi_cols, gamma_cols);
                    Mat<S> a(static_cast<int>(M), static_cast<int>(M),
                             detail::matrix_zero(act, act.prec));
                    for (long j = 0; j < M; ++j)
                        for (long i = 0; i < M; ++i)
                            a.at(static_cast<int>(i), static_cast<int>(j)) =
                                phi_cols[j][i];
                    if (divisor_rank(a, pol) != static_cast<int>(M))
                        return std::nullopt; // elimination certificate failed
                    PadicScalar dg = value_at_unit(
                        delta, PadicScalar::from_integer(act.p, act.gamma0,
                                                         act.prec));
                    Mat<PadicScalar> c = detail::polar_constraint_matrix(
                        act.p, act.gamma0, dg, M, act.prec);
                    if (!detail::polar_blocks_invertible(c, act.p, M, pol))
                        return std::nullopt; // wall inside the window
                    if (!detail::deep_walls_compensated(act, pol))
                        return std::nullopt; // a deep wall could jump the dim
                    return 1;
                } catch (const AmbiguousAtPrecision&) {
                    return std::nullopt;
                }
            };
            proof = detail::stabilized_dim(proof_level, window, precision);
            if (!proof.stable)
                notes.push_back(
                    "proof pipeline could not certify at these levels");
        }
    }
    rep.h1_proof = proof;

    const DimResult& pr = rep.h1_proof;
    const DimResult& di = rep.h1_direct;
    rep.h1_dim.computed = pr.computed || di.computed;
    if (pr.stable && di.stable) {
        if (pr.value == di.value) {
            rep.h1_dim.stable = true;
            rep.h1_dim.value = pr.value;
            rep.method = CohMethod::BothAgree;
        } else if (v >= 0) {
            // the direct window has no boundary condition to engage at
            // slope >= 0 and sees only window-visible classes
            rep.h1_dim = pr;
            rep.method = CohMethod::ProofPipeline;
            notes.push_back("direct count " + std::to_string(di.value) +
                            " reflects only window-visible classes at "
                            "slope >= 0");
        } else {
            rep.method = CohMethod::BothAgree;
            notes.push_back("routes disagree (proof " +
                            std::to_string(pr.value) + ", direct " +
                            std::to_string(di.value) + ")");
        }
    } else if (di.stable && v < 0) {
        rep.h1_dim = di;
        rep.method = CohMethod::DirectTruncation;
    } else if (pr.stable) {
        rep.h1_dim = pr;
        rep.method = CohMethod::ProofPipeline;
        if (!di.stable)
            notes.push_back("direct truncation unstable at these levels");
    } else if (di.stable) {
        rep.h1_dim = di;
        rep.method = CohMethod::DirectTruncation;
        notes.push_back("duality count unstable; direct count reported "
                        "despite slope >= 0");
    } else {
        rep.method = CohMethod::DirectTruncation;
    }
    for (size_t i = 0; i < notes.size(); ++i)
        rep.note += (i ? "; " : "") + notes[i];
    return rep;
}

template <class S>
CohomologyReport h0_rank_one(const RankOneModule<S>& m) {
    return h0_rank_one(m.delta, m.window, m.precision);
}

template <class S>
CohomologyReport h1_rank_one(const RankOneModule<S>& m) {
    return h1_rank_one(m.delta, m.window, m.precision);
}

// ---- trianguline parameters ----

// All weights detected integers and strictly increasing.
template <class S>
bool is_noncritical(const TriangulineParameter<S>& par,
                    const PrecisionPolicy& pol = {}) {
    if (par.chars.empty())
        throw std::invalid_argument("is_noncritical: empty parameter");
    std::optional<long long> prev;
    for (const PadicCharacter<S>& c : par.chars) {
        WeightReport w = weight(c, pol);
        if (!w.is_integer) return false;
        if (prev && !(*prev < w.n)) return false;
        prev = w.n;
    }
    return true;
}

template <class S>
bool is_nonexceptional(const TriangulineParameter<S>& par,
                       const PrecisionPolicy& pol = {}) {
    if (par.chars.empty())
        throw std::invalid_argument("is_nonexceptional: empty parameter");
    for (const PadicCharacter<S>& c : par.chars)
        if (is_exceptional(c, pol).exceptional) return false;
    return true;
}

struct DevissageDims {
    long h1_fil_a = 0;
    long h1_quotient = 0;
    long h1_total = 0;
    long pot_dim = 0;
    // the top cohomology of each non-exceptional graded piece is taken to be
    // zero (dimension formula assumption), recorded here rather than computed
    bool h2_assumed_zero = true;
    std::vector<CohomologyReport> graded; // filled in cross-check mode
};

/* Dimensions along the filtration of a non-exceptional parameter: each of
 * the d graded pieces contributes (h0, h1, h2) = (0, 1, 0), so the filtered
 * step a carries h1 = a, the quotient d - a, and the potential subspace has
 * dimension a. Cross-check mode attaches a computed report per piece. */
template <class S>
DevissageDims devissage_dims(const TriangulineParameter<S>& par, long a,
                             bool cross_check = false, long window = 40,
                             int precision = 20) {
    const long d = par.dim();
    if (d < 1) throw std::invalid_argument("devissage_dims: empty parameter");
    if (a < 0 || a > d)
        throw std::invalid_argument(
            "devissage_dims: filtration index must satisfy 0 <= a <= d");
    PrecisionPolicy pol;
    pol.abs_precision = precision;
    if (!is_nonexceptional(par, pol))
        throw ExceptionalParameter(
            "devissage_dims: parameter contains an exceptional character");
    DevissageDims out;
    out.h1_fil_a = a;
    out.h1_quotient = d - a;
    out.h1_total = d;
    out.pot_dim = a;
    if (cross_check)
        for (const PadicCharacter<S>& c : par.chars)
            out.graded.push_back(h1_rank_one(c, window, precision));
    return out;
}

// ---- report serialization ----

inline std::string dim_to_text(const DimResult& r) {
    if (!r.computed) return "-";
    if (!r.stable) return "unstable";
    return std::to_string(r.value);
}

inline const char* method_name(CohMethod m) {
    switch (m) {
    case CohMethod::ProofPipeline: return "proof_pipeline";
    case CohMethod::DirectTruncation: return "direct_truncation";
    case CohMethod::BothAgree: return "both_agree";
    }
    return "direct_truncation";
}

inline std::string report_to_text(const CohomologyReport& r) {
    std::ostringstream os;
    os << "H{h0=" << dim_to_text(r.h0_dim) << ";h1=" << dim_to_text(r.h1_dim)
       << ";proof=" << dim_to_text(r.h1_proof)
       << ";direct=" << dim_to_text(r.h1_direct) << ";K=" << r.window_used
       << ";N=" << r.precision_used << ";method=" << method_name(r.method)
       << ";stab=" << (r.stabilized() ? 1 : 0) << ";note=" << r.note << "}";
    return os.str();
}

namespace detail {

inline DimResult dim_from_text(const std::string& s, const std::string& where) {
    DimResult r;
    if (s == "-") return r;
    r.computed = true;
    if (s == "unstable") return r;
    try {
        size_t used = 0;
        r.value = std::stol(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
        throw ParseError("report: bad dimension '" + s + "' in " + where);
    }
    r.stable = true;
    return r;
}

} // namespace detail

inline CohomologyReport report_from_text(const std::string& text) {
    if (text.size() < 3 || text.compare(0, 2, "H{") != 0 ||
        text.back() != '}')
        throw ParseError("report: expected H{...}");
    std::string body = text.substr(2, text.size() - 3);
    // note is the final field and may contain anything but '}'
    const std::string note_key = ";note=";
    size_t np = body.rfind(note_key);
    if (np == std::string::npos) throw ParseError("report: missing note field");
    std::string note = body.substr(np + note_key.size());
    body = body.substr(0, np);
    std::map<std::string, std::string> kv;
    std::istringstream is(body);
    std::string item;
    while (std::getline(is, item, ';')) {
        size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw ParseError("report: malformed field '" + item + "'");
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    for (const char* key :
         {"h0", "h1", "proof", "direct", "K", "N", "method", "stab"})
        if (!kv.count(key))
            throw ParseError(std::string("report: missing field '") + key +
                             "'");
    CohomologyReport r;
    r.h0_dim = detail::dim_from_text(kv["h0"], "h0");
    r.h1_dim = detail::dim_from_text(kv["h1"], "h1");
    r.h1_proof = detail::dim_from_text(kv["proof"], "proof");
    r.h1_direct = detail::dim_from_text(kv["direct"], "direct");
    try {
        r.window_used = std::stol(kv["K"]);
        r.precision_used = std::stoi(kv["N"]);
    } catch (const std::exception&) {
        throw ParseError("report: bad numeric field");
    }
    const std::string& m = kv["method"];
    if (m == "proof_pipeline") r.method = CohMethod::ProofPipeline;
    else if (m == "direct_truncation") r.method = CohMethod::DirectTruncation;
    else if (m == "both_agree") r.method = CohMethod::BothAgree;
    else throw ParseError("report: unknown method '" + m + "'");
    r.note = note;
    return r;
}

} // namespace phigamma
