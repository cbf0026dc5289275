#pragma once

/* Selmer kernels of a comparison map between bounded complexes of finite
 * free modules over a principal ideal domain, and their behavior under
 * reduction modulo a prime element.
 *
 * The data is a complex v, a complex w, and a chain map between them; the
 * induced map u on degree-one cohomology defines the Selmer module
 * S = ker(u), and reducing everything modulo a prime f defines S(mod f).
 * Because the chain map commutes with the differentials by construction,
 * reduction and the comparison map automatically fit in a commuting square,
 * which is exactly the input the specialization statements need. Three
 * exact statements are implemented as checks:
 *
 *   (a) when the degree-zero cohomology of w/fw vanishes, the natural map
 *       S tensor R/f -> S(mod f) is injective, and its cokernel dimension
 *       is at most rk H^2(v)[f] + rk (H^1(w)/u H^1(v))[f];
 *   (b) dim S(mod f) >= generic rank of S for every such f, with equality
 *       outside a finite exceptional set;
 *   (c) the exceptional set and every specialized dimension are predicted
 *       exactly by invariant factors of three fixed matrices, since
 *       dim S(mod f) = n1 - rank_f(B) + rank_f(d0 of w) - rank_f(d0 of v),
 *       where B is the block matrix [[d1 of v, 0], [chain1, d0 of w]] and
 *       rank_f drops below the generic rank by the number of invariant
 *       factors divisible by f.
 *
 * The dimension counts in (b) come from residue-field elimination and the
 * predictions in (c) from Smith normal form over the ring, so agreement of
 * the two is a genuine cross-check of independent computations. */

#include <array>
#include <sstream>
#include <string>
#include <vector>

#include "euclidean.hpp"

namespace phigamma {

enum class RingKind { Integers, RationalPolynomials };

/* Positions 0..3 with free modules of the given ranks; d[i] maps position i
 * to position i+1, so d[i] has shape ranks[i+1] x ranks[i]. */
template <class T>
struct FreeComplex {
    std::array<long, 4> ranks{};
    std::array<Mat<T>, 3> d;
};

template <class T>
FreeComplex<T> zero_complex(std::array<long, 4> ranks) {
    FreeComplex<T> c;
    c.ranks = ranks;
    for (int i = 0; i < 3; ++i)
        c.d[i] = Mat<T>(static_cast<int>(ranks[static_cast<size_t>(i + 1)]),
                        static_cast<int>(ranks[static_cast<size_t>(i)]),
                        EuclideanTraits<T>::zero());
    return c;
}

template <class T>
void validate_complex(const FreeComplex<T>& c) {
    for (int i = 0; i < 4; ++i)
        if (c.ranks[static_cast<size_t>(i)] < 0)
            throw DomainError("complex: negative rank");
    for (int i = 0; i < 3; ++i)
        if (c.d[i].rows() != c.ranks[static_cast<size_t>(i + 1)] ||
            c.d[i].cols() != c.ranks[static_cast<size_t>(i)])
            throw DomainError("complex: differential shape mismatch");
    for (int i = 0; i < 2; ++i)
        if (!e_is_zero_mat(e_mul(c.d[i + 1], c.d[i])))
            throw DomainError("complex: consecutive differentials do not "
                              "compose to zero");
}

/* w receives the comparison map; chain[i] : v_i -> w_i must commute with
 * the differentials, which makes the induced maps on cohomology and all
 * reduction squares well defined by construction. */
template <class T>
struct SelmerInstance {
    FreeComplex<T> v, w;
    std::array<Mat<T>, 4> chain;
};

template <class T>
void validate_instance(const SelmerInstance<T>& inst) {
    validate_complex(inst.v);
    validate_complex(inst.w);
    for (int i = 0; i < 4; ++i)
        if (inst.chain[static_cast<size_t>(i)].rows() !=
                inst.w.ranks[static_cast<size_t>(i)] ||
            inst.chain[static_cast<size_t>(i)].cols() !=
                inst.v.ranks[static_cast<size_t>(i)])
            throw DomainError("instance: chain map shape mismatch");
    for (int i = 0; i < 3; ++i) {
        Mat<T> lhs = e_mul(inst.w.d[i], inst.chain[static_cast<size_t>(i)]);
        Mat<T> rhs = e_mul(inst.chain[static_cast<size_t>(i + 1)], inst.v.d[i]);
        if (!e_equal(lhs, rhs))
            throw DomainError("instance: chain map does not commute with "
                              "the differentials");
    }
}

template <class T>
struct CohomologySummary {
    long free_rank = 0;
    std::vector<T> torsion; // invariant factors, divisibility chain
};

namespace detail {

// kernel/boundary presentation of degree-one cohomology: columns of k span
// ker(d1) and x writes d0 in those coordinates, so H^1 = R^cols(k) / im(x)
template <class T>
void h1_presentation(const FreeComplex<T>& c, Mat<T>& k, Mat<T>& x) {
    k = e_kernel_basis(c.d[1]);
    x = solve_exact(k, c.d[0]);
}

} // namespace detail

/* ker(d_i)/im(d_{i-1}) presented by its free rank and torsion invariant
 * factors. */
template <class T>
CohomologySummary<T> cohomology(const FreeComplex<T>& c, int i) {
    if (i < 0 || i > 3)
        throw std::invalid_argument("cohomology: position must be 0..3");
    Mat<T> k = i < 3 ? e_kernel_basis(c.d[i])
                     : e_identity<T>(static_cast<int>(c.ranks[3]));
    if (i == 0) return {k.cols(), {}};
    Mat<T> x = solve_exact(k, c.d[i - 1]);
    Snf<T> s = snf(x);
    return {k.cols() - s.rank, invariant_factors(s)};
}

namespace detail {

/* The block matrix [[d1 of v, 0], [chain1, d0 of w]]. Its kernel modulo f
 * consists of pairs (cocycle mod f, certificate that its image is a
 * boundary), so its rank drives every specialized Selmer dimension. */
template <class T>
Mat<T> comparison_block(const SelmerInstance<T>& inst) {
    using Tr = EuclideanTraits<T>;
    const Mat<T>& d1 = inst.v.d[1];
    const Mat<T>& ch = inst.chain[1];
    const Mat<T>& dw = inst.w.d[0];
    Mat<T> b(d1.rows() + ch.rows(), d1.cols() + dw.cols(), Tr::zero());
    for (int i = 0; i < d1.rows(); ++i)
        for (int j = 0; j < d1.cols(); ++j) b.at(i, j) = d1.at(i, j);
    for (int i = 0; i < ch.rows(); ++i) {
        for (int j = 0; j < ch.cols(); ++j)
            b.at(d1.rows() + i, j) = ch.at(i, j);
        for (int j = 0; j < dw.cols(); ++j)
            b.at(d1.rows() + i, d1.cols() + j) = dw.at(i, j);
    }
    return b;
}

/* Basis (columns of basis) and relation matrix of S = ker(u on H^1):
 * the submodule { z in ker-coordinates : u z is a boundary of w } modulo
 * the boundaries of v. */
template <class T>
void selmer_presentation(const SelmerInstance<T>& inst, Mat<T>& kv,
                         Mat<T>& basis, Mat<T>& rel) {
    using Tr = EuclideanTraits<T>;
    Mat<T> xv;
    h1_presentation(inst.v, kv, xv);
    Mat<T> kw, xw;
    h1_presentation(inst.w, kw, xw);
    Mat<T> um = solve_exact(kw, e_mul(inst.chain[1], kv));
    Mat<T> n = e_kernel_basis(e_hstack(um, xw));
    Mat<T> p(kv.cols(), n.cols(), Tr::zero());
    for (int i = 0; i < kv.cols(); ++i)
        for (int j = 0; j < n.cols(); ++j) p.at(i, j) = n.at(i, j);
    basis = e_image_basis(p);
    rel = solve_exact(basis, xv);
}

} // namespace detail

// S = ker(H^1(v) -> H^1(w)): free rank is the generic rank
template <class T>
CohomologySummary<T> selmer_kernel(const SelmerInstance<T>& inst) {
    Mat<T> kv, basis, rel;
    detail::selmer_presentation(inst, kv, basis, rel);
    Snf<T> s = snf(rel);
    return {basis.cols() - s.rank, invariant_factors(s)};
}

template <class T>
long selmer_generic_rank(const SelmerInstance<T>& inst) {
    return inst.v.ranks[1] - rank_of(detail::comparison_block(inst)) +
           rank_of(inst.w.d[0]) - rank_of(inst.v.d[0]);
}

template <class T>
long count_divisible(const std::vector<T>& factors, const T& f) {
    long n = 0;
    for (const T& d : factors)
        if (EuclideanTraits<T>::is_zero(reduce_mod(d, f))) ++n;
    return n;
}

/* Everything about the instance reduced modulo the prime element f; the
 * dimensions are over the residue field R/f. */
template <class T>
struct Specialization {
    T f;
    SelmerInstance<T> reduced;
    long h0_w = 0; // degree-zero cohomology of w/fw; hypotheses want 0
    long h1_v = 0;
    long h1_w = 0;
    long selmer_dim = 0; // dim S(mod f)
};

template <class T>
Specialization<T> specialize(const SelmerInstance<T>& inst, const T& f) {
    if (!is_prime_elem(f))
        throw DomainError("specialize: prime element required");
    Specialization<T> out;
    out.f = f;
    out.reduced = inst;
    auto reduce_mat = [&](Mat<T>& m) {
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j)
                m.at(i, j) = reduce_mod(m.at(i, j), f);
    };
    for (int i = 0; i < 3; ++i) {
        reduce_mat(out.reduced.v.d[i]);
        reduce_mat(out.reduced.w.d[i]);
    }
    for (auto& m : out.reduced.chain) reduce_mat(m);

    long rd0v = rank_mod(inst.v.d[0], f);
    long rd0w = rank_mod(inst.w.d[0], f);
    out.h0_w = inst.w.ranks[0] - rd0w;
    out.h1_v = inst.v.ranks[1] - rank_mod(inst.v.d[1], f) - rd0v;
    out.h1_w = inst.w.ranks[1] - rank_mod(inst.w.d[1], f) - rd0w;
    out.selmer_dim = inst.v.ranks[1] -
                     rank_mod(detail::comparison_block(inst), f) + rd0w - rd0v;
    return out;
}

/* Exact check of the specialization statement at one prime: injectivity of
 * S tensor R/f -> S(mod f) and the cokernel bound by the f-torsion of
 * H^2(v) and of H^1(w)/u(H^1(v)). Reported, never assumed. */
template <class T>
struct Form1Report {
    T f;
    bool precondition_ok = false; // degree-zero cohomology of w/fw vanishes
    long generic_rank = 0;
    long tensor_dim = 0;      // dim of S tensor R/f
    long specialized_dim = 0; // dim of S(mod f)
    bool injective = false;
    long coker_dim = 0;
    long h2_torsion_rank = 0;     // rk H^2(v)[f]
    long coker_u_torsion_rank = 0; // rk (H^1(w)/u H^1(v))[f]
    bool bound_holds = false;
    bool surjective = false;
};

template <class T>
Form1Report<T> form1_check(const SelmerInstance<T>& inst, const T& f) {
    Form1Report<T> rep;
    rep.f = f;
    rep.generic_rank = selmer_generic_rank(inst);
    Specialization<T> sp = specialize(inst, f);
    rep.precondition_ok = sp.h0_w == 0;
    rep.specialized_dim = sp.selmer_dim;
    if (!rep.precondition_ok) return rep;

    Mat<T> kv, basis, rel;
    detail::selmer_presentation(inst, kv, basis, rel);
    rep.tensor_dim = basis.cols() - rank_mod(rel, f);

    // image of the reduction map: classes of the basis vectors inside
    // ker(d1 mod f) / im(d0 mod f)
    long rd0 = rank_mod(inst.v.d[0], f);
    long image_dim =
        rank_mod(e_hstack(e_mul(kv, basis), inst.v.d[0]), f) - rd0;
    rep.injective = image_dim == rep.tensor_dim;
    rep.coker_dim = rep.specialized_dim - image_dim;

    CohomologySummary<T> h2 = cohomology(inst.v, 2);
    rep.h2_torsion_rank = count_divisible(h2.torsion, f);

    Mat<T> kw, xw;
    detail::h1_presentation(inst.w, kw, xw);
    Mat<T> um = solve_exact(kw, e_mul(inst.chain[1], kv));
    Snf<T> q = snf(e_hstack(xw, um));
    rep.coker_u_torsion_rank = count_divisible(invariant_factors(q), f);

    rep.bound_holds =
        rep.coker_dim <= rep.h2_torsion_rank + rep.coker_u_torsion_rank;
    rep.surjective = rep.coker_dim == 0;
    return rep;
}

template <class T>
struct SemicontinuityRow {
    T f;
    bool precondition_ok = false;
    long dim = 0;           // observed over the residue field
    long predicted_dim = 0; // from invariant factors over the ring
};

template <class T>
struct SemicontinuityReport {
    long generic_rank = 0;
    std::vector<SemicontinuityRow<T>> rows; // sorted by the ring order
    std::vector<T> predicted_exceptional;   // tested primes expected to jump
    bool lower_bound_ok = true;  // dim >= generic rank wherever claimed
    bool prediction_exact = true; // observed == predicted on every row
};

/* Scan of dim S(mod f) over a prime list. Observed dimensions come from
 * residue-field elimination; predictions count invariant factors of the
 * comparison block and the two degree-zero differentials, so the two
 * columns are independent computations of the same number. */
template <class T>
SemicontinuityReport<T> semicontinuity_experiment(
    const SelmerInstance<T>& inst, std::vector<T> primes) {
    using Tr = EuclideanTraits<T>;
    std::sort(primes.begin(), primes.end(), Tr::less);
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());

    SemicontinuityReport<T> rep;
    rep.generic_rank = selmer_generic_rank(inst);
    std::vector<T> block_fs =
        invariant_factors(snf(detail::comparison_block(inst)));
    std::vector<T> d0v_fs = invariant_factors(snf(inst.v.d[0]));
    std::vector<T> d0w_fs = invariant_factors(snf(inst.w.d[0]));

    for (const T& f : primes) {
        Specialization<T> sp = specialize(inst, f);
        SemicontinuityRow<T> row;
        row.f = f;
        row.precondition_ok = sp.h0_w == 0;
        row.dim = sp.selmer_dim;
        row.predicted_dim = rep.generic_rank + count_divisible(block_fs, f) -
                            count_divisible(d0w_fs, f) +
                            count_divisible(d0v_fs, f);
        if (row.dim != row.predicted_dim) rep.prediction_exact = false;
        if (row.precondition_ok) {
            if (row.dim < rep.generic_rank) rep.lower_bound_ok = false;
            if (row.dim > rep.generic_rank)
                rep.predicted_exceptional.push_back(f);
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

/* The combined invariant factors whose prime divisors are exactly the
 * primes where dim S(mod f) exceeds the generic rank (among primes with
 * vanishing degree-zero cohomology of w/fw). */
template <class T>
std::vector<T> jump_witness_factors(const SelmerInstance<T>& inst) {
    std::vector<T> out =
        invariant_factors(snf(detail::comparison_block(inst)));
    std::vector<T> d0v = invariant_factors(snf(inst.v.d[0]));
    out.insert(out.end(), d0v.begin(), d0v.end());
    return out;
}

// full finite exceptional candidate set over the integers, by factoring the
// witness invariant factors
inline std::vector<mpz_class> predicted_jump_primes(
    const SelmerInstance<mpz_class>& inst) {
    std::vector<mpz_class> out;
    for (const mpz_class& w : jump_witness_factors(inst)) {
        mpz_class n = abs(w);
        for (mpz_class d = 2; d * d <= n; ++d)
            while (n % d == 0) {
                out.push_back(d);
                n /= d;
            }
        if (n > 1) out.push_back(n);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---- engineered instances ----

// zero differentials everywhere, chain map diag(entries) in degree one
template <class T>
SelmerInstance<T> diag_map_instance(const std::vector<T>& entries) {
    using Tr = EuclideanTraits<T>;
    long k = static_cast<long>(entries.size());
    SelmerInstance<T> inst;
    inst.v = zero_complex<T>({0, k, 0, 0});
    inst.w = zero_complex<T>({0, k, 0, 0});
    for (int i = 0; i < 4; ++i) {
        long r = i == 1 ? k : 0;
        inst.chain[static_cast<size_t>(i)] =
            Mat<T>(static_cast<int>(r), static_cast<int>(r), Tr::zero());
    }
    for (long i = 0; i < k; ++i)
        inst.chain[1].at(static_cast<int>(i), static_cast<int>(i)) =
            entries[static_cast<size_t>(i)];
    return inst;
}

/* Multiplication by 2 on a degree-one cohomology equal to the ring itself:
 * the Selmer kernel is 0 with generic rank 0, yet modulo 2 the map dies and
 * the specialized Selmer space has dimension 1, a strict jump. */
inline SelmerInstance<mpz_class> two_torsion_jump_instance() {
    return diag_map_instance<mpz_class>({2});
}

/* Chain map lambda * id + d h + h d on a single complex: commutes with the
 * differentials for any degree-lowering maps h, and induces multiplication
 * by lambda on cohomology. h[i] maps position i+1 back to position i, so
 * it has shape ranks[i] x ranks[i+1]. */
template <class T>
SelmerInstance<T> homotopy_instance(const FreeComplex<T>& c, const T& lambda,
                                    const std::array<Mat<T>, 3>& h) {
    using Tr = EuclideanTraits<T>;
    auto add_into = [](Mat<T>& m, const Mat<T>& s) {
        for (int a = 0; a < m.rows(); ++a)
            for (int b = 0; b < m.cols(); ++b)
                m.at(a, b) = m.at(a, b) + s.at(a, b);
    };
    SelmerInstance<T> inst;
    inst.v = c;
    inst.w = c;
    for (int i = 0; i < 4; ++i) {
        int n = static_cast<int>(c.ranks[static_cast<size_t>(i)]);
        Mat<T> m(n, n, Tr::zero());
        for (int a = 0; a < n; ++a) m.at(a, a) = lambda;
        if (i > 0)
            add_into(m, e_mul(c.d[i - 1], h[static_cast<size_t>(i - 1)]));
        if (i < 3) add_into(m, e_mul(h[static_cast<size_t>(i)], c.d[i]));
        inst.chain[static_cast<size_t>(i)] = std::move(m);
    }
    return inst;
}

template <class T>
SelmerInstance<T> direct_sum(const SelmerInstance<T>& a,
                             const SelmerInstance<T>& b) {
    using Tr = EuclideanTraits<T>;
    auto sum_complex = [](const FreeComplex<T>& x, const FreeComplex<T>& y) {
        FreeComplex<T> c;
        for (int i = 0; i < 4; ++i)
            c.ranks[static_cast<size_t>(i)] = x.ranks[static_cast<size_t>(i)] +
                                              y.ranks[static_cast<size_t>(i)];
        for (int i = 0; i < 3; ++i) {
            Mat<T> m(x.d[i].rows() + y.d[i].rows(),
                     x.d[i].cols() + y.d[i].cols(), Tr::zero());
            for (int r = 0; r < x.d[i].rows(); ++r)
                for (int cc = 0; cc < x.d[i].cols(); ++cc)
                    m.at(r, cc) = x.d[i].at(r, cc);
            for (int r = 0; r < y.d[i].rows(); ++r)
                for (int cc = 0; cc < y.d[i].cols(); ++cc)
                    m.at(x.d[i].rows() + r, x.d[i].cols() + cc) =
                        y.d[i].at(r, cc);
            c.d[i] = std::move(m);
        }
        return c;
    };
    SelmerInstance<T> out;
    out.v = sum_complex(a.v, b.v);
    out.w = sum_complex(a.w, b.w);
    for (int i = 0; i < 4; ++i) {
        const Mat<T>& x = a.chain[static_cast<size_t>(i)];
        const Mat<T>& y = b.chain[static_cast<size_t>(i)];
        Mat<T> m(x.rows() + y.rows(), x.cols() + y.cols(), Tr::zero());
        for (int r = 0; r < x.rows(); ++r)
            for (int cc = 0; cc < x.cols(); ++cc) m.at(r, cc) = x.at(r, cc);
        for (int r = 0; r < y.rows(); ++r)
            for (int cc = 0; cc < y.cols(); ++cc)
                m.at(x.rows() + r, x.cols() + cc) = y.at(r, cc);
        out.chain[static_cast<size_t>(i)] = std::move(m);
    }
    return out;
}

// ---- instance files and report tables ----

/* Instance text format, fixed directive order, one matrix row per line:
 *
 *   ring integers            (or: ring polynomials)
 *   complex V 0 1 0 0
 *   complex W 0 1 0 0
 *   d V 0 ... d V 2, d W 0 ... d W 2, map 0 ... map 3
 *
 * each directive followed by its matrix rows (omitted when the matrix has
 * no entries). Integer entries are plain literals; polynomial entries are
 * colon-separated rationals from the constant coefficient up. */
inline RingKind instance_ring(const std::string& text) {
    std::istringstream is(text);
    std::string word;
    is >> word;
    if (word != "ring") throw ParseError("instance: expected 'ring' first");
    is >> word;
    if (word == "integers") return RingKind::Integers;
    if (word == "polynomials") return RingKind::RationalPolynomials;
    throw ParseError("instance: unknown ring '" + word + "'");
}

namespace detail {

template <class T>
void emit_matrix(std::ostringstream& os, const Mat<T>& m) {
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j) os << ' ';
            os << EuclideanTraits<T>::to_text(m.at(i, j));
        }
        if (m.cols()) os << '\n';
    }
}

template <class T>
Mat<T> read_matrix(std::istream& is, long rows, long cols,
                   const std::string& what) {
    Mat<T> m(static_cast<int>(rows), static_cast<int>(cols),
             EuclideanTraits<T>::zero());
    if (rows == 0 || cols == 0) return m;
    for (long i = 0; i < rows; ++i) {
        std::string line;
        do {
            if (!std::getline(is, line))
                throw ParseError("instance: missing rows for " + what);
        } while (line.empty());
        std::istringstream ls(line);
        std::string tok;
        for (long j = 0; j < cols; ++j) {
            if (!(ls >> tok))
                throw ParseError("instance: short row in " + what);
            m.at(static_cast<int>(i), static_cast<int>(j)) =
                EuclideanTraits<T>::from_text(tok);
        }
        if (ls >> tok) throw ParseError("instance: long row in " + what);
    }
    return m;
}

inline void expect_directive(std::istream& is, const std::string& want) {
    std::string line;
    do {
        if (!std::getline(is, line))
            throw ParseError("instance: missing directive '" + want + "'");
    } while (line.empty());
    if (line != want)
        throw ParseError("instance: expected '" + want + "', got '" + line +
                         "'");
}

} // namespace detail

template <class T>
std::string instance_to_text(const SelmerInstance<T>& inst) {
    std::ostringstream os;
    os << "ring " << EuclideanTraits<T>::ring_name() << '\n';
    os << "complex V";
    for (long r : inst.v.ranks) os << ' ' << r;
    os << '\n';
    os << "complex W";
    for (long r : inst.w.ranks) os << ' ' << r;
    os << '\n';
    for (int i = 0; i < 3; ++i) {
        os << "d V " << i << '\n';
        detail::emit_matrix(os, inst.v.d[i]);
    }
    for (int i = 0; i < 3; ++i) {
        os << "d W " << i << '\n';
        detail::emit_matrix(os, inst.w.d[i]);
    }
    for (int i = 0; i < 4; ++i) {
        os << "map " << i << '\n';
        detail::emit_matrix(os, inst.chain[static_cast<size_t>(i)]);
    }
    return os.str();
}

template <class T>
SelmerInstance<T> instance_from_text(const std::string& text) {
    std::istringstream is(text);
    detail::expect_directive(is,
                             std::string("ring ") +
                                 EuclideanTraits<T>::ring_name());
    auto read_ranks = [&](const char* name) {
        std::string line;
        do {
            if (!std::getline(is, line))
                throw ParseError("instance: missing complex header");
        } while (line.empty());
        std::istringstream ls(line);
        std::string word, tag;
        ls >> word >> tag;
        if (word != "complex" || tag != name)
            throw ParseError("instance: expected 'complex " +
                             std::string(name) + "'");
        std::array<long, 4> ranks{};
        for (long& r : ranks)
            if (!(ls >> r) || r < 0)
                throw ParseError("instance: bad ranks for complex " +
                                 std::string(name));
        return ranks;
    };
    SelmerInstance<T> inst;
    inst.v.ranks = read_ranks("V");
    inst.w.ranks = read_ranks("W");
    for (int i = 0; i < 3; ++i) {
        detail::expect_directive(is, "d V " + std::to_string(i));
        inst.v.d[i] = detail::read_matrix<T>(
            is, inst.v.ranks[static_cast<size_t>(i + 1)],
            inst.v.ranks[static_cast<size_t>(i)], "d V " + std::to_string(i));
    }
    for (int i = 0; i < 3; ++i) {
        detail::expect_directive(is, "d W " + std::to_string(i));
        inst.w.d[i] = detail::read_matrix<T>(
            is, inst.w.ranks[static_cast<size_t>(i + 1)],
            inst.w.ranks[static_cast<size_t>(i)], "d W " + std::to_string(i));
    }
    for (int i = 0; i < 4; ++i) {
        detail::expect_directive(is, "map " + std::to_string(i));
        inst.chain[static_cast<size_t>(i)] = detail::read_matrix<T>(
            is, inst.w.ranks[static_cast<size_t>(i)],
            inst.v.ranks[static_cast<size_t>(i)], "map " + std::to_string(i));
    }
    validate_instance(inst);
    return inst;
}

template <class T>
std::string semicontinuity_to_text(const SemicontinuityReport<T>& rep) {
    using Tr = EuclideanTraits<T>;
    std::ostringstream os;
    os << "semicontinuity r=" << rep.generic_rank << " exceptional=";
    if (rep.predicted_exceptional.empty()) {
        os << "none";
    } else {
        for (size_t i = 0; i < rep.predicted_exceptional.size(); ++i) {
            if (i) os << ',';
            os << Tr::to_text(rep.predicted_exceptional[i]);
        }
    }
    os << " lower_bound=" << (rep.lower_bound_ok ? "ok" : "violated")
       << " prediction=" << (rep.prediction_exact ? "exact" : "mismatch")
       << '\n';
    for (const SemicontinuityRow<T>& row : rep.rows) {
        os << "f=" << Tr::to_text(row.f) << " dim=" << row.dim
           << " expect=" << row.predicted_dim << ' ';
        if (!row.precondition_ok)
            os << "unclaimed";
        else if (row.dim > rep.generic_rank)
            os << "jump";
        else
            os << "eq";
        os << '\n';
    }
    return os.str();
}

template <class T>
std::string form1_to_text(const Form1Report<T>& rep) {
    std::ostringstream os;
    os << "form1 f=" << EuclideanTraits<T>::to_text(rep.f);
    if (!rep.precondition_ok) {
        os << " precondition=failed dim=" << rep.specialized_dim << '\n';
        return os.str();
    }
    os << " precondition=ok rank=" << rep.generic_rank
       << " tensor=" << rep.tensor_dim << " dim=" << rep.specialized_dim
       << " injective=" << (rep.injective ? "yes" : "no")
       << " coker=" << rep.coker_dim
       << " bound=" << rep.h2_torsion_rank + rep.coker_u_torsion_rank
       << " holds=" << (rep.bound_holds ? "yes" : "no") << '\n';
    return os.str();
}

} // namespace phigamma
