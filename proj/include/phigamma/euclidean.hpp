#pragma once

/* Exact linear algebra over the two coefficient rings used by the Selmer
 * machinery: the rational integers and univariate polynomials over the
 * rationals. Both are Euclidean domains, so one Smith-normal-form routine
 * with unimodular transforms serves them both; kernels, exact solving, and
 * invariant factors of cokernels all read off the decomposition. Residue
 * arithmetic modulo a prime element (a prime number, or an irreducible
 * polynomial of degree at most two) gives ranks over the quotient field. */

#include <gmpxx.h>

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace phigamma {

/* Univariate polynomial over Q, coefficient c(i) on x^i, no trailing zero
 * coefficients stored. The textual form is colon-separated rationals from
 * the constant term up: "2", "0:1" is x, "-3:0:1" is x^2 - 3. */
class PolyQ {
public:
    PolyQ() = default;
    PolyQ(const mpq_class& c) {
        if (c != 0) c_.push_back(c);
    }
    PolyQ(long c) : PolyQ(mpq_class(c)) {}

    static PolyQ from_coeffs(std::vector<mpq_class> c) {
        PolyQ f;
        f.c_ = std::move(c);
        f.trim();
        return f;
    }
    static PolyQ x() { return from_coeffs({0, 1}); }

    // degree of the zero polynomial is -1
    long degree() const { return static_cast<long>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    mpq_class coeff(long i) const {
        if (i < 0 || i > degree()) return 0;
        return c_[static_cast<size_t>(i)];
    }
    const mpq_class& leading() const { return c_.back(); }

    friend PolyQ operator+(const PolyQ& a, const PolyQ& b) {
        std::vector<mpq_class> c(std::max(a.c_.size(), b.c_.size()));
        for (size_t i = 0; i < c.size(); ++i)
            c[i] = a.coeff(static_cast<long>(i)) + b.coeff(static_cast<long>(i));
        return from_coeffs(std::move(c));
    }
    friend PolyQ operator-(const PolyQ& a, const PolyQ& b) {
        std::vector<mpq_class> c(std::max(a.c_.size(), b.c_.size()));
        for (size_t i = 0; i < c.size(); ++i)
            c[i] = a.coeff(static_cast<long>(i)) - b.coeff(static_cast<long>(i));
        return from_coeffs(std::move(c));
    }
    PolyQ operator-() const {
        std::vector<mpq_class> c(c_.size());
        for (size_t i = 0; i < c_.size(); ++i) c[i] = -c_[i];
        return from_coeffs(std::move(c));
    }
    friend PolyQ operator*(const PolyQ& a, const PolyQ& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<mpq_class> c(a.c_.size() + b.c_.size() - 1);
        for (size_t i = 0; i < a.c_.size(); ++i)
            for (size_t j = 0; j < b.c_.size(); ++j)
                c[i + j] += a.c_[i] * b.c_[j];
        return from_coeffs(std::move(c));
    }
    friend bool operator==(const PolyQ& a, const PolyQ& b) {
        return a.c_ == b.c_;
    }
    friend bool operator!=(const PolyQ& a, const PolyQ& b) { return !(a == b); }

    // Euclidean division: a = q b + r with deg r < deg b
    static void divmod(const PolyQ& a, const PolyQ& b, PolyQ& q, PolyQ& r) {
        if (b.is_zero()) throw DomainError("PolyQ: division by zero");
        std::vector<mpq_class> rem(a.c_);
        std::vector<mpq_class> quo;
        long db = b.degree();
        while (static_cast<long>(rem.size()) - 1 >= db) {
            mpq_class lead = rem.back() / b.leading();
            long shift = static_cast<long>(rem.size()) - 1 - db;
            if (static_cast<long>(quo.size()) < shift + 1)
                quo.resize(static_cast<size_t>(shift + 1));
            quo[static_cast<size_t>(shift)] = lead;
            for (long i = 0; i <= db; ++i)
                rem[static_cast<size_t>(shift + i)] -= lead * b.coeff(i);
            while (!rem.empty() && rem.back() == 0) rem.pop_back();
        }
        q = from_coeffs(std::move(quo));
        r = from_coeffs(std::move(rem));
    }

    std::string to_text() const {
        if (is_zero()) return "0";
        std::string s;
        for (size_t i = 0; i < c_.size(); ++i) {
            if (i) s += ':';
            s += c_[i].get_str();
        }
        return s;
    }
    static PolyQ from_text(const std::string& s) {
        std::vector<mpq_class> c;
        std::istringstream is(s);
        std::string item;
        while (std::getline(is, item, ':')) {
            if (item.empty()) throw ParseError("PolyQ: empty coefficient");
            mpq_class q;
            if (q.set_str(item, 10) != 0)
                throw ParseError("PolyQ: bad coefficient '" + item + "'");
            q.canonicalize();
            c.push_back(std::move(q));
        }
        if (c.empty()) throw ParseError("PolyQ: empty literal");
        return from_coeffs(std::move(c));
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<mpq_class> c_;
};

/* Ring interface consumed by the Smith-normal-form routine: exact ring
 * operations, Euclidean division whose remainder strictly shrinks the size
 * measure, and a canonical associate (positive integers, monic polynomials)
 * so invariant factors come out in a unique form. */
template <class T>
struct EuclideanTraits;

template <>
struct EuclideanTraits<mpz_class> {
    static mpz_class zero() { return 0; }
    static mpz_class one() { return 1; }
    static bool is_zero(const mpz_class& a) { return a == 0; }
    static bool is_unit(const mpz_class& a) { return a == 1 || a == -1; }
    static mpz_class size(const mpz_class& a) { return abs(a); }
    static void divmod(const mpz_class& a, const mpz_class& b, mpz_class& q,
                       mpz_class& r) {
        if (b == 0) throw DomainError("integers: division by zero");
        mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(),
                    b.get_mpz_t());
    }
    // unit u with u * a canonical
    static mpz_class canonical_unit(const mpz_class& a) {
        return a < 0 ? -1 : 1;
    }
    static mpz_class unit_inverse(const mpz_class& u) { return u; }
    static bool less(const mpz_class& a, const mpz_class& b) { return a < b; }
    static const char* ring_name() { return "integers"; }
    static std::string to_text(const mpz_class& a) { return a.get_str(); }
    static mpz_class from_text(const std::string& s) {
        mpz_class a;
        if (a.set_str(s, 10) != 0)
            throw ParseError("integers: bad literal '" + s + "'");
        return a;
    }
};

template <>
struct EuclideanTraits<PolyQ> {
    static PolyQ zero() { return {}; }
    static PolyQ one() { return PolyQ(1); }
    static bool is_zero(const PolyQ& a) { return a.is_zero(); }
    static bool is_unit(const PolyQ& a) { return a.degree() == 0; }
    static mpz_class size(const PolyQ& a) { return a.degree() + 1; }
    static void divmod(const PolyQ& a, const PolyQ& b, PolyQ& q, PolyQ& r) {
        PolyQ::divmod(a, b, q, r);
    }
    static PolyQ canonical_unit(const PolyQ& a) {
        if (a.is_zero()) return one();
        return PolyQ(mpq_class(1) / a.leading());
    }
    static PolyQ unit_inverse(const PolyQ& u) {
        if (u.degree() != 0) throw DomainError("PolyQ: not a unit");
        return PolyQ(mpq_class(1) / u.coeff(0));
    }
    // degree first, then coefficients from the top: a strict total order
    static bool less(const PolyQ& a, const PolyQ& b) {
        if (a.degree() != b.degree()) return a.degree() < b.degree();
        for (long i = a.degree(); i >= 0; --i)
            if (a.coeff(i) != b.coeff(i)) return a.coeff(i) < b.coeff(i);
        return false;
    }
    static const char* ring_name() { return "polynomials"; }
    static std::string to_text(const PolyQ& a) { return a.to_text(); }
    static PolyQ from_text(const std::string& s) { return PolyQ::from_text(s); }
};

// ---- small dense helpers over an exact ring ----

template <class T>
Mat<T> e_identity(int n) {
    using Tr = EuclideanTraits<T>;
    Mat<T> m(n, n, Tr::zero());
    for (int i = 0; i < n; ++i) m.at(i, i) = Tr::one();
    return m;
}

template <class T>
Mat<T> e_mul(const Mat<T>& a, const Mat<T>& b) {
    using Tr = EuclideanTraits<T>;
    if (a.cols() != b.rows()) throw DomainError("e_mul: shape mismatch");
    Mat<T> c(a.rows(), b.cols(), Tr::zero());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            if (Tr::is_zero(a.at(i, k))) continue;
            for (int j = 0; j < b.cols(); ++j)
                c.at(i, j) = c.at(i, j) + a.at(i, k) * b.at(k, j);
        }
    return c;
}

template <class T>
Mat<T> e_hstack(const Mat<T>& a, const Mat<T>& b) {
    using Tr = EuclideanTraits<T>;
    if (a.rows() != b.rows()) throw DomainError("e_hstack: row mismatch");
    Mat<T> c(a.rows(), a.cols() + b.cols(), Tr::zero());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) c.at(i, j) = a.at(i, j);
        for (int j = 0; j < b.cols(); ++j) c.at(i, a.cols() + j) = b.at(i, j);
    }
    return c;
}

template <class T>
bool e_is_zero_mat(const Mat<T>& a) {
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (!EuclideanTraits<T>::is_zero(a.at(i, j))) return false;
    return true;
}

template <class T>
bool e_equal(const Mat<T>& a, const Mat<T>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (!(a.at(i, j) == b.at(i, j))) return false;
    return true;
}

/* Smith normal form u * a * v = diag(divisors), with u, v unimodular and
 * u_inv tracked alongside so image bases come for free. The divisors are
 * canonical associates and form a divisibility chain; rank is the number of
 * nonzero divisors. */
template <class T>
struct Snf {
    Mat<T> u, u_inv, v;
    std::vector<T> divisors; // length min(rows, cols), zeros at the tail
    int rank = 0;
};

template <class T>
Snf<T> snf(Mat<T> a) {
    using Tr = EuclideanTraits<T>;
    const int rows = a.rows(), cols = a.cols();
    Snf<T> out;
    out.u = e_identity<T>(rows);
    out.u_inv = e_identity<T>(rows);
    out.v = e_identity<T>(cols);

    auto row_sub = [&](int i, int t, const T& q) { // row i -= q * row t
        for (int j = 0; j < cols; ++j) a.at(i, j) = a.at(i, j) - q * a.at(t, j);
        for (int j = 0; j < rows; ++j) {
            out.u.at(i, j) = out.u.at(i, j) - q * out.u.at(t, j);
            out.u_inv.at(j, t) = out.u_inv.at(j, t) + q * out.u_inv.at(j, i);
        }
    };
    auto col_sub = [&](int j, int t, const T& q) { // col j -= q * col t
        for (int i = 0; i < rows; ++i) a.at(i, j) = a.at(i, j) - q * a.at(i, t);
        for (int i = 0; i < cols; ++i)
            out.v.at(i, j) = out.v.at(i, j) - q * out.v.at(i, t);
    };
    auto row_swap = [&](int i, int t) {
        if (i == t) return;
        a.swap_rows(i, t);
        out.u.swap_rows(i, t);
        for (int j = 0; j < rows; ++j)
            std::swap(out.u_inv.at(j, i), out.u_inv.at(j, t));
    };
    auto col_swap = [&](int j, int t) {
        if (j == t) return;
        for (int i = 0; i < rows; ++i) std::swap(a.at(i, j), a.at(i, t));
        for (int i = 0; i < cols; ++i)
            std::swap(out.v.at(i, j), out.v.at(i, t));
    };
    auto row_scale = [&](int t, const T& w) { // row t *= w, w a unit
        T wi = Tr::unit_inverse(w);
        for (int j = 0; j < cols; ++j) a.at(t, j) = w * a.at(t, j);
        for (int j = 0; j < rows; ++j) {
            out.u.at(t, j) = w * out.u.at(t, j);
            out.u_inv.at(j, t) = wi * out.u_inv.at(j, t);
        }
    };
    auto row_add = [&](int t, int i) { // row t += row i
        for (int j = 0; j < cols; ++j) a.at(t, j) = a.at(t, j) + a.at(i, j);
        for (int j = 0; j < rows; ++j) {
            out.u.at(t, j) = out.u.at(t, j) + out.u.at(i, j);
            out.u_inv.at(j, i) = out.u_inv.at(j, i) - out.u_inv.at(j, t);
        }
    };

    const int steps = std::min(rows, cols);
    for (int t = 0; t < steps; ++t) {
        for (;;) {
            // smallest nonzero entry of the trailing submatrix to (t, t)
            int pi = -1, pj = -1;
            mpz_class best;
            for (int i = t; i < rows; ++i)
                for (int j = t; j < cols; ++j) {
                    if (Tr::is_zero(a.at(i, j))) continue;
                    mpz_class s = Tr::size(a.at(i, j));
                    if (pi < 0 || s < best) {
                        pi = i;
                        pj = j;
                        best = s;
                    }
                }
            if (pi < 0) break;
            row_swap(pi, t);
            col_swap(pj, t);

            bool clean = true;
            for (int i = t + 1; i < rows; ++i) {
                if (Tr::is_zero(a.at(i, t))) continue;
                T q, r;
                Tr::divmod(a.at(i, t), a.at(t, t), q, r);
                row_sub(i, t, q);
                if (!Tr::is_zero(r)) clean = false;
            }
            for (int j = t + 1; j < cols; ++j) {
                if (Tr::is_zero(a.at(t, j))) continue;
                T q, r;
                Tr::divmod(a.at(t, j), a.at(t, t), q, r);
                col_sub(j, t, q);
                if (!Tr::is_zero(r)) clean = false;
            }
            if (!clean) continue;

            // enforce that the pivot divides everything that remains, so
            // the diagonal comes out as a divisibility chain
            int bi = -1, bj = -1;
            for (int i = t + 1; i < rows && bi < 0; ++i)
                for (int j = t + 1; j < cols; ++j) {
                    T q, r;
                    Tr::divmod(a.at(i, j), a.at(t, t), q, r);
                    if (!Tr::is_zero(r)) {
                        bi = i;
                        bj = j;
                        break;
                    }
                }
            if (bi < 0) break;
            row_add(t, bi);
        }
        if (!Tr::is_zero(a.at(t, t)))
            row_scale(t, Tr::canonical_unit(a.at(t, t)));
    }

    out.divisors.resize(static_cast<size_t>(steps), Tr::zero());
    for (int t = 0; t < steps; ++t) {
        out.divisors[static_cast<size_t>(t)] = a.at(t, t);
        if (!Tr::is_zero(a.at(t, t))) out.rank = t + 1;
    }
    return out;
}

template <class T>
int rank_of(const Mat<T>& a) {
    return snf(a).rank;
}

// non-unit nonzero diagonal entries: the torsion invariant factors of the
// cokernel presented by the matrix
template <class T>
std::vector<T> invariant_factors(const Snf<T>& s) {
    std::vector<T> out;
    for (int t = 0; t < s.rank; ++t)
        if (!EuclideanTraits<T>::is_unit(s.divisors[static_cast<size_t>(t)]))
            out.push_back(s.divisors[static_cast<size_t>(t)]);
    return out;
}

// columns form a basis of { x : a x = 0 } as a free module
template <class T>
Mat<T> e_kernel_basis(const Mat<T>& a) {
    Snf<T> s = snf(a);
    int n = a.cols(), k = n - s.rank;
    Mat<T> out(n, k, EuclideanTraits<T>::zero());
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < n; ++i) out.at(i, j) = s.v.at(i, s.rank + j);
    return out;
}

// columns form a basis of the column span of a (divisor times u_inv column)
template <class T>
Mat<T> e_image_basis(const Mat<T>& a) {
    Snf<T> s = snf(a);
    Mat<T> out(a.rows(), s.rank, EuclideanTraits<T>::zero());
    for (int j = 0; j < s.rank; ++j)
        for (int i = 0; i < a.rows(); ++i)
            out.at(i, j) =
                s.divisors[static_cast<size_t>(j)] * s.u_inv.at(i, j);
    return out;
}

/* Exact solve a x = b over the ring; throws DomainError when some column of
 * b lies outside the column span of a. */
template <class T>
Mat<T> solve_exact(const Mat<T>& a, const Mat<T>& b) {
    using Tr = EuclideanTraits<T>;
    if (a.rows() != b.rows()) throw DomainError("solve_exact: row mismatch");
    Snf<T> s = snf(a);
    Mat<T> c = e_mul(s.u, b);
    Mat<T> y(a.cols(), b.cols(), Tr::zero());
    for (int i = 0; i < c.rows(); ++i)
        for (int j = 0; j < c.cols(); ++j) {
            if (i >= s.rank) {
                if (!Tr::is_zero(c.at(i, j)))
                    throw DomainError("solve_exact: no solution");
                continue;
            }
            T q, r;
            Tr::divmod(c.at(i, j), s.divisors[static_cast<size_t>(i)], q, r);
            if (!Tr::is_zero(r))
                throw DomainError("solve_exact: no divisible solution");
            y.at(i, j) = q;
        }
    return e_mul(s.v, y);
}

// ---- residue arithmetic modulo a ring element ----

template <class T>
struct ExtendedGcd {
    T g, s, t; // s a + t b = g, g canonical
};

template <class T>
ExtendedGcd<T> extended_gcd(const T& a, const T& b) {
    using Tr = EuclideanTraits<T>;
    T r0 = a, r1 = b;
    T s0 = Tr::one(), s1 = Tr::zero();
    T t0 = Tr::zero(), t1 = Tr::one();
    while (!Tr::is_zero(r1)) {
        T q, r;
        Tr::divmod(r0, r1, q, r);
        r0 = r1;
        r1 = r;
        T s2 = s0 - q * s1;
        s0 = s1;
        s1 = s2;
        T t2 = t0 - q * t1;
        t0 = t1;
        t1 = t2;
    }
    T u = Tr::canonical_unit(r0);
    return {u * r0, u * s0, u * t0};
}

template <class T>
T reduce_mod(const T& a, const T& f) {
    T q, r;
    EuclideanTraits<T>::divmod(a, f, q, r);
    return r;
}

// inverse of a modulo f; requires gcd(a, f) to be a unit
template <class T>
T inv_mod(const T& a, const T& f) {
    using Tr = EuclideanTraits<T>;
    ExtendedGcd<T> e = extended_gcd(a, f);
    if (!Tr::is_unit(e.g))
        throw DomainError("inv_mod: element not invertible");
    return reduce_mod<T>(Tr::unit_inverse(e.g) * e.s, f);
}

/* Rank of a matrix over the residue ring R/f by Gaussian elimination. For
 * prime f the quotient is a field and every nonzero residue is invertible;
 * a nonzero non-invertible residue means f was composite. */
template <class T>
int rank_mod(Mat<T> m, const T& f) {
    using Tr = EuclideanTraits<T>;
    const int rows = m.rows(), cols = m.cols();
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m.at(i, j) = reduce_mod(m.at(i, j), f);
    int rank = 0;
    for (int c = 0; c < cols && rank < rows; ++c) {
        int piv = -1;
        for (int r = rank; r < rows; ++r)
            if (!Tr::is_zero(m.at(r, c))) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        m.swap_rows(piv, rank);
        T pinv = inv_mod(m.at(rank, c), f);
        for (int j = c; j < cols; ++j)
            m.at(rank, j) = reduce_mod<T>(m.at(rank, j) * pinv, f);
        for (int r = 0; r < rows; ++r) {
            if (r == rank || Tr::is_zero(m.at(r, c))) continue;
            T factor = m.at(r, c);
            for (int j = c; j < cols; ++j)
                m.at(r, j) =
                    reduce_mod<T>(m.at(r, j) - factor * m.at(rank, j), f);
        }
        ++rank;
    }
    return rank;
}

// ---- prime elements ----

inline bool is_square_q(const mpq_class& q) {
    if (q < 0) return false;
    mpq_class c = q;
    c.canonicalize();
    return mpz_perfect_square_p(c.get_num().get_mpz_t()) &&
           mpz_perfect_square_p(c.get_den().get_mpz_t());
}

inline bool is_prime_elem(const mpz_class& a) {
    mpz_class n = abs(a);
    return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

/* Irreducibility over Q, implemented for the degrees the experiments use:
 * linear polynomials are prime, quadratics exactly when the discriminant is
 * not a rational square. Higher degrees are out of scope. */
inline bool is_prime_elem(const PolyQ& f) {
    long d = f.degree();
    if (d <= 0) return false;
    if (d == 1) return true;
    if (d == 2) {
        mpq_class a = f.coeff(2), b = f.coeff(1), c = f.coeff(0);
        return !is_square_q(b * b - 4 * a * c);
    }
    throw DomainError("is_prime_elem: degree > 2 not supported");
}

inline std::vector<long> primes_below(long n) {
    std::vector<long> out;
    std::vector<bool> sieve(static_cast<size_t>(std::max(n, 2L)), true);
    for (long i = 2; i < n; ++i) {
        if (!sieve[static_cast<size_t>(i)]) continue;
        out.push_back(i);
        for (long j = 2 * i; j < n; j += i) sieve[static_cast<size_t>(j)] = false;
    }
    return out;
}

} // namespace phigamma
