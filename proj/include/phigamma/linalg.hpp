#pragma once

/* Dense linear algebra over capped-precision scalars. Rank and kernel
 * decisions route every zero test through the PrecisionPolicy; a pivot is
 * always chosen with minimal valuation among certified-nonzero candidates
 * (p-adic partial pivoting), and an undecidable configuration raises
 * AmbiguousAtPrecision instead of guessing. */

#include <gmpxx.h>

#include <vector>

#include "errors.hpp"
#include "padic.hpp"
#include "quadratic.hpp"

namespace phigamma {

template <class S>
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols, const S& fill)
        : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    S& at(int r, int c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
    const S& at(int r, int c) const {
        return a_[static_cast<size_t>(r) * cols_ + c];
    }

    void swap_rows(int r1, int r2) {
        if (r1 == r2) return;
        for (int c = 0; c < cols_; ++c) std::swap(at(r1, c), at(r2, c));
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<S> a_;
};


template <class S>
struct Echelon {
    Mat<S> m;                    // reduced row echelon form
    std::vector<int> pivot_cols; // one per pivot row, in order
    int rank = 0;
};

// Gauss-Jordan with guarded pivoting.
template <class S>
Echelon<S> echelonize(Mat<S> m, const PrecisionPolicy& pol) {
    Echelon<S> out;
    int rows = m.rows(), cols = m.cols();
    int lead = 0;
    for (int c = 0; c < cols && lead < rows; ++c) {
        int piv = -1;
        bool saw_ambiguous = false;
        mpq_class best_val;
        for (int r = lead; r < rows; ++r) {
            switch (zero_test(m.at(r, c), pol)) {
            case ZeroTest::DefinitelyNonzero: {
                mpq_class v = ScalarTraits<S>::valuation(m.at(r, c));
                if (piv < 0 || v < best_val) {
                    piv = r;
                    best_val = v;
                }
                break;
            }
            case ZeroTest::Ambiguous:
                saw_ambiguous = true;
                break;
            case ZeroTest::DefinitelyZero:
                break;
            }
        }
        if (piv < 0) {
            if (saw_ambiguous)
                throw AmbiguousAtPrecision(
                    "echelonize: column " + std::to_string(c) +
                    " has no certified pivot but undecided entries");
            continue;
        }
        m.swap_rows(lead, piv);
        S inv = m.at(lead, c);
        for (int cc = 0; cc < cols; ++cc) m.at(lead, cc) = m.at(lead, cc) / inv;
        for (int r = 0; r < rows; ++r) {
            if (r == lead) continue;
            if (m.at(r, c).is_zeroish()) continue; // nothing numeric to clear
            S f = m.at(r, c);
            for (int cc = 0; cc < cols; ++cc)
                m.at(r, cc) = m.at(r, cc) - f * m.at(lead, cc);
        }
        out.pivot_cols.push_back(c);
        ++lead;
    }
    out.rank = lead;
    out.m = std::move(m);
    return out;
}

template <class S>
int rank(const Mat<S>& m, const PrecisionPolicy& pol) {
    return echelonize(m, pol).rank;
}

/* Gaussian elimination with complete min-valuation pivoting: every step picks
 * the smallest-valuation certified-nonzero entry of the whole remaining
 * submatrix. Over a discrete-valuation scalar the pivot valuations then agree
 * with the elementary divisors, so smallness that is spread across many
 * near-unit diagonal entries (e.g. a triangular system whose back-substitution
 * amplifies step by step) is concentrated into trailing pivots where the
 * zero threshold can see it. Column-sequential pivoting misses exactly that. */
template <class S>
std::vector<mpq_class> pivot_valuations(Mat<S> m, const PrecisionPolicy& pol) {
    int rows = m.rows(), cols = m.cols();
    std::vector<char> row_used(rows, 0), col_used(cols, 0);
    std::vector<mpq_class> vals;
    for (int step = 0; step < std::min(rows, cols); ++step) {
        int pr = -1, pc = -1;
        bool saw_ambiguous = false;
        mpq_class best_val;
        for (int r = 0; r < rows; ++r) {
            if (row_used[r]) continue;
            for (int c = 0; c < cols; ++c) {
                if (col_used[c]) continue;
                switch (zero_test(m.at(r, c), pol)) {
                case ZeroTest::DefinitelyNonzero: {
                    mpq_class v = ScalarTraits<S>::valuation(m.at(r, c));
                    if (pr < 0 || v < best_val) {
                        pr = r;
                        pc = c;
                        best_val = v;
                    }
                    break;
                }
                case ZeroTest::Ambiguous:
                    saw_ambiguous = true;
                    break;
                case ZeroTest::DefinitelyZero:
                    break;
                }
            }
        }
        if (pr < 0) {
            if (saw_ambiguous)
                throw AmbiguousAtPrecision(
                    "pivot_valuations: no certified pivot left but undecided "
                    "entries remain");
            break;
        }
        S piv = m.at(pr, pc);
        for (int r = 0; r < rows; ++r) {
            if (row_used[r] || r == pr) continue;
            if (m.at(r, pc).is_zeroish()) continue;
            S f = m.at(r, pc) / piv;
            for (int c = 0; c < cols; ++c) {
                if (col_used[c]) continue;
                m.at(r, c) = m.at(r, c) - f * m.at(pr, c);
            }
        }
        row_used[pr] = 1;
        col_used[pc] = 1;
        vals.push_back(best_val);
    }
    return vals;
}

// Rank decided on elementary-divisor valuations instead of per-column pivots.
template <class S>
int divisor_rank(const Mat<S>& m, const PrecisionPolicy& pol) {
    return static_cast<int>(pivot_valuations(m, pol).size());
}

template <class S>
int kernel_dim(const Mat<S>& m, const PrecisionPolicy& pol) {
    return m.cols() - echelonize(m, pol).rank;
}

// Basis of the right kernel (one vector per free column).
template <class S>
std::vector<std::vector<S>> kernel_basis(const Mat<S>& m,
                                         const PrecisionPolicy& pol) {
    if (m.rows() == 0 || m.cols() == 0)
        throw std::invalid_argument("kernel_basis: empty matrix");
    Echelon<S> e = echelonize(m, pol);
    int n = pol.abs_precision;
    long p = prime_of(m.at(0, 0));
    long ambient_disc = disc_of(m.at(0, 0));
    std::vector<int> pivot_of_col(m.cols(), -1);
    for (size_t i = 0; i < e.pivot_cols.size(); ++i)
        pivot_of_col[e.pivot_cols[i]] = static_cast<int>(i);
    std::vector<std::vector<S>> basis;
    for (int c = 0; c < m.cols(); ++c) {
        if (pivot_of_col[c] >= 0) continue;
        std::vector<S> v(m.cols(), ScalarTraits<S>::zero(p, n, ambient_disc));
        v[c] = ScalarTraits<S>::one(p, n, ambient_disc);
        for (int cc = 0; cc < m.cols(); ++cc)
            if (pivot_of_col[cc] >= 0)
                v[cc] = -e.m.at(pivot_of_col[cc], c);
        basis.push_back(std::move(v));
    }
    return basis;
}

// Matrix-vector product.
template <class S>
std::vector<S> matvec(const Mat<S>& m, const std::vector<S>& v) {
    if (static_cast<int>(v.size()) != m.cols())
        throw std::invalid_argument("matvec: size mismatch");
    std::vector<S> out;
    out.reserve(m.rows());
    for (int r = 0; r < m.rows(); ++r) {
        S acc = m.at(r, 0) * v[0];
        for (int c = 1; c < m.cols(); ++c) acc = acc + m.at(r, c) * v[c];
        out.push_back(acc);
    }
    return out;
}

// Stack two matrices with equal column count (joint kernel computations).
template <class S>
Mat<S> vstack(const Mat<S>& a, const Mat<S>& b) {
    if (a.cols() != b.cols())
        throw std::invalid_argument("vstack: column mismatch");
    if (a.rows() == 0) return b;
    if (b.rows() == 0) return a;
    Mat<S> out(a.rows() + b.rows(), a.cols(), a.at(0, 0));
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) out.at(r, c) = a.at(r, c);
    for (int r = 0; r < b.rows(); ++r)
        for (int c = 0; c < b.cols(); ++c) out.at(a.rows() + r, c) = b.at(r, c);
    return out;
}

} // namespace phigamma
