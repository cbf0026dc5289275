#pragma once

/* Independent reference implementations used only by the test suite. These
 * are deliberately written in the most boring way possible (exact rational
 * arithmetic, brute force) so they can serve as oracles for the production
 * code. */

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <random>
#include <vector>

namespace oracle {

// Lower-convex-hull slopes of points (i, v_i), as the multiset of root
// valuations (minus slopes), repeated by horizontal run. Brute force: for
// every candidate pair, check all points lie on or above the segment.
inline std::vector<mpq_class> hull_root_valuations(
    const std::vector<std::pair<long, mpq_class>>& pts) {
    std::vector<std::pair<long, mpq_class>> s = pts;
    std::sort(s.begin(), s.end());
    std::vector<mpq_class> out;
    size_t cur = 0;
    while (cur + 1 < s.size()) {
        // steepest descent first: among all j > cur pick the smallest slope,
        // ties broken by largest run
        size_t best = cur + 1;
        mpq_class best_slope =
            (s[cur + 1].second - s[cur].second) / (s[cur + 1].first - s[cur].first);
        for (size_t j = cur + 2; j < s.size(); ++j) {
            mpq_class sl =
                (s[j].second - s[cur].second) / (s[j].first - s[cur].first);
            if (sl < best_slope || (sl == best_slope && j > best)) {
                best = j;
                best_slope = sl;
            }
        }
        long run = s[best].first - s[cur].first;
        for (long r = 0; r < run; ++r) out.push_back(-best_slope);
        cur = best;
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Exact rank of a dense rational matrix by Gaussian elimination.
inline int rank_q(std::vector<std::vector<mpq_class>> m) {
    int rows = static_cast<int>(m.size());
    int cols = rows ? static_cast<int>(m[0].size()) : 0;
    int rank = 0;
    for (int c = 0; c < cols && rank < rows; ++c) {
        int piv = -1;
        for (int r = rank; r < rows; ++r)
            if (m[r][c] != 0) { piv = r; break; }
        if (piv < 0) continue;
        std::swap(m[rank], m[piv]);
        for (int r = 0; r < rows; ++r) {
            if (r == rank || m[r][c] == 0) continue;
            mpq_class f = m[r][c] / m[rank][c];
            for (int cc = c; cc < cols; ++cc) m[r][cc] -= f * m[rank][cc];
        }
        ++rank;
    }
    return rank;
}

// Kernel basis of a dense rational matrix.
inline std::vector<std::vector<mpq_class>> kernel_q(
    std::vector<std::vector<mpq_class>> m) {
    int rows = static_cast<int>(m.size());
    int cols = rows ? static_cast<int>(m[0].size()) : 0;
    std::vector<int> pivot_of_col(cols, -1);
    int rank = 0;
    for (int c = 0; c < cols && rank < rows; ++c) {
        int piv = -1;
        for (int r = rank; r < rows; ++r)
            if (m[r][c] != 0) { piv = r; break; }
        if (piv < 0) continue;
        std::swap(m[rank], m[piv]);
        mpq_class d = m[rank][c];
        for (int cc = 0; cc < cols; ++cc) m[rank][cc] /= d;
        for (int r = 0; r < rows; ++r) {
            if (r == rank || m[r][c] == 0) continue;
            mpq_class f = m[r][c];
            for (int cc = 0; cc < cols; ++cc) m[r][cc] -= f * m[rank][cc];
        }
        pivot_of_col[c] = rank;
        ++rank;
    }
    std::vector<std::vector<mpq_class>> basis;
    for (int c = 0; c < cols; ++c) {
        if (pivot_of_col[c] >= 0) continue;
        std::vector<mpq_class> v(cols, 0);
        v[c] = 1;
        for (int cc = 0; cc < cols; ++cc)
            if (pivot_of_col[cc] >= 0) v[cc] = -m[pivot_of_col[cc]][c];
        basis.push_back(v);
    }
    return basis;
}

// Elementary divisors of an integer matrix (naive Smith reduction).
inline std::vector<mpz_class> smith_divisors(
    std::vector<std::vector<mpz_class>> m) {
    size_t rows = m.size();
    size_t cols = rows ? m[0].size() : 0;
    std::vector<mpz_class> out;
    size_t t = 0;
    while (t < rows && t < cols) {
        // find a non-zero entry
        size_t pr = rows, pc = cols;
        mpz_class best = 0;
        for (size_t r = t; r < rows; ++r)
            for (size_t c = t; c < cols; ++c)
                if (m[r][c] != 0 &&
                    (best == 0 || abs(m[r][c]) < abs(best))) {
                    best = m[r][c];
                    pr = r;
                    pc = c;
                }
        if (pr == rows) break;
        std::swap(m[t], m[pr]);
        for (size_t r = 0; r < rows; ++r) std::swap(m[r][t], m[r][pc]);
        bool clean = false;
        while (!clean) {
            clean = true;
            for (size_t r = t + 1; r < rows; ++r)
                if (m[r][t] != 0) {
                    mpz_class q = m[r][t] / m[t][t];
                    for (size_t c = t; c < cols; ++c)
                        m[r][c] -= q * m[t][c];
                    if (m[r][t] != 0) {
                        std::swap(m[t], m[r]);
                        clean = false;
                    }
                }
            for (size_t c = t + 1; c < cols; ++c)
                if (m[t][c] != 0) {
                    mpz_class q = m[t][c] / m[t][t];
                    for (size_t r = t; r < rows; ++r)
                        m[r][c] -= q * m[r][t];
                    if (m[t][c] != 0) {
                        for (size_t r = 0; r < rows; ++r)
                            std::swap(m[r][t], m[r][c]);
                        clean = false;
                    }
                }
        }
        ++t;
    }
    for (size_t i = 0; i < t; ++i) out.push_back(abs(m[i][i]));
    // enforce divisibility chain
    for (size_t i = 0; i + 1 < out.size(); ++i)
        for (size_t j = i + 1; j < out.size(); ++j) {
            mpz_class g, l;
            mpz_gcd(g.get_mpz_t(), out[i].get_mpz_t(), out[j].get_mpz_t());
            if (g == 0) continue;
            l = out[i] / g * out[j];
            out[i] = g;
            out[j] = l;
        }
    std::sort(out.begin(), out.end());
    return out;
}

// Rank of an integer matrix modulo a prime, by plain elimination in longs.
inline int rank_fp(std::vector<std::vector<long>> m, long p) {
    auto norm = [&](long a) { return ((a % p) + p) % p; };
    auto inv = [&](long a) {
        long t = 0, nt = 1, r = p, nr = norm(a);
        while (nr) {
            long q = r / nr;
            t -= q * nt;
            std::swap(t, nt);
            r -= q * nr;
            std::swap(r, nr);
        }
        return norm(t);
    };
    int rows = static_cast<int>(m.size());
    int cols = rows ? static_cast<int>(m[0].size()) : 0;
    for (auto& row : m)
        for (auto& e : row) e = norm(e);
    int rank = 0;
    for (int c = 0; c < cols && rank < rows; ++c) {
        int piv = -1;
        for (int r = rank; r < rows; ++r)
            if (norm(m[r][c]) != 0) { piv = r; break; }
        if (piv < 0) continue;
        std::swap(m[rank], m[piv]);
        long d = inv(m[rank][c]);
        for (int cc = 0; cc < cols; ++cc) m[rank][cc] = norm(m[rank][cc] * d);
        for (int r = 0; r < rows; ++r) {
            if (r == rank || norm(m[r][c]) == 0) continue;
            long f = norm(m[r][c]);
            for (int cc = 0; cc < cols; ++cc)
                m[r][cc] = norm(m[r][cc] - f * m[rank][cc]);
        }
        ++rank;
    }
    return rank;
}

// Deterministic RNG helpers for property tests.
struct Rng {
    std::mt19937_64 g;
    explicit Rng(uint64_t seed) : g(seed) {}
    long pick(long lo, long hi) {
        return std::uniform_int_distribution<long>(lo, hi)(g);
    }
};

inline mpz_class binom(unsigned long n, unsigned long k) {
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return b;
}

// Matrix of T -> (1+T)^p - 1 on monomials: row j, column i holds
// [T^j]((1+T)^p - 1)^i, for 0 <= i <= K and 0 <= j <= pK.
inline std::vector<std::vector<mpq_class>> phi_matrix_q(long p, long K) {
    std::vector<std::vector<mpq_class>> F(
        static_cast<size_t>(p * K + 1),
        std::vector<mpq_class>(static_cast<size_t>(K + 1), 0));
    for (long i = 0; i <= K; ++i)
        for (long l = 0; l <= i; ++l) {
            mpz_class c = binom(i, l);
            if ((i - l) % 2) c = -c;
            for (long j = 0; j <= p * l; ++j)
                F[j][i] += mpq_class(c * binom(p * l, j));
        }
    return F;
}

// Matrix of phi∘psi on monomials via root averaging: the p-th roots of unity
// give (1/p) sum_zeta f(zeta(1+T) - 1), i.e. the p | k part of the binomial
// expansion.  Square of size K+1 (degrees can only drop).
inline std::vector<std::vector<mpq_class>> phi_psi_matrix_q(long p, long K) {
    std::vector<std::vector<mpq_class>> M(
        static_cast<size_t>(K + 1),
        std::vector<mpq_class>(static_cast<size_t>(K + 1), 0));
    for (long i = 0; i <= K; ++i)
        for (long k = 0; k <= i; k += p) {
            mpz_class c = binom(i, k);
            if ((i - k) % 2) c = -c;
            for (long j = 0; j <= k; ++j) M[j][i] += mpq_class(c * binom(k, j));
        }
    return M;
}

// psi on monomials, recovered by solving phi(y) = (phi∘psi)(x) against the
// lower-triangular phi matrix (diagonal p^i).
inline std::vector<std::vector<mpq_class>> psi_matrix_q(long p, long K) {
    std::vector<std::vector<mpq_class>> F = phi_matrix_q(p, K);
    std::vector<std::vector<mpq_class>> M = phi_psi_matrix_q(p, K);
    std::vector<std::vector<mpq_class>> Psi(
        static_cast<size_t>(K + 1),
        std::vector<mpq_class>(static_cast<size_t>(K + 1), 0));
    for (long i = 0; i <= K; ++i)
        for (long j = 0; j <= K; ++j) {
            mpq_class acc = M[j][i];
            for (long l = 0; l < j; ++l) acc -= F[j][l] * Psi[l][i];
            Psi[j][i] = acc / F[j][j];
        }
    return Psi;
}

} // namespace oracle
