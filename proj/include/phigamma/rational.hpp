#pragma once

/* Small helpers around GMP rationals. mpq_class is the one exact rational
 * type used everywhere (Newton-polygon slopes, Gauss weights, half-integer
 * valuations). */

#include <gmpxx.h>

#include <string>

namespace phigamma {

inline mpq_class make_q(long num, long den = 1) {
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

inline mpz_class q_floor(const mpq_class& q) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline mpz_class q_ceil(const mpq_class& q) {
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline bool q_is_integer(const mpq_class& q) { return q.get_den() == 1; }

inline std::string q_to_string(const mpq_class& q) {
    if (q_is_integer(q)) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// p-adic valuation of a non-zero integer.
inline long z_valuation(mpz_class n, long p) {
    if (n == 0) throw std::invalid_argument("z_valuation: zero input");
    long v = 0;
    mpz_class q, r;
    for (;;) {
        mpz_fdiv_qr_ui(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(),
                       static_cast<unsigned long>(p));
        if (r != 0) break;
        n = q;
        ++v;
    }
    return v;
}

inline mpz_class pow_ui(long base, unsigned long exp) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), exp);
    return r;
}

} // namespace phigamma
