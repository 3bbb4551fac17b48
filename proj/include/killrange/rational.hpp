#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace killrange {

/// Exact arbitrary-precision rational, canonical form (reduced, positive
/// denominator) maintained by GMP.
using Rat = mpq_class;

inline Rat rat_from_string(const std::string& s) {
    Rat r;
    if (r.set_str(s, 10) != 0)
        throw std::invalid_argument("bad rational literal: " + s);
    r.canonicalize();
    return r;
}

inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

/// mpq_class(n, d) does not reduce; this does.
inline Rat make_rat(long num, long den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

/// gcd of two rationals as a positive rational (gcd of numerators over lcm of
/// denominators); gcd(0,0) = 0.
inline Rat rat_gcd(const Rat& a, const Rat& b) {
    mpz_class n;
    mpz_gcd(n.get_mpz_t(), a.get_num().get_mpz_t(), b.get_num().get_mpz_t());
    mpz_class d;
    mpz_lcm(d.get_mpz_t(), a.get_den().get_mpz_t(), b.get_den().get_mpz_t());
    if (n == 0) return Rat(0);
    Rat r(n, d);
    r.canonicalize();
    return r;
}

}  // namespace killrange
