#pragma once

// Exact rational-integer helpers over GMP: roots, rounding, factorization and
// the Kronecker symbol.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "uqf/error.hpp"

namespace uqf {

using Integer = mpz_class;
using Rational = mpq_class;

inline Integer isqrt(const Integer& n) {
    if (sgn(n) < 0) fail(ErrorKind::DomainError, "isqrt of negative integer");
    Integer r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline bool is_square(const Integer& n) {
    return sgn(n) >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

inline Integer floor_div(const Integer& a, const Integer& b) {
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline Integer ceil_div(const Integer& a, const Integer& b) {
    Integer q;
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

/// Nonnegative residue of a modulo |m|.
inline Integer mod_floor(const Integer& a, const Integer& m) {
    Integer r;
    Integer am = abs(m);
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), am.get_mpz_t());
    return r;
}

inline Integer floor(const Rational& q) {
    return floor_div(q.get_num(), q.get_den());
}

inline Integer ceil(const Rational& q) {
    return ceil_div(q.get_num(), q.get_den());
}

inline Integer gcd(const Integer& a, const Integer& b) {
    Integer g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

inline Integer lcm(const Integer& a, const Integer& b) {
    Integer l;
    mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return l;
}

/// g = gcd(a, b) = s*a + t*b.
struct Bezout {
    Integer g, s, t;
};

inline Bezout xgcd(const Integer& a, const Integer& b) {
    Bezout r;
    mpz_gcdext(r.g.get_mpz_t(), r.s.get_mpz_t(), r.t.get_mpz_t(), a.get_mpz_t(),
               b.get_mpz_t());
    return r;
}

inline Integer binomial(unsigned long n, unsigned long k) {
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

inline Integer pow(const Integer& base, unsigned long e) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline std::int64_t to_i64(const Integer& n) {
    if (!n.fits_slong_p()) fail(ErrorKind::RangeError, "integer " + n.get_str() + " exceeds 64 bits");
    return n.get_si();
}

inline std::string to_string(const Rational& q) {
    return q.get_str();
}

/// Trial-division squarefreeness; intended for desk-scale arguments.
inline bool is_squarefree(std::int64_t n) {
    if (n == 0) return false;
    if (n < 0) n = -n;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0) return false;
        }
    }
    return true;
}

using Factorization = std::vector<std::pair<Integer, unsigned>>;

/// Prime factorization of |n| by trial division, primes ascending.
inline Factorization factor_integer(Integer n) {
    Factorization out;
    n = abs(n);
    if (n <= 1) return out;
    auto take = [&](const Integer& p) {
        unsigned e = 0;
        while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
            n /= p;
            ++e;
        }
        if (e) out.emplace_back(p, e);
    };
    take(2);
    take(3);
    // 6k +- 1 wheel
    for (Integer p = 5; p * p <= n; p += 6) {
        take(p);
        Integer p2 = p + 2;
        take(p2);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

inline bool is_prime(const Integer& n) {
    if (n < 2) return false;
    auto f = factor_integer(n);
    return f.size() == 1 && f.front().second == 1;
}

/// Classical divisor sum sigma_1(n) for n >= 1.
inline Integer divisor_sum(const Integer& n) {
    Integer s = 1;
    for (const auto& [p, e] : factor_integer(n)) {
        Integer term = 1, pk = 1;
        for (unsigned i = 0; i < e; ++i) {
            pk *= p;
            term += pk;
        }
        s *= term;
    }
    return s;
}

/// Kronecker symbol (a|n) for any integers a, n.
inline int kronecker(std::int64_t a, std::int64_t n) {
    Integer A = a, N = n;
    return mpz_kronecker(A.get_mpz_t(), N.get_mpz_t());
}

inline int kronecker(const Integer& a, const Integer& n) {
    return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t());
}

/// num / den in lowest terms.
inline Rational ratio(const Integer& num, const Integer& den) {
    if (den == 0) fail(ErrorKind::DivisionByZero, "zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// Parse "p", "-p" or "p/q" into a canonical rational.
inline Rational parse_rational(const std::string& text) {
    Rational q;
    if (text.empty() || q.set_str(text, 10) != 0)
        fail(ErrorKind::ParseError, "not a rational: '" + text + "'");
    if (q.get_den() == 0) fail(ErrorKind::DivisionByZero, "zero denominator in '" + text + "'");
    q.canonicalize();
    return q;
}

}  // namespace uqf
