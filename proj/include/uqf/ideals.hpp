#pragma once

// Fractional ideals of O_K stored as scale * (Z a + Z (b + omega)) with the
// pair (a, b) primitive, which gives a unique normal form.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "uqf/cfrac.hpp"
#include "uqf/error.hpp"
#include "uqf/integer.hpp"
#include "uqf/qfield.hpp"

namespace uqf {

class FracIdeal {
public:
    std::int64_t D() const { return D_; }
    QuadraticField field() const { return QuadraticField(D_); }
    const Rational& scale() const { return scale_; }
    const Integer& a() const { return a_; }
    const Integer& b() const { return b_; }

    Rational norm() const { return scale_ * scale_ * a_; }
    bool is_integral() const { return scale_.get_den() == 1; }
    bool is_unit() const { return scale_ == 1 && a_ == 1; }

    /// Z-basis {scale*a, scale*(b + omega)}.
    std::pair<FieldElement, FieldElement> basis() const {
        const QuadraticField K(D_);
        return {K.element(scale_ * a_), (K.element(Rational(b_)) + K.omega()) * scale_};
    }

    bool contains(const FieldElement& x) const {
        if (x.D() != D_) fail(ErrorKind::MixedFields, "membership across fields");
        const auto [s, t] = (x / scale_).omega_coords();
        if (t.get_den() != 1) return false;
        const Rational m = (s - t * b_) / a_;
        return m.get_den() == 1;
    }

    FracIdeal scaled(const Rational& r) const {
        if (sgn(r) == 0) fail(ErrorKind::ZeroIdeal, "scaling an ideal by zero");
        FracIdeal out = *this;
        out.scale_ = abs(scale_ * r);
        out.scale_.canonicalize();
        return out;
    }

    friend bool operator==(const FracIdeal& x, const FracIdeal& y) {
        return x.D_ == y.D_ && x.scale_ == y.scale_ && x.a_ == y.a_ && x.b_ == y.b_;
    }
    friend bool operator!=(const FracIdeal& x, const FracIdeal& y) { return !(x == y); }
    friend bool operator<(const FracIdeal& x, const FracIdeal& y) {
        const Rational nx = x.norm(), ny = y.norm();
        return std::tie(x.D_, nx, x.scale_, x.a_, x.b_) < std::tie(y.D_, ny, y.scale_, y.a_, y.b_);
    }

    std::string to_string() const {
        return "[" + scale_.get_str() + "]*(" + a_.get_str() + ", " + b_.get_str() + "+omega)";
    }

    /// Builds the normal form directly; verifies the ideal condition.
    static FracIdeal from_normal_form(const QuadraticField& K, const Rational& scale, const Integer& a,
                                      const Integer& b) {
        if (sgn(scale) <= 0 || a <= 0 || b < 0 || b >= a)
            fail(ErrorKind::PreconditionViolation, "bad ideal normal form");
        const Integer nb = b * b + b * K.omega_trace() + K.omega_norm();
        if (!mpz_divisible_p(nb.get_mpz_t(), a.get_mpz_t()))
            fail(ErrorKind::PreconditionViolation,
                 "(" + a.get_str() + ", " + b.get_str() + "+omega) is not an ideal");
        FracIdeal I;
        I.D_ = K.D();
        I.scale_ = scale;
        I.scale_.canonicalize();
        I.a_ = a;
        I.b_ = b;
        return I;
    }

private:
    FracIdeal() = default;
    std::int64_t D_ = 0;
    Rational scale_ = 1;
    Integer a_ = 1, b_ = 0;
};

inline FracIdeal unit_ideal(const QuadraticField& K) { return FracIdeal::from_normal_form(K, 1, 1, 0); }

/// Smallest fractional ideal containing all generators.
inline FracIdeal ideal_from_gens(const QuadraticField& K, const std::vector<FieldElement>& gens) {
    std::vector<std::pair<Rational, Rational>> coords;
    const FieldElement w = K.omega();
    for (const auto& g : gens) {
        if (g.D() != K.D()) fail(ErrorKind::MixedFields, "generator " + g.to_string());
        if (g.is_zero()) continue;
        coords.push_back(g.omega_coords());
        coords.push_back((g * w).omega_coords());
    }
    if (coords.empty()) fail(ErrorKind::ZeroIdeal, "all generators are zero");
    Integer L = 1;
    for (const auto& [s, t] : coords) L = lcm(lcm(L, s.get_den()), t.get_den());

    // Hermite normal form of the Z-span: {(A, 0), (B, C)} in omega coordinates
    Integer A = 0, B = 0, C = 0;
    for (const auto& [s, t] : coords) {
        const Integer u = Integer(s * L), v = Integer(t * L);
        if (sgn(v) == 0) {
            A = gcd(A, u);
            continue;
        }
        const Bezout bz = xgcd(C, v);
        // reduce the old pivot against the new vector; what is left has v = 0
        const Integer leftover = (v / bz.g) * B - (C / bz.g) * u;
        B = bz.s * B + bz.t * u;
        C = bz.g;
        A = gcd(A, leftover);
    }
    C = abs(C);
    A = abs(A);
    if (sgn(C) == 0 || sgn(A) == 0) fail(ErrorKind::ZeroIdeal, "degenerate module");
    if (!mpz_divisible_p(A.get_mpz_t(), C.get_mpz_t()) || !mpz_divisible_p(B.get_mpz_t(), C.get_mpz_t()))
        fail(ErrorKind::PreconditionViolation, "span is not an O_K-module");
    const Integer a = A / C;
    const Integer b = mod_floor(B / C, a);
    return FracIdeal::from_normal_form(K, Rational(C, L), a, b);
}

inline FracIdeal principal_ideal(const FieldElement& g) { return ideal_from_gens(g.field(), {g}); }

inline void check_same_field(const FracIdeal& I, const FracIdeal& J) {
    if (I.D() != J.D())
        fail(ErrorKind::MixedFields, "ideals of Q(sqrt(" + std::to_string(I.D()) + ")) and Q(sqrt(" +
                                         std::to_string(J.D()) + "))");
}

inline FracIdeal operator*(const FracIdeal& I, const FracIdeal& J) {
    check_same_field(I, J);
    const auto [i1, i2] = I.basis();
    const auto [j1, j2] = J.basis();
    return ideal_from_gens(I.field(), {i1 * j1, i1 * j2, i2 * j1, i2 * j2});
}

inline FracIdeal conj(const FracIdeal& I) {
    const auto [i1, i2] = I.basis();
    return ideal_from_gens(I.field(), {conj(i1), conj(i2)});
}

/// I^{-1} = conj(I) / N(I).
inline FracIdeal inverse(const FracIdeal& I) { return conj(I).scaled(1 / I.norm()); }

inline FracIdeal operator/(const FracIdeal& I, const FracIdeal& J) {
    check_same_field(I, J);
    return I * inverse(J);
}

/// Different (f'(omega)) and codifferent (inverse).
struct DifferentPair {
    FracIdeal different;
    FracIdeal codifferent;
};

inline DifferentPair different_codifferent(const QuadraticField& K) {
    const FieldElement fprime = K.omega() * Rational(2) - K.element(Rational(K.omega_trace()));
    FracIdeal diff = principal_ideal(fprime);
    return {diff, inverse(diff)};
}

// ---------------------------------------------------------------------------
// Factorization and divisor sums

struct PrimePower {
    FracIdeal prime;
    unsigned exponent;
};
using IdealFactorization = std::vector<PrimePower>;

enum class PrimeType { Split, Inert, Ramified };

inline PrimeType prime_type(const QuadraticField& K, const Integer& p) {
    const int k = kronecker(Integer(K.disc()), p);
    return k == 1 ? PrimeType::Split : (k == 0 ? PrimeType::Ramified : PrimeType::Inert);
}

namespace detail {

/// Square root of n modulo odd prime p (n a nonzero quadratic residue).
inline Integer sqrt_mod_prime(Integer n, const Integer& p) {
    n = mod_floor(n, p);
    if (sgn(n) == 0) return 0;
    Integer q = p - 1;
    unsigned long s = mpz_scan1(q.get_mpz_t(), 0);
    q >>= s;
    Integer z = 2;
    while (mpz_legendre(z.get_mpz_t(), p.get_mpz_t()) != -1) ++z;
    Integer m = s, c, t, r;
    mpz_powm(c.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    mpz_powm(t.get_mpz_t(), n.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    Integer e = (q + 1) / 2;
    mpz_powm(r.get_mpz_t(), n.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    while (t != 1) {
        unsigned long i = 0;
        Integer tt = t;
        while (tt != 1) {
            tt = mod_floor(tt * tt, p);
            ++i;
        }
        Integer b = c;
        for (unsigned long j = 0; j + i + 1 < m.get_ui(); ++j) b = mod_floor(b * b, p);
        m = i;
        c = mod_floor(b * b, p);
        t = mod_floor(t * c, p);
        r = mod_floor(r * b, p);
    }
    return r;
}

/// Roots r in [0, p) of r^2 + Tr(omega) r + N(omega) = N(r + omega) mod p.
inline std::vector<Integer> omega_roots_mod(const QuadraticField& K, const Integer& p) {
    std::vector<Integer> roots;
    const Integer tr = K.omega_trace(), nm = K.omega_norm();
    if (p == 2) {
        for (int r = 0; r < 2; ++r)
            if (mod_floor(Integer(r * r) + r * tr + nm, p) == 0) roots.push_back(r);
        return roots;
    }
    // r = (-tr +- sqrt(disc)) / 2 mod p
    const Integer root = sqrt_mod_prime(Integer(K.disc()), p);
    Integer inv2;
    const Integer two = 2;
    mpz_invert(inv2.get_mpz_t(), two.get_mpz_t(), p.get_mpz_t());
    for (const Integer& sq : {root, Integer(-root)}) {
        Integer r = mod_floor((-tr + sq) * inv2, p);
        if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace detail

/// Prime factorization of a nonzero integral ideal; primes sorted by (norm, b).
inline IdealFactorization factor(const FracIdeal& I) {
    if (!I.is_integral()) fail(ErrorKind::NotIntegral, I.to_string() + " is not integral");
    const QuadraticField K = I.field();
    std::map<FracIdeal, unsigned> exps;
    // primitive part: each p^e || a contributes one prime above p
    for (const auto& [p, e] : factor_integer(I.a())) {
        FracIdeal P = FracIdeal::from_normal_form(K, 1, p, mod_floor(I.b(), p));
        exps[P] += e;
    }
    // rational integer content
    for (const auto& [p, e] : factor_integer(I.scale().get_num())) {
        switch (prime_type(K, p)) {
        case PrimeType::Inert:
            exps[FracIdeal::from_normal_form(K, p, 1, 0)] += e;
            break;
        case PrimeType::Ramified: {
            const auto roots = detail::omega_roots_mod(K, p);
            exps[FracIdeal::from_normal_form(K, 1, p, roots.front())] += 2 * e;
            break;
        }
        case PrimeType::Split:
            for (const Integer& r : detail::omega_roots_mod(K, p)) exps[FracIdeal::from_normal_form(K, 1, p, r)] += e;
            break;
        }
    }
    IdealFactorization out;
    for (const auto& [P, e] : exps) out.push_back({P, e});
    return out;
}

inline FracIdeal product(const QuadraticField& K, const IdealFactorization& f) {
    FracIdeal r = unit_ideal(K);
    for (const auto& [P, e] : f)
        for (unsigned i = 0; i < e; ++i) r = r * P;
    return r;
}

/// sigma(I) = sum of N(J) over integral divisors J of I.
inline Integer sigma_ideal(const FracIdeal& I) {
    Integer total = 1;
    for (const auto& [P, e] : factor(I)) {
        const Integer np = Integer(P.norm());
        Integer term = 1, pk = 1;
        for (unsigned i = 0; i < e; ++i) {
            pk *= np;
            term += pk;
        }
        total *= term;
    }
    return total;
}

/// All integral ideals of norm exactly n, in normal-form order.
inline std::vector<FracIdeal> integral_ideals_of_norm(const QuadraticField& K, const Integer& n) {
    std::vector<FracIdeal> out;
    for (Integer q = 1; q * q <= n; ++q) {
        if (!mpz_divisible_p(n.get_mpz_t(), Integer(q * q).get_mpz_t())) continue;
        const Integer a = n / (q * q);
        for (Integer b = 0; b < a; ++b) {
            const Integer nb = b * b + b * K.omega_trace() + K.omega_norm();
            if (mpz_divisible_p(nb.get_mpz_t(), a.get_mpz_t()))
                out.push_back(FracIdeal::from_normal_form(K, Rational(q), a, b));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Generators via the cycle of reduced indefinite binary quadratic forms.

struct BinaryForm {
    Integer A, B, C;
    friend bool operator==(const BinaryForm& x, const BinaryForm& y) {
        return x.A == y.A && x.B == y.B && x.C == y.C;
    }
};

namespace detail {

struct Mat2 {
    Integer m00 = 1, m01 = 0, m10 = 0, m11 = 1;
    Mat2 operator*(const Mat2& o) const {
        return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11, m10 * o.m00 + m11 * o.m10,
                m10 * o.m01 + m11 * o.m11};
    }
};

inline bool is_reduced(const BinaryForm& f, const Integer& root) {
    // 0 < B < sqrt(disc) and sqrt(disc) - B < 2|A| < sqrt(disc) + B
    if (sgn(f.B) <= 0 || f.B > root) return false;
    const Integer twoA = 2 * abs(f.A);
    return twoA + f.B > root && twoA - f.B <= root;
}

/// One reduction step: (A,B,C) -> (C, r, (r^2 - disc)/(4C)) via [[0,-1],[1,s]].
inline std::pair<BinaryForm, Mat2> rho(const BinaryForm& f, const Integer& disc, const Integer& root) {
    const Integer c2 = 2 * abs(f.C);
    Integer r;
    if (abs(f.C) <= root) {
        r = root - mod_floor(root + f.B, c2);
    } else {
        r = mod_floor(-f.B, c2);
        if (r > abs(f.C)) r -= c2;
    }
    const Integer s = (r + f.B) / (2 * f.C);
    BinaryForm g{f.C, r, (r * r - disc) / (4 * f.C)};
    return {g, Mat2{0, -1, 1, s}};
}

}  // namespace detail

/// Searches for x with f(x) = target among the reduction path and the full reduced cycle.
struct FormSearch {
    std::optional<std::pair<Integer, Integer>> vector;   // primitive (x, y) with f(x, y) = target
    std::vector<BinaryForm> cycle;                       // reduced cycle: the certificate
};

inline FormSearch search_form_value(const BinaryForm& f0, const Integer& target) {
    const Integer disc = f0.B * f0.B - 4 * f0.A * f0.C;
    const Integer root = isqrt(disc);
    FormSearch out;
    BinaryForm f = f0;
    detail::Mat2 M;
    auto hit = [&](const BinaryForm& g, const detail::Mat2& m) {
        if (!out.vector && g.A == target) out.vector = std::make_pair(m.m00, m.m10);
    };
    hit(f, M);
    int guard = 0;
    while (!detail::is_reduced(f, root)) {
        auto [g, step] = detail::rho(f, disc, root);
        f = g;
        M = M * step;
        hit(f, M);
        if (++guard > 100000) fail(ErrorKind::DomainError, "form reduction did not terminate");
    }
    const BinaryForm start = f;
    do {
        out.cycle.push_back(f);
        auto [g, step] = detail::rho(f, disc, root);
        f = g;
        M = M * step;
        hit(f, M);
        if (out.cycle.size() > 10000000) fail(ErrorKind::DomainError, "reduced cycle did not close");
    } while (!(f == start));
    return out;
}

/// The form N(x a + y (b + omega)) / a attached to the primitive part of I.
inline BinaryForm ideal_form(const FracIdeal& I) {
    const QuadraticField K = I.field();
    const Integer tr = 2 * I.b() + K.omega_trace();
    const Integer nm = I.b() * I.b() + I.b() * K.omega_trace() + K.omega_norm();
    return {I.a(), tr, nm / I.a()};
}

/// |g/g'| >= 1 for g > 0, decided exactly.
inline bool ratio_at_least_one(const FieldElement& g) {
    return g.sign_second() > 0 ? sgn(g.y()) >= 0 : sgn(g.x()) >= 0;
}

/// The unique g * eps_plus^k with 1 <= |g/g'| < eps_plus^2, for g > 0 in the
/// first embedding.
inline FieldElement canonical_orbit_rep(FieldElement g, const FieldElement& eps_plus) {
    if (g.sign_first() <= 0) fail(ErrorKind::PreconditionViolation, "orbit normalization needs g > 0");
    const FieldElement inv = conj(eps_plus);
    while (!ratio_at_least_one(g)) g = g * eps_plus;
    while (ratio_at_least_one(g * inv)) g = g * inv;
    return g;
}

enum class GeneratorSign { TotallyPositive, Mixed };

struct GeneratorSearch {
    std::optional<FieldElement> generator;
    std::vector<BinaryForm> certificate;
};

namespace detail {

inline GeneratorSearch find_generator(const FracIdeal& I, GeneratorSign sign) {
    const QuadraticField K = I.field();
    const Integer target = sign == GeneratorSign::TotallyPositive ? 1 : -1;
    FormSearch fs = search_form_value(ideal_form(I), target);
    GeneratorSearch out{std::nullopt, fs.cycle};
    if (!fs.vector) return out;
    const auto& [x, y] = *fs.vector;
    FieldElement g = (K.element(Rational(x * I.a())) + (K.element(Rational(I.b())) + K.omega()) * Rational(y)) *
                     I.scale();
    if (g.sign_first() < 0) g = -g;
    out.generator = canonical_orbit_rep(g, fundamental_unit(K).eps_plus);
    return out;
}

}  // namespace detail

/// Totally positive generator of I in the window 1 <= g/g' < eps_plus^2, with
/// the reduced cycle as certificate when none exists.
inline GeneratorSearch tp_generator_certified(const FracIdeal& I) {
    if (I.is_unit()) return {I.field().one(), {}};
    return detail::find_generator(I, GeneratorSign::TotallyPositive);
}

inline std::optional<FieldElement> tp_generator(const FracIdeal& I) { return tp_generator_certified(I).generator; }

/// Any generator g > 0; totally positive when possible, else with g' < 0.
inline std::optional<FieldElement> positive_generator(const FracIdeal& I) {
    if (auto g = tp_generator(I)) return g;
    return detail::find_generator(I, GeneratorSign::Mixed).generator;
}

inline bool is_principal(const FracIdeal& I) { return positive_generator(I).has_value(); }

inline bool is_narrow_equivalent(const FracIdeal& I, const FracIdeal& J) {
    check_same_field(I, J);
    if (I == J) return true;
    return tp_generator(I / J).has_value();
}

inline bool is_wide_equivalent(const FracIdeal& I, const FracIdeal& J) {
    check_same_field(I, J);
    if (I == J) return true;
    return is_principal(I / J);
}

/// Integral ideals of norm at most floor(sqrt(disc)/2), norm ascending.
inline std::vector<FracIdeal> minkowski_candidates(const QuadraticField& K) {
    const Integer bound = isqrt(Integer(K.disc())) / 2;
    std::vector<FracIdeal> out;
    for (Integer n = 1; n <= bound; ++n) {
        auto level = integral_ideals_of_norm(K, n);
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

/// One integral ideal per narrow class. Candidates are the Minkowski-bound
/// ideals J and their multiples sqrt(D) J, since (sqrt(D)) generates the
/// kernel of the map from narrow to wide classes.
inline std::vector<FracIdeal> narrow_class_reps(const QuadraticField& K) {
    auto cands = minkowski_candidates(K);
    const FracIdeal root = principal_ideal(K.sqrt_d());
    const std::size_t n = cands.size();
    for (std::size_t i = 0; i < n; ++i) cands.push_back(cands[i] * root);
    std::vector<FracIdeal> reps;
    for (const auto& J : cands) {
        bool fresh = true;
        for (const auto& R : reps) {
            if (is_narrow_equivalent(J, R)) {
                fresh = false;
                break;
            }
        }
        if (fresh) reps.push_back(J);
    }
    return reps;
}

/// One integral ideal per (wide) ideal class.
inline std::vector<FracIdeal> class_reps(const QuadraticField& K) {
    std::vector<FracIdeal> reps;
    for (const auto& J : minkowski_candidates(K)) {
        bool fresh = true;
        for (const auto& R : reps) {
            if (is_wide_equivalent(J, R)) {
                fresh = false;
                break;
            }
        }
        if (fresh) reps.push_back(J);
    }
    return reps;
}

/// Totally positive delta with (delta) = codifferent, when one exists.
inline std::optional<FieldElement> codifferent_tp_principal(const QuadraticField& K) {
    return tp_generator(different_codifferent(K).codifferent);
}

}  // namespace uqf
