#pragma once

// Explicit bounds: short-vector caps, the divisor-sum bound g, the rank
// inequality's right-hand side and its solvers, the lifting bound, and the
// trace-form transfer with exact short-vector counting.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "uqf/integer.hpp"
#include "uqf/interval.hpp"
#include "uqf/qfield.hpp"
#include "uqf/zeta.hpp"

namespace uqf {

inline constexpr mpfr_prec_t kMaxPrecision = 4096;

/// C(R, i) = 2 binom(R + 4i - 1, 4i - 1) - 1.
inline Integer cap_C(unsigned long R, unsigned long i) {
    if (R < 1 || i < 1) fail(ErrorKind::PreconditionViolation, "cap_C needs R >= 1 and i >= 1");
    return 2 * binomial(R + 4 * i - 1, 4 * i - 1) - 1;
}

namespace detail {

inline Interval robin_expr(const Interval& x) {
    const mpfr_prec_t prec = x.precision();
    const Interval ll = log(log(x));
    return exp(Interval::euler_gamma(prec)) * x * ll + Interval::exact(Rational(6483, 10000), prec) * x / ll;
}

}  // namespace detail

/// e^gamma n log log n + 0.6483 n / log log n, valid as a bound on sigma(n) for n >= 3.
inline Interval robin_bound(const Integer& n, mpfr_prec_t prec = kDefaultPrecision) {
    if (n < 3) fail(ErrorKind::DomainError, "Robin's bound needs n >= 3");
    return detail::robin_expr(Interval::exact(n, prec));
}

/// max{4, Robin expression at x = l^d disc / d^d}, and 4 when x < 3.
inline Interval g_bound(unsigned long l, unsigned d, const Integer& disc, mpfr_prec_t prec = kDefaultPrecision) {
    if (l < 1 || d < 2 || disc < 1) fail(ErrorKind::PreconditionViolation, "g needs l >= 1, d >= 2, disc >= 1");
    const Rational x = ratio(pow(Integer(l), d) * disc, pow(Integer(d), d));
    const Interval four = Interval::exact(4L, prec);
    if (x < 3) return four;
    return max(four, detail::robin_expr(Interval::exact(x, prec)));
}

/// min over l <= r_d of 1 / g(l, d, disc).
inline Interval G_of(const Integer& disc, unsigned d, mpfr_prec_t prec = kDefaultPrecision) {
    const unsigned r = r_d(d);
    if (r == 0) fail(ErrorKind::DegreeTooSmall, "r_d = 0 for d = " + std::to_string(d));
    std::optional<Interval> out;
    for (unsigned l = 1; l <= r; ++l) {
        const Interval v = Interval::exact(1L, prec) / g_bound(l, d, disc, prec);
        out = out ? min(*out, v) : v;
    }
    return *out;
}

/// min 1/b over positive coefficients (d even) or min -1/b over negative ones (d odd).
inline Rational B_of(unsigned d, const SiegelData& data) {
    if (data.d != d) fail(ErrorKind::PreconditionViolation, "coefficients are for d = " + std::to_string(data.d));
    std::optional<Rational> best;
    for (std::size_t l = 0; l < data.coeffs.size() && l < r_d(d); ++l) {
        const Rational& b = data.coeffs[l];
        if (d % 2 == 0 ? sgn(b) <= 0 : sgn(b) >= 0) continue;
        const Rational v = d % 2 == 0 ? Rational(1 / b) : Rational(-1 / b);
        if (!best || v < *best) best = v;
    }
    if (!best) fail(ErrorKind::NoCoefficientOfRequiredSign, "no b_l(" + std::to_string(2 * d) + ") of the required sign");
    return *best;
}

/// G(disc) / (B(d) 2^d) * disc^{3/2} (4 pi)^{-d}.
inline Interval main_rhs(const Integer& disc, unsigned d, const SiegelData& data, mpfr_prec_t prec = kDefaultPrecision) {
    if (disc < 1) fail(ErrorKind::PreconditionViolation, "discriminant must be positive");
    const Interval D = Interval::exact(disc, prec);
    const Interval fourpi = Interval::exact(4L, prec) * Interval::pi(prec);
    const Interval denom = Interval::exact(B_of(d, data) * Rational(pow(Integer(2), d)), prec) * pow(fourpi, d);
    return G_of(disc, d, prec) * D * sqrt(D) / denom;
}

/// 1 + max{R >= 0 : C(R d, r_d) <= rhs}, with C(0, .) = 1.
inline unsigned long min_rank_bound(const Integer& disc, unsigned d, const SiegelData& data) {
    const unsigned long r = r_d(d);
    for (mpfr_prec_t prec = kDefaultPrecision; prec <= kMaxPrecision; prec *= 2) {
        const Interval rhs = main_rhs(disc, d, data, prec);
        // -1: C <= rhs for sure, so rank R is impossible; +1: C > rhs for sure; 0: undecided
        auto verdict = [&](unsigned long R) {
            const Rational c(R == 0 ? Integer(1) : cap_C(R * d, r));
            if (mpfr_cmp_q(rhs.lo().get(), c.get_mpq_t()) >= 0) return -1;
            if (rhs.certainly_less(c)) return 1;
            return 0;
        };
        if (verdict(0) == 1) return 1;
        if (verdict(0) == 0) continue;
        unsigned long lo = 0, hi = 1;  // verdict(lo) == -1
        bool undecided = false;
        while (true) {
            const int v = verdict(hi);
            if (v == 0) {
                undecided = true;
                break;
            }
            if (v == 1) break;
            lo = hi;
            hi *= 2;
        }
        while (!undecided && hi - lo > 1) {
            const unsigned long mid = lo + (hi - lo) / 2;
            const int v = verdict(mid);
            if (v == 0) undecided = true;
            else if (v == -1) lo = mid;
            else hi = mid;
        }
        if (!undecided) return lo + 1;
    }
    fail(ErrorKind::PrecisionExhausted, "rank bound undecided at " + std::to_string(kMaxPrecision) + " bits");
}

struct ThresholdCertificate {
    Integer disc0;           // every disc > disc0 forces rank > R
    Integer monotone_from;   // rhs is increasing for disc >= monotone_from
    Integer cap;             // C(R d, r_d)
    Interval rhs_at_next;    // rhs(disc0 + 1), certainly >= cap
    bool minimal = false;    // rhs(disc0) is not certainly >= cap
};

/// Smallest disc0 >= monotone_from - 1 such that C(R d, r_d) <= rhs(disc) for all disc > disc0.
inline ThresholdCertificate disc_threshold(unsigned d, unsigned long R, const SiegelData& data,
                                           mpfr_prec_t prec = kDefaultPrecision) {
    if (R < 1) fail(ErrorKind::PreconditionViolation, "rank must be positive");
    ThresholdCertificate out;
    out.cap = cap_C(R * d, r_d(d));
    // writing u = l^d disc / d^d, each disc^{3/2} / g is increasing once log u log log u > 2,
    // which holds from u = 16 on (l = 1 is the latest to get there)
    const Interval u0 = Interval::exact(16L, prec);
    if (!(log(u0) * log(log(u0))).certainly_greater(Rational(2)))
        fail(ErrorKind::PrecisionExhausted, "monotonicity certificate undecided");
    out.monotone_from = 16 * pow(Integer(d), d);
    const Rational cap(out.cap);
    auto ok = [&](const Integer& disc) {
        for (mpfr_prec_t p = prec; p <= kMaxPrecision; p *= 2) {
            const Interval v = main_rhs(disc, d, data, p);
            if (mpfr_cmp_q(v.lo().get(), cap.get_mpq_t()) >= 0) return true;
            if (v.certainly_less(cap)) return false;
        }
        return false;  // undecided counts as not certified
    };
    Integer lo = out.monotone_from, hi = out.monotone_from;
    if (ok(lo)) {
        out.disc0 = lo - 1;
        out.minimal = false;
    } else {
        Integer step = 1;
        while (!ok(hi)) {
            lo = hi;
            hi += step;
            step *= 2;
        }
        while (hi - lo > 1) {
            const Integer mid = lo + (hi - lo) / 2;
            if (ok(mid)) hi = mid;
            else lo = mid;
        }
        out.disc0 = hi - 1;
        out.minimal = true;
    }
    out.rhs_at_next = main_rhs(out.disc0 + 1, d, data, prec);
    return out;
}

/// |b_{r_d}(2d) (4 pi^2)^d d|^{2/3}.
inline Interval lifting_disc_bound(unsigned d, const SiegelData& data, mpfr_prec_t prec = kDefaultPrecision) {
    if (d > 43) fail(ErrorKind::DegreeTooLarge, "lifting bound holds for d <= 43");
    const unsigned r = r_d(d);
    if (r == 0) fail(ErrorKind::DegreeTooSmall, "r_d = 0 for d = " + std::to_string(d));
    if (data.d != d || data.coeffs.size() < r)
        fail(ErrorKind::MissingCoefficient, "b_" + std::to_string(r) + "(" + std::to_string(2 * d) + ") unavailable");
    const Rational b = abs(data.coeffs[r - 1]);
    if (sgn(b) == 0) return Interval::exact(0L, prec);
    const Interval pi = Interval::pi(prec);
    const Interval base = Interval::exact(b * d, prec) * pow(Interval::exact(4L, prec) * pi * pi, d);
    return exp(log(base) * Interval::exact(Rational(2, 3), prec));
}

/// Smallest trace of a totally positive codifferent element. 1 itself is one, so the scan stops by 2.
inline long min_codifferent_trace(const QuadraticField& K) {
    for (long l = 1;; ++l)
        if (!trace_level_codifferent(K, l).empty()) return l;
}

/// Symmetric rational matrix G with q(v) = v^T G v integral on Z^n.
class IntGram {
public:
    explicit IntGram(std::vector<std::vector<Rational>> g) : g_(std::move(g)) {
        const std::size_t n = g_.size();
        if (n == 0) fail(ErrorKind::PreconditionViolation, "empty Gram matrix");
        for (const auto& row : g_)
            if (row.size() != n) fail(ErrorKind::PreconditionViolation, "Gram matrix is not square");
        for (std::size_t i = 0; i < n; ++i) {
            if (g_[i][i].get_den() != 1) fail(ErrorKind::NotIntegral, "diagonal entry is not an integer");
            for (std::size_t j = 0; j < n; ++j) {
                if (g_[i][j] != g_[j][i]) fail(ErrorKind::PreconditionViolation, "Gram matrix is not symmetric");
                if (Rational(2 * g_[i][j]).get_den() != 1) fail(ErrorKind::NotIntegral, "2 G is not integral");
            }
        }
        Rational m = 1;
        for (std::size_t k = 1; k <= n; ++k)
            if (sgn(m = minor(k)) <= 0) fail(ErrorKind::NotPositiveDefinite, "leading minor " + std::to_string(k) + " is " + to_string(m));
    }
    static IntGram from_integers(const std::vector<std::vector<long>>& g) {
        std::vector<std::vector<Rational>> r;
        for (const auto& row : g) {
            r.emplace_back();
            for (long x : row) r.back().emplace_back(x);
        }
        return IntGram(std::move(r));
    }

    std::size_t rank() const { return g_.size(); }
    const Rational& at(std::size_t i, std::size_t j) const { return g_[i][j]; }
    const std::vector<std::vector<Rational>>& rows() const { return g_; }
    bool classical() const {
        for (const auto& row : g_)
            for (const auto& x : row)
                if (x.get_den() != 1) return false;
        return true;
    }
    Rational det() const { return minor(rank()); }
    Rational value(const std::vector<Integer>& v) const {
        Rational s = 0;
        for (std::size_t i = 0; i < rank(); ++i)
            for (std::size_t j = 0; j < rank(); ++j) s += g_[i][j] * v[i] * v[j];
        return s;
    }

private:
    /// Determinant of the leading k x k block by exact elimination.
    Rational minor(std::size_t k) const {
        std::vector<std::vector<Rational>> a(k, std::vector<Rational>(k));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) a[i][j] = g_[i][j];
        Rational det = 1;
        for (std::size_t c = 0; c < k; ++c) {
            std::size_t p = c;
            while (p < k && sgn(a[p][c]) == 0) ++p;
            if (p == k) return 0;
            if (p != c) {
                std::swap(a[p], a[c]);
                det = -det;
            }
            det *= a[c][c];
            for (std::size_t i = c + 1; i < k; ++i) {
                const Rational f = a[i][c] / a[c][c];
                for (std::size_t j = c; j < k; ++j) a[i][j] -= f * a[c][j];
            }
        }
        return det;
    }

    std::vector<std::vector<Rational>> g_;
};

/// The cap for q(v) <= i: C(R, i) when classical, else C(R, 2i) for the classical form 2q.
inline Integer short_vector_cap(const IntGram& g, unsigned long i) {
    return cap_C(g.rank(), g.classical() ? i : 2 * i);
}

/// Number of v in Z^n (zero included) with q(v) <= bound.
inline Integer count_short_vectors(const IntGram& g, const Integer& bound) {
    const std::size_t n = g.rank();
    // q(v) = sum_i d_i (v_i + sum_{j>i} mu_ij v_j)^2
    std::vector<std::vector<Rational>> mu(n, std::vector<Rational>(n));
    std::vector<Rational> d(n);
    {
        std::vector<std::vector<Rational>> a = g.rows();
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = a[i][i];
            for (std::size_t j = i + 1; j < n; ++j) mu[i][j] = a[i][j] / d[i];
            for (std::size_t j = i + 1; j < n; ++j)
                for (std::size_t k = i + 1; k < n; ++k) a[j][k] -= mu[i][j] * a[i][k];
        }
    }
    Integer count = 0;
    std::vector<Integer> v(n);
    std::function<void(std::size_t, const Rational&)> rec = [&](std::size_t level, const Rational& budget) {
        const std::size_t i = level - 1;
        Rational c = 0;
        for (std::size_t j = i + 1; j < n; ++j) c += mu[i][j] * v[j];
        // integers x with d_i (x + c)^2 <= budget
        const Rational t = budget / d[i];
        const Integer s = isqrt(floor(t)) + 1;
        const Integer lo = ceil(Rational(-c - s)), hi = floor(Rational(-c + s));
        for (Integer x = lo; x <= hi; ++x) {
            const Rational e = x + c;
            const Rational used = d[i] * e * e;
            if (used > budget) continue;
            v[i] = x;
            if (i == 0) ++count;
            else rec(i, budget - used);
        }
        v[i] = 0;
    };
    if (sgn(bound) < 0) return 0;
    rec(n, Rational(bound));
    return count;
}

/// R x R symmetric matrix over O_K; Q(x) = x^T B x.
using FieldGram = std::vector<std::vector<FieldElement>>;

inline FieldGram diagonal_gram(const QuadraticField& K, const std::vector<long>& diag) {
    FieldGram B(diag.size(), std::vector<FieldElement>(diag.size(), K.zero()));
    for (std::size_t i = 0; i < diag.size(); ++i) B[i][i] = K.element(Rational(diag[i]));
    return B;
}

/// Gram of x -> Tr(delta Q(sum_j x_ij omega_j)) in the variables (x_11, x_12, ..., x_R2).
inline IntGram trace_transfer(const QuadraticField& K, const FieldGram& B, const FieldElement& delta) {
    if (delta.D() != K.D()) fail(ErrorKind::MixedFields, "delta is in another field");
    if (!different_codifferent(K).codifferent.contains(delta))
        fail(ErrorKind::NotInCodifferent, delta.to_string() + " is not in the codifferent");
    const std::size_t R = B.size();
    const FieldElement basis[2] = {K.one(), K.omega()};
    std::vector<std::vector<Rational>> g(2 * R, std::vector<Rational>(2 * R));
    for (std::size_t i = 0; i < R; ++i) {
        if (B[i].size() != R) fail(ErrorKind::PreconditionViolation, "form matrix is not square");
        for (std::size_t j = 0; j < R; ++j) {
            if (B[i][j] != B[j][i]) fail(ErrorKind::PreconditionViolation, "form matrix is not symmetric");
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) g[2 * i + k][2 * j + l] = trace(delta * basis[k] * basis[l] * B[i][j]);
        }
    }
    return IntGram(std::move(g));
}

struct CountingChain {
    Integer lattice_side;   // nonzero w with q(w) <= r_d
    Integer element_side;   // tp gamma in the codifferent with Tr(gamma) <= r_d
    bool holds = false;
};

inline CountingChain verify_counting_chain(const QuadraticField& K, const FieldGram& B, const FieldElement& delta) {
    const IntGram q = trace_transfer(K, B, delta);
    const long r = static_cast<long>(r_d(2));
    CountingChain out;
    out.lattice_side = count_short_vectors(q, Integer(r)) - 1;
    out.element_side = 0;
    for (long l = 1; l <= r; ++l) out.element_side += trace_level_codifferent(K, l).size();
    out.holds = out.lattice_side >= out.element_side;
    return out;
}

struct BoundReport {
    unsigned d = 2;
    Integer disc;
    unsigned r = 1;
    Interval G;
    Rational B;
    Interval rhs;
    unsigned long R_min = 1;
    std::vector<std::string> notes;
};

inline BoundReport bound_report(const Integer& disc, unsigned d, const SiegelData& data) {
    BoundReport out;
    out.d = d;
    out.disc = disc;
    out.r = r_d(d);
    out.G = G_of(disc, d);
    out.B = B_of(d, data);
    out.rhs = main_rhs(disc, d, data);
    out.R_min = min_rank_bound(disc, d, data);
    if (out.rhs.certainly_less(Rational(1))) out.notes.emplace_back("rhs < 1: no constraint beyond rank >= 1");
    if (data.provenance == Provenance::External) out.notes.emplace_back("coefficients from external data");
    return out;
}

}  // namespace uqf
