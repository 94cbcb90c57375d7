#pragma once

// Indecomposable elements of I^+ and of O^{(+,-)}: lattice enumeration,
// continued-fraction classification and the kappa bounds built on them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "uqf/cfrac.hpp"
#include "uqf/error.hpp"
#include "uqf/ideals.hpp"
#include "uqf/qfield.hpp"

namespace uqf {

/// Signature of the elements under study: totally positive, or (+,-).
enum class Pattern { TotallyPositive, PlusMinus };

inline bool has_pattern(const FieldElement& a, Pattern p) {
    if (a.sign_first() <= 0) return false;
    return p == Pattern::TotallyPositive ? a.sign_second() > 0 : a.sign_second() < 0;
}

namespace detail {

struct LatticeGeometry {
    long double q, qa, qb, omega1, step;  // step = q (omega - omega')
};

inline LatticeGeometry geometry(const FracIdeal& I) {
    const QuadraticField K = I.field();
    const long double q = I.scale().get_d();
    const long double sd = std::sqrt(static_cast<long double>(K.D()));
    const long double w1 = K.one_mod_four() ? (1 + sd) / 2 : sd;
    const long double gap = K.one_mod_four() ? sd : 2 * sd;
    return {q, q * I.a().get_d(), q * I.b().get_d(), w1, q * gap};
}

inline FieldElement lattice_point(const FracIdeal& I, long u, long v) {
    const QuadraticField K = I.field();
    return (K.element(Rational(I.a() * u + I.b() * v)) + K.omega() * Rational(v)) * I.scale();
}

/// Calls f(beta) for a superset of the lattice points of I whose embeddings lie
/// in [lo1, hi1] x [lo2, hi2]; f filters exactly and returns true to stop.
template <class F>
bool scan_box(const FracIdeal& I, long double lo1, long double hi1, long double lo2, long double hi2, F&& f) {
    const LatticeGeometry g = geometry(I);
    const long double step = g.step;  // beta - beta' = v * step
    const long vlo = static_cast<long>(std::floor((lo1 - hi2) / step)) - 1;
    const long vhi = static_cast<long>(std::ceil((hi1 - lo2) / step)) + 1;
    for (long v = vlo; v <= vhi; ++v) {
        const long double T = step * v;
        const long double blo = std::max(lo1, lo2 + T), bhi = std::min(hi1, hi2 + T);
        if (blo > bhi + g.qa) continue;
        const long double base = g.qb * v + g.q * v * g.omega1;
        const long ulo = static_cast<long>(std::floor((blo - base) / g.qa)) - 1;
        const long uhi = static_cast<long>(std::ceil((bhi - base) / g.qa)) + 1;
        for (long u = ulo; u <= uhi; ++u)
            if (f(lattice_point(I, u, v))) return true;
    }
    return false;
}

inline long double approx_first(const FieldElement& a) {
    return a.x().get_d() + a.y().get_d() * std::sqrt(static_cast<long double>(a.D()));
}

}  // namespace detail

/// Representative of g's eps_plus-orbit with 1/eps_plus <= |g/g'| < eps_plus.
inline FieldElement symmetric_orbit_rep(FieldElement g, const FieldElement& eps_plus) {
    if (g.sign_first() <= 0) fail(ErrorKind::PreconditionViolation, "orbit normalization needs g > 0");
    const FieldElement inv = conj(eps_plus);
    // first embedding of g*e - |g'|, and of |g'|*e - g
    auto low_ok = [&](const FieldElement& h) {
        const FieldElement c = h.sign_second() > 0 ? conj(h) : -conj(h);
        return (h * eps_plus - c).sign_first() >= 0;
    };
    auto high_ok = [&](const FieldElement& h) {
        const FieldElement c = h.sign_second() > 0 ? conj(h) : -conj(h);
        return (c * eps_plus - h).sign_first() > 0;
    };
    while (!low_ok(g)) g = g * eps_plus;
    while (!high_ok(g)) g = g * inv;
    return g;
}

/// Some (beta, gamma) with beta + gamma = alpha and both in I with pattern p,
/// or nothing when alpha is indecomposable.
inline std::optional<std::pair<FieldElement, FieldElement>> is_decomposable(const FieldElement& alpha,
                                                                            const FracIdeal& I,
                                                                            Pattern p = Pattern::TotallyPositive) {
    if (alpha.D() != I.D()) fail(ErrorKind::MixedFields, "element and ideal in different fields");
    if (!I.contains(alpha) || !has_pattern(alpha, p))
        fail(ErrorKind::NotInIdealPlus, alpha.to_string() + " is not in " + I.to_string() + " with the required signs");
    const QuadraticField K = I.field();
    const FieldElement eps_plus = fundamental_unit(K).eps_plus;
    const FieldElement a = symmetric_orbit_rep(alpha, eps_plus);
    const FieldElement mu = alpha / a;
    const auto [a1, a2] = a.approx();
    const long double lo2 = std::min<long double>(0, a2), hi2 = std::max<long double>(0, a2);
    std::optional<std::pair<FieldElement, FieldElement>> out;
    detail::scan_box(I, 0, a1, lo2, hi2, [&](const FieldElement& b) {
        if (!has_pattern(b, p)) return false;
        const FieldElement c = a - b;
        if (!has_pattern(c, p)) return false;
        out = std::make_pair(b * mu, c * mu);
        return true;
    });
    return out;
}

/// All x in I with pattern p, |N(x)| <= bound, in the window 1 <= |x/x'| < eps_plus^2.
inline std::vector<FieldElement> enumerate_window(const FracIdeal& I, Pattern p, const Rational& bound) {
    const QuadraticField K = I.field();
    const FieldElement eps_plus = fundamental_unit(K).eps_plus;
    const FieldElement inv = conj(eps_plus);
    const detail::LatticeGeometry g = detail::geometry(I);
    const long double X = bound.get_d() * (1 + 1e-12L);
    const long double e = detail::approx_first(eps_plus), e2 = e * e;
    const long double step = g.step;
    long double tmax;
    if (p == Pattern::TotallyPositive) {
        const long double c = e2 / (e2 - 1);
        tmax = std::sqrt(X / (c * (c - 1)));
    } else {
        tmax = std::sqrt(X) * (e2 + 1) / e;
    }
    const long vmax = static_cast<long>(std::ceil(tmax / step)) + 1;
    std::vector<FieldElement> out;
    for (long v = p == Pattern::TotallyPositive ? 0 : 1; v <= vmax; ++v) {
        const long double T = step * v;
        long double lo, hi;
        if (p == Pattern::TotallyPositive) {
            lo = v == 0 ? 0 : std::max(T, T * e2 / (e2 - 1));
            hi = (T + std::sqrt(T * T + 4 * X)) / 2;
        } else {
            const long double disc = T * T - 4 * X;
            lo = std::max(T / 2, disc > 0 ? (T + std::sqrt(disc)) / 2 : 0);
            hi = T * e2 / (1 + e2);
        }
        if (lo > hi + g.qa) continue;
        const long double base = g.qb * v + g.q * v * g.omega1;
        const long ulo = static_cast<long>(std::floor((lo - base) / g.qa)) - 1;
        const long uhi = static_cast<long>(std::ceil((hi - base) / g.qa)) + 1;
        for (long u = ulo; u <= uhi; ++u) {
            const FieldElement x = detail::lattice_point(I, u, v);
            if (!has_pattern(x, p) || abs(norm(x)) > bound) continue;
            if (!ratio_at_least_one(x) || ratio_at_least_one(x * inv)) continue;
            out.push_back(x);
        }
    }
    std::sort(out.begin(), out.end(), [](const FieldElement& x, const FieldElement& y) {
        const Rational nx = abs(norm(x)), ny = abs(norm(y));
        return nx != ny ? nx < ny : x < y;
    });
    return out;
}

struct IndecSource {
    enum class Kind { ContinuedFraction, Brute } kind;
    long i = 0;
    std::int64_t r = 0;
    std::string to_string() const {
        return kind == Kind::Brute ? "brute" : "cf(" + std::to_string(i) + "," + std::to_string(r) + ")";
    }
};

struct IndecClass {
    FieldElement representative;
    FieldElement canonical;   // orbit representative with 1 <= |x/x'| < eps_plus^2
    IndecSource source;
    FracIdeal ideal;
};

namespace detail {

/// Index window for one totally-positive-unit period: eps_plus = alpha_{L-1}.
inline long unit_period_index(const CFExpansion& e) {
    const long s = static_cast<long>(e.s());
    return s % 2 == 1 ? 2 * s : s;
}

inline std::vector<IndecClass> semiconvergent_classes(const QuadraticField& K, long first_i, long end_i,
                                                      const FracIdeal& ideal) {
    const CFExpansion& e = xi_expansion(K);
    const FieldElement eps_plus = fundamental_unit(K).eps_plus;
    std::vector<IndecClass> out;
    const auto cv = convergents(e, end_i + 1);
    for (long i = first_i; i < end_i; i += 2) {
        const std::int64_t bound = e.u(static_cast<std::size_t>(i + 2));
        for (std::int64_t r = 0; r < bound; ++r) {
            const FieldElement a = cv[static_cast<std::size_t>(i + 1)].alpha +
                                   cv[static_cast<std::size_t>(i + 2)].alpha * Rational(r);
            out.push_back({a, canonical_orbit_rep(a, eps_plus), {IndecSource::Kind::ContinuedFraction, i, r}, ideal});
        }
    }
    return out;
}

}  // namespace detail

/// Unit classes of indecomposables of O_K: alpha_{i,r} for odd i over one
/// totally-positive-unit period.
inline std::vector<IndecClass> indecomposables_ring(const QuadraticField& K) {
    const long L = detail::unit_period_index(xi_expansion(K));
    return detail::semiconvergent_classes(K, -1, L - 1, unit_ideal(K));
}

/// Unit classes of (+,-)-indecomposables: alpha_{i,r} for even i.
inline std::vector<IndecClass> indecomposables_pm(const QuadraticField& K) {
    const long L = detail::unit_period_index(xi_expansion(K));
    return detail::semiconvergent_classes(K, 0, L, unit_ideal(K));
}

/// Smallest positive integer c with c*I integral.
inline Integer integral_rescale(const FracIdeal& I) { return I.scale().get_den(); }

/// Norm bound above which no element of an integral I is I-indecomposable.
inline Rational indecomposable_norm_bound(const FracIdeal& I) {
    return Rational(I.field().disc()) * I.norm() * I.norm();
}

/// Unit classes of I-indecomposables (pattern p) by brute force; fractional I
/// is first rescaled to c*I, which leaves kappa unchanged.
inline std::vector<IndecClass> i_indecomposables(const FracIdeal& I, Pattern p = Pattern::TotallyPositive,
                                                 std::optional<Rational> bound = std::nullopt) {
    const FracIdeal J = I.scaled(Rational(integral_rescale(I)));
    const Rational X = bound ? *bound : indecomposable_norm_bound(J);
    std::vector<IndecClass> out;
    for (const FieldElement& x : enumerate_window(J, p, X))
        if (!is_decomposable(x, J, p)) out.push_back({x, x, {IndecSource::Kind::Brute, 0, 0}, J});
    return out;
}

/// Norm bound for (+,-)-indecomposables of O_K, from the bijection with the
/// I-indecomposables of I = (sqrt D).
inline Rational pm_norm_bound(const QuadraticField& K) { return Rational(K.disc()) * Rational(K.D()); }

inline std::vector<IndecClass> pm_indecomposables_brute(const QuadraticField& K) {
    return i_indecomposables(unit_ideal(K), Pattern::PlusMinus, pm_norm_bound(K));
}

/// Partial-quotient bound on kappa(I) for principal I.
inline std::int64_t kappa_upper_cf(const FracIdeal& I) {
    const QuadraticField K = I.field();
    const CFExpansion& e = xi_expansion(K);
    const std::size_t s = e.s();
    std::int64_t odd = 0, even = 0, all = 0;
    for (std::size_t k = 1; k <= s; ++k) {
        const std::int64_t u = e.u(k);
        all += u;
        (k % 2 == 1 ? odd : even) += u;
    }
    if (tp_generator(I)) return s % 2 == 1 ? all : odd;
    if (!positive_generator(I)) fail(ErrorKind::NotPrincipal, I.to_string() + " is not principal");
    return even;  // s even and the generator has alpha' < 0
}

inline std::int64_t kappa_upper_classcount(const FracIdeal& I) {
    return static_cast<std::int64_t>(i_indecomposables(I).size());
}

/// kappa(I) = 1 exactly when I has a totally positive generator.
inline bool kappa_is_one(const FracIdeal& I) { return tp_generator(I).has_value(); }

struct KappaBound {
    std::int64_t lower, upper;
    struct PerClass {
        FracIdeal ideal;
        bool kappa_one;
        std::optional<std::int64_t> cf;
        std::int64_t classcount;
        std::int64_t upper;
    };
    std::vector<PerClass> classes;
};

/// (lower, upper) bounds on kappa(K) over the narrow class representatives.
inline KappaBound kappa_field_bound(const QuadraticField& K) {
    KappaBound kb{1, 1, {}};
    for (const FracIdeal& I : narrow_class_reps(K)) {
        KappaBound::PerClass pc{I, kappa_is_one(I), std::nullopt, 1, 1};
        if (!pc.kappa_one) {
            // no totally positive generator: kappa(I) >= 2
            kb.lower = 2;
            if (positive_generator(I)) pc.cf = kappa_upper_cf(I);
            pc.classcount = kappa_upper_classcount(I);
            pc.upper = pc.cf ? std::min(*pc.cf, pc.classcount) : pc.classcount;
        }
        kb.upper = std::max(kb.upper, pc.upper);
        kb.classes.push_back(std::move(pc));
    }
    return kb;
}

}  // namespace uqf
