#pragma once

// Periodic continued fractions of quadratic irrationals, convergents,
// semiconvergents and the fundamental unit.

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "uqf/error.hpp"
#include "uqf/integer.hpp"
#include "uqf/qfield.hpp"

namespace uqf {

/// Eventually periodic expansion [head..., period...]; head[0] is u0.
///
/// For the canonical subject xi_D the head is exactly {u0}, and u_{ts+i} = u_i
/// for i >= 1.
struct CFExpansion {
    FieldElement subject;
    std::vector<std::int64_t> head;
    std::vector<std::int64_t> period;

    std::int64_t u0() const { return head.front(); }
    std::size_t s() const { return period.size(); }
    bool purely_periodic_after_u0() const { return head.size() == 1; }

    /// Partial quotient u_i for any i >= 0.
    std::int64_t u(std::size_t i) const {
        if (i < head.size()) return head[i];
        return period[(i - head.size()) % period.size()];
    }
};

/// p_i/q_i = [u0..u_i] and alpha_i = p_i + q_i*omega.
struct Convergent {
    long index;
    Integer p, q;
    FieldElement alpha;
};

namespace detail {

// x = (P + sqrt(d)) / Q with Q | d - P^2
struct SurdState {
    Integer P, Q;
    friend bool operator<(const SurdState& a, const SurdState& b) {
        return a.P != b.P ? a.P < b.P : a.Q < b.Q;
    }
};

inline Integer surd_floor(const SurdState& st, const Integer& root) {
    if (sgn(st.Q) > 0) return floor_div(st.P + root, st.Q);
    return floor_div(-st.P - root - 1, -st.Q);
}

}  // namespace detail

inline CFExpansion cf_expand(const FieldElement& x) {
    if (x.is_rational()) fail(ErrorKind::RationalInput, "continued fraction of rational " + x.to_string());
    const Integer w = lcm(x.x().get_den(), x.y().get_den());
    const Integer u = x.x().get_num() * (w / x.x().get_den());
    const Integer v = x.y().get_num() * (w / x.y().get_den());
    const Integer d = v * v * w * w * x.D();
    const Integer root = isqrt(d);
    detail::SurdState st;
    if (sgn(v) * sgn(w) > 0) {
        st = {u * w, w * w};
    } else {
        st = {-u * w, -w * w};
    }
    std::map<detail::SurdState, std::size_t> seen;
    std::vector<std::int64_t> terms;
    while (true) {
        auto [it, inserted] = seen.emplace(st, terms.size());
        if (!inserted) {
            const std::size_t start = it->second;
            CFExpansion e{x, {}, {}};
            e.head.assign(terms.begin(), terms.begin() + static_cast<long>(start));
            e.period.assign(terms.begin() + static_cast<long>(start), terms.end());
            if (e.head.empty()) {
                // purely periodic subject: rotate so that head holds u0
                e.head.push_back(e.period.front());
                std::rotate(e.period.begin(), e.period.begin() + 1, e.period.end());
            }
            return e;
        }
        const Integer a = detail::surd_floor(st, root);
        terms.push_back(to_i64(a));
        const Integer P = a * st.Q - st.P;
        const Integer Q = (d - P * P) / st.Q;
        st = {P, Q};
    }
}

/// All convergents with index -1..last (inclusive).
inline std::vector<Convergent> convergents(const CFExpansion& e, long last) {
    const QuadraticField K = e.subject.field();
    const FieldElement w = K.omega();
    std::vector<Convergent> out;
    Integer p2 = 0, q2 = 1, p1 = 1, q1 = 0;
    out.push_back({-1, p1, q1, K.one()});
    for (long i = 0; i <= last; ++i) {
        const Integer ui = e.u(static_cast<std::size_t>(i));
        Integer p = ui * p1 + p2, q = ui * q1 + q2;
        out.push_back({i, p, q, K.element(Rational(p)) + w * Rational(q)});
        p2 = p1;
        q2 = q1;
        p1 = p;
        q1 = q;
    }
    return out;
}

inline Convergent convergent(const CFExpansion& e, long i) {
    if (i < -1) fail(ErrorKind::IndexTooSmall, "convergent index " + std::to_string(i) + " < -1");
    return convergents(e, i).back();
}

/// alpha_{i,r} = alpha_i + r*alpha_{i+1} for 0 <= r < u_{i+2}.
inline FieldElement semiconvergent(const CFExpansion& e, long i, std::int64_t r) {
    if (i < -1) fail(ErrorKind::IndexTooSmall, "semiconvergent index " + std::to_string(i) + " < -1");
    const std::int64_t bound = e.u(static_cast<std::size_t>(i + 2));
    if (r < 0 || r >= bound)
        fail(ErrorKind::RangeError,
             "r = " + std::to_string(r) + " outside [0, " + std::to_string(bound) + ")");
    const auto cv = convergents(e, i + 1);
    return cv[static_cast<std::size_t>(i + 1)].alpha + cv[static_cast<std::size_t>(i + 2)].alpha * Rational(r);
}

/// Expansion of xi_D, memoized per field.
inline const CFExpansion& xi_expansion(const QuadraticField& K) {
    static std::mutex mu;
    static std::map<std::int64_t, CFExpansion> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(K.D());
    if (it == cache.end()) it = cache.emplace(K.D(), cf_expand(K.xi())).first;
    return it->second;
}

struct FundamentalUnit {
    FieldElement eps;        // > 1 in the first embedding
    int norm_sign;           // N(eps) in {+1, -1}
    FieldElement eps_plus;   // fundamental totally positive unit
    std::size_t period_length;
};

inline FundamentalUnit fundamental_unit(const QuadraticField& K) {
    const CFExpansion& e = xi_expansion(K);
    const long s = static_cast<long>(e.s());
    FieldElement eps = convergent(e, s - 1).alpha;
    if (eps.sign_first() < 0) eps = -eps;
    if (eps.sign_first() > 0 && (eps - K.one()).sign_first() < 0) eps = K.one() / eps;
    const Rational n = norm(eps);
    if (n != 1 && n != -1) fail(ErrorKind::DomainError, "alpha_{s-1} is not a unit: " + eps.to_string());
    const int ns = n == 1 ? 1 : -1;
    FieldElement eps_plus = ns == 1 ? eps : eps * eps;
    return {eps, ns, eps_plus, e.s()};
}

}  // namespace uqf
