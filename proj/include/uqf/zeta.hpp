#pragma once

// zeta_K(-1) for real quadratic K through Siegel's trace-level divisor sums,
// checked against the Bernoulli-number value of zeta(-1) L(-1, chi), and
// zeta_K(2) as a certified interval.

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "uqf/ideals.hpp"
#include "uqf/integer.hpp"
#include "uqf/interval.hpp"
#include "uqf/qfield.hpp"

namespace uqf {

/// floor(d/6) when d = 1 mod 6, otherwise floor(d/6) + 1.
inline unsigned r_d(unsigned d) {
    if (d == 0) fail(ErrorKind::PreconditionViolation, "degree must be positive");
    return d % 6 == 1 ? d / 6 : d / 6 + 1;
}

/// Dual of the basis (1, omega) under the trace form.
inline std::pair<FieldElement, FieldElement> dual_basis(const QuadraticField& K) {
    const Rational t(K.omega_trace());
    const Rational t2 = trace(K.omega() * K.omega());
    const Rational det = 2 * t2 - t * t;  // = disc
    const FieldElement w = K.omega();
    // inverse Gram [[t2, -t], [-t, 2]] / det applied to (1, omega)
    const FieldElement d1 = (K.element(t2) - w * t) / det;
    const FieldElement d2 = (w * Rational(2) - K.element(t)) / det;
    return {d1, d2};
}

/// Totally positive gamma in the codifferent with Tr(gamma) = level, ordered by Tr(gamma omega).
inline std::vector<FieldElement> trace_level_codifferent(const QuadraticField& K, long level) {
    if (level < 1) fail(ErrorKind::PreconditionViolation, "trace level must be positive");
    const auto [d1, d2] = dual_basis(K);
    const Integer l(level), D(K.D());
    // tp iff |c| < l sqrt(D) (D = 2,3 mod 4) or |2c - l| < l sqrt(D) (D = 1 mod 4)
    const Integer bound2 = l * l * D;
    auto inside = [&](const Integer& m) { return m * m < bound2; };
    const Integer r = isqrt(bound2) + 1;
    std::vector<FieldElement> out;
    const Integer lo = K.one_mod_four() ? floor_div(l - r, Integer(2)) : -r;
    const Integer hi = K.one_mod_four() ? ceil_div(l + r, Integer(2)) : r;
    for (Integer c = lo; c <= hi; ++c) {
        if (!inside(K.one_mod_four() ? Integer(2 * c - l) : c)) continue;
        out.push_back(d1 * Rational(l) + d2 * Rational(c));
    }
    return out;
}

/// s_level = sum of sigma((gamma) * different) over trace_level_codifferent.
inline Integer s_ell(const QuadraticField& K, long level) {
    const FracIdeal diff = different_codifferent(K).different;
    Integer total = 0;
    for (const auto& g : trace_level_codifferent(K, level)) {
        const FracIdeal J = principal_ideal(g) * diff;
        if (!J.is_integral()) fail(ErrorKind::NotIntegral, g.to_string() + " is not in the codifferent");
        total += sigma_ideal(J);
    }
    return total;
}

enum class Provenance { Derived, External };

inline std::string to_string(Provenance p) { return p == Provenance::Derived ? "derived" : "external"; }

struct SiegelData {
    unsigned d = 2;
    std::vector<Rational> coeffs;  // b_1(2d), ..., b_{r_d}(2d)
    Provenance provenance = Provenance::Derived;
};

/// zeta_K(-1) = zeta(-1) L(-1, chi) = B_{2,chi} / 24 with B_{2,chi} = disc sum chi(a) B_2(a/disc).
inline Rational zeta_minus1_oracle(const QuadraticField& K) {
    const std::int64_t disc = K.disc();
    Rational B = 0;
    for (std::int64_t a = 1; a <= disc; ++a) {
        const int chi = kronecker(disc, a);
        if (chi == 0) continue;
        const Rational x = ratio(a, disc);
        B += chi * (x * x - x + Rational(1, 6));
    }
    B *= disc;
    B.canonicalize();
    return B / 24;
}

inline Rational zeta_minus1_siegel(const QuadraticField& K, const SiegelData& data) {
    if (data.d != 2) fail(ErrorKind::DegreeUnsupported, "exact Siegel evaluation is implemented for d = 2");
    if (data.coeffs.size() != r_d(2)) fail(ErrorKind::MissingCoefficient, "expected one coefficient for d = 2");
    return 4 * data.coeffs[0] * Rational(s_ell(K, 1));
}

/// b_1(4) solved from each field of the sample; all must agree.
inline Rational derive_b1(const std::vector<QuadraticField>& sample) {
    if (sample.empty()) fail(ErrorKind::PreconditionViolation, "empty sample");
    std::optional<Rational> b;
    for (const auto& K : sample) {
        const Rational here = zeta_minus1_oracle(K) / (4 * Rational(s_ell(K, 1)));
        if (!b) {
            b = here;
        } else if (*b != here) {
            fail(ErrorKind::InconsistentSample, "D = " + std::to_string(K.D()) + " gives " + to_string(here) +
                                                    ", earlier fields gave " + to_string(*b));
        }
    }
    return *b;
}

inline std::vector<QuadraticField> default_b1_sample() {
    std::vector<QuadraticField> out{QuadraticField(5), QuadraticField(2), QuadraticField(3)};
    for (std::int64_t D = 6; out.size() < 23; ++D)
        if (is_squarefree(D)) out.emplace_back(D);
    return out;
}

/// d = 2 data with b_1(4) derived once per process from default_b1_sample().
inline const SiegelData& derived_siegel_data() {
    static const SiegelData data{2, {derive_b1(default_b1_sample())}, Provenance::Derived};
    return data;
}

/// Reads lines "d l p/q" ('#' starts a comment) and returns the degree-d coefficients.
inline SiegelData load_siegel_data(std::istream& in, unsigned d) {
    std::map<unsigned, Rational> found;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string ds, ls_, qs, extra;
        if (!(ls >> ds)) continue;
        if (!(ls >> ls_ >> qs) || (ls >> extra))
            fail(ErrorKind::ParseError, "coefficient line " + std::to_string(lineno) + " needs 'd l p/q'");
        unsigned dd = 0, ll = 0;
        try {
            dd = static_cast<unsigned>(std::stoul(ds));
            ll = static_cast<unsigned>(std::stoul(ls_));
        } catch (const std::exception&) {
            fail(ErrorKind::ParseError, "coefficient line " + std::to_string(lineno) + ": bad integer");
        }
        if (dd != d) continue;
        if (ll < 1 || ll > r_d(d))
            fail(ErrorKind::RangeError, "coefficient index " + std::to_string(ll) + " outside 1.." + std::to_string(r_d(d)));
        found[ll] = parse_rational(qs);
    }
    SiegelData out{d, {}, Provenance::External};
    for (unsigned l = 1; l <= r_d(d); ++l) {
        auto it = found.find(l);
        if (it == found.end())
            fail(ErrorKind::MissingCoefficient, "b_" + std::to_string(l) + "(" + std::to_string(2 * d) + ") missing");
        out.coeffs.push_back(it->second);
    }
    return out;
}

inline SiegelData load_siegel_data(const std::string& path, unsigned d) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::ParseError, "cannot open " + path);
    return load_siegel_data(in, d);
}

/// Certified enclosure of zeta_K(2) = zeta(2) L(2, chi) of width <= 2 abs_err.
inline Interval zeta2_numeric(const QuadraticField& K, double abs_err) {
    if (!(abs_err > 0)) fail(ErrorKind::PreconditionViolation, "abs_err must be positive");
    const std::int64_t disc = K.disc();
    // partial sums of chi are bounded by disc, so the tail past N is at most disc / N^2
    const auto N = static_cast<unsigned long>(std::ceil(std::sqrt(2.0 * static_cast<double>(disc) / abs_err)));
    const mpfr_prec_t prec = std::max<mpfr_prec_t>(96, static_cast<mpfr_prec_t>(-std::log2(abs_err)) + 64);
    std::vector<int> chi(static_cast<std::size_t>(disc));
    for (std::int64_t a = 0; a < disc; ++a) chi[static_cast<std::size_t>(a)] = kronecker(disc, a);
    BigFloat lo(prec), hi(prec), tlo(prec), thi(prec), nn(prec);
    for (unsigned long n = 1; n <= N; ++n) {
        const int c = chi[n % static_cast<unsigned long>(disc)];
        if (c == 0) continue;
        mpfr_set_ui(nn.get(), n, MPFR_RNDN);
        mpfr_sqr(tlo.get(), nn.get(), MPFR_RNDU);
        mpfr_ui_div(tlo.get(), 1, tlo.get(), MPFR_RNDD);
        mpfr_sqr(thi.get(), nn.get(), MPFR_RNDD);
        mpfr_ui_div(thi.get(), 1, thi.get(), MPFR_RNDU);
        if (c > 0) {
            mpfr_add(lo.get(), lo.get(), tlo.get(), MPFR_RNDD);
            mpfr_add(hi.get(), hi.get(), thi.get(), MPFR_RNDU);
        } else {
            mpfr_sub(lo.get(), lo.get(), thi.get(), MPFR_RNDD);
            mpfr_sub(hi.get(), hi.get(), tlo.get(), MPFR_RNDU);
        }
    }
    const Rational tail = ratio(disc, Integer(N) * N);
    const Interval L = Interval::from_bounds(lo, hi) + Interval::hull(-tail, tail, prec);
    const Interval pi = Interval::pi(prec);
    Interval z = pi * pi / Interval::exact(6L, prec) * L;
    // the ideals above 2 have norm <= 4, so zeta_K(2) >= 1 + 1/16
    const Interval floor_ = Interval::exact(Rational(17, 16), prec);
    if (z.certainly_less(Rational(17, 16))) fail(ErrorKind::DomainError, "zeta_K(2) enclosure is unsound");
    return max(z, floor_);
}

/// Delta^{3/2} / (2 pi^2)^2, the factor taking zeta_K(2) to zeta_K(-1).
inline Interval functional_factor(const QuadraticField& K, mpfr_prec_t prec = kDefaultPrecision) {
    const Interval disc = Interval::exact(Rational(K.disc()), prec);
    const Interval pi = Interval::pi(prec);
    const Interval c = Interval::exact(2L, prec) * pi * pi;
    return disc * sqrt(disc) / (c * c);
}

struct FunctionalEqCheck {
    double residual = 0;  // |zeta_K(-1) - factor * mid(zeta_K(2))|
    double slack = 0;     // width of the certified residual enclosure
    double bound = 0;     // certified upper bound on the true residual
    bool pass = false;    // bound <= tol
    Interval zeta2;
};

inline FunctionalEqCheck functional_eq_check(const QuadraticField& K, double tol, double abs_err = 1e-9,
                                             const SiegelData& data = derived_siegel_data()) {
    FunctionalEqCheck out;
    out.zeta2 = zeta2_numeric(K, abs_err);
    const Interval pred = functional_factor(K, out.zeta2.precision()) * out.zeta2;
    const Interval diff = abs(Interval::exact(zeta_minus1_siegel(K, data), pred.precision()) - pred);
    out.residual = diff.mid();
    out.slack = diff.width();
    out.bound = diff.upper();
    out.pass = out.bound <= tol;
    return out;
}

struct ZetaReport {
    std::int64_t D = 0;
    std::int64_t disc = 0;
    std::vector<std::pair<long, Integer>> s_values;
    Rational zeta_minus1;
    Rational oracle_minus1;
    Interval zeta2;
    double fe_residual = 0;
    double fe_bound = 0;
    bool fe_pass = false;
    double tol = 0;
    Provenance provenance = Provenance::Derived;
};

inline ZetaReport zeta_report(const QuadraticField& K, double tol = 1e-6, double abs_err = 1e-9,
                              const SiegelData& data = derived_siegel_data()) {
    ZetaReport r;
    r.D = K.D();
    r.disc = K.disc();
    for (long l = 1; l <= static_cast<long>(r_d(2)); ++l) r.s_values.emplace_back(l, s_ell(K, l));
    r.zeta_minus1 = zeta_minus1_siegel(K, data);
    r.oracle_minus1 = zeta_minus1_oracle(K);
    const auto fe = functional_eq_check(K, tol, abs_err, data);
    r.zeta2 = fe.zeta2;
    r.fe_residual = fe.residual;
    r.fe_bound = fe.bound;
    r.fe_pass = fe.pass;
    r.tol = tol;
    r.provenance = data.provenance;
    return r;
}

}  // namespace uqf
