// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "uqf/cli.hpp"

using namespace uqf;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::vector<std::int64_t> squarefree_upto(std::int64_t n) {
    std::vector<std::int64_t> out;
    for (std::int64_t D = 2; D <= n; ++D)
        if (is_squarefree(D)) out.push_back(D);
    return out;
}

std::set<FieldElement> canon(const std::vector<IndecClass>& v) {
    std::set<FieldElement> s;
    for (const auto& c : v) s.insert(c.canonical);
    return s;
}

Outcome siegel_equals_oracle() {
    const auto& data = derived_siegel_data();
    const QuadraticField K5(5), K2(2), K3(3);
    if (zeta_minus1_siegel(K5, data) != Rational(1, 30) || zeta_minus1_siegel(K2, data) != Rational(1, 12) ||
        zeta_minus1_siegel(K3, data) != Rational(1, 6))
        return {false, "spot values differ from 1/30, 1/12, 1/6"};
    std::size_t n = 0;
    for (std::int64_t D : squarefree_upto(500)) {
        const QuadraticField K(D);
        const Rational s = zeta_minus1_siegel(K, data), o = zeta_minus1_oracle(K);
        if (s != o) return {false, "D = " + std::to_string(D) + ": " + s.get_str() + " vs " + o.get_str()};
        ++n;
    }
    return {true, std::to_string(n) + " fields with 2 <= D <= 500 agree exactly; spot values 1/30, 1/12, 1/6"};
}

Outcome coefficient_derivation() {
    const auto sample = default_b1_sample();
    const std::set<std::int64_t> must{5, 2, 3};
    std::size_t seen = 0;
    for (const auto& K : sample) seen += must.count(K.D());
    if (seen != 3 || sample.size() < 23) return {false, "sample lacks Q(sqrt 5), Q(sqrt 2), Q(sqrt 3) or 20 more"};
    try {
        const Rational b = derive_b1(sample);
        if (b != Rational(1, 240)) return {false, "derived " + b.get_str()};
        return {true, "b_1 = 1/240 from " + std::to_string(sample.size()) + " fields, no disagreement"};
    } catch (const Error& e) {
        return {false, e.what()};
    }
}

Outcome functional_equation() {
    double worst = 0;
    std::size_t n = 0;
    for (std::int64_t D : squarefree_upto(200)) {
        const QuadraticField K(D);
        if (K.disc() > 200) continue;
        const auto fe = functional_eq_check(K, 1e-6, 1e-9);
        worst = std::max(worst, fe.bound);
        if (!fe.pass || fe.residual > 1e-6)
            return {false, "D = " + std::to_string(D) + " residual " + std::to_string(fe.residual)};
        ++n;
    }
    return {true, std::to_string(n) + " fields with disc <= 200, worst certified residual bound " + cli::sci(worst)};
}

Outcome indecomposable_oracles() {
    std::size_t n = 0;
    for (std::int64_t D : squarefree_upto(60)) {
        const QuadraticField K(D);
        if (canon(indecomposables_ring(K)) != canon(i_indecomposables(unit_ideal(K))))
            return {false, "ring classes differ at D = " + std::to_string(D)};
        if (canon(indecomposables_pm(K)) != canon(pm_indecomposables_brute(K)))
            return {false, "(+,-) classes differ at D = " + std::to_string(D)};
        ++n;
    }
    return {true, std::to_string(n) + " fields D <= 60, odd and even index classes equal brute force"};
}

// beta in I with alpha - beta^2 totally positive, by a coordinate scan over the Z-basis of I
bool square_below(const FieldElement& alpha, const FracIdeal& I) {
    const auto [e1, e2] = I.basis();
    const double s1 = std::sqrt(alpha.approx().first), s2 = std::sqrt(alpha.approx().second);
    const double f1 = e1.approx().first, g1 = e2.approx().first, g2 = e2.approx().second;
    const long nmax = static_cast<long>((s1 + s2) / std::abs(g1 - g2)) + 1;
    for (long n = -nmax; n <= nmax; ++n) {
        const long mlo = static_cast<long>(std::floor((-s1 - n * g1) / f1)) - 1;
        const long mhi = static_cast<long>(std::ceil((s1 - n * g1) / f1)) + 1;
        for (long m = mlo; m <= mhi; ++m) {
            const FieldElement b = e1 * Rational(m) + e2 * Rational(n);
            if (!b.is_zero() && is_totally_positive(alpha - b * b)) return true;
        }
    }
    return false;
}

Outcome norm_bound() {
    std::mt19937_64 rng(7);
    std::vector<std::pair<FieldElement, FracIdeal>> above;
    std::size_t checked = 0, ideals = 0;
    for (std::int64_t D : squarefree_upto(60)) {
        const QuadraticField K(D);
        for (Integer n = 1; n <= 10; ++n)
            for (const FracIdeal& I : integral_ideals_of_norm(K, n)) {
                ++ideals;
                const Rational X = indecomposable_norm_bound(I);
                for (const auto& a : enumerate_window(I, Pattern::TotallyPositive, 2 * X)) {
                    if (norm(a) <= X) continue;
                    if (!is_decomposable(a, I))
                        return {false, "I-indecomposable " + a.to_string() + " above the bound in " + I.to_string()};
                    ++checked;
                    above.emplace_back(a, I);
                }
            }
    }
    std::shuffle(above.begin(), above.end(), rng);
    for (std::size_t k = 0; k < 100; ++k)
        if (!square_below(above[k].first, above[k].second))
            return {false, "no beta with alpha > beta^2 for " + above[k].first.to_string()};
    return {true, std::to_string(checked) + " elements with N(I) Disc < N <= 2 N(I) Disc over " + std::to_string(ideals) +
                      " ideals are decomposable; 100 random ones dominate a square"};
}

Outcome kappa_examples() {
    const auto k2 = kappa_field_bound(QuadraticField(2)), k3 = kappa_field_bound(QuadraticField(3));
    const QuadraticField K3(3);
    const auto cf = kappa_upper_cf(principal_ideal(K3.sqrt_d()));
    std::ostringstream os;
    os << "Q(sqrt 2): (" << k2.lower << "," << k2.upper << "), Q(sqrt 3): (" << k3.lower << "," << k3.upper
       << "), cf bound for (sqrt 3): " << cf;
    const bool ok = k2.lower == 1 && k2.upper == 1 && k3.lower == 2 && k3.upper == 2 && cf == 2;
    return {ok, os.str()};
}

Outcome short_vector_counts() {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> rank_d(1, 6), entry(-2, 2), bound_d(1, 3);
    std::size_t made = 0;
    while (made < 1000) {
        const std::size_t n = static_cast<std::size_t>(rank_d(rng));
        std::vector<std::vector<long>> a(n, std::vector<long>(n)), g(n, std::vector<long>(n));
        for (auto& row : a)
            for (auto& x : row) x = entry(rng);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k) g[i][j] += a[k][i] * a[k][j];
        std::optional<IntGram> G;
        try {
            G = IntGram::from_integers(g);
        } catch (const Error&) {
            continue;  // singular draw
        }
        ++made;
        const unsigned long i = static_cast<unsigned long>(bound_d(rng));
        const Integer count = count_short_vectors(*G, Integer(i)), cap = cap_C(n, i);
        if (count > cap)
            return {false, "rank " + std::to_string(n) + ", i = " + std::to_string(i) + ": " + count.get_str() + " > " +
                               cap.get_str()};
    }
    return {true, "1000 random integer Grams, rank <= 6, i <= 3: zero violations"};
}

Outcome lifting_bound() {
    const Interval b = lifting_disc_bound(2, derived_siegel_data());
    if (!b.certainly_greater(Rational(5)) || !b.certainly_less(Rational(8)))
        return {false, "bound [" + b.lo_string() + ", " + b.hi_string() + "] not inside (5, 8)"};
    std::vector<std::int64_t> admissible;
    for (std::int64_t disc = 2; disc < 9; ++disc)
        if (cli::is_fundamental_disc(disc) && b.certainly_greater(Rational(disc))) admissible.push_back(disc);
    if (admissible != std::vector<std::int64_t>{5}) return {false, "admissible discriminants are not {5}"};
    const long t = min_codifferent_trace(QuadraticField(5));
    if (t != 1 || r_d(2) != 1) return {false, "min codifferent trace " + std::to_string(t)};
    return {true, "bound " + b.lo_string(12) + " in (5, 8); disc 5 is the only admissible one; min trace 1 = r_2"};
}

Outcome rank_bound_end_to_end() {
    const QuadraticField K5(5);
    const auto& data = derived_siegel_data();
    const Interval rhs = main_rhs(Integer(5), 2, data);
    if (!rhs.certainly_greater(Rational(1843, 100000000)) || !rhs.certainly_less(Rational(1844, 100000000)))
        return {false, "rhs(5) = " + rhs.lo_string() + " is not about 1.84e-5"};
    if (min_rank_bound(Integer(5), 2, data) != 1) return {false, "min_rank_bound(5) != 1"};
    if (!rhs.certainly_less(Rational(cap_C(6, 1))) || cap_C(6, 1) != 167) return {false, "cap 167 > rhs fails"};
    const FieldElement delta = K5.element(Rational(1, 2), Rational(1, 10));
    const auto chain = verify_counting_chain(K5, diagonal_gram(K5, {1, 1, 1}), delta);
    if (!chain.holds) return {false, "counting chain fails for the sum of three squares"};
    const ThresholdCertificate t = disc_threshold(2, 1, data);
    if (min_rank_bound(t.disc0 + 1, 2, data) < 2) return {false, "min_rank_bound(disc0 + 1) < 2"};
    if (mpfr_cmp_q(t.rhs_at_next.lo().get(), Rational(t.cap).get_mpq_t()) < 0) return {false, "rhs(disc0 + 1) < cap"};
    if (t.disc0 + 1 < t.monotone_from) return {false, "threshold below the monotonicity point"};
    const Interval u = Interval::exact(16L);
    if (!(log(u) * log(log(u))).certainly_greater(Rational(2))) return {false, "monotonicity certificate undecided"};
    // sampled consequence of the certificate beyond disc0
    for (Integer x = t.disc0 + 1, k = 0; k < 40; ++k, x = x + x / 7 + 1)
        if (!main_rhs(x, 2, data).certainly_less(main_rhs(x + 1, 2, data)))
            return {false, "rhs not increasing at " + x.get_str()};
    return {true, "rhs(5) = " + rhs.lo_string(6) + ", R_min = 1, chain " + chain.lattice_side.get_str() +
                      " >= " + chain.element_side.get_str() + "; disc0 = " + t.disc0.get_str() +
                      " with R_min(disc0 + 1) = 2, monotone from " + t.monotone_from.get_str()};
}

Outcome verify_suites() {
    std::string detail;
    bool ok = true;
    for (const auto& [scope, limit] : std::vector<std::pair<std::string, double>>{{"quick", 180}, {"full", 1200}}) {
        std::ostringstream out, err;
        const auto t0 = std::chrono::steady_clock::now();
        const int code = cli::run({"verify", scope}, out, err);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ok = ok && code == 0 && secs < limit;
        detail += (detail.empty() ? "" : ", ") + scope + " exit " + std::to_string(code) + " in " +
                  std::to_string(static_cast<int>(std::round(secs))) + " s (limit " +
                  std::to_string(static_cast<int>(limit)) + ")";
    }
    return {ok, detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"siegel formula equals the oracle", siegel_equals_oracle},
        {"coefficient derivation", coefficient_derivation},
        {"functional equation", functional_equation},
        {"indecomposable oracle equivalence", indecomposable_oracles},
        {"indecomposable norm bound", norm_bound},
        {"kappa examples", kappa_examples},
        {"short vector counts", short_vector_counts},
        {"lifting bound", lifting_bound},
        {"rank bound end to end", rank_bound_end_to_end},
        {"verify quick and full", verify_suites},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += o.pass ? 0 : 1;
        std::printf("%s %2zu %-34s %7.1fs  %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
