#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "uqf/bounds.hpp"
#include "uqf/zeta.hpp"

using namespace uqf;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::DomainError;
}

std::vector<std::int64_t> squarefree_upto(std::int64_t n) {
    std::vector<std::int64_t> out;
    for (std::int64_t D = 2; D <= n; ++D)
        if (is_squarefree(D)) out.push_back(D);
    return out;
}

// Classical form of the trace-one sum: sum of sigma((disc - b^2)/4) over b = disc mod 2, b^2 < disc.
Integer s1_by_b_sum(std::int64_t disc) {
    Integer total = 0;
    for (std::int64_t b = -disc; b <= disc; ++b) {
        if (b * b >= disc || (b - disc) % 2 != 0) continue;
        total += divisor_sum(Integer((disc - b * b) / 4));
    }
    return total;
}

// gamma = l/2 + y sqrt(D) over a generous grid of y in (1/(2D))Z, kept when tp and in the codifferent.
std::set<FieldElement> trace_level_by_scan(const QuadraticField& K, long l) {
    const FracIdeal codiff = different_codifferent(K).codifferent;
    std::set<FieldElement> out;
    const long reach = 4 * l * K.D() + 4;
    for (long k = -reach; k <= reach; ++k) {
        const FieldElement g = K.element(Rational(l, 2), Rational(k, 2 * K.D()));
        if (is_totally_positive(g) && codiff.contains(g)) out.insert(g);
    }
    return out;
}

}  // namespace

TEST(TraceLevel, Examples) {
    const auto K5 = field_new(5), K2 = field_new(2);
    const auto t5 = trace_level_codifferent(K5, 1);
    const std::set<FieldElement> s5(t5.begin(), t5.end());
    EXPECT_EQ(s5, (std::set<FieldElement>{K5.omega() / K5.sqrt_d(), (K5.omega() - K5.one()) / K5.sqrt_d()}));
    const auto t2 = trace_level_codifferent(K2, 1);
    const std::set<FieldElement> s2(t2.begin(), t2.end());
    EXPECT_EQ(s2, (std::set<FieldElement>{K2.element(Rational(1, 2)), K2.element(Rational(1, 2), Rational(1, 4)),
                                          K2.element(Rational(1, 2), Rational(-1, 4))}));
    EXPECT_EQ(kind_of([&] { trace_level_codifferent(K2, 0); }), ErrorKind::PreconditionViolation);
}

TEST(TraceLevel, MatchesMembershipScan) {
    for (std::int64_t D : squarefree_upto(80)) {
        const QuadraticField K(D);
        for (long l = 1; l <= 3; ++l) {
            const auto v = trace_level_codifferent(K, l);
            const std::set<FieldElement> got(v.begin(), v.end());
            EXPECT_EQ(got.size(), v.size());
            EXPECT_EQ(got, trace_level_by_scan(K, l)) << D << " " << l;
        }
    }
}

TEST(SEll, Examples) {
    EXPECT_EQ(s_ell(field_new(5), 1), 2);
    EXPECT_EQ(s_ell(field_new(2), 1), 5);
    EXPECT_EQ(s_ell(field_new(3), 1), 10);
}

TEST(SEll, MatchesClassicalDivisorSum) {
    for (std::int64_t D : squarefree_upto(300)) {
        const QuadraticField K(D);
        EXPECT_EQ(s_ell(K, 1), s1_by_b_sum(K.disc())) << D;
    }
}

TEST(SEll, AtLeastTheNumberOfElements) {
    for (std::int64_t D : squarefree_upto(100))
        for (long l = 1; l <= 3; ++l) {
            const QuadraticField K(D);
            EXPECT_GE(s_ell(K, l), Integer(trace_level_codifferent(K, l).size())) << D;
        }
}

TEST(Oracle, Examples) {
    EXPECT_EQ(zeta_minus1_oracle(field_new(5)), Rational(1, 30));
    EXPECT_EQ(zeta_minus1_oracle(field_new(2)), Rational(1, 12));
    EXPECT_EQ(zeta_minus1_oracle(field_new(3)), Rational(1, 6));
}

TEST(DeriveB1, ExamplesAndConsistency) {
    EXPECT_EQ(derive_b1({field_new(5)}), Rational(1, 240));
    EXPECT_EQ(derive_b1({field_new(2)}), Rational(1, 240));
    EXPECT_EQ(derive_b1({field_new(5), field_new(2), field_new(3)}), Rational(1, 240));
    EXPECT_EQ(derive_b1(default_b1_sample()), Rational(1, 240));
    EXPECT_EQ(default_b1_sample().size(), 23u);
    EXPECT_EQ(derived_siegel_data().provenance, Provenance::Derived);
    EXPECT_EQ(derived_siegel_data().coeffs.size(), 1u);
    EXPECT_EQ(kind_of([] { derive_b1({}); }), ErrorKind::PreconditionViolation);
}

TEST(Siegel, ExamplesAndErrors) {
    const auto& data = derived_siegel_data();
    EXPECT_EQ(zeta_minus1_siegel(field_new(5), data), Rational(1, 30));
    EXPECT_EQ(zeta_minus1_siegel(field_new(2), data), Rational(1, 12));
    EXPECT_EQ(zeta_minus1_siegel(field_new(3), data), Rational(1, 6));
    const SiegelData cubic{3, {Rational(1)}, Provenance::External};
    EXPECT_EQ(kind_of([&] { zeta_minus1_siegel(field_new(5), cubic); }), ErrorKind::DegreeUnsupported);
}

TEST(Siegel, EqualsOracleAndIsPositive) {
    const auto& data = derived_siegel_data();
    for (std::int64_t D : squarefree_upto(500)) {
        const QuadraticField K(D);
        const Rational z = zeta_minus1_siegel(K, data);
        EXPECT_EQ(z, zeta_minus1_oracle(K)) << D;
        EXPECT_GT(z, 0) << D;
    }
}

TEST(Siegel, WrongCoefficientIsCaught) {
    const SiegelData bad{2, {Rational(1, 120)}, Provenance::External};
    EXPECT_NE(zeta_minus1_siegel(field_new(2), bad), zeta_minus1_oracle(field_new(2)));
}

TEST(CoefficientFile, Parsing) {
    std::istringstream in("# table\n2 1 1/240\n3 1 -1/504  # comment\n\n");
    const auto d2 = load_siegel_data(in, 2);
    EXPECT_EQ(d2.coeffs, std::vector<Rational>{Rational(1, 240)});
    EXPECT_EQ(d2.provenance, Provenance::External);
    std::istringstream in6("6 1 1/7\n");
    EXPECT_EQ(kind_of([&] { load_siegel_data(in6, 6); }), ErrorKind::MissingCoefficient);
    std::istringstream bad("2 x 1/3\n");
    EXPECT_EQ(kind_of([&] { load_siegel_data(bad, 2); }), ErrorKind::ParseError);
    std::istringstream range("2 2 1/3\n");
    EXPECT_EQ(kind_of([&] { load_siegel_data(range, 2); }), ErrorKind::RangeError);
    EXPECT_EQ(kind_of([] { load_siegel_data(std::string("/nonexistent/coeffs.txt"), 2); }), ErrorKind::ParseError);
}

TEST(Zeta2, ContainsReferenceValues) {
    // zeta(2) L(2, chi) evaluated independently to 30 digits
    const std::vector<std::pair<std::int64_t, double>> ref{
        {5, 1.16167119561863854976}, {2, 1.43497143373668436931}, {3, 1.56219902583327968452}};
    for (const auto& [D, v] : ref) {
        const Interval z = zeta2_numeric(field_new(D), 1e-8);
        EXPECT_TRUE(z.contains(v)) << D << " [" << z.lo_string() << ", " << z.hi_string() << "]";
        EXPECT_LE(z.width(), 2e-8);
        EXPECT_GT(z.lower(), 1.0);
    }
}

TEST(Zeta2, ShrinksAndContainsFunctionalEquationValue) {
    for (std::int64_t D : {2, 3, 5, 13, 37}) {
        const QuadraticField K(D);
        // zeta_K(2) implied by the exact zeta_K(-1)
        const Interval implied = Interval::exact(zeta_minus1_oracle(K)) / functional_factor(K);
        double prev = 1e300;
        for (double err : {0.5, 1e-2, 1e-4, 1e-6}) {
            const Interval z = zeta2_numeric(K, err);
            EXPECT_LE(z.width(), 2 * err);
            EXPECT_LE(z.width(), prev);
            prev = z.width();
            EXPECT_FALSE(z.certainly_less(implied) || z.certainly_greater(implied)) << D << " " << err;
            EXPECT_GT(z.lower(), 1.0);
        }
    }
    EXPECT_EQ(kind_of([] { zeta2_numeric(field_new(2), 0); }), ErrorKind::PreconditionViolation);
}

TEST(FunctionalEquation, Examples) {
    EXPECT_TRUE(functional_eq_check(field_new(5), 1e-6).pass);
    EXPECT_TRUE(functional_eq_check(field_new(2), 1e-6).pass);
    const auto coarse = functional_eq_check(field_new(3), 1e-20, 1e-3);
    EXPECT_FALSE(coarse.pass);
    EXPECT_GT(coarse.slack, 1e-20);
    EXPECT_GE(coarse.bound, coarse.residual);
}

TEST(FunctionalEquation, AllSmallDiscriminants) {
    for (std::int64_t D : squarefree_upto(200)) {
        const QuadraticField K(D);
        if (K.disc() > 200) continue;
        const auto fe = functional_eq_check(K, 1e-6, 1e-9);
        EXPECT_TRUE(fe.pass) << D << " residual " << fe.residual << " bound " << fe.bound;
    }
}

TEST(Report, Fields) {
    const auto r = zeta_report(field_new(5));
    EXPECT_EQ(r.disc, 5);
    ASSERT_EQ(r.s_values.size(), 1u);
    EXPECT_EQ(r.s_values[0].second, 2);
    EXPECT_EQ(r.zeta_minus1, r.oracle_minus1);
    EXPECT_TRUE(r.fe_pass);
}

TEST(DivisorDomination, SigmaBoundedByGAtTheLevelsTheRankBoundUses) {
    // sigma((gamma) * different) <= g(l, 2, disc) for l <= r_2 whenever the codifferent has a tp generator
    for (std::int64_t D : squarefree_upto(200)) {
        const QuadraticField K(D);
        if (!codifferent_tp_principal(K)) continue;
        const FracIdeal diff = different_codifferent(K).different;
        for (long l = 1; l <= static_cast<long>(r_d(2)); ++l) {
            const Interval g = g_bound(static_cast<unsigned long>(l), 2, Integer(K.disc()));
            for (const auto& gamma : trace_level_codifferent(K, l)) {
                const Integer s = sigma_ideal(principal_ideal(gamma) * diff);
                EXPECT_FALSE(g.certainly_less(Rational(s))) << D << " " << gamma.to_string();
            }
        }
    }
}

TEST(DivisorDomination, CanFailAboveThoseLevels) {
    // Q(sqrt 17), gamma = 1 + sqrt(17)/17: (gamma) * different = (1 + sqrt 17) = P^3 P' over a split 2,
    // so sigma = 15 * 3 = 45 while sigma'(16) = 31 and g(2, 17) < 43
    const auto K = field_new(17);
    ASSERT_TRUE(codifferent_tp_principal(K).has_value());
    const FieldElement gamma = K.element(Rational(1), Rational(1, 17));
    const auto level2 = trace_level_codifferent(K, 2);
    ASSERT_NE(std::find(level2.begin(), level2.end(), gamma), level2.end());
    const FracIdeal J = principal_ideal(gamma) * different_codifferent(K).different;
    EXPECT_EQ(J.norm(), 16);
    EXPECT_EQ(sigma_ideal(J), 45);
    EXPECT_EQ(divisor_sum(Integer(16)), 31);
    EXPECT_TRUE(g_bound(2, 2, Integer(17)).certainly_less(Rational(45)));
}
