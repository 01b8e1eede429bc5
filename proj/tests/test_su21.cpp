#include <gtest/gtest.h>

#include "curvkit/errors.hpp"
#include "curvkit/su21.hpp"

using namespace curvkit;
using namespace curvkit::su21;

namespace {

AlgebraElement b(int i) { return AlgebraElement::basis(i); }

Coords<Rational> rc(int i) { return b(i).coords; }

Coords<double> dc(int i) { return b(i).to_double(); }

Rational q(const char* s) { return parse_rational(s); }

Rational frac(long p, long d)
{
    Rational r(p, d);
    r.canonicalize();
    return r;
}

}  // namespace

TEST(Basis, MatricesLieInSu21)
{
    for (int i = 0; i < kDim; ++i) EXPECT_TRUE(in_su21(basis_matrix(i))) << i;
    for (int i = 0; i < kDim; ++i) EXPECT_EQ(AlgebraElement::from_matrix(basis_matrix(i)), b(i));
}

TEST(Bracket, TableEntries)
{
    EXPECT_EQ(bracket(b(E2), b(E3)), b(E4) * 2);
    EXPECT_EQ(bracket(b(F1), b(F2)), b(E3));
    EXPECT_EQ(bracket(b(E2), b(F1)), b(F3));
    AlgebraElement x = b(E2) * q("3/7") + b(F4) * q("-2") + b(E1);
    EXPECT_TRUE(bracket(x, x).is_zero());
}

TEST(Bracket, CoordinateTableMatchesMatrices)
{
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) EXPECT_EQ(AlgebraElement(bracket_coords(rc(i), rc(j))), bracket(b(i), b(j)));
}

TEST(FormB, Values)
{
    EXPECT_EQ(form_B(b(E1), b(E1)), 6);
    EXPECT_EQ(form_B(b(E2), b(E2)), 2);
    EXPECT_EQ(form_B(b(F1), b(F1)), -2);
    EXPECT_EQ(form_B(b(E2), b(F1)), 0);
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) EXPECT_EQ(form_B_coords(rc(i), rc(j)), form_B(b(i), b(j)));
}

TEST(Projection, Blocks)
{
    EXPECT_EQ(project(b(E1), 0), b(E1));
    EXPECT_EQ(project(b(F3), 2), b(F3));
    EXPECT_TRUE(project(b(F3), 1).is_zero());
    AlgebraElement x = b(E2) + b(F1);
    EXPECT_EQ(project(x, 1), b(E2));
    EXPECT_EQ(project(x, 2), b(F1));
}

TEST(Metric, Values)
{
    EXPECT_EQ(metric_t(rc(E2), rc(E2), q("-0.5")), 1);
    EXPECT_EQ(metric_t(rc(F1), rc(F1), q("0.3")), -2);
    EXPECT_EQ(metric_t(rc(E2), rc(F1), q("0.3")), 0);
}

TEST(Quartic, Examples)
{
    const Rational t = q("-0.8");
    EXPECT_EQ(curvature_quartic(rc(F1), rc(F2), t), (1 - 3 * t) / 2);
    EXPECT_EQ(curvature_quartic(rc(E2), rc(E3), t), 2 * (1 + t));
    EXPECT_EQ(curvature_quartic(rc(F2), rc(F2), t), 0);
    EXPECT_NEAR(curvature_quartic(dc(F1), dc(F2), -0.8), 1.7, 1e-15);
}

TEST(Quartic, RejectsNonTangent)
{
    EXPECT_THROW(curvature_quartic(rc(E1), rc(F2), Rational(0)), NonTangentError);
}

TEST(Gram, Examples)
{
    const Rational t = q("-3/4");
    auto ff = xyz_and_gram(rc(F1), rc(F2), t);
    EXPECT_EQ(ff.x2, 0);
    EXPECT_EQ(ff.y2, 1);
    EXPECT_EQ(ff.z2, 0);
    EXPECT_EQ(ff.gram, 4);
    EXPECT_EQ(gram_direct(rc(F1), rc(F2), t), 4);
    auto ee = xyz_and_gram(rc(E2), rc(E3), t);
    EXPECT_EQ(ee.x2, 1);
    EXPECT_EQ(ee.y2, 0);
    EXPECT_EQ(ee.gram, 4 * (1 + t) * (1 + t));
    EXPECT_EQ(gram_direct(rc(E2), rc(E3), t), ee.gram);
    EXPECT_EQ(xyz_and_gram(rc(F3), rc(F3), t).gram, 0);
}

TEST(DetIdentity, BasisExamples)
{
    EXPECT_EQ(det_identity_residual(rc(F1), rc(F2)), 0);
    EXPECT_EQ(det_identity_residual(rc(E2), rc(F1)), 0);
}

TEST(ExactChecks, AllHold)
{
    auto pairs = random_rational_pairs(200, 1);
    for (const auto& c : {check_bracket_containments(), check_jacobi(), check_ad_invariance(),
                          check_det_identity(pairs), check_gram_identity(pairs, q("-0.8")),
                          check_quartic_forms(pairs, q("-0.8"))}) {
        EXPECT_TRUE(c.passed()) << c.name << " failures=" << c.failures;
        EXPECT_GT(c.cases, 0u) << c.name;
    }
    EXPECT_EQ(check_bracket_containments().cases, 36u);
    EXPECT_EQ(check_jacobi().cases, 512u);
}

TEST(RandomPairs, Deterministic)
{
    auto a = random_rational_pairs(20, 9);
    auto c = random_rational_pairs(20, 9);
    ASSERT_EQ(a.size(), 20u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].first, c[i].first);
        EXPECT_EQ(a[i].first[E1], 0);
    }
}

TEST(Eta, ReferenceValues)
{
    // independent 30-digit evaluations of the smaller root
    EXPECT_NEAR(eta(-0.8), 0.2247475005074722128, 1e-14);
    EXPECT_NEAR(eta(-0.9), 0.3532502496846220232, 1e-14);
    EXPECT_NEAR(eta(-0.7), 0.1240478466121426374, 1e-14);
    EXPECT_NEAR(eta(-0.5), -0.002969472179030828, 1e-14);
    EXPECT_NEAR(eta(0.0), -0.1067627457812105681, 1e-14);
    EXPECT_NEAR(eta(-0.6), 0.05, 1e-14);
    EXPECT_THROW(eta(-1.0), DomainError);
}

TEST(Eta, WindowAgainstLowerBound)
{
    for (double t : {-0.9, -0.8, -0.7}) EXPECT_LT((1 + t) / 8, eta(t)) << t;
    EXPECT_GT((1 - 0.5) / 8, eta(-0.5));
}

TEST(Feasibility, Examples)
{
    auto ok = feasible(make_params(q("-0.8"), q("0.1")));
    EXPECT_TRUE(ok.all);
    for (bool b : ok.ineq) EXPECT_TRUE(b);
    auto out = feasible(make_params(q("-0.5"), q("0.2")));
    EXPECT_FALSE(out.ineq[3]);
    EXPECT_FALSE(out.all);
    auto big = feasible(make_params(q("-0.8"), q("0.5")));
    EXPECT_FALSE(big.ineq[2]);
    EXPECT_THROW(make_params(q("-1"), q("0.1")), DomainError);
    EXPECT_THROW(make_params(q("-0.5"), q("0")), DomainError);
}

namespace {

// Any of the four strict inequalities holding with equality.
bool on_boundary(const Rational& t, const Rational& k)
{
    const Rational opt = 1 + t, omt2 = 1 - t * t;
    const Rational lhs = (2 * opt - 4 * k * opt * opt) * ((1 - 3 * t) / 2 - 4 * k);
    return 8 * k == opt || 2 * k * opt == 1 || 8 * k == 1 - 3 * t || lhs == Rational(9, 4) * omt2 * omt2;
}

}  // namespace

TEST(Feasibility, DoubleAndExactAgreeOffBoundary)
{
    // 8k = 1 + t exactly; doubles round 1 - 0.92 below 0.08
    EXPECT_TRUE(on_boundary(q("-0.92"), q("0.01")));
    for (int ti = 1; ti < 100; ++ti)
        for (int ki = 1; ki <= 50; ki += 7) {
            Rational t = frac(ti - 100, 100), k = frac(ki, 100);
            if (on_boundary(t, k)) continue;
            EXPECT_EQ(feasible(make_params(t, k)).all, feasible(make_params(as_double(t), as_double(k))).all)
                << t.get_str() << " " << k.get_str();
        }
}

TEST(Feasibility, IntervalEndpoints)
{
    for (const char* ts : {"-0.9", "-0.8", "-0.7", "-0.65"}) {
        const Rational t = q(ts);
        auto iv = feasible_k_intervals(t);
        ASSERT_EQ(iv.size(), 1u) << ts;
        const double td = as_double(t);
        EXPECT_NEAR(iv[0].first, (1 + td) / 8, 1e-9) << ts;
        EXPECT_NEAR(iv[0].second, eta(td), 1e-9) << ts;
    }
    EXPECT_TRUE(feasible_k_intervals(q("-0.5")).empty());
}

TEST(Scan, CoarseGridWindow)
{
    std::vector<Rational> ts, ks;
    for (int i = 1; i <= 9; ++i) ts.push_back(frac(-i, 10));
    for (int i = 1; i <= 50; ++i) ks.push_back(frac(i, 100));
    auto grid = scan_region(ts, ks, 0);
    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
        bool any = false;
        for (std::size_t ki = 0; ki < ks.size(); ++ki) any = any || grid.at(ti, ki).feasible;
        const double t = grid.t_values[ti];
        EXPECT_EQ(any, t < -0.65) << t;
    }
}

TEST(Scan, SampledMarginsPositiveOnFeasibleCells)
{
    auto grid = scan_region({q("-0.8")}, {q("0.1"), q("0.5")}, 2000, {0, 2});
    ASSERT_TRUE(grid.at(0, 0).min_margin);
    EXPECT_TRUE(grid.at(0, 0).feasible);
    EXPECT_GT(*grid.at(0, 0).min_margin, 0.0);
    EXPECT_FALSE(grid.at(0, 1).feasible);
}

TEST(Scan, CsvLayout)
{
    auto grid = scan_region({q("-0.8")}, {q("0.1")}, 0);
    EXPECT_EQ(to_csv(grid), "t,k,ineq1,ineq2,ineq3,ineq4,feasible,min_margin\n-0.8,0.1,true,true,true,true,true,\n");
}

TEST(SampledMargin, FeasibleCellAndLowerBound)
{
    auto m = sampled_margin(-0.8, 0.1, 10000, 0);
    EXPECT_EQ(m.samples, 10000u);
    EXPECT_GT(m.min_margin, 0.0);
    EXPECT_EQ(m.lower_bound_violations, 0u);
    EXPECT_EQ(sampled_min_margin(-0.8, 0.1, 10000, 0), m.min_margin);
}

TEST(SampledMargin, WitnessAtInfeasibleK)
{
    const Rational t = q("-0.8"), k = q("0.5");
    const Rational margin = curvature_quartic(rc(F1), rc(F2), t) - k * xyz_and_gram(rc(F1), rc(F2), t).gram;
    EXPECT_EQ(margin, q("-0.3"));
}

TEST(EulerArnold, RhsExamples)
{
    const Rational t = q("-0.8");
    EXPECT_EQ(euler_arnold_rhs(b(E2) + b(F1), t), b(F3) * t);
    EXPECT_TRUE(euler_arnold_rhs(b(F1) + b(F4), t).is_zero());
    EXPECT_TRUE(euler_arnold_rhs(b(E2) + b(E3), t).is_zero());
    EXPECT_THROW(euler_arnold_rhs(b(E1), t), NonTangentError);
}

TEST(NonIntegrability, Witness)
{
    auto w = nonintegrability_witness();
    EXPECT_EQ(w.x, b(F1));
    EXPECT_EQ(w.y, b(F2));
    EXPECT_EQ(w.vertical, b(E3));
    auto f13 = bracket(b(F1), b(F3));
    EXPECT_FALSE((project(f13, 0) + project(f13, 1)).is_zero());
    auto e23 = bracket(b(E2), b(E3));
    EXPECT_EQ(project(e23, 1), e23);
}

TEST(Rational, ParseAndRound)
{
    EXPECT_EQ(q("-0.8"), Rational(-4, 5));
    EXPECT_EQ(q("3/4"), Rational(3, 4));
    EXPECT_EQ(q("1e-2"), Rational(1, 100));
    EXPECT_EQ(nearest_double(Rational(-4, 5)), -0.8);
    EXPECT_EQ(nearest_double(Rational(1, 10)), 0.1);
    EXPECT_THROW(q("abc"), UsageError);
    EXPECT_THROW(q("1/0"), UsageError);
}

TEST(Element, ParseRoundTrip)
{
    AlgebraElement x = b(E2) * q("3/2") - b(F3);
    EXPECT_EQ(AlgebraElement::parse(x.to_string()), x);
    EXPECT_EQ(AlgebraElement::parse("0,1,0,0,0,0,0,0"), b(E2));
    EXPECT_THROW(AlgebraElement::parse("1,2,3"), UsageError);
    EXPECT_THROW(AlgebraElement::parse("0,x,0,0,0,0,0,0"), UsageError);
}
