#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "curvkit/errors.hpp"
#include "curvkit/geodesic.hpp"

using namespace curvkit;

namespace {

Vec vec(std::initializer_list<double> xs)
{
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

WarpedProductSpec busemann_torus(double scale = 1.0)
{
    return warped_product(hyperbolic(2), flat_torus(2), Warping::busemann(2, scale));
}

// Latitude circle |x| = r of the stereographic sphere, parametrised on [0, 2π].
Trajectory latitude(double r, int n)
{
    Trajectory c;
    for (int i = 0; i <= n; ++i) {
        const double t = 2 * std::numbers::pi * i / n;
        c.times.push_back(t);
        c.states.push_back(vec({r * std::cos(t), r * std::sin(t), -r * std::sin(t), r * std::cos(t)}));
    }
    return c;
}

double wrap(double a)
{
    a = std::fmod(a, 2 * std::numbers::pi);
    if (a > std::numbers::pi) a -= 2 * std::numbers::pi;
    if (a < -std::numbers::pi) a += 2 * std::numbers::pi;
    return a;
}

}  // namespace

TEST(Geodesic, FlatChartStraightLine)
{
    auto tr = integrate(geodesic_rhs(euclidean(2)), vec({1, 2, 0.5, -1}), 0.0, 4.0);
    EXPECT_EQ(tr.status, Status::Completed);
    EXPECT_NEAR(tr.states.back()[0], 3.0, 1e-12);
    EXPECT_NEAR(tr.states.back()[1], -2.0, 1e-12);
}

TEST(Geodesic, SphereEquatorPeriod)
{
    // unit circle of the stereographic chart is a great circle; unit speed there
    const Vec y0 = vec({1, 0, 0, 1});
    auto tr = integrate(geodesic_rhs(sphere(2)), y0, 0.0, 2 * std::numbers::pi);
    EXPECT_EQ(tr.status, Status::Completed);
    EXPECT_NEAR(tr.states.back()[0], 1.0, 1e-4);
    EXPECT_NEAR(tr.states.back()[1], 0.0, 1e-4);
}

TEST(Geodesic, HyperbolicVerticalLine)
{
    auto tr = integrate(geodesic_rhs(hyperbolic(2)), vec({0, 1, 0, 1}), 0.0, 3.0);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        EXPECT_NEAR(tr.states[i][1], std::exp(tr.times[i]), 1e-5 * std::exp(tr.times[i]));
        EXPECT_NEAR(tr.states[i][0], 0.0, 1e-12);
    }
}

TEST(Geodesic, EnergyConserved)
{
    auto c = assemble(busemann_torus());
    const Vec y0 = vec({0.1, 1.0, 0.2, 0.3, 0.4, -0.3, 0.5, 0.2});
    auto tr = integrate(geodesic_rhs(c), y0, 0.0, 2.0);
    const double e0 = energy(c, y0);
    for (const auto& s : tr.states) EXPECT_NEAR(energy(c, s), e0, 2e-6);
}

TEST(Geodesic, WarpedSplitMatchesAssembled)
{
    auto spec = busemann_torus(0.5);
    const Vec y0 = vec({0.1, 1.0, 0.2, 0.3, 0.4, -0.3, 0.5, 0.2});
    auto a = integrate(geodesic_rhs(assemble(spec)), y0, 0.0, 1.5);
    auto b = integrate(warped_geodesic_rhs(spec), y0, 0.0, 1.5);
    EXPECT_LE((a.states.back() - b.states.back()).norm(), 1e-5);
}

TEST(Geodesic, PlainProductDecouples)
{
    auto spec = plain_product(hyperbolic(2), flat_torus(2));
    const Vec y0 = vec({0, 1, 0.2, 0.3, 0, 1, 0.5, -0.2});
    auto tr = integrate(warped_geodesic_rhs(spec), y0, 0.0, 2.0);
    const Vec& y = tr.states.back();
    EXPECT_NEAR(y[1], std::exp(2.0), 1e-5 * std::exp(2.0));
    EXPECT_NEAR(y[2], 1.2, 1e-10);
    EXPECT_NEAR(y[3], -0.1, 1e-10);
}

TEST(Geodesic, TwistedSplitRejected)
{
    auto spec = twisted_product(hyperbolic(2), flat_torus(2), Warping::constant(0.0));
    EXPECT_THROW(warped_geodesic_rhs(spec), UnsupportedSpaceError);
}

TEST(ClosedForm, LightlikeValues)
{
    auto s0 = lightlike_s(0.0, 1.0, 1.0, 0.0);
    EXPECT_EQ(s0.s, 0.0);
    EXPECT_GT(lightlike_s(-1.0 + 1e-8, 1.0, 1.0, 0.0).s, 18.0);
    EXPECT_DOUBLE_EQ(lightlike_singular_time(1.0, 1.0), -1.0);
    EXPECT_DOUBLE_EQ(lightlike_singular_time(4.0, 1.0), -0.5);
}

TEST(ClosedForm, TimelikeValues)
{
    EXPECT_NEAR(timelike_singular_time(1.0, 0.5), 0.34657359027997265, 1e-15);
    EXPECT_NEAR(timelike_s(0.0, 1.0, 0.5, 0.0).ds, 3.0, 1e-14);
    EXPECT_THROW(timelike_s(0.0, 1.0, -0.5, 0.0), DomainError);
    EXPECT_THROW(lightlike_s(-1.0, 1.0, 1.0, 0.0), DomainError);
}

TEST(ClosedForm, ResidualsSmall)
{
    for (double k : {0.25, 1.0, 4.0}) {
        const double tl = lightlike_singular_time(k, 1.0);
        const double tt = timelike_singular_time(k, 0.5);
        for (int i = 0; i < 100; ++i) {
            const double f = 0.05 + 0.9 * i / 99.0;
            EXPECT_LE(lightlike_s_residual(tl + f * std::abs(tl) * 2, k, 1.0, 0.0), 1e-6);
            EXPECT_LE(timelike_s_residual(tt - f * 2 * tt, k, 0.5, 0.0), 1e-6);
        }
    }
}

TEST(Demo, BreakdownMatchesClosedForm)
{
    for (double k : {0.25, 1.0, 4.0}) {
        auto rep = incompleteness_demo(2, 2, k);
        EXPECT_TRUE(rep.passed) << k;
        ASSERT_TRUE(rep.lightlike.closed_form_time && rep.timelike.closed_form_time);
        EXPECT_DOUBLE_EQ(*rep.lightlike.closed_form_time, -1.0 / std::sqrt(k));
        EXPECT_DOUBLE_EQ(*rep.timelike.closed_form_time, std::log(2.0) / (2 * std::sqrt(k)));
        EXPECT_NE(rep.lightlike.trajectory.status, Status::Completed);
        EXPECT_NE(rep.timelike.trajectory.status, Status::Completed);
        EXPECT_LE(rep.lightlike.relative_error, 1e-2);
        EXPECT_LE(rep.timelike.relative_error, 1e-2);
        EXPECT_EQ(rep.control.trajectory.status, Status::Completed);
        EXPECT_EQ(rep.control.backward.status, Status::Completed);
    }
}

TEST(Demo, RejectsTimelikeConstantOutsideUnitInterval)
{
    DemoOptions o;
    o.c1_timelike = 1.5;
    EXPECT_THROW(incompleteness_demo(2, 2, 1.0, o), DomainError);
}

TEST(Transport, FlatChartConstant)
{
    Trajectory line = integrate(geodesic_rhs(euclidean(2)), vec({0, 0, 1, 1}), 0.0, 2.0);
    auto tr = parallel_transport(euclidean(2), line, vec({0.3, -0.7}));
    EXPECT_LE((tr.states.back() - vec({0.3, -0.7})).norm(), 1e-12);
}

TEST(Transport, SphereHolonomy)
{
    auto S = sphere(2);
    for (double r : {0.5, 0.8}) {
        auto tr = parallel_transport(S, latitude(r, 4000), vec({1, 0}));
        const Vec v = tr.states.back();
        const double angle = std::atan2(v[1], v[0]);
        const double theta = 2 * std::atan(r);
        EXPECT_NEAR(wrap(angle - 2 * std::numbers::pi * (1 - std::cos(theta))), 0.0, 1e-4) << r;
        EXPECT_NEAR(v.norm(), 1.0, 1e-6);
    }
}

TEST(Transport, VerticalFieldsStayVertical)
{
    for (const auto& spec : {plain_product(hyperbolic(2), flat_torus(2)), busemann_torus()}) {
        auto c = assemble(spec);
        auto curve = integrate(geodesic_rhs(c), vec({0, 1, 0.3, 0.2, 0.6, 0.4, 0, 0}), 0.0, 3.0);
        auto tr = parallel_transport(c, curve, vec({0, 0, 1, -0.5}));
        EXPECT_LE(verticality_check(spec, tr), 1e-6);
    }
}

TEST(Horizontality, GeodesicStaysHorizontal)
{
    auto plain = plain_product(hyperbolic(2), flat_torus(2));
    auto tp = integrate(geodesic_rhs(assemble(plain)), vec({0, 1, 0.3, 0.2, 0.6, 0.4, 0, 0}), 0.0, 3.0);
    EXPECT_LE(horizontality_check(plain, tp), 1e-10);
    auto warped = busemann_torus();
    auto tw = integrate(geodesic_rhs(assemble(warped)), vec({0, 1, 0.3, 0.2, 0.6, 0.4, 0, 0}), 0.0, 3.0);
    EXPECT_LE(horizontality_check(warped, tw), 1e-6);
}

TEST(Horizontality, NonHorizontalDataDetected)
{
    auto warped = busemann_torus();
    auto tw = integrate(geodesic_rhs(assemble(warped)), vec({0, 1, 0.3, 0.2, 0.6, 0.4, 0.5, 0}), 0.0, 1.0);
    EXPECT_GT(horizontality_check(warped, tw), 0.1);
}

TEST(Riccati, Examples)
{
    auto rep = riccati_experiment(1.0, {0.0, 1.0, -1.5}, 50.0);
    ASSERT_EQ(rep.runs.size(), 3u);
    const auto& zero = rep.runs[0];
    EXPECT_TRUE(zero.passed);
    EXPECT_LT(zero.sup_forward, 1.0 + 1e-6);
    for (std::size_t i = 0; i < zero.forward.times.size(); i += 50)
        EXPECT_NEAR(zero.forward.states[i][0], std::tanh(zero.forward.times[i]), 1e-8);
    const auto& eq = rep.runs[1];
    EXPECT_TRUE(eq.passed);
    for (const auto& s : eq.forward.states) EXPECT_EQ(s[0], 1.0);
    const auto& out = rep.runs[2];
    EXPECT_FALSE(out.inside);
    ASSERT_TRUE(out.closed_form_blowup);
    EXPECT_NEAR(*out.closed_form_blowup, 0.5 * std::log(5.0), 1e-14);
    EXPECT_NE(out.forward.status, Status::Completed);
    EXPECT_TRUE(out.passed);
    EXPECT_TRUE(rep.passed);
}

TEST(Riccati, BoundInsideInterval)
{
    std::vector<double> h0s;
    for (int i = 0; i < 20; ++i) h0s.push_back(-2.0 + 4.0 * i / 19.0);
    auto rep = riccati_experiment(4.0, h0s, 50.0);
    EXPECT_TRUE(rep.passed);
    for (const auto& r : rep.runs) EXPECT_LE(std::max(r.sup_forward, r.sup_backward), 2.0 + 1e-6);
}

TEST(EulerArnold, RotationAndConservation)
{
    using namespace su21;
    auto run = euler_arnold_integrate(AlgebraElement::basis(E2), AlgebraElement::basis(F1), -0.8, 100.0);
    EXPECT_EQ(run.trajectory.status, Status::Completed);
    EXPECT_LE(run.gamma1_drift, 1e-8);
    EXPECT_LE(run.closed_form_error, 1e-6);
    EXPECT_LE(run.bnorm_drift, 1e-6);
    const Vec& y = run.trajectory.states.back();
    EXPECT_NEAR(y[F1], std::cos(-80.0), 1e-6);
    EXPECT_NEAR(y[F3], std::sin(-80.0), 1e-6);
}

TEST(EulerArnold, TrivialDataConstant)
{
    using namespace su21;
    for (auto [v1, v2] : {std::pair{AlgebraElement(), AlgebraElement::basis(F2)},
                          std::pair{AlgebraElement::basis(E3), AlgebraElement()}}) {
        auto run = euler_arnold_integrate(v1, v2, -0.8, 10.0);
        for (const auto& s : run.trajectory.states) EXPECT_EQ(s, run.trajectory.states.front());
    }
}

TEST(EulerArnold, RejectsWrongBlocks)
{
    using namespace su21;
    EXPECT_THROW(euler_arnold_integrate(AlgebraElement::basis(F1), AlgebraElement::basis(F2), -0.8, 1.0),
                 NonTangentError);
}
