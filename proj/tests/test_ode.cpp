#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "curvkit/errors.hpp"
#include "curvkit/ode.hpp"

using namespace curvkit;

namespace {

ODESystem scalar(std::function<double(double, double)> f)
{
    return {1, [f](double t, const Vec& y) { return Vec::Constant(1, f(t, y[0])); }, "scalar"};
}

ODESystem rotation()
{
    return {2,
            [](double, const Vec& y) {
                Vec d(2);
                d << -y[1], y[0];
                return d;
            },
            "rotation"};
}

}  // namespace

TEST(Integrate, ZeroFieldStaysConstant)
{
    for (Method m : {Method::RK45, Method::RK4}) {
        IntegratorConfig c;
        c.method = m;
        c.initial_step = 0.1;
        auto tr = integrate(scalar([](double, double) { return 0.0; }), Vec::Constant(1, 2.5), 0.0, 3.0, c);
        EXPECT_EQ(tr.status, Status::Completed);
        EXPECT_DOUBLE_EQ(tr.last_time, 3.0);
        for (const auto& s : tr.states) EXPECT_EQ(s[0], 2.5);
    }
}

TEST(Integrate, QuadraticBlowUpNearOne)
{
    IntegratorConfig c;
    c.min_step = 1e-20;
    auto tr = integrate(scalar([](double, double y) { return y * y; }), Vec::Constant(1, 1.0), 0.0, 2.0, c);
    EXPECT_EQ(tr.status, Status::BlowUp);
    EXPECT_NEAR(tr.last_time, 1.0, 1e-3);
    EXPECT_LT(tr.last_time, 1.0);
}

TEST(Integrate, QuadraticBlowUpWithDefaultsStops)
{
    auto tr = integrate(scalar([](double, double y) { return y * y; }), Vec::Constant(1, 1.0), 0.0, 2.0);
    EXPECT_NE(tr.status, Status::Completed);
    EXPECT_NEAR(tr.last_time, 1.0, 1e-3);
}

TEST(Integrate, RotationConservesNorm)
{
    Vec y0(2);
    y0 << 1.0, 0.0;
    auto tr = integrate(rotation(), y0, 0.0, 100.0);
    EXPECT_EQ(tr.status, Status::Completed);
    double worst = 0.0;
    for (const auto& s : tr.states) worst = std::max(worst, std::abs(s.norm() - 1.0));
    EXPECT_LE(worst, 1e-8);
    EXPECT_NEAR(tr.states.back()[0], std::cos(100.0), 1e-7);
}

TEST(Integrate, BackwardDirection)
{
    auto tr = integrate(scalar([](double, double y) { return y; }), Vec::Constant(1, 1.0), 0.0, -2.0);
    EXPECT_EQ(tr.status, Status::Completed);
    EXPECT_DOUBLE_EQ(tr.last_time, -2.0);
    EXPECT_NEAR(tr.states.back()[0], std::exp(-2.0), 1e-9);
    for (std::size_t i = 1; i < tr.times.size(); ++i) EXPECT_LT(tr.times[i], tr.times[i - 1]);
}

TEST(Integrate, FixedStepRk4Accuracy)
{
    IntegratorConfig c;
    c.method = Method::RK4;
    c.initial_step = 1e-2;
    auto tr = integrate(scalar([](double, double y) { return -y; }), Vec::Constant(1, 1.0), 0.0, 1.0, c);
    EXPECT_NEAR(tr.states.back()[0], std::exp(-1.0), 1e-9);
    EXPECT_EQ(tr.times.size(), 101u);
}

TEST(Integrate, DomainErrorAtStartIsRethrown)
{
    ODESystem bad = scalar([](double, double y) {
        if (y < 0) throw DomainError("negative");
        return std::sqrt(y);
    });
    EXPECT_THROW(integrate(bad, Vec::Constant(1, -1.0), 0.0, 1.0), RhsDomainError);
}

TEST(Integrate, DomainErrorInsideStepShrinksStep)
{
    // y' = -1/(2 sqrt(1 - t)) ... solution sqrt(1 - t) hits the domain edge at t = 1
    ODESystem sys = scalar([](double t, double) {
        if (t >= 1.0) throw DomainError("past the edge");
        return -0.5 / std::sqrt(1.0 - t);
    });
    IntegratorConfig c;
    c.initial_step = 0.1;
    auto tr = integrate(sys, Vec::Constant(1, 1.0), 0.0, 2.0, c);
    EXPECT_NE(tr.status, Status::Completed);
    EXPECT_GT(tr.rejected_steps, 0u);
    EXPECT_LT(tr.last_time, 1.0);
    EXPECT_GT(tr.last_time, 0.99);
}

TEST(Integrate, StatusNames)
{
    EXPECT_EQ(to_string(Status::Completed), "Completed");
    EXPECT_EQ(to_string(Status::BlowUp), "BlowUp");
    EXPECT_EQ(to_string(Status::StepUnderflow), "StepUnderflow");
}
