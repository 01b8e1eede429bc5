#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curvkit/chart.hpp"
#include "curvkit/ode.hpp"
#include "curvkit/spaces.hpp"
#include "curvkit/su21.hpp"

namespace curvkit {

// State (x, v): x' = v, v'^i = -Γ^i_{jk} v^j v^k.
ODESystem geodesic_rhs(const ChartMetric& chart);

// Base/fiber split for a warped spec (α depending on the base only):
//   ∇^B_t γ_B' = -e^{2α} g_F(γ_F', γ_F') ∇^B α
//   ∇^F_t γ_F' = -2 (dα/dt) γ_F'
// State (b, f, b', f').
ODESystem warped_geodesic_rhs(const WarpedProductSpec& spec);

// g(v, v) for a geodesic state (x, v).
double energy(const ChartMetric& chart, const Vec& state);

struct ClosedFormS {
    double s = 0.0;
    double ds = 0.0;
};

// s = -(1/√k) log|√k t + C1| + C2, solving s'' = √k (s')^2.
ClosedFormS lightlike_s(double t, double k, double c1, double c2);
// s = -(1/√k) log|C1 e^{2√k t} - 1| + t + C2, solving s'' = √k ((s')^2 - 1).
ClosedFormS timelike_s(double t, double k, double c1, double c2);

double lightlike_singular_time(double k, double c1);  // -C1/√k
double timelike_singular_time(double k, double c1);   // log(1/C1) / (2√k)

// Relative residual of the closed forms against their ODEs, from
// finite differences of s and s' (step scaled to the distance from the
// singular time).
double lightlike_s_residual(double t, double k, double c1, double c2);
double timelike_s_residual(double t, double k, double c1, double c2);

struct BreakdownRun {
    std::string kind;  // "lightlike", "timelike", "control"
    Trajectory trajectory;
    Trajectory backward;  // control run only: the [-span, 0] half
    std::optional<double> closed_form_time;
    double estimate = 0.0;  // last accepted time + half the final step
    double relative_error = 0.0;
    double max_energy_drift = 0.0;
    // max |(-log y) - s(t)| over samples well before the breakdown
    double s_track_error = 0.0;
    bool passed = false;
};

struct IncompletenessReport {
    int l = 2;
    int m = 2;
    double k = 1.0;
    double c1_lightlike = 1.0;
    double c1_timelike = 0.5;
    double c2 = 0.0;
    BreakdownRun lightlike;
    BreakdownRun timelike;
    BreakdownRun control;
    bool passed = false;
};

struct DemoOptions {
    double c1_lightlike = 1.0;
    double c1_timelike = 0.5;
    double c2 = 0.0;
    double control_span = 100.0;
    double relative_tolerance = 1e-2;
    IntegratorConfig config = demo_config();

    static IntegratorConfig demo_config();
};

// (H^l x T^m, -g_H + e^{2√k b} g_T) with b = log x_l. The base curve is the
// vertical geodesic γ0(s) = (0, ..., 0, e^{-s}); the geodesic starts at
// γ0(s(0)) with base speed s'(0) and the fiber speed fixed by the causal
// character. Lightlike data run backward from 0, timelike data forward.
IncompletenessReport incompleteness_demo(int l, int m, double k, const DemoOptions& options = {});

// Samples of a curve in (x, x') layout with Hermite interpolation.
class HermiteCurve {
public:
    explicit HermiteCurve(const Trajectory& curve);

    int dim() const { return n_; }
    double t_begin() const { return times_.front(); }
    double t_end() const { return times_.back(); }
    Vec position(double t) const;
    Vec velocity(double t) const;

private:
    std::size_t segment(double t) const;

    int n_ = 0;
    bool forward_ = true;
    std::vector<double> times_;
    std::vector<Vec> states_;
};

// Solves V' + Γ(c', V) = 0 along `base_curve` (states in (x, x') layout).
Trajectory parallel_transport(const ChartMetric& chart, const Trajectory& base_curve, const Vec& v0,
                              const IntegratorConfig& config = {});

// Max Euclidean norm of the fiber block of the velocity along a geodesic of
// the assembled product metric.
double horizontality_check(const WarpedProductSpec& spec, const Trajectory& trajectory);

// Max Euclidean norm of the base block of a transported vector field.
double verticality_check(const WarpedProductSpec& spec, const Trajectory& transported);

struct RiccatiRun {
    double h0 = 0.0;
    Trajectory forward;
    Trajectory backward;
    double sup_forward = 0.0;
    double sup_backward = 0.0;
    bool inside = false;  // |h0| <= √k
    // Finite blow-up time of the closed form, when the branch blows up.
    std::optional<double> closed_form_blowup;
    bool passed = false;
};

struct RiccatiReport {
    double k = 1.0;
    double t_max = 50.0;
    std::vector<RiccatiRun> runs;
    bool passed = false;
};

// h' = k - h^2 on [0, t_max] and [-t_max, 0]. For |h0| <= √k the sup of |h|
// must stay within √k + 1e-6; outside, the run must break down in finite time
// on the side where the closed form blows up.
RiccatiReport riccati_experiment(double k, const std::vector<double>& h0_values, double t_max,
                                 const IntegratorConfig& config = DemoOptions::demo_config());

struct EulerArnoldRun {
    Trajectory trajectory;
    double gamma1_drift = 0.0;
    double bnorm_drift = 0.0;
    double closed_form_error = 0.0;  // against exp(u t ad_{v1}) v2
};

ODESystem euler_arnold_system(double t);

// Γ' = euler_arnold_rhs(Γ) from Γ(0) = v1 + v2 on [0, u_max].
EulerArnoldRun euler_arnold_integrate(const su21::AlgebraElement& v1, const su21::AlgebraElement& v2,
                                      double t, double u_max, const IntegratorConfig& config = {});

}  // namespace curvkit
