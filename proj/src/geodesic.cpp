#include "curvkit/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

#include "curvkit/errors.hpp"

namespace curvkit {

namespace {

// v^i = Γ^i_{jk} a^j b^k
Vec contract(const Tensor3& gamma, const Vec& a, const Vec& b)
{
    const int n = gamma.dim();
    Vec out = Vec::Zero(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            if (a[j] == 0.0) continue;
            for (int k = 0; k < n; ++k) s += gamma(i, j, k) * a[j] * b[k];
        }
        out[i] = s;
    }
    return out;
}

void require_positive_k(double k)
{
    if (!(k > 0) || !std::isfinite(k)) throw DomainError("k must be a positive finite number");
}

}  // namespace

ODESystem geodesic_rhs(const ChartMetric& chart)
{
    const int n = chart.dim;
    ODESystem sys;
    sys.dim = 2 * n;
    sys.description = "geodesic equation on " + chart.name;
    sys.rhs = [chart, n](double, const Vec& y) -> Vec {
        const Vec x = y.head(n);
        const Vec v = y.tail(n);
        Vec d(2 * n);
        d << v, -contract(christoffel(chart, x), v, v);
        return d;
    };
    return sys;
}

ODESystem warped_geodesic_rhs(const WarpedProductSpec& spec)
{
    if (spec.kind == ProductKind::Twisted)
        throw UnsupportedSpaceError("warped_geodesic_rhs needs α to depend on the base only");
    const int nb = spec.base_dim();
    const int nf = spec.fiber_dim();
    ODESystem sys;
    sys.dim = 2 * (nb + nf);
    sys.description = "warped geodesic equations on " + spec.base.name + " x " + spec.fiber.name;
    sys.rhs = [spec, nb, nf](double, const Vec& y) -> Vec {
        const Vec b = y.head(nb);
        const Vec f = y.segment(nb, nf);
        const Vec vb = y.segment(nb + nf, nb);
        const Vec vf = y.tail(nf);
        const Tensor3 gb = christoffel(spec.base, b);
        const Tensor3 gf = christoffel(spec.fiber, f);
        const Vec dalpha = spec.alpha.base_differential(b, f);
        const Vec grad = spec.base.metric_at(b).ldlt().solve(dalpha);
        const double e2a = std::exp(2.0 * spec.alpha(b, f));
        const double fiber_sq = vf.dot(spec.fiber.metric_at(f) * vf);
        const double alpha_dot = dalpha.dot(vb);

        Vec d(2 * (nb + nf));
        d << vb, vf, -contract(gb, vb, vb) - e2a * fiber_sq * grad,
            -contract(gf, vf, vf) - 2.0 * alpha_dot * vf;
        return d;
    };
    return sys;
}

double energy(const ChartMetric& chart, const Vec& state)
{
    const int n = chart.dim;
    const Vec v = state.tail(n);
    return v.dot(chart.metric_at(state.head(n)) * v);
}

ClosedFormS lightlike_s(double t, double k, double c1, double c2)
{
    require_positive_k(k);
    const double rk = std::sqrt(k);
    const double u = rk * t + c1;
    if (u == 0.0) throw DomainError("lightlike_s: t is the singular time -C1/sqrt(k)");
    return {-std::log(std::abs(u)) / rk + c2, -1.0 / u};
}

ClosedFormS timelike_s(double t, double k, double c1, double c2)
{
    require_positive_k(k);
    if (!(c1 > 0)) throw DomainError("timelike_s: C1 must be positive");
    const double rk = std::sqrt(k);
    const double e = c1 * std::exp(2.0 * rk * t);
    if (e == 1.0) throw DomainError("timelike_s: t is the singular time log(1/C1)/(2 sqrt(k))");
    return {-std::log(std::abs(e - 1.0)) / rk + t + c2, (e + 1.0) / (1.0 - e)};
}

double lightlike_singular_time(double k, double c1)
{
    require_positive_k(k);
    return -c1 / std::sqrt(k);
}

double timelike_singular_time(double k, double c1)
{
    require_positive_k(k);
    if (!(c1 > 0)) throw DomainError("timelike singular time needs C1 > 0");
    return std::log(1.0 / c1) / (2.0 * std::sqrt(k));
}

namespace {

// max(|D s - s'|, |D s' - f(s')|) / max(1, |f(s')|) with D the five-point
// central difference.
template <class S, class F>
double s_residual(S closed, F second, double t, double t_sing)
{
    const double h = 1e-3 * std::min(1.0, std::abs(t - t_sing));
    auto d5 = [h](double m2, double m1, double p1, double p2) {
        return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    };
    const ClosedFormS c = closed(t);
    const ClosedFormS m2 = closed(t - 2 * h), m1 = closed(t - h), p1 = closed(t + h),
                      p2 = closed(t + 2 * h);
    const double ds_fd = d5(m2.s, m1.s, p1.s, p2.s);
    const double dds_fd = d5(m2.ds, m1.ds, p1.ds, p2.ds);
    const double target = second(c.ds);
    const double scale = std::max({1.0, std::abs(target), std::abs(c.ds)});
    return std::max(std::abs(ds_fd - c.ds), std::abs(dds_fd - target)) / scale;
}

}  // namespace

double lightlike_s_residual(double t, double k, double c1, double c2)
{
    const double rk = std::sqrt(k);
    return s_residual([&](double u) { return lightlike_s(u, k, c1, c2); },
                      [rk](double ds) { return rk * ds * ds; }, t, lightlike_singular_time(k, c1));
}

double timelike_s_residual(double t, double k, double c1, double c2)
{
    const double rk = std::sqrt(k);
    return s_residual([&](double u) { return timelike_s(u, k, c1, c2); },
                      [rk](double ds) { return rk * (ds * ds - 1.0); }, t,
                      timelike_singular_time(k, c1));
}

IntegratorConfig DemoOptions::demo_config()
{
    IntegratorConfig c;
    c.min_step = 1e-20;
    return c;
}

namespace {

double breakdown_estimate(const Trajectory& tr, double direction)
{
    return tr.last_time + direction * 0.5 * tr.last_step;
}

// Energy drift relative to the size of the individual terms of g(v, v).
double energy_drift(const ChartMetric& chart, const Trajectory& tr, double g0)
{
    const int n = chart.dim;
    double worst = 0.0;
    for (const Vec& y : tr.states) {
        const Mat g = chart.metric_at(y.head(n));
        const Vec v = y.tail(n);
        const double e = v.dot(g * v);
        const double scale = 1.0 + v.cwiseAbs().dot(g.cwiseAbs() * v.cwiseAbs());
        worst = std::max(worst, std::abs(e - g0) / scale);
    }
    return worst;
}

}  // namespace

IncompletenessReport incompleteness_demo(int l, int m, double k, const DemoOptions& opt)
{
    if (l < 2 || m < 2) throw DomainError("incompleteness_demo needs l, m >= 2");
    require_positive_k(k);
    const double rk = std::sqrt(k);

    IncompletenessReport rep;
    rep.l = l;
    rep.m = m;
    rep.k = k;
    rep.c1_lightlike = opt.c1_lightlike;
    rep.c1_timelike = opt.c1_timelike;
    rep.c2 = opt.c2;

    const WarpedProductSpec spec =
        warped_product(hyperbolic(l), flat_torus(m), Warping::busemann(l, rk));
    const ChartMetric full = assemble(spec);
    const ODESystem sys = warped_geodesic_rhs(spec);

    // Starts on γ0 at parameter s0 with s' = ds; fiber speed from the causal type.
    auto initial = [&](double s0, double ds, double g_target) {
        const double y = std::exp(-s0);
        Vec state = Vec::Zero(2 * (l + m));
        state[l - 1] = y;
        state[l + m + l - 1] = -ds * y;
        // -ds^2 + y^{2√k} |f'|^2 = g_target
        const double fiber_sq = (g_target + ds * ds) / std::pow(y, 2.0 * rk);
        if (fiber_sq < 0) throw DomainError("incompleteness_demo: no fiber speed reaches the requested causal type");
        state[2 * l + m] = std::sqrt(fiber_sq);
        return state;
    };

    auto run = [&](const std::string& kind, double c1, double g_target, double t_sing,
                   auto closed) {
        BreakdownRun r;
        r.kind = kind;
        r.closed_form_time = t_sing;
        const ClosedFormS s0 = closed(0.0);
        const Vec y0 = initial(s0.s, s0.ds, g_target);
        const double e0 = energy(full, y0);
        if (std::abs(e0 - g_target) > 1e-12 * std::max(1.0, y0.squaredNorm()))
            throw std::logic_error("incompleteness_demo: initial data misses the causal type");
        const double direction = t_sing > 0 ? 1.0 : -1.0;
        r.trajectory = integrate(sys, y0, 0.0, 2.0 * t_sing, opt.config);
        r.estimate = breakdown_estimate(r.trajectory, direction);
        r.relative_error = std::abs(r.estimate - t_sing) / std::abs(t_sing);

        double drift = 0.0, track = 0.0;
        for (std::size_t i = 0; i < r.trajectory.times.size(); ++i) {
            const double t = r.trajectory.times[i];
            if (std::abs(t - t_sing) < 1e-3 * std::abs(t_sing)) continue;
            const Vec& st = r.trajectory.states[i];
            track = std::max(track, std::abs(-std::log(st[l - 1]) - closed(t).s));
            const Mat g = full.metric_at(st.head(l + m));
            const Vec v = st.tail(l + m);
            const double scale = 1.0 + v.cwiseAbs().dot(g.cwiseAbs() * v.cwiseAbs());
            drift = std::max(drift, std::abs(v.dot(g * v) - g_target) / scale);
        }
        r.max_energy_drift = drift;
        r.s_track_error = track;
        (void)c1;
        r.passed = r.trajectory.status != Status::Completed &&
                   r.relative_error <= opt.relative_tolerance && r.s_track_error <= 1e-3 &&
                   r.max_energy_drift <= 1e-6;
        return r;
    };

    const double cl = opt.c1_lightlike, ct = opt.c1_timelike, c2 = opt.c2;
    if (cl <= 0) throw DomainError("incompleteness_demo: lightlike C1 must be positive");
    rep.lightlike = run("lightlike", cl, 0.0, lightlike_singular_time(k, cl),
                        [&](double t) { return lightlike_s(t, k, cl, c2); });

    // s'(0) = (C1 + 1) / (1 - C1) > 1 exactly when 0 < C1 < 1.
    if (!(ct > 0 && ct < 1))
        throw DomainError("incompleteness_demo: timelike data needs s'(0) > 1, i.e. 0 < C1 < 1");
    rep.timelike = run("timelike", ct, -1.0, timelike_singular_time(k, ct),
                       [&](double t) { return timelike_s(t, k, ct, c2); });

    // Control: the plain product, lightlike along a semicircle of speed 0.1.
    {
        const WarpedProductSpec plain = plain_product(hyperbolic(l), flat_torus(m));
        const ChartMetric pf = assemble(plain);
        const ODESystem psys = warped_geodesic_rhs(plain);
        Vec y0 = Vec::Zero(2 * (l + m));
        y0[l - 1] = 1.0;
        y0[l + m] = 0.1;
        y0[2 * l + m] = 0.1;
        BreakdownRun& r = rep.control;
        r.kind = "control";
        r.trajectory = integrate(psys, y0, 0.0, opt.control_span, opt.config);
        r.backward = integrate(psys, y0, 0.0, -opt.control_span, opt.config);
        r.estimate = r.trajectory.last_time;
        r.max_energy_drift =
            std::max(energy_drift(pf, r.trajectory, 0.0), energy_drift(pf, r.backward, 0.0));
        r.passed = r.trajectory.status == Status::Completed &&
                   r.backward.status == Status::Completed && r.max_energy_drift <= 1e-6;
    }

    rep.passed = rep.lightlike.passed && rep.timelike.passed && rep.control.passed;
    return rep;
}

HermiteCurve::HermiteCurve(const Trajectory& curve)
    : times_(curve.times), states_(curve.states)
{
    if (times_.size() < 2) throw DomainError("HermiteCurve needs at least two samples");
    if (states_.front().size() % 2 != 0) throw DomainError("HermiteCurve expects (x, x') states");
    n_ = static_cast<int>(states_.front().size() / 2);
    forward_ = times_.back() > times_.front();
    if (!forward_) {
        std::reverse(times_.begin(), times_.end());
        std::reverse(states_.begin(), states_.end());
    }
}

std::size_t HermiteCurve::segment(double t) const
{
    if (t < times_.front() - 1e-12 * std::max(1.0, std::abs(t)) ||
        t > times_.back() + 1e-12 * std::max(1.0, std::abs(t)))
        throw DomainError("HermiteCurve: time outside the sampled range");
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    return std::min(i, times_.size() - 2);
}

Vec HermiteCurve::position(double t) const
{
    const std::size_t i = segment(t);
    const double h = times_[i + 1] - times_[i];
    const double s = (t - times_[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    const Vec& a = states_[i];
    const Vec& b = states_[i + 1];
    return (2 * s3 - 3 * s2 + 1) * a.head(n_) + (s3 - 2 * s2 + s) * h * a.tail(n_) +
           (-2 * s3 + 3 * s2) * b.head(n_) + (s3 - s2) * h * b.tail(n_);
}

Vec HermiteCurve::velocity(double t) const
{
    const std::size_t i = segment(t);
    const double h = times_[i + 1] - times_[i];
    const double s = (t - times_[i]) / h;
    const double s2 = s * s;
    const Vec& a = states_[i];
    const Vec& b = states_[i + 1];
    return ((6 * s2 - 6 * s) * a.head(n_) + (-6 * s2 + 6 * s) * b.head(n_)) / h +
           (3 * s2 - 4 * s + 1) * a.tail(n_) + (3 * s2 - 2 * s) * b.tail(n_);
}

Trajectory parallel_transport(const ChartMetric& chart, const Trajectory& base_curve, const Vec& v0,
                              const IntegratorConfig& config)
{
    const HermiteCurve curve(base_curve);
    if (curve.dim() != chart.dim || v0.size() != chart.dim)
        throw DomainError("parallel_transport: dimension mismatch");
    ODESystem sys;
    sys.dim = chart.dim;
    sys.description = "parallel transport on " + chart.name;
    sys.rhs = [&chart, &curve](double t, const Vec& v) -> Vec {
        return -contract(christoffel(chart, curve.position(t)), curve.velocity(t), v);
    };
    return integrate(sys, v0, base_curve.times.front(), base_curve.times.back(), config);
}

double horizontality_check(const WarpedProductSpec& spec, const Trajectory& trajectory)
{
    const int nb = spec.base_dim(), nf = spec.fiber_dim();
    double worst = 0.0;
    for (const Vec& y : trajectory.states) worst = std::max(worst, y.segment(2 * nb + nf, nf).norm());
    return worst;
}

double verticality_check(const WarpedProductSpec& spec, const Trajectory& transported)
{
    double worst = 0.0;
    for (const Vec& v : transported.states) worst = std::max(worst, v.head(spec.base_dim()).norm());
    return worst;
}

RiccatiReport riccati_experiment(double k, const std::vector<double>& h0_values, double t_max,
                                 const IntegratorConfig& config)
{
    require_positive_k(k);
    if (!(t_max > 0)) throw DomainError("riccati_experiment: t_max must be positive");
    const double rk = std::sqrt(k);
    ODESystem sys;
    sys.dim = 1;
    sys.description = "h' = k - h^2";
    sys.rhs = [k](double, const Vec& h) -> Vec { return Vec::Constant(1, k - h[0] * h[0]); };

    auto sup = [](const Trajectory& tr) {
        double s = 0.0;
        for (const Vec& y : tr.states) s = std::max(s, std::abs(y[0]));
        return s;
    };

    RiccatiReport rep;
    rep.k = k;
    rep.t_max = t_max;
    rep.passed = true;
    for (double h0 : h0_values) {
        RiccatiRun r;
        r.h0 = h0;
        const Vec y0 = Vec::Constant(1, h0);
        r.forward = integrate(sys, y0, 0.0, t_max, config);
        r.backward = integrate(sys, y0, 0.0, -t_max, config);
        r.sup_forward = sup(r.forward);
        r.sup_backward = sup(r.backward);
        r.inside = std::abs(h0) <= rk;
        if (r.inside) {
            r.passed = r.forward.status == Status::Completed &&
                       r.backward.status == Status::Completed &&
                       std::max(r.sup_forward, r.sup_backward) <= rk + 1e-6;
        } else {
            // h = √k coth(√k (t - τ)) with τ = log((h0 - √k)/(h0 + √k)) / (2√k)
            const double tau = std::log((h0 - rk) / (h0 + rk)) / (2.0 * rk);
            r.closed_form_blowup = tau;
            const Trajectory& broken = tau > 0 ? r.forward : r.backward;
            const Trajectory& whole = tau > 0 ? r.backward : r.forward;
            const bool in_span = std::abs(tau) < t_max;
            const double est = breakdown_estimate(broken, tau > 0 ? 1.0 : -1.0);
            r.passed = whole.status == Status::Completed &&
                       (!in_span || (broken.status != Status::Completed &&
                                     std::abs(est - tau) <= 1e-2 * std::abs(tau)));
        }
        rep.passed = rep.passed && r.passed;
        rep.runs.push_back(std::move(r));
    }
    return rep;
}

ODESystem euler_arnold_system(double t)
{
    if (!(t > -1)) throw DomainError("euler-arnold: t must satisfy t > -1");
    ODESystem sys;
    sys.dim = su21::kDim;
    sys.description = "Euler-Arnold flow on su(2,1)/h0";
    sys.rhs = [t](double, const Vec& y) -> Vec {
        su21::Coords<double> g;
        for (int i = 0; i < su21::kDim; ++i) g[i] = y[i];
        const su21::Coords<double> d = su21::euler_arnold_rhs(g, t);
        Vec out(su21::kDim);
        for (int i = 0; i < su21::kDim; ++i) out[i] = d[i];
        return out;
    };
    return sys;
}

EulerArnoldRun euler_arnold_integrate(const su21::AlgebraElement& v1, const su21::AlgebraElement& v2,
                                      double t, double u_max, const IntegratorConfig& config)
{
    using namespace su21;
    if (!(project(v1, 1) == v1)) throw NonTangentError("v1 must lie in h1");
    if (!(project(v2, 2) == v2)) throw NonTangentError("v2 must lie in h2");

    const Coords<double> c1 = v1.to_double();
    const Coords<double> c2 = v2.to_double();
    Vec y0(kDim);
    for (int i = 0; i < kDim; ++i) y0[i] = c1[i] + c2[i];

    EulerArnoldRun run;
    run.trajectory = integrate(euler_arnold_system(t), y0, 0.0, u_max, config);

    // ad_{v1} restricted to h2, column j = [v1, f_j]
    Eigen::Matrix4d A;
    for (int j = 0; j < 4; ++j) {
        const Coords<double> col = bracket_coords(c1, AlgebraElement::basis(F1 + j).to_double());
        for (int i = 0; i < 4; ++i) A(i, j) = col[F1 + i];
    }
    Eigen::Vector4d w0;
    for (int i = 0; i < 4; ++i) w0[i] = c2[F1 + i];
    const double b0 = form_B_coords(c2, c2);

    for (std::size_t s = 0; s < run.trajectory.times.size(); ++s) {
        const double u = run.trajectory.times[s];
        const Vec& y = run.trajectory.states[s];
        Coords<double> g2{};
        for (int i = 0; i < kDim; ++i) {
            if (block_of(i) == 2) g2[i] = y[i];
            else run.gamma1_drift = std::max(run.gamma1_drift, std::abs(y[i] - y0[i]));
        }
        run.bnorm_drift = std::max(run.bnorm_drift, std::abs(form_B_coords(g2, g2) - b0));
        const Eigen::Matrix4d M = (u * t) * A;
        const Eigen::Vector4d w = M.exp() * w0;
        for (int i = 0; i < 4; ++i)
            run.closed_form_error = std::max(run.closed_form_error, std::abs(w[i] - y[F1 + i]));
    }
    return run;
}

}  // namespace curvkit
