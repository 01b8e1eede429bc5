#include "curvkit/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "curvkit/errors.hpp"

namespace curvkit {

std::string to_string(Status s)
{
    switch (s) {
    case Status::Completed: return "Completed";
    case Status::BlowUp: return "BlowUp";
    case Status::StepUnderflow: return "StepUnderflow";
    }
    return "?";
}

namespace {

bool finite(const Vec& y) { return y.allFinite(); }

void check_config(const IntegratorConfig& c)
{
    if (!(c.rtol > 0) || !(c.atol > 0)) throw DomainError("integrator tolerances must be positive");
    if (!(c.initial_step > 0)) throw DomainError("integrator initial_step must be positive");
    if (!(c.min_step > 0) || !(c.min_step < c.initial_step))
        throw DomainError("integrator min_step must be positive and below initial_step");
}

void push(Trajectory& tr, double t, const Vec& y)
{
    tr.times.push_back(t);
    tr.states.push_back(y);
    tr.last_time = t;
    tr.last_norm = y.norm();
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

Trajectory integrate_rk45(const ODESystem& sys, const Vec& y0, double t0, double t1,
                          const IntegratorConfig& cfg)
{
    Trajectory tr;
    push(tr, t0, y0);
    if (tr.last_norm >= cfg.blowup_threshold) {
        tr.status = Status::BlowUp;
        return tr;
    }
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    double t = t0;
    Vec y = y0;
    Vec k1;
    try {
        k1 = sys.rhs(t, y);
    } catch (const DomainError& e) {
        throw RhsDomainError(std::string("rhs undefined at the initial point: ") + e.what());
    }
    double h = std::min(cfg.initial_step, cfg.max_step);
    std::uint64_t steps = 0;

    while (dir * (t1 - t) > 0) {
        if (++steps > cfg.max_steps) throw std::length_error("integrate: max_steps exhausted");
        const double remaining = std::abs(t1 - t);
        bool last = false;
        if (h >= remaining) {
            h = remaining;
            last = true;
        }
        if (h < cfg.min_step && !last) {
            tr.status = Status::StepUnderflow;
            return tr;
        }
        const double hs = dir * h;

        Vec y_new, k7;
        double err = std::numeric_limits<double>::infinity();
        try {
            const Vec k2 = sys.rhs(t + c2 * hs, y + hs * (a21 * k1));
            const Vec k3 = sys.rhs(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
            const Vec k4 = sys.rhs(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
            const Vec k5 =
                sys.rhs(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const Vec k6 = sys.rhs(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 +
                                                     a65 * k5));
            y_new = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            k7 = sys.rhs(t + hs, y_new);
            const Vec e = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            // max norm: with RMS the unit rotation drifts past 1e-8 by t = 100
            err = 0.0;
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                const double sc = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
                err = std::max(err, std::abs(e[i]) / sc);
            }
            if (!finite(y_new) || !finite(k7)) err = std::numeric_limits<double>::infinity();
        } catch (const DomainError&) {
            err = std::numeric_limits<double>::infinity();
        }

        if (!(err <= 1.0)) {
            ++tr.rejected_steps;
            const double factor = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
            h *= factor;
            if (h < cfg.min_step) {
                tr.status = Status::StepUnderflow;
                return tr;
            }
            continue;
        }

        t = last ? t1 : t + hs;
        y = std::move(y_new);
        k1 = std::move(k7);
        tr.last_step = h;
        push(tr, t, y);
        if (tr.last_norm >= cfg.blowup_threshold) {
            tr.status = Status::BlowUp;
            return tr;
        }
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h = std::min(h * factor, cfg.max_step);
    }
    tr.status = Status::Completed;
    return tr;
}

Trajectory integrate_rk4(const ODESystem& sys, const Vec& y0, double t0, double t1,
                         const IntegratorConfig& cfg)
{
    Trajectory tr;
    push(tr, t0, y0);
    if (tr.last_norm >= cfg.blowup_threshold) {
        tr.status = Status::BlowUp;
        return tr;
    }
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    const std::uint64_t n = static_cast<std::uint64_t>(std::ceil(span / cfg.initial_step - 1e-9));
    if (n > cfg.max_steps) throw std::length_error("integrate: max_steps exhausted");
    const double h = n == 0 ? 0.0 : span / static_cast<double>(n);
    const double hs = dir * h;
    Vec y = y0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double t = t0 + hs * static_cast<double>(i);
        Vec k1, k2, k3, k4;
        try {
            k1 = sys.rhs(t, y);
            k2 = sys.rhs(t + hs / 2, y + hs / 2 * k1);
            k3 = sys.rhs(t + hs / 2, y + hs / 2 * k2);
            k4 = sys.rhs(t + hs, y + hs * k3);
        } catch (const DomainError& e) {
            throw RhsDomainError(std::string("rhs left its domain during a fixed step: ") + e.what());
        }
        y += hs / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        tr.last_step = h;
        push(tr, i + 1 == n ? t1 : t + hs, y);
        if (!finite(y) || tr.last_norm >= cfg.blowup_threshold) {
            tr.status = Status::BlowUp;
            return tr;
        }
    }
    tr.status = Status::Completed;
    return tr;
}

}  // namespace

Trajectory integrate(const ODESystem& system, const Vec& y0, double t0, double t1,
                     const IntegratorConfig& config)
{
    if (y0.size() != system.dim)
        throw DomainError("integrate: initial state has dimension " + std::to_string(y0.size()) +
                          ", system expects " + std::to_string(system.dim));
    if (!std::isfinite(t0) || !std::isfinite(t1)) throw DomainError("integrate: time span must be finite");
    check_config(config);
    return config.method == Method::RK4 ? integrate_rk4(system, y0, t0, t1, config)
                                        : integrate_rk45(system, y0, t0, t1, config);
}

}  // namespace curvkit
