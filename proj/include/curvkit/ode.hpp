#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "curvkit/tensor.hpp"

namespace curvkit {

struct ODESystem {
    int dim = 0;
    std::function<Vec(double t, const Vec& y)> rhs;
    std::string description;
};

enum class Method { RK4, RK45 };

struct IntegratorConfig {
    Method method = Method::RK45;
    // Fixed step for RK4, first trial step for RK45.
    double initial_step = 1e-3;
    double rtol = 1e-9;
    double atol = 1e-12;
    double blowup_threshold = 1e12;
    double min_step = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    std::uint64_t max_steps = 50'000'000;
};

enum class Status { Completed, BlowUp, StepUnderflow };

std::string to_string(Status s);

// Accepted states, starting with the initial one. Times are monotone in the
// integration direction (t1 may be smaller than t0).
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    Status status = Status::Completed;
    double last_time = 0.0;
    double last_norm = 0.0;
    double last_step = 0.0;  // size of the last accepted step
    std::uint64_t rejected_steps = 0;
};

// Integrates y' = rhs(t, y) from t0 to t1.
//
// RK45 is Dormand-Prince 5(4) with error control on
// max_i |e_i| / (atol + rtol max(|y_i|, |y_new_i|)). A DomainError thrown by rhs
// inside a trial step rejects that step and shrinks h; at the initial point
// it is rethrown as RhsDomainError. The run stops with BlowUp once the
// Euclidean state norm reaches blowup_threshold, and with StepUnderflow once
// the required step drops below min_step. Throws std::length_error when
// max_steps is exhausted.
Trajectory integrate(const ODESystem& system, const Vec& y0, double t0, double t1,
                     const IntegratorConfig& config = {});

}  // namespace curvkit
