#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>

#include "curvkit/tensor.hpp"

namespace curvkit {

struct Signature {
    int positive = 0;
    int negative = 0;

    bool operator==(const Signature&) const = default;
};

// A semi-Riemannian metric on a single coordinate chart.
//
// `metric_fn` only needs to fill the upper triangle; `metric_at` mirrors it so
// the returned matrix is exactly symmetric. `metric_derivative` and
// `christoffel_analytic` are optional: when the analytic Christoffel map is
// absent, Christoffel symbols come from central differences of the metric.
struct ChartMetric {
    std::string name;
    int dim = 0;
    Signature signature;
    std::function<Mat(const Vec&)> metric_fn;
    std::function<Tensor3(const Vec&)> metric_derivative;
    std::function<Tensor3(const Vec&)> christoffel_analytic;
    std::function<bool(const Vec&)> in_domain;
    // Compact box well inside the domain used by the default sampler.
    Vec sample_lo;
    Vec sample_hi;

    Mat metric_at(const Vec& x) const;
    bool contains(const Vec& x) const { return !in_domain || in_domain(x); }
};

// Copy of `chart` with the analytic Christoffel map removed, so every
// connection quantity goes through finite differences.
ChartMetric finite_difference_only(ChartMetric chart);

// The same manifold with metric -g. Christoffel symbols are unchanged.
ChartMetric negated(ChartMetric chart);

// Counts positive and negative eigenvalues of a symmetric matrix.
Signature signature_of(const Mat& g);

struct TangentPair {
    Vec base_point;
    Vec u;
    Vec v;
};

// Levi-Civita symbols Γ^i_{jk} from a metric and its first derivatives.
Tensor3 christoffel_from_derivative(const Mat& g, const Tensor3& dg);

Tensor3 christoffel(const ChartMetric& chart, const Vec& x);
Tensor3 christoffel_fd(const ChartMetric& chart, const Vec& x);

// Finite-difference steps used by the curvature layer.
double christoffel_step(const Vec& x);
double riemann_step(const Vec& x);

// R^i_{jkl} with R(X,Y)Z = ∇_X∇_Y Z - ∇_Y∇_X Z - ∇_[X,Y] Z, so that
// R(∂_k, ∂_l)∂_j = R^i_{jkl} ∂_i. Antisymmetry in (k, l) is exact.
Tensor4 riemann(const ChartMetric& chart, const Vec& x);

// Metric and curvature tensor at one point, shared by many tangent pairs.
struct PointCurvature {
    Vec x;
    Mat g;
    Tensor4 R;
};

PointCurvature curvature_at(const ChartMetric& chart, const Vec& x);

double curvature_quadform(const PointCurvature& pc, const Vec& u, const Vec& v);
double curvature_quadform(const ChartMetric& chart, const Vec& x, const Vec& u, const Vec& v);

// g(u,u) g(v,v) - g(u,v)^2
double area_form(const Mat& g, const Vec& u, const Vec& v);

double sectional(const PointCurvature& pc, const Vec& u, const Vec& v);
double sectional(const ChartMetric& chart, const Vec& x, const Vec& u, const Vec& v);

// Scalar curvature g^{jl} R^i_{jil}.
double scalar_curvature(const ChartMetric& chart, const Vec& x);

// Draws base points and tangent vectors for sampled curvature checks.
struct TangentSampler {
    std::function<Vec(std::mt19937_64&)> point;
    std::function<Vec(std::mt19937_64&)> tangent;
};

// Uniform base points in the chart's sample box, i.i.d. standard normal
// tangent components.
TangentSampler default_sampler(const ChartMetric& chart);

struct CurvatureWitness {
    TangentPair pair;
    double lhs = 0.0;
    double area = 0.0;
    double margin = 0.0;
    std::uint64_t sample_index = 0;
};

struct CurvatureReport {
    double k = 0.0;
    std::uint64_t samples = 0;  // evaluated tangent pairs, stress set included
    double min_margin = 0.0;
    std::optional<CurvatureWitness> witness;
    double tolerance = 0.0;
    bool passed = false;
    std::uint64_t violations = 0;
    // Extreme value of the checked quantity (used by bound checks).
    std::optional<double> extreme_value;
};

struct SamplingOptions {
    std::uint64_t seed = 0;
    int workers = 1;
};

// Samples per independently seeded chunk; the chunk layout, not the worker
// count, fixes the random stream.
inline constexpr std::uint64_t kSampleChunk = 64;

// Checks g(R(u,v)v,u) >= k (g(u,u)g(v,v) - g(u,v)^2) on `n_samples` random
// pairs plus every coordinate-basis pair at each sampled point.
CurvatureReport check_R_ge_k(const ChartMetric& chart, const TangentSampler& sampler, double k,
                             std::uint64_t n_samples, double tol,
                             const SamplingOptions& options = {});

// Worker count from CURVKIT_THREADS, defaulting to 1.
int default_worker_count();

}  // namespace curvkit
