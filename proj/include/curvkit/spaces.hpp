#pragma once

#include <functional>
#include <string>
#include <vector>

#include "curvkit/chart.hpp"

namespace curvkit {

// Upper half-space model (dx_1^2 + ... + dx_l^2) / x_l^2 with x_l > 0.
ChartMetric hyperbolic(int l);
// Stereographic chart 4 |dx|^2 / (1 + |x|^2)^2, domain |x| < 10.
ChartMetric sphere(int m);
ChartMetric flat_torus(int m);
ChartMetric euclidean(int n);
// diag(+1 x p, -1 x q).
ChartMetric minkowski(int p, int q);

// Named builder; throws UnsupportedSpaceError for unknown names or bad dims.
ChartMetric build_space(const std::string& name, const std::vector<int>& dims);

// b(x) = log x_l on the upper half-space chart of dimension l.
struct BusemannField {
    int dim = 2;

    double value(const Vec& x) const;
    Vec differential(const Vec& x) const;
    // Metric gradient g_H^{-1} db; has unit length.
    Vec gradient(const Vec& x) const;
};

enum class ProductKind { Plain, Warped, Twisted };

// Warping function α(b, f). `d_base` / `d_fiber` are coordinate
// differentials; when empty they are taken by central differences.
struct Warping {
    std::function<double(const Vec& b, const Vec& f)> value;
    std::function<Vec(const Vec& b, const Vec& f)> d_base;
    std::function<Vec(const Vec& b, const Vec& f)> d_fiber;
    std::string description;

    static Warping zero();
    static Warping constant(double c);
    // α = scale * log x_l on a hyperbolic base of dimension `base_dim`.
    static Warping busemann(int base_dim, double scale);

    double operator()(const Vec& b, const Vec& f) const { return value(b, f); }
    Vec base_differential(const Vec& b, const Vec& f) const;
    Vec fiber_differential(const Vec& b, const Vec& f) const;
};

// (B x F, -g_B + e^{2α} g_F). Coordinates are (base..., fiber...).
struct WarpedProductSpec {
    ChartMetric base;
    ChartMetric fiber;
    Warping alpha;
    ProductKind kind = ProductKind::Plain;

    int base_dim() const { return base.dim; }
    int fiber_dim() const { return fiber.dim; }
    Vec base_part(const Vec& x) const { return x.head(base.dim); }
    Vec fiber_part(const Vec& x) const { return x.tail(fiber.dim); }
    Vec join(const Vec& b, const Vec& f) const;

    // Base gradient ∇^B α = g_B^{-1} d_b α.
    Vec base_gradient_alpha(const Vec& x) const;
};

WarpedProductSpec plain_product(ChartMetric base, ChartMetric fiber);
WarpedProductSpec warped_product(ChartMetric base, ChartMetric fiber, Warping alpha);
WarpedProductSpec twisted_product(ChartMetric base, ChartMetric fiber, Warping alpha);

// Block metric diag(-g_B, e^{2α} g_F) as a chart. Christoffel symbols are
// analytic whenever both factors carry metric derivatives.
ChartMetric assemble(const WarpedProductSpec& spec);

// The fiber through base point `b` with its induced metric e^{2α(b,·)} g_F.
ChartMetric fiber_slice(const WarpedProductSpec& spec, const Vec& b);

// Lifted fiber directions at a point of B x F (full-dimension arrays whose
// base components are zero).
struct VerticalPair {
    Vec point;
    Vec U;
    Vec V;
};

enum class TMode { ClosedForm, Numeric };

// O'Neill's T_U V for vertical lifts, as a base-direction array.
// ClosedForm: e^{2α} g_F(U,V) ∇^B α. Numeric: horizontal part of ∇̂_U V
// from finite-difference Christoffel symbols of the assembled metric.
Vec oneill_T(const WarpedProductSpec& spec, const VerticalPair& pair, TMode mode);

enum class PairKind { Horizontal, Vertical };

struct OneillResidual {
    double total_sectional = 0.0;  // K̂
    double reference = 0.0;        // K_* (horizontal) or K^⊥ - T-term (vertical)
    double residual = 0.0;
    bool passed = false;
};

// Horizontal pairs: |K̂(X,Y) - K_*(X,Y)| (integrable horizontal distribution).
// Vertical pairs: |K̂(V,W) - K^⊥(V,W) + (g(T_V V, T_W W) - g(T_V W, T_V W)) / area|.
OneillResidual oneill_relation_check(const WarpedProductSpec& spec, const Vec& point,
                                     const Vec& u, const Vec& v, PairKind kind,
                                     double tol = 1e-5);

enum class ScalarMode { Formula, Numeric };

// Scalar curvature of (T^l, e^{2α} g_flat) at x.
// Formula: e^{-2α}(2(l-1) Δα - (l-2)(l-1)|dα|^2) with Δ = -Σ ∂_i^2 (the
// nonnegative Laplacian). Numeric: contraction of the chart curvature tensor.
double conformal_scalar_torus(int l, const std::function<double(const Vec&)>& alpha,
                              const Vec& x, ScalarMode mode);

// Samples planes of (B, g_B) and checks K_B <= -k + tol.
// min_margin is min(-k - K_B); extreme_value is the largest K_B seen.
CurvatureReport base_curvature_bound_check(const WarpedProductSpec& spec, double k,
                                           std::uint64_t n_samples, double tol = 1e-6,
                                           const SamplingOptions& options = {});

}  // namespace curvkit
