#include "curvkit/spaces.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "curvkit/errors.hpp"

namespace curvkit {

namespace {

// Chart with metric e^{2φ} δ given φ and its differential.
ChartMetric conformally_flat(std::string name, int n, std::function<double(const Vec&)> phi,
                             std::function<Vec(const Vec&)> dphi)
{
    ChartMetric c;
    c.name = std::move(name);
    c.dim = n;
    c.signature = {n, 0};
    c.metric_fn = [phi, n](const Vec& x) -> Mat {
        return std::exp(2.0 * phi(x)) * Mat::Identity(n, n);
    };
    c.metric_derivative = [phi, dphi, n](const Vec& x) {
        const double e = std::exp(2.0 * phi(x));
        const Vec d = dphi(x);
        Tensor3 dg(n);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i) dg(k, i, i) = 2.0 * d[k] * e;
        return dg;
    };
    c.christoffel_analytic = [dphi, n](const Vec& x) {
        const Vec d = dphi(x);
        Tensor3 gamma(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                for (int k = 0; k < n; ++k) {
                    double s = 0.0;
                    if (i == j) s += d[k];
                    if (i == k) s += d[j];
                    if (j == k) s -= d[i];
                    gamma(i, j, k) = s;
                }
            }
        }
        return gamma;
    };
    return c;
}

ChartMetric constant_metric(std::string name, const Vec& diagonal, double lo, double hi)
{
    const int n = static_cast<int>(diagonal.size());
    ChartMetric c;
    c.name = std::move(name);
    c.dim = n;
    c.signature = signature_of(diagonal.asDiagonal().toDenseMatrix());
    c.metric_fn = [diagonal](const Vec&) -> Mat { return diagonal.asDiagonal().toDenseMatrix(); };
    c.metric_derivative = [n](const Vec&) { return Tensor3(n); };
    c.christoffel_analytic = [n](const Vec&) { return Tensor3(n); };
    c.sample_lo = Vec::Constant(n, lo);
    c.sample_hi = Vec::Constant(n, hi);
    return c;
}

void require_dim(bool ok, const std::string& what)
{
    if (!ok) throw UnsupportedSpaceError(what);
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x)
{
    const double h = 1e-6 * std::max(1.0, x.norm());
    Vec d(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        d[i] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return d;
}

}  // namespace

ChartMetric hyperbolic(int l)
{
    require_dim(l >= 1, "hyperbolic(l) needs l >= 1");
    auto c = conformally_flat(
        "hyperbolic(" + std::to_string(l) + ")", l,
        [l](const Vec& x) { return -std::log(x[l - 1]); },
        [l](const Vec& x) {
            Vec d = Vec::Zero(l);
            d[l - 1] = -1.0 / x[l - 1];
            return d;
        });
    c.in_domain = [l](const Vec& x) { return x.size() == l && x[l - 1] > 0.0; };
    c.sample_lo = Vec::Constant(l, -1.0);
    c.sample_hi = Vec::Constant(l, 1.0);
    c.sample_lo[l - 1] = 0.5;
    c.sample_hi[l - 1] = 2.0;
    return c;
}

ChartMetric sphere(int m)
{
    require_dim(m >= 1, "sphere(m) needs m >= 1");
    auto c = conformally_flat(
        "sphere(" + std::to_string(m) + ")", m,
        [](const Vec& x) { return std::log(2.0) - std::log1p(x.squaredNorm()); },
        [](const Vec& x) -> Vec { return (-2.0 / (1.0 + x.squaredNorm())) * x; });
    c.in_domain = [m](const Vec& x) { return x.size() == m && x.norm() < 10.0; };
    c.sample_lo = Vec::Constant(m, -2.0);
    c.sample_hi = Vec::Constant(m, 2.0);
    return c;
}

ChartMetric flat_torus(int m)
{
    require_dim(m >= 1, "flat_torus(m) needs m >= 1");
    return constant_metric("flat_torus(" + std::to_string(m) + ")", Vec::Ones(m), 0.0,
                           2.0 * std::numbers::pi);
}

ChartMetric euclidean(int n)
{
    require_dim(n >= 1, "euclidean(n) needs n >= 1");
    return constant_metric("euclidean(" + std::to_string(n) + ")", Vec::Ones(n), -1.0, 1.0);
}

ChartMetric minkowski(int p, int q)
{
    require_dim(p >= 0 && q >= 0 && p + q >= 1, "minkowski(p,q) needs p, q >= 0 and p + q >= 1");
    Vec d(p + q);
    for (int i = 0; i < p + q; ++i) d[i] = i < p ? 1.0 : -1.0;
    return constant_metric("minkowski(" + std::to_string(p) + "," + std::to_string(q) + ")", d,
                           -1.0, 1.0);
}

ChartMetric build_space(const std::string& name, const std::vector<int>& dims)
{
    auto one = [&]() {
        require_dim(dims.size() == 1, name + " takes exactly one dimension");
        return dims[0];
    };
    if (name == "hyperbolic") return hyperbolic(one());
    if (name == "sphere") return sphere(one());
    if (name == "flat_torus" || name == "torus") return flat_torus(one());
    if (name == "euclidean") return euclidean(one());
    if (name == "minkowski") {
        require_dim(dims.size() == 2, "minkowski takes two dimensions (p,q)");
        return minkowski(dims[0], dims[1]);
    }
    throw UnsupportedSpaceError("unsupported space '" + name + "'");
}

double BusemannField::value(const Vec& x) const { return std::log(x[dim - 1]); }

Vec BusemannField::differential(const Vec& x) const
{
    Vec d = Vec::Zero(dim);
    d[dim - 1] = 1.0 / x[dim - 1];
    return d;
}

Vec BusemannField::gradient(const Vec& x) const
{
    Vec g = Vec::Zero(dim);
    g[dim - 1] = x[dim - 1];
    return g;
}

Warping Warping::zero() { return constant(0.0); }

Warping Warping::constant(double c)
{
    Warping w;
    w.value = [c](const Vec&, const Vec&) { return c; };
    w.d_base = [](const Vec& b, const Vec&) -> Vec { return Vec::Zero(b.size()); };
    w.d_fiber = [](const Vec&, const Vec& f) -> Vec { return Vec::Zero(f.size()); };
    w.description = std::to_string(c);
    return w;
}

Warping Warping::busemann(int base_dim, double scale)
{
    BusemannField field{base_dim};
    Warping w;
    w.value = [field, scale](const Vec& b, const Vec&) { return scale * field.value(b); };
    w.d_base = [field, scale](const Vec& b, const Vec&) -> Vec {
        return scale * field.differential(b);
    };
    w.d_fiber = [](const Vec&, const Vec& f) -> Vec { return Vec::Zero(f.size()); };
    w.description = std::to_string(scale) + "*busemann";
    return w;
}

Vec Warping::base_differential(const Vec& b, const Vec& f) const
{
    if (d_base) return d_base(b, f);
    return fd_gradient([&](const Vec& y) { return value(y, f); }, b);
}

Vec Warping::fiber_differential(const Vec& b, const Vec& f) const
{
    if (d_fiber) return d_fiber(b, f);
    return fd_gradient([&](const Vec& y) { return value(b, y); }, f);
}

Vec WarpedProductSpec::join(const Vec& b, const Vec& f) const
{
    Vec x(b.size() + f.size());
    x << b, f;
    return x;
}

Vec WarpedProductSpec::base_gradient_alpha(const Vec& x) const
{
    const Vec b = base_part(x);
    const Vec f = fiber_part(x);
    return base.metric_at(b).ldlt().solve(alpha.base_differential(b, f));
}

WarpedProductSpec plain_product(ChartMetric base, ChartMetric fiber)
{
    return {std::move(base), std::move(fiber), Warping::zero(), ProductKind::Plain};
}

WarpedProductSpec warped_product(ChartMetric base, ChartMetric fiber, Warping alpha)
{
    return {std::move(base), std::move(fiber), std::move(alpha), ProductKind::Warped};
}

WarpedProductSpec twisted_product(ChartMetric base, ChartMetric fiber, Warping alpha)
{
    return {std::move(base), std::move(fiber), std::move(alpha), ProductKind::Twisted};
}

ChartMetric assemble(const WarpedProductSpec& spec)
{
    const int nb = spec.base.dim;
    const int nf = spec.fiber.dim;
    const int n = nb + nf;

    ChartMetric c;
    c.dim = n;
    switch (spec.kind) {
    case ProductKind::Plain:
        c.name = "product:" + spec.base.name + "*" + spec.fiber.name;
        break;
    case ProductKind::Warped:
        c.name = "warped:" + spec.base.name + "*" + spec.fiber.name + ":alpha=" +
                 spec.alpha.description;
        break;
    case ProductKind::Twisted:
        c.name = "twisted:" + spec.base.name + "*" + spec.fiber.name + ":alpha=" +
                 spec.alpha.description;
        break;
    }
    c.signature = {spec.base.signature.negative + spec.fiber.signature.positive,
                   spec.base.signature.positive + spec.fiber.signature.negative};

    c.metric_fn = [spec, nb, nf, n](const Vec& x) -> Mat {
        const Vec b = x.head(nb);
        const Vec f = x.tail(nf);
        Mat g = Mat::Zero(n, n);
        g.topLeftCorner(nb, nb) = -spec.base.metric_at(b);
        g.bottomRightCorner(nf, nf) = std::exp(2.0 * spec.alpha(b, f)) * spec.fiber.metric_at(f);
        return g;
    };
    c.in_domain = [spec, nb, nf, n](const Vec& x) {
        return x.size() == n && spec.base.contains(x.head(nb)) && spec.fiber.contains(x.tail(nf));
    };
    c.sample_lo = Vec(n);
    c.sample_hi = Vec(n);
    c.sample_lo << spec.base.sample_lo, spec.fiber.sample_lo;
    c.sample_hi << spec.base.sample_hi, spec.fiber.sample_hi;

    if (spec.base.metric_derivative && spec.fiber.metric_derivative) {
        c.metric_derivative = [spec, nb, nf, n](const Vec& x) {
            const Vec b = x.head(nb);
            const Vec f = x.tail(nf);
            const Tensor3 dgb = spec.base.metric_derivative(b);
            const Tensor3 dgf = spec.fiber.metric_derivative(f);
            const Mat gf = spec.fiber.metric_at(f);
            const double e = std::exp(2.0 * spec.alpha(b, f));
            const Vec dab = spec.alpha.base_differential(b, f);
            const Vec daf = spec.alpha.fiber_differential(b, f);
            Tensor3 dg(n);
            for (int k = 0; k < nb; ++k) {
                for (int i = 0; i < nb; ++i)
                    for (int j = 0; j < nb; ++j) dg(k, i, j) = -dgb(k, i, j);
                for (int i = 0; i < nf; ++i)
                    for (int j = 0; j < nf; ++j) dg(k, nb + i, nb + j) = 2.0 * dab[k] * e * gf(i, j);
            }
            for (int k = 0; k < nf; ++k) {
                for (int i = 0; i < nf; ++i)
                    for (int j = 0; j < nf; ++j)
                        dg(nb + k, nb + i, nb + j) = e * (2.0 * daf[k] * gf(i, j) + dgf(k, i, j));
            }
            return dg;
        };
        auto metric = c.metric_fn;
        auto dmetric = c.metric_derivative;
        c.christoffel_analytic = [metric, dmetric, n](const Vec& x) {
            Mat g = metric(x);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < i; ++j) g(i, j) = g(j, i);
            return christoffel_from_derivative(g, dmetric(x));
        };
    }
    return c;
}

ChartMetric fiber_slice(const WarpedProductSpec& spec, const Vec& b)
{
    ChartMetric c = spec.fiber;
    c.name = "fiber-slice(" + spec.fiber.name + ")";
    const int nf = spec.fiber.dim;
    const ChartMetric fiber = spec.fiber;
    const Warping alpha = spec.alpha;
    c.metric_fn = [fiber, alpha, b](const Vec& f) -> Mat {
        return std::exp(2.0 * alpha(b, f)) * fiber.metric_at(f);
    };
    c.christoffel_analytic = nullptr;
    c.metric_derivative = nullptr;
    if (fiber.metric_derivative) {
        c.metric_derivative = [fiber, alpha, b, nf](const Vec& f) {
            const double e = std::exp(2.0 * alpha(b, f));
            const Vec daf = alpha.fiber_differential(b, f);
            const Tensor3 dgf = fiber.metric_derivative(f);
            const Mat gf = fiber.metric_at(f);
            Tensor3 dg(nf);
            for (int k = 0; k < nf; ++k)
                for (int i = 0; i < nf; ++i)
                    for (int j = 0; j < nf; ++j)
                        dg(k, i, j) = e * (2.0 * daf[k] * gf(i, j) + dgf(k, i, j));
            return dg;
        };
        auto metric = c.metric_fn;
        auto dmetric = c.metric_derivative;
        c.christoffel_analytic = [metric, dmetric, nf](const Vec& f) {
            Mat g = metric(f);
            for (int i = 0; i < nf; ++i)
                for (int j = 0; j < i; ++j) g(i, j) = g(j, i);
            return christoffel_from_derivative(g, dmetric(f));
        };
    }
    return c;
}

namespace {

void require_vertical(const WarpedProductSpec& spec, const Vec& w, const char* name)
{
    if (w.size() != spec.base.dim + spec.fiber.dim)
        throw DomainError(std::string(name) + ": wrong dimension for a tangent vector");
    if (w.head(spec.base.dim).cwiseAbs().maxCoeff() != 0.0)
        throw DomainError(std::string(name) + " must be vertical (zero base components)");
}

void require_horizontal(const WarpedProductSpec& spec, const Vec& w, const char* name)
{
    if (w.size() != spec.base.dim + spec.fiber.dim)
        throw DomainError(std::string(name) + ": wrong dimension for a tangent vector");
    if (w.tail(spec.fiber.dim).cwiseAbs().maxCoeff() != 0.0)
        throw DomainError(std::string(name) + " must be horizontal (zero fiber components)");
}

}  // namespace

Vec oneill_T(const WarpedProductSpec& spec, const VerticalPair& pair, TMode mode)
{
    require_vertical(spec, pair.U, "U");
    require_vertical(spec, pair.V, "V");
    const int nb = spec.base.dim;
    const int nf = spec.fiber.dim;

    if (mode == TMode::ClosedForm) {
        const Vec b = spec.base_part(pair.point);
        const Vec f = spec.fiber_part(pair.point);
        const Vec U = pair.U.tail(nf);
        const Vec V = pair.V.tail(nf);
        const double gF = U.dot(spec.fiber.metric_at(f) * V);
        return std::exp(2.0 * spec.alpha(b, f)) * gF * spec.base_gradient_alpha(pair.point);
    }

    const ChartMetric total = assemble(spec);
    const Tensor3 gamma = christoffel_fd(total, pair.point);
    Vec T = Vec::Zero(nb);
    for (int a = 0; a < nb; ++a)
        for (int i = nb; i < nb + nf; ++i)
            for (int j = nb; j < nb + nf; ++j) T[a] += gamma(a, i, j) * pair.U[i] * pair.V[j];
    return T;
}

OneillResidual oneill_relation_check(const WarpedProductSpec& spec, const Vec& point,
                                     const Vec& u, const Vec& v, PairKind kind, double tol)
{
    const ChartMetric total = assemble(spec);
    const PointCurvature pc = curvature_at(total, point);
    OneillResidual out;
    out.total_sectional = sectional(pc, u, v);

    const Vec b = spec.base_part(point);
    const Vec f = spec.fiber_part(point);
    if (kind == PairKind::Horizontal) {
        require_horizontal(spec, u, "X");
        require_horizontal(spec, v, "Y");
        const ChartMetric base_metric = negated(spec.base);
        out.reference = sectional(base_metric, b, u.head(spec.base.dim), v.head(spec.base.dim));
    } else {
        require_vertical(spec, u, "V");
        require_vertical(spec, v, "W");
        const ChartMetric slice = fiber_slice(spec, b);
        const double k_perp = sectional(slice, f, u.tail(spec.fiber.dim), v.tail(spec.fiber.dim));
        const Vec Tvv = oneill_T(spec, {point, u, u}, TMode::ClosedForm);
        const Vec Tww = oneill_T(spec, {point, v, v}, TMode::ClosedForm);
        const Vec Tvw = oneill_T(spec, {point, u, v}, TMode::ClosedForm);
        // Horizontal vectors carry the metric -g_B.
        const Mat gh = -spec.base.metric_at(b);
        const double t_term = Tvv.dot(gh * Tww) - Tvw.dot(gh * Tvw);
        out.reference = k_perp - t_term / area_form(pc.g, u, v);
    }
    out.residual = std::abs(out.total_sectional - out.reference);
    out.passed = out.residual <= tol;
    return out;
}

double conformal_scalar_torus(int l, const std::function<double(const Vec&)>& alpha,
                              const Vec& x, ScalarMode mode)
{
    if (l < 2) throw DomainError("conformal_scalar_torus needs l >= 2");
    if (x.size() != l) throw DomainError("conformal_scalar_torus: point has wrong dimension");

    if (mode == ScalarMode::Formula) {
        const double h = 1e-4;
        const double a0 = alpha(x);
        double laplacian = 0.0;  // Σ ∂_i^2 α
        double grad2 = 0.0;
        for (int i = 0; i < l; ++i) {
            Vec xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double ap = alpha(xp);
            const double am = alpha(xm);
            laplacian += (ap - 2.0 * a0 + am) / (h * h);
            const double d = (ap - am) / (2.0 * h);
            grad2 += d * d;
        }
        const double delta = -laplacian;
        return std::exp(-2.0 * a0) *
               (2.0 * (l - 1) * delta - static_cast<double>((l - 2) * (l - 1)) * grad2);
    }

    ChartMetric c;
    c.name = "conformal-torus(" + std::to_string(l) + ")";
    c.dim = l;
    c.signature = {l, 0};
    c.metric_fn = [alpha, l](const Vec& y) -> Mat {
        return std::exp(2.0 * alpha(y)) * Mat::Identity(l, l);
    };
    return scalar_curvature(c, x);
}

CurvatureReport base_curvature_bound_check(const WarpedProductSpec& spec, double k,
                                           std::uint64_t n_samples, double tol,
                                           const SamplingOptions& options)
{
    if (n_samples == 0) throw EmptySampleError("base_curvature_bound_check: n_samples must be >= 1");
    if (spec.base.signature.negative != 0)
        throw DomainError("base_curvature_bound_check: base metric must be Riemannian");

    const TangentSampler sampler = default_sampler(spec.base);
    std::mt19937_64 rng(options.seed);
    CurvatureReport report;
    report.k = k;
    report.tolerance = tol;
    double max_k = -std::numeric_limits<double>::infinity();
    for (std::uint64_t s = 0; s < n_samples; ++s) {
        const Vec x = sampler.point(rng);
        const Vec u = sampler.tangent(rng);
        const Vec v = sampler.tangent(rng);
        const PointCurvature pc = curvature_at(spec.base, x);
        double kb;
        try {
            kb = sectional(pc, u, v);
        } catch (const DegeneratePlaneError&) {
            continue;
        }
        ++report.samples;
        max_k = std::max(max_k, kb);
        const double margin = -k - kb;
        if (margin < -tol) ++report.violations;
        if (!report.witness || margin < report.witness->margin) {
            report.witness = CurvatureWitness{TangentPair{x, u, v}, curvature_quadform(pc, u, v),
                                              area_form(pc.g, u, v), margin, s};
        }
    }
    report.min_margin = report.witness ? report.witness->margin : 0.0;
    report.extreme_value = max_k;
    report.passed = report.samples > 0 && report.violations == 0;
    return report;
}

}  // namespace curvkit
