#include "curvkit/chart.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>
#include <vector>

#include "curvkit/errors.hpp"

namespace curvkit {

namespace {

std::string format_point(const Vec& x)
{
    std::ostringstream os;
    os << "(";
    for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    return os.str();
}

void require_in_domain(const ChartMetric& chart, const Vec& x, const char* what)
{
    if (!chart.contains(x)) {
        throw DomainError(chart.name + ": " + what + " " + format_point(x) +
                          " is outside the chart domain");
    }
}

Vec shifted(const Vec& x, int axis, double delta)
{
    Vec y = x;
    y[axis] += delta;
    return y;
}

}  // namespace

Mat ChartMetric::metric_at(const Vec& x) const
{
    Mat g = metric_fn(x);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < i; ++j) g(i, j) = g(j, i);
    return g;
}

ChartMetric finite_difference_only(ChartMetric chart)
{
    chart.christoffel_analytic = nullptr;
    chart.name += "[fd]";
    return chart;
}

ChartMetric negated(ChartMetric chart)
{
    auto metric = chart.metric_fn;
    chart.metric_fn = [metric](const Vec& x) -> Mat { return -metric(x); };
    if (chart.metric_derivative) {
        auto dmetric = chart.metric_derivative;
        chart.metric_derivative = [dmetric](const Vec& x) {
            Tensor3 d = dmetric(x);
            d *= -1.0;
            return d;
        };
    }
    std::swap(chart.signature.positive, chart.signature.negative);
    chart.name = "-" + chart.name;
    return chart;
}

Signature signature_of(const Mat& g)
{
    Eigen::SelfAdjointEigenSolver<Mat> solver(g, Eigen::EigenvaluesOnly);
    Signature s;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        if (solver.eigenvalues()[i] > 0) ++s.positive;
        else if (solver.eigenvalues()[i] < 0) ++s.negative;
    }
    return s;
}

Tensor3 christoffel_from_derivative(const Mat& g, const Tensor3& dg)
{
    const int n = static_cast<int>(g.rows());
    Eigen::FullPivLU<Mat> lu(g);
    if (!lu.isInvertible() || std::abs(lu.determinant()) <= 1e-10) {
        throw SingularMetricError("metric matrix is singular (|det| <= 1e-10)");
    }
    const Mat ginv = lu.inverse();

    Tensor3 gamma(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = j; k < n; ++k) {
                double s = 0.0;
                for (int l = 0; l < n; ++l) {
                    s += ginv(i, l) * (dg(j, l, k) + dg(k, l, j) - dg(l, j, k));
                }
                gamma(i, j, k) = 0.5 * s;
                gamma(i, k, j) = 0.5 * s;
            }
        }
    }
    return gamma;
}

double christoffel_step(const Vec& x) { return 1e-5 * std::max(1.0, x.norm()); }

double riemann_step(const Vec& x) { return 1e-4 * std::max(1.0, x.norm()); }

Tensor3 christoffel_fd(const ChartMetric& chart, const Vec& x)
{
    require_in_domain(chart, x, "point");
    const int n = chart.dim;
    const double h = christoffel_step(x);

    Tensor3 dg(n);
    for (int k = 0; k < n; ++k) {
        const Vec xp = shifted(x, k, h);
        const Vec xm = shifted(x, k, -h);
        require_in_domain(chart, xp, "finite-difference stencil point");
        require_in_domain(chart, xm, "finite-difference stencil point");
        const Mat d = (chart.metric_at(xp) - chart.metric_at(xm)) / (2.0 * h);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) dg(k, i, j) = d(i, j);
    }
    return christoffel_from_derivative(chart.metric_at(x), dg);
}

Tensor3 christoffel(const ChartMetric& chart, const Vec& x)
{
    if (chart.christoffel_analytic) {
        require_in_domain(chart, x, "point");
        return chart.christoffel_analytic(x);
    }
    return christoffel_fd(chart, x);
}

Tensor4 riemann(const ChartMetric& chart, const Vec& x)
{
    require_in_domain(chart, x, "point");
    const int n = chart.dim;
    const double h = riemann_step(x);

    // Five-point stencil for ∂_m Γ; errors are O(h^4).
    std::vector<Tensor3> dgamma;
    dgamma.reserve(n);
    for (int m = 0; m < n; ++m) {
        for (double off : {2.0 * h, -2.0 * h})
            require_in_domain(chart, shifted(x, m, off), "finite-difference stencil point");
        Tensor3 d = christoffel(chart, shifted(x, m, -2.0 * h));
        Tensor3 t = christoffel(chart, shifted(x, m, -h));
        t *= -8.0;
        d += t;
        t = christoffel(chart, shifted(x, m, h));
        t *= 8.0;
        d += t;
        t = christoffel(chart, shifted(x, m, 2.0 * h));
        t *= -1.0;
        d += t;
        d *= 1.0 / (12.0 * h);
        dgamma.push_back(std::move(d));
    }

    const Tensor3 gamma = christoffel(chart, x);
    Tensor4 R(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                for (int l = k + 1; l < n; ++l) {
                    double r = dgamma[k](i, l, j) - dgamma[l](i, k, j);
                    for (int m = 0; m < n; ++m) {
                        r += gamma(i, k, m) * gamma(m, l, j) - gamma(i, l, m) * gamma(m, k, j);
                    }
                    R(i, j, k, l) = r;
                    R(i, j, l, k) = -r;
                }
            }
        }
    }
    return R;
}

PointCurvature curvature_at(const ChartMetric& chart, const Vec& x)
{
    PointCurvature pc;
    pc.x = x;
    pc.R = riemann(chart, x);
    pc.g = chart.metric_at(x);
    return pc;
}

double curvature_quadform(const PointCurvature& pc, const Vec& u, const Vec& v)
{
    const int n = pc.R.dim();
    // w = R(u, v) v
    Vec w = Vec::Zero(n);
    for (int m = 0; m < n; ++m) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            if (v[j] == 0.0) continue;
            for (int k = 0; k < n; ++k) {
                if (u[k] == 0.0) continue;
                for (int l = 0; l < n; ++l) s += pc.R(m, j, k, l) * v[j] * u[k] * v[l];
            }
        }
        w[m] = s;
    }
    return u.dot(pc.g * w);
}

double curvature_quadform(const ChartMetric& chart, const Vec& x, const Vec& u, const Vec& v)
{
    return curvature_quadform(curvature_at(chart, x), u, v);
}

double area_form(const Mat& g, const Vec& u, const Vec& v)
{
    const double uu = u.dot(g * u);
    const double vv = v.dot(g * v);
    const double uv = u.dot(g * v);
    return uu * vv - uv * uv;
}

double sectional(const PointCurvature& pc, const Vec& u, const Vec& v)
{
    const double area = area_form(pc.g, u, v);
    const double scale = u.squaredNorm() * v.squaredNorm();
    if (std::abs(area) <= 1e-9 * scale) {
        throw DegeneratePlaneError("sectional curvature undefined: |area| <= 1e-9 |u|^2 |v|^2");
    }
    return curvature_quadform(pc, u, v) / area;
}

double sectional(const ChartMetric& chart, const Vec& x, const Vec& u, const Vec& v)
{
    return sectional(curvature_at(chart, x), u, v);
}

double scalar_curvature(const ChartMetric& chart, const Vec& x)
{
    const Tensor4 R = riemann(chart, x);
    const Mat ginv = chart.metric_at(x).inverse();
    const int n = chart.dim;
    double s = 0.0;
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            double ric = 0.0;
            for (int i = 0; i < n; ++i) ric += R(i, j, i, l);
            s += ginv(j, l) * ric;
        }
    return s;
}

TangentSampler default_sampler(const ChartMetric& chart)
{
    const Vec lo = chart.sample_lo;
    const Vec hi = chart.sample_hi;
    const int n = chart.dim;
    TangentSampler s;
    s.point = [lo, hi, n](std::mt19937_64& rng) {
        Vec x(n);
        for (int i = 0; i < n; ++i) {
            std::uniform_real_distribution<double> d(lo[i], hi[i]);
            x[i] = d(rng);
        }
        return x;
    };
    s.tangent = [n](std::mt19937_64& rng) {
        std::normal_distribution<double> d(0.0, 1.0);
        Vec u(n);
        for (int i = 0; i < n; ++i) u[i] = d(rng);
        return u;
    };
    return s;
}

namespace {

struct ChunkResult {
    std::uint64_t evaluated = 0;
    std::uint64_t violations = 0;
    std::optional<CurvatureWitness> best;
};

bool better(const CurvatureWitness& a, const CurvatureWitness& b)
{
    if (a.margin != b.margin) return a.margin < b.margin;
    return a.sample_index < b.sample_index;
}

ChunkResult run_chunk(const ChartMetric& chart, const TangentSampler& sampler, double k,
                      double tol, std::uint64_t seed, std::uint64_t chunk, std::uint64_t begin,
                      std::uint64_t end)
{
    std::mt19937_64 rng(seed + chunk);
    const int n = chart.dim;
    const std::uint64_t pairs_per_point = 1 + static_cast<std::uint64_t>(n * (n - 1) / 2);
    ChunkResult out;

    auto consider = [&](const PointCurvature& pc, const Vec& u, const Vec& v,
                        std::uint64_t index) {
        const double lhs = curvature_quadform(pc, u, v);
        const double area = area_form(pc.g, u, v);
        const double margin = lhs - k * area;
        const double scale = std::max({1.0, std::abs(lhs), std::abs(k * area)});
        ++out.evaluated;
        if (margin < -tol * scale) ++out.violations;
        CurvatureWitness w{TangentPair{pc.x, u, v}, lhs, area, margin, index};
        if (!out.best || better(w, *out.best)) out.best = std::move(w);
    };

    for (std::uint64_t s = begin; s < end; ++s) {
        const Vec x = sampler.point(rng);
        const Vec u = sampler.tangent(rng);
        const Vec v = sampler.tangent(rng);
        const PointCurvature pc = curvature_at(chart, x);
        std::uint64_t index = s * pairs_per_point;
        consider(pc, u, v, index++);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                consider(pc, Vec::Unit(n, i), Vec::Unit(n, j), index++);
            }
        }
    }
    return out;
}

}  // namespace

CurvatureReport check_R_ge_k(const ChartMetric& chart, const TangentSampler& sampler, double k,
                             std::uint64_t n_samples, double tol, const SamplingOptions& options)
{
    if (!std::isfinite(k)) throw DomainError("check_R_ge_k: k must be finite");
    if (n_samples == 0) throw EmptySampleError("check_R_ge_k: n_samples must be >= 1");

    const std::uint64_t chunks = (n_samples + kSampleChunk - 1) / kSampleChunk;
    std::vector<ChunkResult> results(chunks);
    const int workers =
        static_cast<int>(std::clamp<std::uint64_t>(options.workers < 1 ? 1 : options.workers, 1,
                                                   chunks));

    std::atomic<std::uint64_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](int w) {
        try {
            for (std::uint64_t c = next++; c < chunks; c = next++) {
                const std::uint64_t begin = c * kSampleChunk;
                const std::uint64_t end = std::min(n_samples, begin + kSampleChunk);
                results[c] = run_chunk(chart, sampler, k, tol, options.seed, c, begin, end);
            }
        } catch (...) {
            errors[w] = std::current_exception();
            next = chunks;
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    CurvatureReport report;
    report.k = k;
    report.tolerance = tol;
    for (auto& r : results) {
        report.samples += r.evaluated;
        report.violations += r.violations;
        if (r.best && (!report.witness || better(*r.best, *report.witness))) {
            report.witness = std::move(r.best);
        }
    }
    report.min_margin = report.witness ? report.witness->margin : 0.0;
    report.passed = report.violations == 0;
    return report;
}

int default_worker_count()
{
    if (const char* env = std::getenv("CURVKIT_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

}  // namespace curvkit
