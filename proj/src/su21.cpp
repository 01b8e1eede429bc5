#include "curvkit/su21.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "curvkit/format.hpp"

namespace curvkit::su21 {

Rational parse_rational(const std::string& text)
{
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw UsageError("empty rational literal");

    if (s.find('/') != std::string::npos) {
        Rational q;
        if (q.set_str(s, 10) != 0) throw UsageError("bad rational literal '" + text + "'");
        if (q.get_den() == 0) throw UsageError("zero denominator in '" + text + "'");
        q.canonicalize();
        return q;
    }

    // decimal with optional exponent
    std::size_t pos = 0;
    bool negative = false;
    if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
    std::string digits;
    long exponent = 0;
    bool any = false, dot = false;
    for (; pos < s.size(); ++pos) {
        const char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits += c;
            any = true;
            if (dot) --exponent;
        } else if (c == '.' && !dot) {
            dot = true;
        } else {
            break;
        }
    }
    if (!any) throw UsageError("bad number '" + text + "'");
    if (pos < s.size()) {
        if (s[pos] != 'e' && s[pos] != 'E') throw UsageError("bad number '" + text + "'");
        const std::string tail = s.substr(pos + 1);
        std::size_t used = 0;
        long e = 0;
        try {
            e = std::stol(tail, &used);
        } catch (const std::exception&) {
            throw UsageError("bad exponent in '" + text + "'");
        }
        if (used != tail.size()) throw UsageError("bad exponent in '" + text + "'");
        exponent += e;
    }
    if (exponent > 4000 || exponent < -4000) throw UsageError("exponent out of range in '" + text + "'");

    mpz_class num(digits, 10);
    mpz_class ten_pow;
    mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
    Rational q = exponent >= 0 ? Rational(num * ten_pow) : Rational(num, ten_pow);
    q.canonicalize();
    return negative ? Rational(-q) : q;
}

double nearest_double(const Rational& q)
{
    const double d = q.get_d();
    if (!std::isfinite(d)) return d;
    double best = d;
    Rational best_err = abs(Rational(d) - q);
    for (double c : {std::nextafter(d, -HUGE_VAL), std::nextafter(d, HUGE_VAL)}) {
        if (!std::isfinite(c)) continue;
        const Rational err = abs(Rational(c) - q);
        if (err < best_err) {
            best = c;
            best_err = err;
        }
    }
    return best;
}

Rational rational_from_double(double x)
{
    if (!std::isfinite(x)) throw DomainError("non-finite value has no rational form");
    return Rational(x);
}

Matrix3 operator*(const Matrix3& a, const Matrix3& b)
{
    Matrix3 c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            GaussianRational s;
            for (int k = 0; k < 3; ++k) {
                if (a[i][k].is_zero() || b[k][j].is_zero()) continue;
                s = s + a[i][k] * b[k][j];
            }
            c[i][j] = s;
        }
    return c;
}

Matrix3 operator-(const Matrix3& a, const Matrix3& b)
{
    Matrix3 c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) c[i][j] = a[i][j] - b[i][j];
    return c;
}

GaussianRational trace(const Matrix3& a) { return a[0][0] + a[1][1] + a[2][2]; }

bool in_su21(const Matrix3& a)
{
    if (!trace(a).is_zero()) return false;
    const int J[3] = {1, 1, -1};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            // (X^* J)_ij + (J X)_ij
            GaussianRational lhs = a[j][i].conj();
            GaussianRational rhs = a[i][j];
            lhs.re *= J[j];
            lhs.im *= J[j];
            rhs.re *= J[i];
            rhs.im *= J[i];
            if (!(lhs + rhs).is_zero()) return false;
        }
    return true;
}

Matrix3 AlgebraElement::to_matrix() const
{
    const auto& c = coords;
    const Rational &a1 = c[E1], &a2 = c[E2], &a3 = c[E3], &a4 = c[E4];
    const Rational &b1 = c[F1], &b2 = c[F2], &b3 = c[F3], &b4 = c[F4];
    Matrix3 m;
    m[0][0] = GaussianRational(0, a1 + a2);
    m[1][1] = GaussianRational(0, a1 - a2);
    m[2][2] = GaussianRational(0, -2 * a1);
    m[0][1] = GaussianRational(a3, a4);
    m[1][0] = GaussianRational(-a3, a4);
    m[0][2] = GaussianRational(b1, b3);
    m[2][0] = GaussianRational(b1, -b3);
    m[1][2] = GaussianRational(b2, b4);
    m[2][1] = GaussianRational(b2, -b4);
    return m;
}

Matrix3 basis_matrix(int i) { return AlgebraElement::basis(i).to_matrix(); }

AlgebraElement AlgebraElement::basis(int i)
{
    if (i < 0 || i >= kDim) throw std::out_of_range("su21 basis index");
    AlgebraElement x;
    x.coords[i] = 1;
    return x;
}

AlgebraElement AlgebraElement::from_matrix(const Matrix3& m)
{
    AlgebraElement x;
    auto& c = x.coords;
    c[E1] = -m[2][2].im / 2;
    c[E2] = m[0][0].im - c[E1];
    c[E3] = m[0][1].re;
    c[E4] = m[0][1].im;
    c[F1] = m[0][2].re;
    c[F3] = m[0][2].im;
    c[F2] = m[1][2].re;
    c[F4] = m[1][2].im;
    if (!(x.to_matrix() == m)) {
        throw BasisDecompositionError("matrix is not in the span of the su(2,1) basis");
    }
    return x;
}

Coords<double> AlgebraElement::to_double() const
{
    Coords<double> d;
    for (int i = 0; i < kDim; ++i) d[i] = nearest_double(coords[i]);
    return d;
}

bool AlgebraElement::is_zero() const
{
    return std::all_of(coords.begin(), coords.end(), [](const Rational& q) { return sgn(q) == 0; });
}

std::string AlgebraElement::to_string() const
{
    std::string s;
    for (int i = 0; i < kDim; ++i) {
        if (i) s += ',';
        s += coords[i].get_str();
    }
    return s;
}

AlgebraElement AlgebraElement::parse(const std::string& text)
{
    AlgebraElement x;
    std::stringstream ss(text);
    std::string item;
    int i = 0;
    while (std::getline(ss, item, ',')) {
        if (i >= kDim) throw UsageError("algebra element needs exactly 8 coordinates");
        x.coords[i++] = parse_rational(item);
    }
    if (i != kDim) throw UsageError("algebra element needs exactly 8 coordinates");
    return x;
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const
{
    return AlgebraElement(add(coords, o.coords));
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& o) const
{
    AlgebraElement r;
    for (int i = 0; i < kDim; ++i) r.coords[i] = coords[i] - o.coords[i];
    return r;
}

AlgebraElement AlgebraElement::operator*(const Rational& s) const
{
    return AlgebraElement(scale(coords, s));
}

AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y)
{
    const Matrix3 a = x.to_matrix();
    const Matrix3 b = y.to_matrix();
    return AlgebraElement::from_matrix(a * b - b * a);
}

Rational form_B(const AlgebraElement& x, const AlgebraElement& y)
{
    return -trace(x.to_matrix() * y.to_matrix()).re;
}

AlgebraElement project(const AlgebraElement& x, int j)
{
    if (j < 0 || j > 2) throw std::out_of_range("su21 projection index must be 0, 1 or 2");
    return AlgebraElement(project_coords(x.coords, j));
}

const StructureConstants& structure()
{
    static const StructureConstants table = [] {
        StructureConstants s;
        for (int i = 0; i < kDim; ++i) {
            const AlgebraElement xi = AlgebraElement::basis(i);
            for (int j = 0; j < kDim; ++j) {
                const AlgebraElement xj = AlgebraElement::basis(j);
                const AlgebraElement b = bracket(xi, xj);
                for (int k = 0; k < kDim; ++k) {
                    if (sgn(b.coords[k]) == 0) continue;
                    s.exact.push_back({i, j, k, b.coords[k]});
                    s.approx.push_back({i, j, k, nearest_double(b.coords[k])});
                }
                s.form_exact[i][j] = form_B(xi, xj);
                s.form_approx[i][j] = nearest_double(s.form_exact[i][j]);
            }
        }
        return s;
    }();
    return table;
}

double margin_lower_bound(const XYZ& v, double t, double k)
{
    const double opt = 1.0 + t;
    return (2.0 * opt - 4.0 * k * opt * opt) * v.x * v.x - 3.0 * std::abs(1.0 - t * t) * v.x * v.y +
           ((1.0 - 3.0 * t) / 2.0 - 4.0 * k) * v.y * v.y + (4.0 * k * opt - opt * opt / 2.0) * v.z * v.z;
}

double ineq4_lhs(double t, double k)
{
    const double opt = 1.0 + t;
    const double omt2 = 1.0 - t * t;
    return (2.0 * opt - 4.0 * k * opt * opt) * ((1.0 - 3.0 * t) / 2.0 - 4.0 * k) - 2.25 * omt2 * omt2;
}

double eta(double t)
{
    if (!(t > -1.0)) throw DomainError("eta: requires t > -1");
    const double disc = 45 * t * t * t * t + 12 * t * t * t - 50 * t * t + 12 * t + 45;
    if (disc < 0) throw DomainError("eta: negative discriminant");
    return (-3 * t * t - 2 * t + 5 - std::sqrt(disc)) / (16 * (t + 1));
}

namespace {

bool feasible_exact(const Rational& t, double k)
{
    return feasible(Params<Rational>{t, rational_from_double(k)}).all;
}

// Narrows [lo, hi] (where feasibility differs) down to adjacent doubles and
// returns the endpoint that lies on the feasible side.
double refine_edge(const Rational& t, double lo, double hi)
{
    const bool lo_state = feasible_exact(t, lo);
    while (true) {
        const double mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi) break;
        if (feasible_exact(t, mid) == lo_state) lo = mid;
        else hi = mid;
    }
    return lo_state ? lo : hi;
}

}  // namespace

std::vector<std::pair<double, double>> feasible_k_intervals(const Rational& t, double k_max,
                                                            int coarse_points)
{
    if (!(t > -1)) throw DomainError("feasible_k_intervals: requires t > -1");
    if (coarse_points < 2 || !(k_max > 0)) throw DomainError("feasible_k_intervals: bad grid");

    const double td = nearest_double(t);
    auto grid_k = [&](int i) { return k_max * i / coarse_points; };
    auto coarse = [&](int i) { return feasible(Params<double>{td, grid_k(i)}).all; };

    // Exact edge near the coarse transition between i-1 and i. Double
    // rounding can shift the coarse transition by a grid cell, so widen the
    // bracket until the exact states differ.
    auto edge_near = [&](int i) -> std::optional<double> {
        for (int w = 1; w <= 8; ++w) {
            const int a = std::max(1, i - w), b = std::min(coarse_points, i - 1 + w);
            if (feasible_exact(t, grid_k(a)) != feasible_exact(t, grid_k(b)))
                return refine_edge(t, grid_k(a), grid_k(b));
        }
        return std::nullopt;
    };

    std::vector<std::pair<double, double>> out;
    bool prev = coarse(1);
    std::optional<double> start;
    if (prev) start = grid_k(1);  // interval touching the lower end of the scan
    for (int i = 2; i <= coarse_points; ++i) {
        const bool cur = coarse(i);
        if (cur != prev) {
            const std::optional<double> edge = edge_near(i);
            if (cur) {
                start = edge ? *edge : grid_k(i);
            } else if (start) {
                out.emplace_back(*start, edge ? *edge : grid_k(i - 1));
                start.reset();
            }
        }
        prev = cur;
    }
    if (start) out.emplace_back(*start, grid_k(coarse_points));
    return out;
}

std::pair<Coords<double>, Coords<double>> random_tangent_pair(std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    auto draw = [&] {
        Coords<double> v{};
        double n2 = 0.0;
        for (int i = E2; i < kDim; ++i) {
            v[i] = normal(rng);
            n2 += v[i] * v[i];
        }
        const double n = std::sqrt(n2);
        for (int i = E2; i < kDim; ++i) v[i] /= n;
        return v;
    };
    Coords<double> x = draw();
    Coords<double> y = draw();
    return {x, y};
}

SampledMargin sampled_margin(double t, double k, std::uint64_t samples, std::uint64_t seed)
{
    if (samples == 0) throw EmptySampleError("sampled_margin: samples must be >= 1");
    std::mt19937_64 rng(seed);
    SampledMargin out;
    out.samples = samples;
    out.min_margin = std::numeric_limits<double>::infinity();
    out.min_relative = std::numeric_limits<double>::infinity();
    out.min_lower_bound_gap = std::numeric_limits<double>::infinity();
    for (std::uint64_t s = 0; s < samples; ++s) {
        const auto [x, y] = random_tangent_pair(rng);
        const double q = curvature_quartic(x, y, t);
        const XYZGram<double> g = xyz_and_gram(x, y, t);
        const double m = q - k * g.gram;
        const double scale = std::max({1.0, std::abs(q), std::abs(k * g.gram)});
        if (m < out.min_margin) {
            out.min_margin = m;
            out.witness_x = x;
            out.witness_y = y;
        }
        out.min_relative = std::min(out.min_relative, m / scale);
        const double gap = m - margin_lower_bound(g.xyz(), t, k);
        out.min_lower_bound_gap = std::min(out.min_lower_bound_gap, gap);
        if (gap < -1e-9 * scale) ++out.lower_bound_violations;
    }
    return out;
}

double sampled_min_margin(double t, double k, std::uint64_t samples, std::uint64_t seed)
{
    return sampled_margin(t, k, samples, seed).min_margin;
}

FeasibilityGrid scan_region(const std::vector<Rational>& t_grid, const std::vector<Rational>& k_grid,
                            std::uint64_t sample_count, const SamplingOptions& options)
{
    FeasibilityGrid grid;
    for (const auto& t : t_grid) {
        if (!(t > -1)) throw DomainError("scan_region: every t must satisfy t > -1");
        grid.t_values.push_back(nearest_double(t));
    }
    for (const auto& k : k_grid) {
        if (!(k > 0)) throw DomainError("scan_region: every k must satisfy k > 0");
        grid.k_values.push_back(nearest_double(k));
    }
    const std::size_t n = t_grid.size() * k_grid.size();
    grid.cells.resize(n);

    auto fill = [&](std::size_t c) {
        const std::size_t ti = c / k_grid.size();
        const std::size_t ki = c % k_grid.size();
        FeasibilityCell& cell = grid.cells[c];
        cell.t = grid.t_values[ti];
        cell.k = grid.k_values[ki];
        const Feasibility f = feasible(Params<Rational>{t_grid[ti], k_grid[ki]});
        cell.ineq = f.ineq;
        cell.feasible = f.all;
        if (sample_count > 0)
            cell.min_margin = sampled_min_margin(cell.t, cell.k, sample_count, options.seed + c);
    };

    const int workers = static_cast<int>(
        std::clamp<std::size_t>(options.workers < 1 ? 1 : options.workers, 1, std::max<std::size_t>(n, 1)));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t c = next++; c < n; c = next++) fill(c);
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return grid;
}

std::string to_csv(const FeasibilityGrid& grid)
{
    std::string out = "t,k,ineq1,ineq2,ineq3,ineq4,feasible,min_margin\n";
    auto b = [](bool v) { return v ? "true" : "false"; };
    for (const auto& c : grid.cells) {
        out += format_double(c.t) + ',' + format_double(c.k);
        for (bool v : c.ineq) (out += ',') += b(v);
        (out += ',') += b(c.feasible);
        out += ',';
        if (c.min_margin) out += format_double(*c.min_margin);
        out += '\n';
    }
    return out;
}

AlgebraElement euler_arnold_rhs(const AlgebraElement& gamma, const Rational& t)
{
    return AlgebraElement(euler_arnold_rhs(gamma.coords, t));
}

NonIntegrabilityWitness nonintegrability_witness()
{
    NonIntegrabilityWitness w;
    w.x = AlgebraElement::basis(F1);
    w.y = AlgebraElement::basis(F2);
    const AlgebraElement b = bracket(w.x, w.y);
    w.vertical = project(b, 0) + project(b, 1);
    return w;
}

ExactCheck check_bracket_containments()
{
    ExactCheck c{"bracket_containments"};
    for (int i = 0; i < kDim; ++i)
        for (int j = i; j < kDim; ++j) {
            const AlgebraElement b = bracket(AlgebraElement::basis(i), AlgebraElement::basis(j));
            const int bi = block_of(i), bj = block_of(j);
            std::array<bool, 3> allowed{};
            if (bi == 0 || bj == 0) {
                allowed[std::max(bi, bj)] = true;
            } else if (bi == 1 && bj == 1) {
                allowed[1] = true;
            } else if (bi == 2 && bj == 2) {
                allowed[0] = allowed[1] = true;
            } else {
                allowed[2] = true;
            }
            bool ok = true;
            for (int k = 0; k < kDim; ++k)
                if (sgn(b.coords[k]) != 0 && !allowed[block_of(k)]) ok = false;
            ++c.cases;
            if (!ok) ++c.failures;
        }
    return c;
}

ExactCheck check_jacobi()
{
    ExactCheck c{"jacobi"};
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
            for (int k = 0; k < kDim; ++k) {
                const AlgebraElement x = AlgebraElement::basis(i), y = AlgebraElement::basis(j),
                                     z = AlgebraElement::basis(k);
                const AlgebraElement s =
                    bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y));
                ++c.cases;
                if (!s.is_zero()) ++c.failures;
            }
    return c;
}

ExactCheck check_ad_invariance()
{
    ExactCheck c{"ad_invariance"};
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
            for (int k = 0; k < kDim; ++k) {
                const AlgebraElement z = AlgebraElement::basis(i), x = AlgebraElement::basis(j),
                                     y = AlgebraElement::basis(k);
                ++c.cases;
                if (sgn(form_B(bracket(z, x), y) + form_B(x, bracket(z, y))) != 0) ++c.failures;
            }
    return c;
}

std::vector<RationalPair> random_rational_pairs(std::size_t count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> num(-20, 20);
    std::uniform_int_distribution<long> den(1, 12);
    auto draw = [&] {
        Coords<Rational> v = zero_coords<Rational>();
        for (int i = E2; i < kDim; ++i) {
            v[i] = Rational(num(rng), den(rng));
            v[i].canonicalize();
        }
        return v;
    };
    std::vector<RationalPair> out;
    out.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        Coords<Rational> x = draw();
        Coords<Rational> y = draw();
        out.emplace_back(std::move(x), std::move(y));
    }
    return out;
}

ExactCheck check_det_identity(const std::vector<RationalPair>& pairs)
{
    ExactCheck c{"det_identity"};
    for (const auto& [x, y] : pairs) {
        ++c.cases;
        if (sgn(det_identity_residual(x, y)) != 0) ++c.failures;
    }
    return c;
}

ExactCheck check_gram_identity(const std::vector<RationalPair>& pairs, const Rational& t)
{
    ExactCheck c{"gram_identity"};
    for (const auto& [x, y] : pairs) {
        ++c.cases;
        if (xyz_and_gram(x, y, t).gram != gram_direct(x, y, t)) ++c.failures;
    }
    return c;
}

ExactCheck check_quartic_forms(const std::vector<RationalPair>& pairs, const Rational& t)
{
    ExactCheck c{"quartic_forms_agree"};
    for (const auto& [x, y] : pairs) {
        ++c.cases;
        if (curvature_quartic(x, y, t) != curvature_quartic_unexpanded(x, y, t)) ++c.failures;
    }
    return c;
}

}  // namespace curvkit::su21
