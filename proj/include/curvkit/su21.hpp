#pragma once

// Exact model of su(2,1) = h0 + h1 + h2 with the basis
//   h0 = span(e1), h1 = span(e2, e3, e4), h2 = span(f1, f2, f3, f4)
// realized by 3x3 matrices over Q(i). The metric on g/h0 is
//   (X, Y) = (1 + t) B(X1, Y1) + B(X2, Y2),  B(X, Y) = -Re tr(XY).

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "curvkit/chart.hpp"
#include "curvkit/errors.hpp"

namespace curvkit::su21 {

using Rational = mpq_class;

// Nearest double (mpq get_d truncates toward zero).
double nearest_double(const Rational& q);

inline double as_double(double x) { return x; }
inline double as_double(const Rational& q) { return nearest_double(q); }

// Exact rational from the decimal or fraction text ("-0.8", "-4/5", "3").
Rational parse_rational(const std::string& text);
// Exact rational value of a double.
Rational rational_from_double(double x);

struct GaussianRational {
    Rational re;
    Rational im;

    GaussianRational() = default;
    GaussianRational(Rational r, Rational i = 0) : re(std::move(r)), im(std::move(i)) {}

    GaussianRational operator+(const GaussianRational& o) const { return {re + o.re, im + o.im}; }
    GaussianRational operator-(const GaussianRational& o) const { return {re - o.re, im - o.im}; }
    GaussianRational operator*(const GaussianRational& o) const
    {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    GaussianRational conj() const { return {re, -im}; }
    bool operator==(const GaussianRational& o) const { return re == o.re && im == o.im; }
    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
};

using Matrix3 = std::array<std::array<GaussianRational, 3>, 3>;

Matrix3 operator*(const Matrix3& a, const Matrix3& b);
Matrix3 operator-(const Matrix3& a, const Matrix3& b);
GaussianRational trace(const Matrix3& a);
// Trace-free and X^* I21 + I21 X = 0, exactly.
bool in_su21(const Matrix3& a);

inline constexpr int kDim = 8;
enum BasisIndex : int { E1 = 0, E2, E3, E4, F1, F2, F3, F4 };

template <class S>
using Coords = std::array<S, kDim>;

Matrix3 basis_matrix(int i);

// Element of su(2,1) as coordinates (a1; a2, a3, a4; b1, b2, b3, b4) over
// (e1; e2, e3, e4; f1, f2, f3, f4).
class AlgebraElement {
public:
    Coords<Rational> coords{};

    AlgebraElement() = default;
    explicit AlgebraElement(Coords<Rational> c) : coords(std::move(c)) {}

    static AlgebraElement basis(int i);
    static AlgebraElement from_matrix(const Matrix3& m);

    Matrix3 to_matrix() const;
    Coords<double> to_double() const;
    bool is_zero() const;

    // "a1,a2,a3,a4,b1,b2,b3,b4"; entries are rationals like "1/2" or "-3".
    std::string to_string() const;
    static AlgebraElement parse(const std::string& text);

    AlgebraElement operator+(const AlgebraElement& o) const;
    AlgebraElement operator-(const AlgebraElement& o) const;
    AlgebraElement operator*(const Rational& s) const;
    bool operator==(const AlgebraElement& o) const { return coords == o.coords; }
};

// Exact commutator of the matrix realizations.
AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y);
Rational form_B(const AlgebraElement& x, const AlgebraElement& y);
// Component in h_j, j in {0, 1, 2}.
AlgebraElement project(const AlgebraElement& x, int j);

// Which h_j a basis index belongs to.
constexpr int block_of(int i) { return i == E1 ? 0 : (i <= E4 ? 1 : 2); }

// Structure constants and Gram matrix of B, derived once from the matrix
// realization. The templated helpers below use them for fast evaluation
// in either rational or double arithmetic.
template <class S>
struct BracketEntry {
    int i;
    int j;
    int k;
    S c;
};

struct StructureConstants {
    std::vector<BracketEntry<Rational>> exact;
    std::vector<BracketEntry<double>> approx;
    std::array<std::array<Rational, kDim>, kDim> form_exact;
    std::array<std::array<double, kDim>, kDim> form_approx;
};

const StructureConstants& structure();

template <class S>
const std::vector<BracketEntry<S>>& bracket_entries();
template <>
inline const std::vector<BracketEntry<Rational>>& bracket_entries<Rational>()
{
    return structure().exact;
}
template <>
inline const std::vector<BracketEntry<double>>& bracket_entries<double>()
{
    return structure().approx;
}

template <class S>
S form_entry(int i, int j);
template <>
inline Rational form_entry<Rational>(int i, int j)
{
    return structure().form_exact[i][j];
}
template <>
inline double form_entry<double>(int i, int j)
{
    return structure().form_approx[i][j];
}

template <class S>
Coords<S> zero_coords()
{
    Coords<S> z;
    z.fill(S(0));
    return z;
}

template <class S>
Coords<S> bracket_coords(const Coords<S>& x, const Coords<S>& y)
{
    Coords<S> r = zero_coords<S>();
    for (const auto& e : bracket_entries<S>()) {
        if (x[e.i] == 0 || y[e.j] == 0) continue;
        r[e.k] += e.c * x[e.i] * y[e.j];
    }
    return r;
}

template <class S>
S form_B_coords(const Coords<S>& x, const Coords<S>& y)
{
    S s = 0;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) {
            if (x[i] == 0 || y[j] == 0) continue;
            s += form_entry<S>(i, j) * x[i] * y[j];
        }
    return s;
}

template <class S>
Coords<S> project_coords(const Coords<S>& x, int block)
{
    Coords<S> r = zero_coords<S>();
    for (int i = 0; i < kDim; ++i)
        if (block_of(i) == block) r[i] = x[i];
    return r;
}

template <class S>
Coords<S> add(const Coords<S>& a, const Coords<S>& b)
{
    Coords<S> r;
    for (int i = 0; i < kDim; ++i) r[i] = a[i] + b[i];
    return r;
}

template <class S>
Coords<S> scale(const Coords<S>& a, const S& s)
{
    Coords<S> r;
    for (int i = 0; i < kDim; ++i) r[i] = s * a[i];
    return r;
}

template <class S>
void require_tangent(const Coords<S>& x, const char* name)
{
    if (x[E1] != 0)
        throw NonTangentError(std::string(name) + " has a nonzero e1 (h0) component");
}

// (X, Y) = (1 + t) B(X1, Y1) + B(X2, Y2); the e1 coordinate is ignored.
template <class S>
S metric_t(const Coords<S>& x, const Coords<S>& y, const S& t)
{
    return (S(1) + t) * form_B_coords(project_coords(x, 1), project_coords(y, 1)) +
           form_B_coords(project_coords(x, 2), project_coords(y, 2));
}

// (R(X,Y)Y, X) for the homogeneous metric, in the expanded form
//   (1+t)/4 B([X1,Y1],[X1,Y1]) + (1-3t)/4 B([X2,Y2]_1,[X2,Y2]_1)
//   + (1-t-2t^2)/2 B([X1,Y1],[X2,Y2]_1) + (1+t)^2/4 B([X,Y]_2,[X,Y]_2)
//   + B([X,Y]_0,[X,Y]_0).
template <class S>
S curvature_quartic(const Coords<S>& x, const Coords<S>& y, const S& t)
{
    require_tangent(x, "X");
    require_tangent(y, "Y");
    const Coords<S> x1 = project_coords(x, 1), x2 = project_coords(x, 2);
    const Coords<S> y1 = project_coords(y, 1), y2 = project_coords(y, 2);
    const Coords<S> b11 = bracket_coords(x1, y1);
    const Coords<S> b22_1 = project_coords(bracket_coords(x2, y2), 1);
    const Coords<S> xy = bracket_coords(x, y);
    const Coords<S> xy0 = project_coords(xy, 0);
    const Coords<S> xy2 = project_coords(xy, 2);
    const S one = 1;
    const S opt = one + t;
    S r = opt / 4 * form_B_coords(b11, b11);
    r += (one - 3 * t) / 4 * form_B_coords(b22_1, b22_1);
    r += (one - t - 2 * t * t) / 2 * form_B_coords(b11, b22_1);
    r += opt * opt / 4 * form_B_coords(xy2, xy2);
    r += form_B_coords(xy0, xy0);
    return r;
}

// The unexpanded form
//   (1-3t)/4 B([X,Y]_1,[X,Y]_1) + (t-t^2) B([X1,Y1],[X,Y]) + t^2 B([X1,Y1],[X1,Y1])
//   + (1+t)^2/4 B([X,Y]_2,[X,Y]_2) + B([X,Y]_0,[X,Y]_0).
template <class S>
S curvature_quartic_unexpanded(const Coords<S>& x, const Coords<S>& y, const S& t)
{
    require_tangent(x, "X");
    require_tangent(y, "Y");
    const Coords<S> b11 = bracket_coords(project_coords(x, 1), project_coords(y, 1));
    const Coords<S> xy = bracket_coords(x, y);
    const Coords<S> xy0 = project_coords(xy, 0);
    const Coords<S> xy1 = project_coords(xy, 1);
    const Coords<S> xy2 = project_coords(xy, 2);
    const S one = 1;
    S r = (one - 3 * t) / 4 * form_B_coords(xy1, xy1);
    r += (t - t * t) * form_B_coords(b11, xy);
    r += t * t * form_B_coords(b11, b11);
    r += (one + t) * (one + t) / 4 * form_B_coords(xy2, xy2);
    r += form_B_coords(xy0, xy0);
    return r;
}

struct XYZ {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

template <class S>
struct XYZGram {
    S x2;
    S y2;
    S z2;
    S gram;

    XYZ xyz() const
    {
        return {std::sqrt(as_double(x2)), std::sqrt(as_double(y2)), std::sqrt(as_double(z2))};
    }
};

// x^2 = Σ_{i<j} det(a_i c_i; a_j c_j)^2 over h1 coordinates,
// y^2 = Σ_{i<j} det(b_i d_i; b_j d_j)^2 over h2 coordinates,
// z^2 = Σ_{i,j} det(a_i c_i; b_j d_j)^2,
// gram = 4(1+t)^2 x^2 + 4 y^2 - 4(1+t) z^2.
template <class S>
XYZGram<S> xyz_and_gram(const Coords<S>& x, const Coords<S>& y, const S& t)
{
    require_tangent(x, "X");
    require_tangent(y, "Y");
    XYZGram<S> out{S(0), S(0), S(0), S(0)};
    for (int i = E2; i <= E4; ++i)
        for (int j = i + 1; j <= E4; ++j) {
            const S d = x[i] * y[j] - y[i] * x[j];
            out.x2 += d * d;
        }
    for (int i = F1; i <= F4; ++i)
        for (int j = i + 1; j <= F4; ++j) {
            const S d = x[i] * y[j] - y[i] * x[j];
            out.y2 += d * d;
        }
    for (int i = E2; i <= E4; ++i)
        for (int j = F1; j <= F4; ++j) {
            const S d = x[i] * y[j] - y[i] * x[j];
            out.z2 += d * d;
        }
    const S opt = S(1) + t;
    out.gram = 4 * opt * opt * out.x2 + 4 * out.y2 - 4 * opt * out.z2;
    return out;
}

// (X,X)(Y,Y) - (X,Y)^2 straight from metric_t.
template <class S>
S gram_direct(const Coords<S>& x, const Coords<S>& y, const S& t)
{
    const S xx = metric_t(x, x, t);
    const S yy = metric_t(y, y, t);
    const S xy = metric_t(x, y, t);
    return xx * yy - xy * xy;
}

// B([X,Y]_2,[X,Y]_2) - (-2 z^2 + B([X1,Y1],[X2,Y2]_1)).
template <class S>
S det_identity_residual(const Coords<S>& x, const Coords<S>& y)
{
    require_tangent(x, "X");
    require_tangent(y, "Y");
    const Coords<S> xy2 = project_coords(bracket_coords(x, y), 2);
    const Coords<S> b11 = bracket_coords(project_coords(x, 1), project_coords(y, 1));
    const Coords<S> b22_1 = project_coords(bracket_coords(project_coords(x, 2), project_coords(y, 2)), 1);
    const XYZGram<S> g = xyz_and_gram(x, y, S(0));
    return form_B_coords(xy2, xy2) - (-2 * g.z2 + form_B_coords(b11, b22_1));
}

// Quadratic lower bound for (R(X,Y)Y,X) - k * gram:
// {2(1+t) - 4k(1+t)^2} x^2 - 3|1-t^2| xy + {(1-3t)/2 - 4k} y^2 + {4k(1+t) - (1+t)^2/2} z^2.
double margin_lower_bound(const XYZ& xyz, double t, double k);

template <class S>
struct Params {
    S t;
    S k;
};

using ModelParams = Params<double>;
using ExactParams = Params<Rational>;

// Validates t > -1 and k > 0.
template <class S>
Params<S> make_params(S t, S k)
{
    if (!(t > -1)) throw DomainError("su21: parameter t must satisfy t > -1");
    if (!(k > 0)) throw DomainError("su21: parameter k must satisfy k > 0");
    return {std::move(t), std::move(k)};
}

struct Feasibility {
    std::array<bool, 4> ineq{};
    bool all = false;
};

// Strict inequalities
//   (1) k > (1+t)/8            (2) k < 1/(2(1+t))
//   (3) k < (1-3t)/8           (4) {2(1+t) - 4k(1+t)^2}((1-3t)/2 - 4k) - 9/4 (1-t^2)^2 > 0
template <class S>
Feasibility feasible(const Params<S>& p)
{
    const S& t = p.t;
    const S& k = p.k;
    const S one = 1;
    const S opt = one + t;
    Feasibility f;
    f.ineq[0] = 8 * k > opt;
    f.ineq[1] = 2 * k * opt < one;
    f.ineq[2] = 8 * k < one - 3 * t;
    const S lhs = (2 * opt - 4 * k * opt * opt) * ((one - 3 * t) / 2 - 4 * k);
    const S omt2 = one - t * t;
    f.ineq[3] = lhs - S(9) / 4 * omt2 * omt2 > 0;
    f.all = f.ineq[0] && f.ineq[1] && f.ineq[2] && f.ineq[3];
    return f;
}

// Left side of inequality (4), for root checks.
double ineq4_lhs(double t, double k);

// Smaller root in k of inequality (4):
// (-3t^2 - 2t + 5 - sqrt(45t^4 + 12t^3 - 50t^2 + 12t + 45)) / (16(t+1)).
double eta(double t);

// Maximal k-intervals where feasible() holds at fixed t, located by a dense
// double scan of (0, k_max] followed by exact bisection of each edge.
std::vector<std::pair<double, double>> feasible_k_intervals(const Rational& t, double k_max = 1.0,
                                                            int coarse_points = 100000);

struct FeasibilityCell {
    double t = 0.0;
    double k = 0.0;
    std::array<bool, 4> ineq{};
    bool feasible = false;
    std::optional<double> min_margin;
};

struct FeasibilityGrid {
    std::vector<double> t_values;
    std::vector<double> k_values;
    std::vector<FeasibilityCell> cells;  // t-major

    const FeasibilityCell& at(std::size_t ti, std::size_t ki) const
    {
        return cells[ti * k_values.size() + ki];
    }
};

// Random pair in h1 + h2 with unit Euclidean coordinate norm per element.
std::pair<Coords<double>, Coords<double>> random_tangent_pair(std::mt19937_64& rng);

struct SampledMargin {
    std::uint64_t samples = 0;
    double min_margin = 0.0;    // min of curvature_quartic - k * gram
    double min_relative = 0.0;  // min of margin / max(1, |quartic|, |k gram|)
    Coords<double> witness_x{};
    Coords<double> witness_y{};
    // margin minus margin_lower_bound, checked against -1e-9 * scale
    double min_lower_bound_gap = 0.0;
    std::uint64_t lower_bound_violations = 0;
};

SampledMargin sampled_margin(double t, double k, std::uint64_t samples, std::uint64_t seed);

// Smallest curvature_quartic - k * gram over `samples` random pairs.
double sampled_min_margin(double t, double k, std::uint64_t samples, std::uint64_t seed);

// Evaluates the four inequalities exactly on every (t, k) cell; with
// sample_count > 0 also records the sampled curvature margin per cell.
FeasibilityGrid scan_region(const std::vector<Rational>& t_grid, const std::vector<Rational>& k_grid,
                            std::uint64_t sample_count, const SamplingOptions& options = {});

std::string to_csv(const FeasibilityGrid& grid);

// Γ' for the Euler-Arnold flow: h1 part zero, h2 part t [Γ1, Γ2]. Also
// evaluates φ^{-1}[φ(Γ), Γ] with φ = id + t·(projection to h1) and throws
// std::logic_error if the two forms disagree.
template <class S>
Coords<S> euler_arnold_rhs(const Coords<S>& gamma, const S& t)
{
    require_tangent(gamma, "Gamma");
    const Coords<S> g1 = project_coords(gamma, 1);
    const Coords<S> g2 = project_coords(gamma, 2);
    const Coords<S> direct = scale(bracket_coords(g1, g2), t);

    // φ(Γ) = (1+t)Γ1 + Γ2; solve φ(Γ') = [φ(Γ), Γ].
    const S opt = S(1) + t;
    const Coords<S> phi = add(scale(g1, opt), g2);
    Coords<S> general = bracket_coords(phi, gamma);
    for (int i = E2; i <= E4; ++i) general[i] = general[i] / opt;

    S diff = 0;
    S mag = 1;
    for (int i = 0; i < kDim; ++i) {
        S d = general[i] - direct[i];
        if (d < 0) d = -d;
        if (d > diff) diff = d;
        S a = direct[i] < 0 ? S(-direct[i]) : direct[i];
        if (a > mag) mag = a;
    }
    if (as_double(diff) > 1e-12 * as_double(mag))
        throw std::logic_error("euler_arnold_rhs: reduced and general forms disagree");
    return direct;
}

AlgebraElement euler_arnold_rhs(const AlgebraElement& gamma, const Rational& t);

struct NonIntegrabilityWitness {
    AlgebraElement x;
    AlgebraElement y;
    AlgebraElement vertical;  // (h0 + h1)-part of [x, y]
};

// (f1, f2) with [f1, f2]_{h0+h1} = e3 != 0.
NonIntegrabilityWitness nonintegrability_witness();

// Exact checks over the basis or over random rational pairs.
struct ExactCheck {
    std::string name;
    std::uint64_t cases = 0;
    std::uint64_t failures = 0;

    bool passed() const { return failures == 0; }
};

// [h1,h1] ⊂ h1, [h2,h2] ⊂ h0+h1, [h1,h2] ⊂ h2 and [h0,hj] ⊂ hj over the
// 36 unordered basis pairs.
ExactCheck check_bracket_containments();
ExactCheck check_jacobi();        // all ordered basis triples
ExactCheck check_ad_invariance(); // B([Z,X],Y) + B(X,[Z,Y]) = 0 on basis triples

using RationalPair = std::pair<Coords<Rational>, Coords<Rational>>;

// Pairs in h1 + h2 with entries p/q, |p| <= 20, 1 <= q <= 12.
std::vector<RationalPair> random_rational_pairs(std::size_t count, std::uint64_t seed);

ExactCheck check_det_identity(const std::vector<RationalPair>& pairs);
ExactCheck check_gram_identity(const std::vector<RationalPair>& pairs, const Rational& t);
// Expanded versus unexpanded curvature expression.
ExactCheck check_quartic_forms(const std::vector<RationalPair>& pairs, const Rational& t);

}  // namespace curvkit::su21
