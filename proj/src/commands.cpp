#include "curvkit/commands.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "curvkit/errors.hpp"
#include "curvkit/format.hpp"
#include "curvkit/geodesic.hpp"
#include "curvkit/space_parser.hpp"

namespace curvkit {

using su21::Rational;

namespace {

Json check_json(const su21::ExactCheck& c)
{
    return Json{{"cases", c.cases}, {"failures", c.failures}, {"passed", c.passed()}};
}

}  // namespace

Su21Suite su21_suite(const Rational& t, const Rational& k, const Su21SuiteOptions& options)
{
    const su21::ExactParams p = su21::make_params(t, k);
    const double td = su21::nearest_double(p.t), kd = su21::nearest_double(p.k);

    Su21Suite s;
    Json& r = s.report;
    r["t"] = p.t.get_str();
    r["k"] = p.k.get_str();
    r["t_value"] = td;
    r["k_value"] = kd;

    Json checks;
    bool ok = true;
    auto exact = [&](const su21::ExactCheck& c) {
        checks[c.name] = check_json(c);
        ok = ok && c.passed();
    };
    exact(su21::check_bracket_containments());
    exact(su21::check_jacobi());
    exact(su21::check_ad_invariance());
    const auto pairs = su21::random_rational_pairs(options.pairs, options.seed);
    exact(su21::check_det_identity(pairs));
    exact(su21::check_gram_identity(pairs, p.t));
    exact(su21::check_quartic_forms(pairs, p.t));

    const su21::Feasibility f = su21::feasible(p);
    Json feas;
    for (int i = 0; i < 4; ++i) feas["ineq" + std::to_string(i + 1)] = f.ineq[i];
    feas["feasible"] = f.all;
    feas["lower_bound_k"] = su21::nearest_double(Rational((1 + p.t) / 8));
    try {
        feas["eta"] = su21::eta(td);
    } catch (const DomainError&) {
        feas["eta"] = nullptr;
    }
    feas["passed"] = f.all;
    checks["feasibility"] = std::move(feas);
    ok = ok && f.all;

    // (f1, f2): margin (1 - 3t)/2 - 4k, exact
    {
        const su21::Coords<Rational> x = su21::AlgebraElement::basis(su21::F1).coords;
        const su21::Coords<Rational> y = su21::AlgebraElement::basis(su21::F2).coords;
        const Rational m = su21::curvature_quartic(x, y, p.t) - p.k * su21::xyz_and_gram(x, y, p.t).gram;
        checks["witness_f1_f2"] = {{"margin", m.get_str()}, {"margin_value", su21::nearest_double(m)}};
    }

    if (options.samples > 0) {
        const su21::SampledMargin sm = su21::sampled_margin(td, kd, options.samples, options.seed);
        const bool passed = sm.min_relative >= -1e-9 && sm.lower_bound_violations == 0;
        Json w;
        w["samples"] = sm.samples;
        w["min_margin"] = sm.min_margin;
        w["min_relative_margin"] = sm.min_relative;
        w["min_lower_bound_gap"] = sm.min_lower_bound_gap;
        w["lower_bound_violations"] = sm.lower_bound_violations;
        w["witness_x"] = sm.witness_x;
        w["witness_y"] = sm.witness_y;
        w["passed"] = passed;
        checks["sampled_margin"] = std::move(w);
        ok = ok && passed;
    }
    r["checks"] = std::move(checks);
    r["passed"] = ok;
    s.passed = ok;
    return s;
}

namespace {

void emit(const std::string& text, const std::string& path, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open output file '" + path + "'");
    f << text;
    if (!f) throw UsageError("failed writing '" + path + "'");
}

void require_format(const std::string& fmt)
{
    if (fmt != "json" && fmt != "csv") throw UsageError("--format must be csv or json");
}

std::vector<Rational> grid(const std::string& lo, const std::string& hi, const std::string& step)
{
    const Rational a = su21::parse_rational(lo), b = su21::parse_rational(hi),
                   h = su21::parse_rational(step);
    if (!(h > 0)) throw UsageError("grid step must be positive");
    std::vector<Rational> out;
    for (Rational v = a; v <= b; v += h) {
        out.push_back(v);
        if (out.size() > 1000000) throw UsageError("grid too large");
    }
    return out;
}

std::vector<std::string> state_columns(const std::string& time, const std::vector<std::string>& names)
{
    std::vector<std::string> c{time};
    c.insert(c.end(), names.begin(), names.end());
    return c;
}

std::vector<std::string> geodesic_names(int l, int m)
{
    std::vector<std::string> n;
    for (int i = 1; i <= l; ++i) n.push_back("b" + std::to_string(i));
    for (int i = 1; i <= m; ++i) n.push_back("f" + std::to_string(i));
    for (int i = 1; i <= l; ++i) n.push_back("db" + std::to_string(i));
    for (int i = 1; i <= m; ++i) n.push_back("df" + std::to_string(i));
    return n;
}

struct Common {
    std::string out_path;
    std::string format;
    std::uint64_t seed = 0;
    int threads = 1;
};

void add_common(CLI::App* app, Common& c, const std::string& default_format)
{
    c.format = default_format;
    c.threads = default_worker_count();
    app->add_option("--out", c.out_path, "Output file (default: standard output)");
    app->add_option("--format", c.format, "Output format: csv or json")->capture_default_str();
    app->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    app->add_option("--threads", c.threads,
                    "Worker threads (default from CURVKIT_THREADS, else 1)")
        ->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"curvkit: curvature conditions, submersions and geodesic (in)completeness checks"};
    app.require_subcommand(1);
    app.footer(
        "Exit codes: 0 pass, 1 usage or domain error, 2 verification failure.\n"
        "Environment: CURVKIT_THREADS sets the default worker count.");

    // curvature-check
    Common cc_common;
    std::string cc_space;
    double cc_k = 1.0;
    std::uint64_t cc_samples = 1000;
    double cc_tol = 1e-9;
    auto* cc = app.add_subcommand("curvature-check", "Sampled check of R >= k on a space");
    cc->add_option("--space", cc_space, "Space, e.g. sphere(2), product:hyperbolic(2)*sphere(2)")
        ->required();
    cc->add_option("--k", cc_k, "Curvature bound k")->capture_default_str();
    cc->add_option("--samples", cc_samples, "Sampled points")->capture_default_str();
    cc->add_option("--tol", cc_tol, "Relative tolerance")->capture_default_str();
    add_common(cc, cc_common, "json");

    // su21
    Common su_common;
    std::string su_t = "-0.8", su_k = "0.1";
    std::uint64_t su_samples = 10000, su_pairs = 1000;
    auto* su = app.add_subcommand("su21", "Exact su(2,1) identities and feasibility at (t, k)");
    su->add_option("--t", su_t, "Metric parameter t > -1 (decimal or p/q)")->capture_default_str();
    su->add_option("--k", su_k, "Curvature bound k > 0 (decimal or p/q)")->capture_default_str();
    su->add_option("--samples", su_samples, "Random pairs for the sampled margin")->capture_default_str();
    su->add_option("--pairs", su_pairs, "Random rational pairs for the exact identities")
        ->capture_default_str();
    add_common(su, su_common, "json");

    // scan
    Common sc_common;
    std::string t_min = "-0.99", t_max = "-0.1", t_step = "0.01";
    std::string k_min = "0.005", k_max = "0.5", k_step = "0.005";
    std::string sc_t, sc_k;
    std::uint64_t sc_samples = 0;
    auto* sc = app.add_subcommand("scan", "Feasibility grid over (t, k)");
    sc->add_option("--t-min", t_min)->capture_default_str();
    sc->add_option("--t-max", t_max)->capture_default_str();
    sc->add_option("--t-step", t_step)->capture_default_str();
    sc->add_option("--k-min", k_min)->capture_default_str();
    sc->add_option("--k-max", k_max)->capture_default_str();
    sc->add_option("--k-step", k_step)->capture_default_str();
    sc->add_option("--t", sc_t, "Single t value (overrides the t range)");
    sc->add_option("--k", sc_k, "Single k value (overrides the k range)");
    sc->add_option("--samples", sc_samples, "Sampled pairs per cell (0: inequalities only)")
        ->capture_default_str();
    add_common(sc, sc_common, "csv");

    // geodesic
    auto* geo = app.add_subcommand("geodesic", "Geodesic and flow experiments");
    geo->require_subcommand(1);

    Common wl_common, wt_common;
    double wl_k = 1.0, wt_k = 1.0, wl_c1 = 1.0, wt_c1 = 0.5, wl_c2 = 0.0, wt_c2 = 0.0;
    int wl_l = 2, wl_m = 2, wt_l = 2, wt_m = 2;
    auto* wl = geo->add_subcommand("warped-lightlike", "Lightlike breakdown in -g_H + e^{2 sqrt(k) b} g_T");
    auto* wt = geo->add_subcommand("warped-timelike", "Timelike breakdown in -g_H + e^{2 sqrt(k) b} g_T");
    for (auto [cmd, k, c1, c2, l, m, common] :
         {std::tuple{wl, &wl_k, &wl_c1, &wl_c2, &wl_l, &wl_m, &wl_common},
          std::tuple{wt, &wt_k, &wt_c1, &wt_c2, &wt_l, &wt_m, &wt_common}}) {
        cmd->add_option("--k", *k, "Warping strength k > 0")->capture_default_str();
        cmd->add_option("--c1", *c1, "Integration constant C1")->capture_default_str();
        cmd->add_option("--c2", *c2, "Integration constant C2")->capture_default_str();
        cmd->add_option("--l", *l, "Base dimension")->capture_default_str();
        cmd->add_option("--m", *m, "Fiber dimension")->capture_default_str();
        add_common(cmd, *common, "csv");
    }

    Common ea_common;
    double ea_t = -0.8, ea_umax = 100.0;
    std::string ea_v1 = "0,1,0,0,0,0,0,0", ea_v2 = "0,0,0,0,1,0,0,0";
    auto* ea = geo->add_subcommand("euler-arnold", "Euler-Arnold flow on su(2,1)/h0");
    ea->add_option("--t", ea_t, "Metric parameter t > -1")->capture_default_str();
    ea->add_option("--u-max", ea_umax, "Integration length")->capture_default_str();
    ea->add_option("--v1", ea_v1, "Initial h1 part as a1,a2,a3,a4,b1,b2,b3,b4")->capture_default_str();
    ea->add_option("--v2", ea_v2, "Initial h2 part as a1,a2,a3,a4,b1,b2,b3,b4")->capture_default_str();
    add_common(ea, ea_common, "csv");

    Common ri_common;
    double ri_k = 1.0, ri_tmax = 50.0;
    std::vector<double> ri_h0{0.0};
    auto* ri = geo->add_subcommand("riccati", "Riccati comparison h' = k - h^2");
    ri->add_option("--k", ri_k, "k > 0")->capture_default_str();
    ri->add_option("--h0", ri_h0, "Initial values (repeatable)")->capture_default_str();
    ri->add_option("--t-max", ri_tmax, "Half-length of the time window")->capture_default_str();
    add_common(ri, ri_common, "csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (*cc) {
            require_format(cc_common.format);
            const ParsedSpace space = parse_space(cc_space, cc_k);
            const CurvatureReport rep =
                check_R_ge_k(space.chart, default_sampler(space.chart), cc_k, cc_samples, cc_tol,
                             {cc_common.seed, cc_common.threads});
            if (cc_common.format == "json") {
                Json j;
                j["command"] = "curvature-check";
                j["space"] = cc_space;
                j["seed"] = cc_common.seed;
                j["report"] = to_json(rep);
                emit(dump(j), cc_common.out_path, out);
            } else {
                emit(curvature_csv(rep), cc_common.out_path, out);
            }
            return rep.passed ? kExitPass : kExitFail;
        }

        if (*su) {
            require_format(su_common.format);
            const Su21Suite s = su21_suite(su21::parse_rational(su_t), su21::parse_rational(su_k),
                                           {su_samples, su_pairs, su_common.seed});
            Json j;
            j["command"] = "su21";
            j["seed"] = su_common.seed;
            j["suite"] = s.report;
            if (su_common.format == "json") {
                emit(dump(j), su_common.out_path, out);
            } else {
                std::string csv = "check,passed\n";
                for (const auto& [name, c] : s.report["checks"].items())
                    csv += name + ',' + (c.value("passed", true) ? "true" : "false") + '\n';
                emit(csv, su_common.out_path, out);
            }
            return s.passed ? kExitPass : kExitFail;
        }

        if (*sc) {
            require_format(sc_common.format);
            const std::vector<Rational> ts = sc_t.empty() ? grid(t_min, t_max, t_step)
                                                          : std::vector<Rational>{su21::parse_rational(sc_t)};
            const std::vector<Rational> ks = sc_k.empty() ? grid(k_min, k_max, k_step)
                                                          : std::vector<Rational>{su21::parse_rational(sc_k)};
            if (ts.empty() || ks.empty()) throw UsageError("empty grid");
            const su21::FeasibilityGrid g =
                su21::scan_region(ts, ks, sc_samples, {sc_common.seed, sc_common.threads});
            emit(sc_common.format == "csv" ? su21::to_csv(g) : dump(to_json(g)), sc_common.out_path, out);

            std::size_t count = 0;
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (const auto& c : g.cells)
                if (c.feasible) {
                    ++count;
                    lo = std::min(lo, c.t);
                    hi = std::max(hi, c.t);
                }
            err << "feasible cells: " << count << " of " << g.cells.size();
            if (count) err << "; feasible t in [" << format_double(lo) << ", " << format_double(hi) << "]";
            err << "\n";
            return kExitPass;
        }

        if (*wl || *wt) {
            const bool light = static_cast<bool>(*wl);
            const Common& c = light ? wl_common : wt_common;
            require_format(c.format);
            DemoOptions opt;
            const double k = light ? wl_k : wt_k;
            const int l = light ? wl_l : wt_l, m = light ? wl_m : wt_m;
            if (light) {
                opt.c1_lightlike = wl_c1;
                opt.c2 = wl_c2;
            } else {
                opt.c1_timelike = wt_c1;
                opt.c2 = wt_c2;
            }
            const IncompletenessReport rep = incompleteness_demo(l, m, k, opt);
            const BreakdownRun& run = light ? rep.lightlike : rep.timelike;
            Json j;
            j["command"] = light ? "geodesic warped-lightlike" : "geodesic warped-timelike";
            j["l"] = l;
            j["m"] = m;
            j["k"] = k;
            j["c1"] = light ? opt.c1_lightlike : opt.c1_timelike;
            j["c2"] = opt.c2;
            j["config"] = to_json(opt.config);
            j["run"] = to_json(run);
            j["control"] = to_json(rep.control);
            const bool passed = run.passed && rep.control.passed;
            j["passed"] = passed;
            if (c.format == "csv")
                emit(trajectory_csv(run.trajectory, j, state_columns("t", geodesic_names(l, m))), c.out_path, out);
            else
                emit(dump(j), c.out_path, out);
            return passed ? kExitPass : kExitFail;
        }

        if (*ea) {
            require_format(ea_common.format);
            const su21::AlgebraElement v1 = su21::AlgebraElement::parse(ea_v1);
            const su21::AlgebraElement v2 = su21::AlgebraElement::parse(ea_v2);
            const IntegratorConfig cfg;
            const EulerArnoldRun run = euler_arnold_integrate(v1, v2, ea_t, ea_umax, cfg);
            const bool passed = run.trajectory.status == Status::Completed && run.gamma1_drift <= 1e-8 &&
                                run.bnorm_drift <= 1e-6 && run.closed_form_error <= 1e-6;
            Json j;
            j["command"] = "geodesic euler-arnold";
            j["t"] = ea_t;
            j["u_max"] = ea_umax;
            j["v1"] = v1.to_string();
            j["v2"] = v2.to_string();
            j["config"] = to_json(cfg);
            j["run"] = to_json(run);
            j["passed"] = passed;
            if (ea_common.format == "csv")
                emit(trajectory_csv(run.trajectory, j,
                                    {"u", "a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4"}),
                     ea_common.out_path, out);
            else
                emit(dump(j), ea_common.out_path, out);
            return passed ? kExitPass : kExitFail;
        }

        if (*ri) {
            require_format(ri_common.format);
            const IntegratorConfig cfg = DemoOptions::demo_config();
            const RiccatiReport rep = riccati_experiment(ri_k, ri_h0, ri_tmax, cfg);
            Json j;
            j["command"] = "geodesic riccati";
            j["config"] = to_json(cfg);
            j["report"] = to_json(rep);
            if (ri_common.format == "csv") {
                std::string csv = "# " + j.dump() + "\nrun,h0,t,h\n";
                for (std::size_t i = 0; i < rep.runs.size(); ++i) {
                    const RiccatiRun& r = rep.runs[i];
                    // backward half reversed, then forward, so t increases
                    for (std::size_t s = r.backward.times.size(); s-- > 1;)
                        csv += std::to_string(i) + ',' + format_double(r.h0) + ',' +
                               format_double(r.backward.times[s]) + ',' +
                               format_double(r.backward.states[s][0]) + '\n';
                    for (std::size_t s = 0; s < r.forward.times.size(); ++s)
                        csv += std::to_string(i) + ',' + format_double(r.h0) + ',' +
                               format_double(r.forward.times[s]) + ',' +
                               format_double(r.forward.states[s][0]) + '\n';
                }
                emit(csv, ri_common.out_path, out);
            } else {
                emit(dump(j), ri_common.out_path, out);
            }
            return rep.passed ? kExitPass : kExitFail;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace curvkit
