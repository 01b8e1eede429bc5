#include "curvkit/report.hpp"

#include "curvkit/format.hpp"

namespace curvkit {

namespace {

Json number(double x)
{
    // JSON has no inf/nan; keep them readable as strings
    if (std::isfinite(x)) return x;
    return format_double(x);
}

std::string join_vec(const Vec& v)
{
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        s += format_double(v[i]);
    }
    return s;
}

}  // namespace

Json vec_json(const Vec& v)
{
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
    return a;
}

Json to_json(const CurvatureReport& r)
{
    Json j;
    j["k"] = r.k;
    j["samples"] = r.samples;
    j["tolerance"] = r.tolerance;
    j["min_margin"] = number(r.min_margin);
    j["violations"] = r.violations;
    j["passed"] = r.passed;
    if (r.extreme_value) j["extreme_value"] = number(*r.extreme_value);
    if (r.witness) {
        const auto& w = *r.witness;
        j["witness"] = {{"sample_index", w.sample_index},
                        {"point", vec_json(w.pair.base_point)},
                        {"u", vec_json(w.pair.u)},
                        {"v", vec_json(w.pair.v)},
                        {"lhs", number(w.lhs)},
                        {"area", number(w.area)},
                        {"margin", number(w.margin)}};
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

Json to_json(const IntegratorConfig& c)
{
    Json j;
    j["method"] = c.method == Method::RK45 ? "RK45" : "RK4";
    j["initial_step"] = c.initial_step;
    j["rtol"] = c.rtol;
    j["atol"] = c.atol;
    j["blowup_threshold"] = c.blowup_threshold;
    j["min_step"] = c.min_step;
    j["max_step"] = number(c.max_step);
    return j;
}

Json trajectory_summary(const Trajectory& t)
{
    Json j;
    j["status"] = to_string(t.status);
    j["samples"] = t.times.size();
    j["last_time"] = number(t.last_time);
    j["last_norm"] = number(t.last_norm);
    j["last_step"] = number(t.last_step);
    j["rejected_steps"] = t.rejected_steps;
    return j;
}

Json to_json(const BreakdownRun& r)
{
    Json j;
    j["kind"] = r.kind;
    j["trajectory"] = trajectory_summary(r.trajectory);
    if (!r.backward.times.empty()) j["backward"] = trajectory_summary(r.backward);
    if (r.closed_form_time) {
        j["closed_form_time"] = *r.closed_form_time;
        j["estimate"] = number(r.estimate);
        j["relative_error"] = number(r.relative_error);
        j["s_track_error"] = number(r.s_track_error);
    }
    j["max_energy_drift"] = number(r.max_energy_drift);
    j["passed"] = r.passed;
    return j;
}

Json to_json(const IncompletenessReport& r)
{
    Json j;
    j["l"] = r.l;
    j["m"] = r.m;
    j["k"] = r.k;
    j["c1_lightlike"] = r.c1_lightlike;
    j["c1_timelike"] = r.c1_timelike;
    j["c2"] = r.c2;
    j["lightlike"] = to_json(r.lightlike);
    j["timelike"] = to_json(r.timelike);
    j["control"] = to_json(r.control);
    j["passed"] = r.passed;
    return j;
}

Json to_json(const RiccatiReport& r)
{
    Json j;
    j["k"] = r.k;
    j["t_max"] = r.t_max;
    Json runs = Json::array();
    for (const auto& run : r.runs) {
        Json x;
        x["h0"] = run.h0;
        x["inside"] = run.inside;
        x["forward"] = trajectory_summary(run.forward);
        x["backward"] = trajectory_summary(run.backward);
        x["sup_forward"] = number(run.sup_forward);
        x["sup_backward"] = number(run.sup_backward);
        x["closed_form_blowup"] = run.closed_form_blowup ? Json(*run.closed_form_blowup) : Json(nullptr);
        x["passed"] = run.passed;
        runs.push_back(std::move(x));
    }
    j["runs"] = std::move(runs);
    j["passed"] = r.passed;
    return j;
}

Json to_json(const EulerArnoldRun& r)
{
    Json j;
    j["trajectory"] = trajectory_summary(r.trajectory);
    j["gamma1_drift"] = number(r.gamma1_drift);
    j["bnorm_drift"] = number(r.bnorm_drift);
    j["closed_form_error"] = number(r.closed_form_error);
    return j;
}

Json to_json(const su21::FeasibilityGrid& g)
{
    Json cells = Json::array();
    for (const auto& c : g.cells) {
        Json x;
        x["t"] = c.t;
        x["k"] = c.k;
        x["ineq"] = c.ineq;
        x["feasible"] = c.feasible;
        x["min_margin"] = c.min_margin ? number(*c.min_margin) : Json(nullptr);
        cells.push_back(std::move(x));
    }
    Json j;
    j["t_values"] = g.t_values;
    j["k_values"] = g.k_values;
    j["cells"] = std::move(cells);
    return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string trajectory_csv(const Trajectory& t, const Json& header,
                           const std::vector<std::string>& columns)
{
    std::string out = "# " + header.dump() + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += columns[i];
    }
    out += '\n';
    for (std::size_t s = 0; s < t.times.size(); ++s) {
        out += format_double(t.times[s]);
        const Vec& y = t.states[s];
        for (Eigen::Index i = 0; i < y.size(); ++i) (out += ',') += format_double(y[i]);
        out += '\n';
    }
    return out;
}

std::string curvature_csv(const CurvatureReport& r)
{
    std::string out = "k,samples,tolerance,min_margin,violations,passed,witness_index,point,u,v\n";
    out += format_double(r.k) + ',' + std::to_string(r.samples) + ',' + format_double(r.tolerance) +
           ',' + format_double(r.min_margin) + ',' + std::to_string(r.violations) + ',' +
           (r.passed ? "true" : "false") + ',';
    if (r.witness) {
        out += std::to_string(r.witness->sample_index) + ',' + join_vec(r.witness->pair.base_point) +
               ',' + join_vec(r.witness->pair.u) + ',' + join_vec(r.witness->pair.v);
    } else {
        out += ",,,";
    }
    out += '\n';
    return out;
}

}  // namespace curvkit
