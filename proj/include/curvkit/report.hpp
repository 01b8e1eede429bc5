#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "curvkit/chart.hpp"
#include "curvkit/geodesic.hpp"
#include "curvkit/ode.hpp"
#include "curvkit/su21.hpp"

namespace curvkit {

using Json = nlohmann::ordered_json;

Json vec_json(const Vec& v);
Json to_json(const CurvatureReport& r);
Json to_json(const IntegratorConfig& c);
// Status and end-point data; the samples themselves go to CSV.
Json trajectory_summary(const Trajectory& t);
Json to_json(const BreakdownRun& r);
Json to_json(const IncompletenessReport& r);
Json to_json(const RiccatiReport& r);
Json to_json(const EulerArnoldRun& r);
Json to_json(const su21::FeasibilityGrid& g);

// Two-space indented JSON with a trailing newline.
std::string dump(const Json& j);

// "# <compact header json>" line, a column line, then one row per sample.
std::string trajectory_csv(const Trajectory& t, const Json& header,
                           const std::vector<std::string>& columns);

// One-row summary of a curvature check.
std::string curvature_csv(const CurvatureReport& r);

}  // namespace curvkit
