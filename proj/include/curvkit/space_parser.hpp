#pragma once

#include <optional>
#include <string>

#include "curvkit/spaces.hpp"

namespace curvkit {

// Result of parsing a space description. `product` is set for
// `product:` and `warped:` descriptions.
struct ParsedSpace {
    ChartMetric chart;
    std::optional<WarpedProductSpec> product;
};

// Grammar:
//   space   := atom | "product:" atom "*" atom | "warped:" atom "*" atom ":alpha=" expr
//   atom    := name "(" int ("," int)* ")"
//   expr    := number | "busemann" | "sqrtk*busemann" | number "*busemann"
// `k` feeds `sqrtk`. Throws UsageError on malformed input and
// UnsupportedSpaceError on unknown atoms.
ParsedSpace parse_space(const std::string& text, double k = 1.0);

}  // namespace curvkit
