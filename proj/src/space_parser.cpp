#include "curvkit/space_parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "curvkit/errors.hpp"

namespace curvkit {

namespace {

std::string trim(std::string s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
}

bool parse_double(const std::string& s, double& out)
{
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

ChartMetric parse_atom(const std::string& raw)
{
    const std::string text = trim(raw);
    const auto open = text.find('(');
    if (open == std::string::npos || text.back() != ')' || open == 0)
        throw UsageError("malformed space atom '" + text + "', expected name(dims)");
    const std::string name = text.substr(0, open);
    const std::string args = text.substr(open + 1, text.size() - open - 2);

    std::vector<int> dims;
    std::size_t start = 0;
    while (start <= args.size()) {
        const auto comma = args.find(',', start);
        const std::string piece =
            trim(args.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        int value = 0;
        auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), value);
        if (piece.empty() || ec != std::errc() || ptr != piece.data() + piece.size())
            throw UsageError("malformed dimension '" + piece + "' in '" + text + "'");
        dims.push_back(value);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return build_space(name, dims);
}

Warping parse_alpha(const std::string& raw, const ChartMetric& base, double k)
{
    const std::string expr = trim(raw);
    auto busemann = [&](double scale) {
        if (base.name.rfind("hyperbolic(", 0) != 0)
            throw UsageError("busemann warping requires a hyperbolic base");
        return Warping::busemann(base.dim, scale);
    };

    if (expr == "busemann") return busemann(1.0);
    if (expr == "sqrtk*busemann") {
        if (!(k > 0.0)) throw UsageError("sqrtk*busemann needs k > 0");
        return busemann(std::sqrt(k));
    }
    const std::string suffix = "*busemann";
    if (expr.size() > suffix.size() &&
        expr.compare(expr.size() - suffix.size(), suffix.size(), suffix) == 0) {
        double c = 0.0;
        if (!parse_double(expr.substr(0, expr.size() - suffix.size()), c))
            throw UsageError("malformed warping coefficient in '" + expr + "'");
        return busemann(c);
    }
    double c = 0.0;
    if (!parse_double(expr, c)) throw UsageError("malformed warping expression '" + expr + "'");
    return Warping::constant(c);
}

std::pair<ChartMetric, ChartMetric> parse_factors(const std::string& text)
{
    // Split on the '*' that sits outside parentheses.
    int depth = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '(') ++depth;
        else if (text[i] == ')') --depth;
        else if (text[i] == '*' && depth == 0)
            return {parse_atom(text.substr(0, i)), parse_atom(text.substr(i + 1))};
    }
    throw UsageError("product description needs two factors joined by '*': '" + text + "'");
}

}  // namespace

ParsedSpace parse_space(const std::string& raw, double k)
{
    const std::string text = trim(raw);
    if (text.empty()) throw UsageError("empty space description");

    const std::string product_prefix = "product:";
    const std::string warped_prefix = "warped:";
    if (text.rfind(product_prefix, 0) == 0) {
        auto [base, fiber] = parse_factors(text.substr(product_prefix.size()));
        WarpedProductSpec spec = plain_product(std::move(base), std::move(fiber));
        return {assemble(spec), spec};
    }
    if (text.rfind(warped_prefix, 0) == 0) {
        const std::string rest = text.substr(warped_prefix.size());
        const std::string marker = ":alpha=";
        const auto pos = rest.find(marker);
        if (pos == std::string::npos)
            throw UsageError("warped description needs ':alpha=<expr>'");
        auto [base, fiber] = parse_factors(rest.substr(0, pos));
        Warping alpha = parse_alpha(rest.substr(pos + marker.size()), base, k);
        WarpedProductSpec spec = warped_product(std::move(base), std::move(fiber), std::move(alpha));
        return {assemble(spec), spec};
    }
    if (text.find(':') != std::string::npos)
        throw UsageError("unknown space prefix in '" + text + "'");
    return {parse_atom(text), std::nullopt};
}

}  // namespace curvkit
