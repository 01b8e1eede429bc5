#pragma once

#include <cstdint>
#include <ostream>

#include "curvkit/report.hpp"
#include "curvkit/su21.hpp"

namespace curvkit {

// Exit codes shared by every subcommand.
inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFail = 2;

struct Su21SuiteOptions {
    std::uint64_t samples = 10000;
    std::uint64_t pairs = 1000;
    std::uint64_t seed = 0;
};

struct Su21Suite {
    Json report;
    bool passed = false;
};

// Exact identities, feasibility and sampled margin at one (t, k).
Su21Suite su21_suite(const su21::Rational& t, const su21::Rational& k,
                     const Su21SuiteOptions& options = {});

// Entry point of the curvkit tool. Reports go to `out` (or --out), messages
// to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace curvkit
