#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sdcexp/exponent.hpp"
#include "sdcexp/probability.hpp"
#include "sdcexp/region.hpp"

namespace sdcexp {

// Strictly positive joint with seeded pseudo-random interior mass.
Joint5 random_interior_joint(Shape5 shape, std::uint64_t seed);

// Seeded joint that is positive exactly on the channel's support, so the
// tilted weight stays finite at every positive-mass cell.
Joint5 random_supported_joint(Shape5 shape, const Channel& w, std::uint64_t seed);

struct PropertyResult {
    enum class Status { pass, fail, skipped };
    std::string name;
    Status status = Status::pass;
    double slack = 0.0;  // distance to the threshold; negative means violated
    std::string detail;
};

struct VerifyOptions {
    int seeded_cases = 20;
    std::vector<double> lambda_grid;  // defaults to 9 points on [0.05, 0.45]
    int tilt_grid = 3;                // per-axis grid for the nonnegativity sweep
    int rate_points = 3;              // separation points per side
    double margin = 0.05;
    int mu_points = 11;               // boundary trace resolution
    int oracle_n = 1;
    int oracle_k = 2;
    int oracle_m = 2;
    OptConfig opt;
    SearchSpec search{9, 1e-2, 1e2, 1, 5};
    int threads = 0;
};

// Hooks exist so a deliberately corrupted evaluation can be injected by
// tests; the defaults are the real implementations.
using OmegaHook =
    std::function<double(const Joint5&, const Channel&, double, double, double)>;
using SlopeHook = std::function<double(const Joint5&, const Channel&, double, double)>;

std::vector<PropertyResult> run_verification(const Channel& w, const Dist& p_s,
                                             const VerifyOptions& opts,
                                             OmegaHook omega_hook = {},
                                             SlopeHook slope_hook = {});

}  // namespace sdcexp
