// commands.hpp -- batch front-end: solve the model once, emit the artifact
// files (solution.json, grid.csv, policy.csv, sim_report.json).
#pragma once

#include "lcdual/config.hpp"
#include "lcdual/dualvalue.hpp"

#include <iosfwd>
#include <vector>

namespace lcdual {

// Exit codes shared with the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitVerification = 3;
inline constexpr int kExitSolver = 4;

struct Pipeline {
    RunConfig cfg;
    UtilityPtr util;
    RetiredSolution retired;
    BoundaryContext ctx;
    Thresholds th;
    DualSolution dual;
};

Pipeline solve_pipeline(const RunConfig& cfg);

// Writes <output_dir>/solution.json; byte-identical across reruns.
int cmd_solve(const RunConfig& cfg, std::ostream& log);

// Writes <output_dir>/grid.csv with n log-spaced rows on [z_min, z_max]
// (pass z_min <= 0 or z_max <= 0 for the default range z_R/10 .. 10 z_B).
// Rows failing the sign-pattern classification are flagged; exit 3 if any.
int cmd_grid(const RunConfig& cfg, double z_min, double z_max, int n, std::ostream& log);

// Writes <output_dir>/policy.csv for the given wealth levels (empty -> default
// log grid); with_pi appends the heuristic hedge column.
int cmd_policy(const RunConfig& cfg, std::vector<double> xs, bool with_pi,
               std::ostream& log);

// Variational-inequality grid classification plus the statistical battery:
// saddle-point inequalities, budget identity, primal consistency.
// Writes <output_dir>/sim_report.json; exit 3 when any check fails.
int cmd_verify(const RunConfig& cfg, std::ostream& log);

} // namespace lcdual
