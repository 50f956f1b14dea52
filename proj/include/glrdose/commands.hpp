// commands.hpp - table builders behind the command-line subcommands.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glrdose/engine.hpp"
#include "glrdose/json_io.hpp"
#include "glrdose/output_table.hpp"

namespace glrdose {

/// One row: GLR, log GLR, reciprocal display, decision and elimination flag.
OutputTable glr_report(DoseData data, TargetRate phi, const EvidenceCutoffs& cuts);

/// GLR display grid: one row per (n, x) for n in [n_min, n_max], one
/// column per target rate.
OutputTable glr_table(const std::vector<double>& phis, int n_min, int n_max);

/// Per n: largest x that escalates, the x range that stays, smallest x that
/// de-escalates and smallest x that eliminates. "-" marks an empty set.
/// Throws std::invalid_argument for GLR.iso, whose decisions depend on other doses.
OutputTable decision_table(const DesignSpec& design, TargetRate phi, int n_min, int n_max);

/// Effective (k1, k2) for the named designs ("boin", "teqr", "mtpi", "i3+3",
/// "3+3") across target rates and n. 3+3 contributes one row of ranges per phi.
OutputTable effective_k_table(const std::vector<std::string>& designs, const std::vector<double>& phis, int n_min,
                              int n_max, double ei_half_width = 0.05);

/// Operating characteristics for every study in the grid.
OutputTable simulate_table(const StudyGrid& grid);

/// (p_hat, log GLR) series for each n.
OutputTable log_glr_curves(TargetRate phi, const std::vector<int>& ns, int points);

/// `count` scenario draws, one row per (scenario, dose).
OutputTable scenario_sample(int doses, TargetRate phi, int count, std::uint64_t seed);

}  // namespace glrdose
