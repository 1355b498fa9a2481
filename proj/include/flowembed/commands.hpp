#pragma once

#include "flowembed/config.hpp"
#include "flowembed/csv.hpp"

namespace flowembed::cmd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct CommandResult {
    csv::Table table;
    int exit_code = kExitOk;
};

/// Order sweep with one CSV row per m; exit 0 iff every row that is not
/// tolerance limited is satisfied.
CommandResult certify(const ExperimentConfig& cfg);

/// mu-order Richardson check per m in run.m_values; exit 0 iff every
/// conclusive row lands within run.order_tol of m+1.
CommandResult mu_check(const ExperimentConfig& cfg);

/// X_m sampled on the real grid for external plotting.
CommandResult field_export(const ExperimentConfig& cfg);

/// Error-vs-epsilon slopes over run.h_values; exit 0 iff every fitted
/// slope lands within run.slope_tol of m+1.
CommandResult slope(const ExperimentConfig& cfg);

}  // namespace flowembed::cmd
