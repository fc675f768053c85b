#pragma once

// Subcommand implementations. Each run writes its artifacts (CSV tables,
// JSON reports, summary.json and manifest.json) into one directory and
// returns 0 iff every assertion it makes passes. Only the manifest carries a
// timestamp; every other byte is a function of the config.

#include <cstddef>
#include <string>
#include <vector>

#include "config.hpp"

namespace pathhj::cli {

inline constexpr const char* kVersion = "0.1.0";

struct RunContext {
  std::string command;  ///< e.g. "verify operators"
  std::string out_dir;
  bool timestamp = true;  ///< include "created" in the manifest
};

int run_solve_evolution(const ExperimentConfig& config, const RunContext& ctx,
                        std::size_t p_index, std::size_t q_index);

int run_value(const ExperimentConfig& config, const RunContext& ctx, double t0,
              std::size_t state_id);

int run_game(const ExperimentConfig& config, const RunContext& ctx,
             const std::vector<double>& eps, const std::vector<std::size_t>& partitions);

/// suite in {operators, calculus, minimax, control, game}.
int run_verify(const ExperimentConfig& config, const RunContext& ctx, const std::string& suite);

/// Every suite listed in verification.suites; exit 0 iff all pass.
int run_configured_suites(const ExperimentConfig& config, const RunContext& ctx);

}  // namespace pathhj::cli
