// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "satee/channel.hpp"
#include "satee/config.hpp"
#include "satee/ee_precoder.hpp"

namespace satee {

/// One row of the results table. `status` is "ok", "infeasible" (the QoS
/// floors cannot be met within the power budget), or "solver_failure".
/// Rows that are not "ok" carry zeros in the numeric columns.
struct ResultRow {
  std::uint64_t seed = 0;
  double p_t_dbw = 0.0;
  int q = 0;  ///< users per beam for this run
  std::string algorithm;
  double ee = 0.0;
  double weighted_sum_rate = 0.0;
  double total_power_w = 0.0;
  bool qos_feasible = false;
  int iterations = 0;
  bool converged = false;
  double wall_time_s = 0.0;
  std::string status = "ok";
};

/// Per-(operating point, algorithm) averages over the rows whose status is
/// "ok". Used for the companion means file and for sweep-shape checks.
struct MeanRow {
  double p_t_dbw = 0.0;
  int q = 0;
  std::string algorithm;
  int runs = 0;
  double mean_ee = 0.0;
  double mean_weighted_sum_rate = 0.0;
  double mean_total_power_w = 0.0;
};

/// Draws the channel a run observes: uniform user positions in every beam
/// (`users_per_beam` per beam, nested across group sizes for a fixed seed),
/// the configured virtual slots masked out, rows grouped by beam.
ChannelMatrix channel_for(const ExperimentConfig& cfg, std::uint64_t seed,
                          int users_per_beam);

/// Result of a single run: the table row plus, for the iterative design,
/// the full solution with its iteration trace.
struct SingleRun {
  ResultRow row;
  bool has_solution = false;  ///< false when status is not "ok"
  PrecoderSolution solution;  ///< valid only when has_solution
};

/// Runs one algorithm on one seed at the configured operating point.
SingleRun run_single(const ExperimentConfig& cfg, std::uint64_t seed,
                     const std::string& algorithm);

/// Transmit-power sweep: every (power level, seed, algorithm) triple from the
/// config, group size fixed at the configured users per beam. Rows are ordered
/// by power level, then seed, then the config's algorithm order.
std::vector<ResultRow> run_power_sweep(const ExperimentConfig& cfg);

/// Group-size sweep: every (group size, seed, algorithm) triple from the
/// config, transmit power fixed at the configured budget. Rows are ordered by
/// group size, then seed, then the config's algorithm order.
std::vector<ResultRow> run_user_sweep(const ExperimentConfig& cfg);

/// Closed-form designs only, at the configured operating point, one row per
/// (seed, baseline) pair.
std::vector<ResultRow> run_baselines(const ExperimentConfig& cfg);

/// Aggregates rows into per-(power, group size, algorithm) means, keyed in
/// ascending (p_t_dbw, q, algorithm) order. Non-"ok" rows are excluded from
/// the averages but counted nowhere.
std::vector<MeanRow> mean_rows(const std::vector<ResultRow>& rows);

/// Writes the results table with the canonical header
/// seed,p_t_dbw,q,algorithm,ee,weighted_sum_rate,total_power_w,
/// qos_feasible,iterations,converged,wall_time_s,status
void write_results_csv(const std::filesystem::path& path,
                       const std::vector<ResultRow>& rows);

/// Writes the companion means table (header
/// p_t_dbw,q,algorithm,runs,mean_ee,mean_weighted_sum_rate,
/// mean_total_power_w).
void write_mean_csv(const std::filesystem::path& path,
                    const std::vector<ResultRow>& rows);

}  // namespace satee
