// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "satee/types.hpp"

namespace satee {

/// Everything one experiment needs: scenario geometry, optimizer parameters,
/// sweep grids and run bookkeeping. Produced by the INI-style parser or a
/// preset; all unit conversions (dB to linear, dBW to watts) happen at parse
/// time, so downstream code only ever sees linear watts.
struct ExperimentConfig {
  GeometryConfig geometry;
  int users_per_beam = 2;
  /// Slots forced virtual, as (beam, slot) pairs; slots outside the active
  /// grid of a sweep point are ignored.
  std::vector<std::pair<int, int>> virtual_slots;

  SystemParams params;

  std::vector<double> sweep_p_t_dbw = {0, 2, 4, 6, 8, 10, 12, 14};
  std::vector<int> sweep_users = {1, 2, 3, 4};

  std::vector<std::uint64_t> seeds = {1};
  /// Canonical labels: "EE-SCA", "RZF", "MMSE", "MBIM-style".
  std::vector<std::string> algorithms = {"EE-SCA", "RZF", "MMSE",
                                         "MBIM-style"};
  std::string output_path = "results.csv";
  int workers = 1;

  /// Re-derives the dependent params dimensions and validates everything.
  void finalize();
};

// dB helpers; dBW follows the same rule as generic dB over watts.
double db_to_linear(double db);
double linear_to_db(double linear);
double dbw_to_watts(double dbw);
double watts_to_dbw(double watts);

/// Small 8-beam desk scenario; fast enough for interactive runs.
ExperimentConfig desk8_preset();
/// 16-beam geostationary study at 20 GHz / 500 MHz with a 41.7 dBi terminal.
ExperimentConfig paper16_preset();
/// Accepts "desk8" or "paper16"; throws ParseError otherwise.
ExperimentConfig preset_by_name(std::string_view name);

/// INI-style text with sections [geometry], [layout], [params], [sweep],
/// [run]; # and ; start comments. Unknown sections or keys are errors.
/// Missing keys keep the desk8 defaults. See the project README for the full
/// key list.
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

}  // namespace satee
