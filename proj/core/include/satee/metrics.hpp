// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "satee/channel.hpp"
#include "satee/types.hpp"

namespace satee {

/// Everything a sweep needs to judge one precoder on one channel. All SINRs
/// are linear; rates use the log base from SystemParams.
struct EvaluationReport {
  Eigen::MatrixXd sinr;        // N x Q; 0 at virtual slots
  Eigen::VectorXd worst_rate;  // per beam, min over its real users
  double weighted_sum_rate = 0.0;
  double total_power_w = 0.0;
  double energy_efficiency = 0.0;  // weighted_sum_rate / (power + P0)

  double power_margin = 0.0;  // P_T - total power
  /// SINR minus the beam's floor; +inf at virtual slots so they never bind.
  Eigen::MatrixXd qos_margin;
  bool power_feasible = false;
  bool qos_feasible = false;

  /// Beams whose users are all virtual; their rate contribution is zero.
  std::vector<int> all_virtual_beams;
};

/// Per-slot SINR: |h_{n,q} w_n|^2 / (sum_{i != n} |h_{n,q} w_i|^2 + sigma2).
/// Virtual slots report 0. Requires a grouped channel matching W's beams.
Eigen::MatrixXd sinr(const ChannelMatrix& h, const PrecodingMatrix& w,
                     double sigma2);

/// Sum of squared column norms of W.
double total_power(const PrecodingMatrix& w);

/// Full report. The feasibility booleans compare margins against
/// -feasibility_tol, so a margin of exactly zero passes; callers auditing
/// solver output at looser precision pass their own tolerance.
EvaluationReport evaluate(const ChannelMatrix& h, const PrecodingMatrix& w,
                          const SystemParams& params,
                          double feasibility_tol = 1e-9);

}  // namespace satee
