// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks

#pragma once

#include <Eigen/Dense>

#include "satee/channel.hpp"
#include "satee/cone_program.hpp"
#include "satee/types.hpp"

namespace satee {

/// Affine global lower bound on f(w, beta) = |h w|^2 / beta around an
/// expansion point (w0, beta0), beta0 > 0:
///   bound(w, beta) = 2 Re{w0^H h^H h w} / beta0 - (|h w0| / beta0)^2 beta.
/// It matches f at the expansion point and never exceeds f (f is jointly
/// convex over beta > 0).
struct RateBound {
  Eigen::VectorXd w_coeffs;  // length 2M, (re, im) interleaved per feed
  double beta_coeff = 0.0;   // always <= 0

  double value(const Eigen::VectorXcd& w, double beta) const;
};

RateBound taylor_lower_bound(const Eigen::RowVectorXcd& h_row,
                             const Eigen::VectorXcd& w0, double beta0);

/// Point the per-iteration subproblems are linearized around. beta must be
/// positive wherever the corresponding slot is real.
struct ExpansionPoint {
  Eigen::MatrixXcd w;    // M x N
  Eigen::MatrixXd beta;  // N x Q
};

struct BuildOptions {
  /// Also emit the interference and bound rows of virtual slots (with a free
  /// boxed SINR variable, no QoS or rate link). The optimal precoder must not
  /// change; exists so tests can assert exactly that.
  bool include_virtual_rows = false;
};

/// Variable layout of the transformed efficiency subproblem. The scaled
/// precoder comes first as 2MN reals, beam-major with (re, im) interleaved
/// per feed; then the per-slot interference and SINR variables (index -1
/// where a slot has none), the per-beam rate variables, and the scale phi.
struct EeLayout {
  int feeds = 0;
  int beams = 0;
  int users_per_beam = 0;
  Eigen::MatrixXi beta;   // N x Q
  Eigen::MatrixXi gamma;  // N x Q
  Eigen::VectorXi r;      // N
  int phi = -1;
  int num_vars = 0;

  int w_re(int beam, int feed) const { return 2 * (beam * feeds + feed); }
  int w_im(int beam, int feed) const { return w_re(beam, feed) + 1; }
};

struct EeSubproblem {
  ConeProgram program;
  EeLayout layout;
};

/// Convex subproblem whose maximizer is the energy-efficiency ascent step:
/// maximize sum_n alpha_n r_n over the transformed variables, subject to the
/// scale-power coupling, the power budget, per-slot rate links (exponential
/// cones), interference bounds (rotated second-order cones), QoS floors and
/// the linearized SINR lower bounds at `point`.
EeSubproblem build_ee_subproblem(const ChannelMatrix& h,
                                 const SystemParams& params,
                                 const ExpansionPoint& point,
                                 const BuildOptions& opts = {});

/// Solution of the transformed subproblem mapped back to the original scale.
struct TransformedSolution {
  PrecodingMatrix w;
  Eigen::MatrixXd beta;   // 0 where a slot has no variable
  Eigen::VectorXd r_bar;  // rate variables in the *transformed* scale
  double phi = 0.0;
};

/// Divides the scaled precoder and interference variables by phi. Throws
/// std::domain_error if phi is not strictly positive.
TransformedSolution de_transform(const EeSubproblem& sub,
                                 const Eigen::VectorXd& x);

/// Layout of the feasibility-restoration subproblem: original-scale precoder
/// and per-slot variables plus one slack per relaxed constraint family
/// (power; per-slot bound and interference; per-beam QoS and rate link).
struct FeasibilityLayout {
  int feeds = 0;
  int beams = 0;
  int users_per_beam = 0;
  Eigen::MatrixXi beta;    // N x Q
  Eigen::MatrixXi gamma;   // N x Q
  Eigen::VectorXi r;       // N
  int psi_power = -1;      // power slack
  Eigen::MatrixXi psi_bound;         // N x Q, linearized-bound slack
  Eigen::MatrixXi psi_interference;  // N x Q
  Eigen::VectorXi psi_qos;           // N
  Eigen::VectorXi psi_rate;          // N
  int num_vars = 0;
  int slack_count = 0;

  int w_re(int beam, int feed) const { return 2 * (beam * feeds + feed); }
  int w_im(int beam, int feed) const { return w_re(beam, feed) + 1; }
};

struct FeasibilitySubproblem {
  ConeProgram program;
  FeasibilityLayout layout;
};

/// Restoration subproblem: maximize sum_n alpha_n r_n minus
/// params.penalty_lambda times the slack sum, with every hard constraint of
/// the design problem relaxed by its slack. All slacks zero at the optimum
/// means `point` can be repaired into a strictly feasible design.
FeasibilitySubproblem build_feasibility_subproblem(const ChannelMatrix& h,
                                                   const SystemParams& params,
                                                   const ExpansionPoint& point,
                                                   const BuildOptions& opts = {});

struct FeasibilityState {
  Eigen::MatrixXcd w;    // M x N
  Eigen::MatrixXd beta;  // N x Q, 0 where absent
  Eigen::VectorXd r;     // N
  double max_slack = 0.0;
  double slack_sum = 0.0;
};

FeasibilityState extract_feasibility(const FeasibilitySubproblem& sub,
                                     const Eigen::VectorXd& x);

}  // namespace satee
