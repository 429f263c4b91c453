// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks

#pragma once

#include <Eigen/Dense>
#include <limits>

#include "satee/cone_program.hpp"

namespace satee {

enum class SolveStatus {
  optimal,            ///< primal/dual pair within tolerance
  infeasible,         ///< certificate: no x satisfies the constraints
  unbounded,          ///< certificate: the objective is unbounded above
  numerical_failure,  ///< no conclusion within the iteration/step budget
};

const char* to_string(SolveStatus s);

/// Interior-point controls. The defaults target 1e-8 relative accuracy and
/// fall back to the best iterate if it is within acceptable_tol when progress
/// stalls; loosen acceptable_tol rather than the targets if a model is badly
/// scaled.
struct SolverSettings {
  double feasibility_tol = 1e-8;  // relative primal/dual residual target
  double gap_tol = 1e-8;          // relative duality-gap target
  double acceptable_tol = 1e-7;   // weakest accuracy accepted on stall
  int max_iterations = 500;       // outer (predictor) iterations
  int max_correctors = 8;         // centering steps after each predictor
  double neighborhood_in = 0.1;   // proximity after centering
  double neighborhood_out = 0.7;  // proximity allowed after a predictor step
  double min_step = 1e-9;         // smallest accepted line-search step
  bool verbose = false;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::VectorXd x;  // maximizer when status == optimal, empty otherwise
  double objective = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  // Achieved relative residuals; for certificates these hold the certificate
  // quality instead.
  double primal_residual = std::numeric_limits<double>::infinity();
  double dual_residual = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
};

/// Solves `maximize objective.x subject to rows*x + constants in cones` with a
/// homogeneous self-dual interior-point method (predictor-corrector on the
/// primal barrier). Supports every Cone value, including exponential blocks.
SolveOutcome solve(const ConeProgram& program,
                   const SolverSettings& settings = {});

}  // namespace satee
