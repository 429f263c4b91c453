// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "satee/channel.hpp"
#include "satee/cone_solver.hpp"
#include "satee/errors.hpp"
#include "satee/metrics.hpp"
#include "satee/subproblem.hpp"
#include "satee/types.hpp"

namespace satee {

/// One row of the iteration trace. Restoration iterations carry the current
/// slack level; ascent iterations have max_slack = 0 and report the
/// transformed weighted rate the stopping rule watches.
struct SCAIterationRecord {
  int iteration = 0;        // 1-based, counted across both phases
  double weighted_rate = 0.0;
  double energy_efficiency = 0.0;
  double max_slack = 0.0;
  SolveStatus status = SolveStatus::numerical_failure;
};

struct SCATrace {
  std::vector<SCAIterationRecord> restoration;
  std::vector<SCAIterationRecord> ascent;
};

/// CSV with columns iteration,weighted_rate,ee,max_slack,status; restoration
/// rows first, numbering continuous across phases.
void write_trace_csv(const SCATrace& trace, std::ostream& out);
void write_trace_csv(const SCATrace& trace,
                     const std::filesystem::path& path);

/// Raised when the solver dies mid-run; carries the progress made so far.
class SCAFailure : public SolverFailure {
 public:
  SCAFailure(const std::string& what, SCATrace trace)
      : SolverFailure(what), trace_(std::move(trace)) {}
  const SCATrace& trace() const noexcept { return trace_; }

 private:
  SCATrace trace_;
};

/// Deterministic starting point before any restoration: matched-filter
/// columns at half the power budget, interference variables set to the exact
/// interference-plus-noise they produce.
ExpansionPoint initial_expansion_point(const ChannelMatrix& h,
                                       const SystemParams& params);

/// Runs slack-penalized restoration from the initial point until every slack
/// is below params.slack_tolerance. Throws InfeasibleProblem if the budget
/// params.max_feas_iters is exhausted first, SCAFailure on solver breakdown.
/// Appends its iterations to *trace when given.
ExpansionPoint find_feasible_start(const ChannelMatrix& h,
                                   const SystemParams& params,
                                   SCATrace* trace = nullptr);

struct PrecoderSolution {
  PrecodingMatrix w;
  EvaluationReport report;
  SCATrace trace;
  bool converged = false;  // stopping rule met within max_sca_iters
  int iterations = 0;      // ascent iterations performed
};

/// Full pipeline: restoration, then successive convex ascent steps on the
/// transformed efficiency objective until the weighted-rate gain drops below
/// params.xi. The returned report audits the final precoder at tolerance
/// 1e-6.
PrecoderSolution optimize(const ChannelMatrix& h, const SystemParams& params);

}  // namespace satee
