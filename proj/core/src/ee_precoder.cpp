// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks

#include "satee/ee_precoder.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

namespace satee {

namespace {

/// Interference-plus-noise seen by every slot (virtual ones too) under W.
Eigen::MatrixXd interference_plus_noise(const ChannelMatrix& h,
                                        const Eigen::MatrixXcd& w,
                                        double sigma2) {
  const Eigen::MatrixXd gains = (h.entries * w).cwiseAbs2();
  const int n_beams = h.beams();
  const int q_users = h.users_per_beam;
  Eigen::MatrixXd out(n_beams, q_users);
  for (int n = 0; n < n_beams; ++n) {
    for (int q = 0; q < q_users; ++q) {
      const int k = h.row_index(n, q);
      out(n, q) = gains.row(k).sum() - gains(k, n) + sigma2;
    }
  }
  return out;
}

SCAIterationRecord make_record(int iteration, double weighted_rate, double ee,
                               double max_slack, SolveStatus status) {
  SCAIterationRecord rec;
  rec.iteration = iteration;
  rec.weighted_rate = weighted_rate;
  rec.energy_efficiency = ee;
  rec.max_slack = max_slack;
  rec.status = status;
  return rec;
}

}  // namespace

ExpansionPoint initial_expansion_point(const ChannelMatrix& h,
                                       const SystemParams& params) {
  params.validate();
  const int n_beams = params.n_beams;
  const int q_users = params.users_per_beam;
  const int m_feeds = params.m_feeds;

  // Count beams that actually serve someone; they share half the budget.
  int active = 0;
  for (int n = 0; n < n_beams; ++n) {
    for (int q = 0; q < q_users; ++q) {
      if (!h.is_virtual(n, q)) {
        ++active;
        break;
      }
    }
  }

  ExpansionPoint point;
  point.w = Eigen::MatrixXcd::Zero(m_feeds, n_beams);
  if (active > 0) {
    const double per_beam = params.p_t_watts / (2.0 * active);
    for (int n = 0; n < n_beams; ++n) {
      Eigen::VectorXcd rep = Eigen::VectorXcd::Zero(m_feeds);
      int real_users = 0;
      for (int q = 0; q < q_users; ++q) {
        if (!h.is_virtual(n, q)) {
          rep += h.row(n, q).adjoint();
          ++real_users;
        }
      }
      if (real_users == 0) continue;
      const double norm = rep.norm();
      if (norm > 0.0) {
        point.w.col(n) = std::sqrt(per_beam) * rep / norm;
      }
    }
  }
  point.beta = interference_plus_noise(h, point.w, params.sigma2);
  return point;
}

ExpansionPoint find_feasible_start(const ChannelMatrix& h,
                                   const SystemParams& params,
                                   SCATrace* trace) {
  SCATrace local;
  SCATrace& tr = trace ? *trace : local;
  ExpansionPoint point = initial_expansion_point(h, params);

  for (int it = 1; it <= params.max_feas_iters; ++it) {
    const FeasibilitySubproblem sub =
        build_feasibility_subproblem(h, params, point);
    const SolveOutcome outcome = solve(sub.program);
    if (outcome.status != SolveStatus::optimal) {
      throw SCAFailure(std::string("feasibility restoration: solver returned ") +
                           to_string(outcome.status),
                       tr);
    }
    const FeasibilityState st = extract_feasibility(sub, outcome.x);

    double weighted = 0.0;
    for (int n = 0; n < params.n_beams; ++n) {
      weighted += params.alpha_of(n) * st.r[n];
    }
    const EvaluationReport rep =
        evaluate(h, PrecodingMatrix{st.w}, params, 1e-6);
    tr.restoration.push_back(
        make_record(static_cast<int>(tr.restoration.size()) + 1, weighted,
                    rep.energy_efficiency, st.max_slack, outcome.status));

    point.w = st.w;
    // Re-expand at the exact interference the new precoder produces; the
    // reported beta can undershoot it by up to the absorbed slack.
    point.beta = interference_plus_noise(h, st.w, params.sigma2);
    if (st.max_slack <= params.slack_tolerance) {
      return point;
    }
  }
  throw InfeasibleProblem(
      "feasibility restoration: slacks stayed above tolerance for " +
      std::to_string(params.max_feas_iters) +
      " iterations; the QoS floors are incompatible with the power budget on "
      "this channel");
}

PrecoderSolution optimize(const ChannelMatrix& h, const SystemParams& params) {
  SCATrace trace;
  ExpansionPoint point = find_feasible_start(h, params, &trace);

  PrecoderSolution out;
  double prev_weighted = 0.0;  // the t = 0 reference value of the stop rule
  Eigen::MatrixXcd w_final = point.w;
  int performed = 0;

  for (int t = 1; t <= params.max_sca_iters; ++t) {
    const EeSubproblem sub = build_ee_subproblem(h, params, point);
    const SolveOutcome outcome = solve(sub.program);
    if (outcome.status != SolveStatus::optimal) {
      throw SCAFailure(
          std::string("efficiency ascent: solver returned ") +
              to_string(outcome.status) + " at iteration " + std::to_string(t),
          trace);
    }
    const TransformedSolution ts = de_transform(sub, outcome.x);

    double weighted = 0.0;
    for (int n = 0; n < params.n_beams; ++n) {
      weighted += params.alpha_of(n) * ts.r_bar[n];
    }
    const EvaluationReport rep = evaluate(h, ts.w, params, 1e-6);
    trace.ascent.push_back(make_record(
        static_cast<int>(trace.restoration.size() + trace.ascent.size()) + 1,
        weighted, rep.energy_efficiency, 0.0, outcome.status));

    w_final = ts.w.w;
    performed = t;

    point.w = ts.w.w;
    point.beta = ts.beta;
    // Slots without their own variable re-expand at their true interference.
    const Eigen::MatrixXd exact =
        interference_plus_noise(h, point.w, params.sigma2);
    for (int n = 0; n < params.n_beams; ++n) {
      for (int q = 0; q < params.users_per_beam; ++q) {
        if (sub.layout.beta(n, q) < 0) point.beta(n, q) = exact(n, q);
      }
    }

    if (std::abs(weighted - prev_weighted) <= params.xi) {
      out.converged = true;
      break;
    }
    prev_weighted = weighted;
  }

  out.w.w = w_final;
  out.report = evaluate(h, out.w, params, 1e-6);
  out.trace = std::move(trace);
  out.iterations = performed;
  return out;
}

void write_trace_csv(const SCATrace& trace, std::ostream& outstream) {
  outstream << std::setprecision(12);
  outstream << "iteration,weighted_rate,ee,max_slack,status\n";
  const auto put = [&outstream](const SCAIterationRecord& r) {
    outstream << r.iteration << ',' << r.weighted_rate << ','
              << r.energy_efficiency << ',' << r.max_slack << ','
              << to_string(r.status) << '\n';
  };
  for (const auto& r : trace.restoration) put(r);
  for (const auto& r : trace.ascent) put(r);
}

void write_trace_csv(const SCATrace& trace,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("trace: cannot open " + path.string());
  }
  write_trace_csv(trace, out);
  if (!out) {
    throw std::runtime_error("trace: write failed for " + path.string());
  }
}

}  // namespace satee
