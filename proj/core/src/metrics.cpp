// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks

#include "satee/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace satee {

Eigen::MatrixXd sinr(const ChannelMatrix& h, const PrecodingMatrix& w,
                     double sigma2) {
  if (!h.has_grouping()) {
    throw std::invalid_argument("sinr: channel has no beam grouping");
  }
  if (h.feeds() != w.feeds() || h.beams() != w.beams()) {
    throw std::invalid_argument("sinr: channel/precoder dimension mismatch");
  }
  if (sigma2 <= 0.0) throw std::invalid_argument("sinr: sigma2 must be > 0");

  const int n_beams = h.beams();
  const int q_users = h.users_per_beam;
  // |h_k w_n|^2 for every (row, beam) pair in one product.
  const Eigen::MatrixXd gains = (h.entries * w.w).cwiseAbs2();

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_beams, q_users);
  for (int n = 0; n < n_beams; ++n) {
    for (int q = 0; q < q_users; ++q) {
      if (h.is_virtual(n, q)) continue;
      const int k = h.row_index(n, q);
      const double wanted = gains(k, n);
      const double interference = gains.row(k).sum() - wanted;
      out(n, q) = wanted / (interference + sigma2);
    }
  }
  return out;
}

double total_power(const PrecodingMatrix& w) { return w.w.squaredNorm(); }

EvaluationReport evaluate(const ChannelMatrix& h, const PrecodingMatrix& w,
                          const SystemParams& params, double feasibility_tol) {
  params.validate();
  if (h.users_per_beam != params.users_per_beam ||
      (h.has_grouping() && h.beams() != params.n_beams) ||
      h.feeds() != params.m_feeds) {
    throw std::invalid_argument("evaluate: channel does not match params");
  }

  EvaluationReport report;
  report.sinr = sinr(h, w, params.sigma2);
  const int n_beams = h.beams();
  const int q_users = h.users_per_beam;
  const double ln_base = log_base_scale(params.log_base);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  report.worst_rate = Eigen::VectorXd::Zero(n_beams);
  report.qos_margin = Eigen::MatrixXd::Constant(n_beams, q_users, kInf);
  for (int n = 0; n < n_beams; ++n) {
    double worst = kInf;
    bool any_real = false;
    for (int q = 0; q < q_users; ++q) {
      if (h.is_virtual(n, q)) continue;
      any_real = true;
      worst = std::min(worst, report.sinr(n, q));
      report.qos_margin(n, q) = report.sinr(n, q) - params.gamma_bar_of(n);
    }
    if (!any_real) {
      report.all_virtual_beams.push_back(n);
      report.worst_rate[n] = 0.0;
    } else {
      report.worst_rate[n] = std::log1p(worst) / ln_base;
    }
  }

  report.total_power_w = total_power(w);
  for (int n = 0; n < n_beams; ++n) {
    report.weighted_sum_rate += params.alpha_of(n) * report.worst_rate[n];
  }
  report.energy_efficiency =
      report.weighted_sum_rate / (report.total_power_w + params.p_0_watts);

  report.power_margin = params.p_t_watts - report.total_power_w;
  report.power_feasible = report.power_margin >= -feasibility_tol;
  report.qos_feasible = report.qos_margin.minCoeff() >= -feasibility_tol;
  return report;
}

}  // namespace satee
