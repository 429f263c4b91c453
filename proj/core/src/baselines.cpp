// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks

#include "satee/baselines.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "satee/metrics.hpp"

namespace satee {

const char* baseline_label(Baseline b) {
  switch (b) {
    case Baseline::rzf: return "RZF";
    case Baseline::mmse: return "MMSE";
    case Baseline::mbim: return "MBIM-style";
  }
  return "?";
}

Eigen::MatrixXcd representative_rows(const ChannelMatrix& h) {
  if (!h.has_grouping()) {
    throw std::invalid_argument(
        "representative_rows: channel has no beam grouping");
  }
  Eigen::MatrixXcd rep = Eigen::MatrixXcd::Zero(h.beams(), h.feeds());
  for (int n = 0; n < h.beams(); ++n) {
    int count = 0;
    for (int q = 0; q < h.users_per_beam; ++q) {
      if (h.is_virtual(n, q)) continue;
      rep.row(n) += h.row(n, q);
      ++count;
    }
    if (count > 0) rep.row(n) /= count;
  }
  return rep;
}

namespace {

PrecodingMatrix scale_to_budget(Eigen::MatrixXcd w, double p_t) {
  const double power = w.squaredNorm();
  if (power > 0.0) {
    w *= std::sqrt(p_t / power);
  }
  return PrecodingMatrix{std::move(w)};
}

PrecodingMatrix regularized_inversion(const Eigen::MatrixXcd& rep,
                                      const SystemParams& params,
                                      double regularization) {
  const double reg = regularization >= 0.0
                         ? regularization
                         : params.n_beams * params.sigma2 / params.p_t_watts;
  const int n = static_cast<int>(rep.rows());
  const Eigen::MatrixXcd gram =
      rep * rep.adjoint() +
      reg * Eigen::MatrixXcd::Identity(n, n);
  // W0 = rep^H (rep rep^H + reg I)^{-1}; the Gram matrix is Hermitian
  // positive definite for reg > 0.
  const Eigen::MatrixXcd w0 = rep.adjoint() * gram.ldlt().solve(
                                                  Eigen::MatrixXcd::Identity(
                                                      n, n));
  return scale_to_budget(w0, params.p_t_watts);
}

PrecodingMatrix interference_minimizing(const ChannelMatrix& h,
                                        const Eigen::MatrixXcd& rep,
                                        const SystemParams& params) {
  const int n_beams = static_cast<int>(rep.rows());
  const int m_feeds = static_cast<int>(rep.cols());

  std::vector<int> active;
  for (int n = 0; n < n_beams; ++n) {
    if (rep.row(n).norm() > 0.0) active.push_back(n);
  }
  if (active.empty()) {
    return PrecodingMatrix{Eigen::MatrixXcd::Zero(m_feeds, n_beams)};
  }

  // Null-steering directions: project each beam's representative vector onto
  // the orthogonal complement of the others; fall back to the matched filter
  // when the complement degenerates.
  Eigen::MatrixXcd dirs = Eigen::MatrixXcd::Zero(m_feeds, n_beams);
  Eigen::VectorXd gain = Eigen::VectorXd::Zero(n_beams);
  for (int n : active) {
    const Eigen::VectorXcd v = rep.row(n).adjoint();
    Eigen::VectorXcd d = v;
    if (active.size() > 1) {
      Eigen::MatrixXcd others(m_feeds,
                              static_cast<Eigen::Index>(active.size()) - 1);
      int c = 0;
      for (int i : active) {
        if (i != n) others.col(c++) = rep.row(i).adjoint();
      }
      const Eigen::VectorXcd coeffs =
          others.completeOrthogonalDecomposition().solve(v);
      d = v - others * coeffs;
      if (d.norm() < 1e-12 * v.norm()) d = v;
    }
    d.normalize();
    dirs.col(n) = d;
    gain[n] = std::norm((rep.row(n) * d).value());
  }

  // Gain-inversion power profile p_n proportional to gain^-kappa; sweep the
  // exponent and keep whichever profile serves the worst real user best.
  const Eigen::MatrixXd sigma_gains = (h.entries * dirs).cwiseAbs2();
  double best_kappa = 0.0;
  double best_worst = -std::numeric_limits<double>::infinity();
  constexpr int kGridPoints = 201;
  for (int gi = 0; gi < kGridPoints; ++gi) {
    const double kappa = 2.0 * gi / (kGridPoints - 1);
    double total = 0.0;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n_beams);
    for (int n : active) {
      p[n] = std::exp(-kappa * std::log(gain[n]));
      total += p[n];
    }
    p *= params.p_t_watts / total;

    double worst = std::numeric_limits<double>::infinity();
    for (int n = 0; n < h.beams(); ++n) {
      for (int q = 0; q < h.users_per_beam; ++q) {
        if (h.is_virtual(n, q)) continue;
        const int k = h.row_index(n, q);
        double wanted = 0.0;
        double others_power = params.sigma2;
        for (int i = 0; i < n_beams; ++i) {
          const double term = p[i] * sigma_gains(k, i);
          if (i == n) {
            wanted = term;
          } else {
            others_power += term;
          }
        }
        worst = std::min(worst, wanted / others_power);
      }
    }
    if (worst > best_worst) {
      best_worst = worst;
      best_kappa = kappa;
    }
  }

  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(m_feeds, n_beams);
  double total = 0.0;
  for (int n : active) {
    total += std::exp(-best_kappa * std::log(gain[n]));
  }
  for (int n : active) {
    const double p =
        params.p_t_watts * std::exp(-best_kappa * std::log(gain[n])) / total;
    w.col(n) = std::sqrt(p) * dirs.col(n);
  }
  return scale_to_budget(std::move(w), params.p_t_watts);
}

}  // namespace

PrecodingMatrix baseline_precoder(const ChannelMatrix& h,
                                  const SystemParams& params, Baseline kind,
                                  double regularization) {
  params.validate();
  if (!h.has_grouping() || h.beams() != params.n_beams ||
      h.feeds() != params.m_feeds ||
      h.users_per_beam != params.users_per_beam) {
    throw std::invalid_argument("baseline_precoder: channel/params mismatch");
  }
  const Eigen::MatrixXcd rep = representative_rows(h);
  if (rep.norm() == 0.0) {
    throw std::invalid_argument(
        "baseline_precoder: channel has no usable rows, cannot meet the "
        "power budget");
  }
  switch (kind) {
    case Baseline::rzf:
    case Baseline::mmse:
      return regularized_inversion(rep, params, regularization);
    case Baseline::mbim:
      return interference_minimizing(h, rep, params);
  }
  throw std::logic_error("baseline_precoder: unknown kind");
}

}  // namespace satee
