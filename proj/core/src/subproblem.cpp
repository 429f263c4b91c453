// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks

#include "satee/subproblem.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace satee {

namespace {

void check_inputs(const ChannelMatrix& h, const SystemParams& params,
                  const ExpansionPoint& point) {
  params.validate();
  if (!h.has_grouping()) {
    throw std::invalid_argument("subproblem: channel has no beam grouping");
  }
  if (h.users_per_beam != params.users_per_beam ||
      h.beams() != params.n_beams || h.feeds() != params.m_feeds) {
    throw std::invalid_argument("subproblem: channel does not match params");
  }
  if (point.w.rows() != params.m_feeds || point.w.cols() != params.n_beams ||
      point.beta.rows() != params.n_beams ||
      point.beta.cols() != params.users_per_beam) {
    throw std::invalid_argument("subproblem: expansion point has wrong shape");
  }
  for (int n = 0; n < params.n_beams; ++n) {
    for (int q = 0; q < params.users_per_beam; ++q) {
      if (!h.is_virtual(n, q) && !(point.beta(n, q) > 0.0)) {
        throw std::invalid_argument(
            "subproblem: expansion interference must be positive at real "
            "slots");
      }
    }
  }
}

/// Appends the two rows Re(h w_col) and Im(h w_col) to the open block.
/// Variable indices follow the shared precoder layout (beam-major, re/im
/// interleaved per feed).
void add_hw_rows(ConeProgramBuilder& b, const Eigen::RowVectorXcd& h_row,
                 int col, int feeds) {
  b.new_row();
  for (int m = 0; m < feeds; ++m) {
    const int base = 2 * (col * feeds + m);
    b.coeff(base, h_row[m].real());
    b.coeff(base + 1, -h_row[m].imag());
  }
  b.new_row();
  for (int m = 0; m < feeds; ++m) {
    const int base = 2 * (col * feeds + m);
    b.coeff(base, h_row[m].imag());
    b.coeff(base + 1, h_row[m].real());
  }
}

void add_taylor_coeffs(ConeProgramBuilder& b, const RateBound& rb, int beam,
                       int feeds, int beta_var) {
  for (int m = 0; m < feeds; ++m) {
    const int base = 2 * (beam * feeds + m);
    b.coeff(base, rb.w_coeffs[2 * m]);
    b.coeff(base + 1, rb.w_coeffs[2 * m + 1]);
  }
  b.coeff(beta_var, rb.beta_coeff);
}

std::vector<int> beams_without_real_users(const ChannelMatrix& h) {
  std::vector<int> out;
  for (int n = 0; n < h.beams(); ++n) {
    bool any_real = false;
    for (int q = 0; q < h.users_per_beam; ++q) {
      if (!h.is_virtual(n, q)) any_real = true;
    }
    if (!any_real) out.push_back(n);
  }
  return out;
}

}  // namespace

double RateBound::value(const Eigen::VectorXcd& w, double beta) const {
  double v = beta_coeff * beta;
  for (Eigen::Index m = 0; m < w.size(); ++m) {
    v += w_coeffs[2 * m] * w[m].real() + w_coeffs[2 * m + 1] * w[m].imag();
  }
  return v;
}

RateBound taylor_lower_bound(const Eigen::RowVectorXcd& h_row,
                             const Eigen::VectorXcd& w0, double beta0) {
  if (!(beta0 > 0.0)) {
    throw std::invalid_argument("taylor_lower_bound: beta0 must be positive");
  }
  if (h_row.size() != w0.size()) {
    throw std::invalid_argument("taylor_lower_bound: dimension mismatch");
  }
  const std::complex<double> a = (h_row * w0).value();  // scalar h w0
  RateBound rb;
  rb.w_coeffs.resize(2 * h_row.size());
  for (Eigen::Index m = 0; m < h_row.size(); ++m) {
    const std::complex<double> c = std::conj(a) * h_row[m];
    rb.w_coeffs[2 * m] = 2.0 * c.real() / beta0;
    rb.w_coeffs[2 * m + 1] = -2.0 * c.imag() / beta0;
  }
  rb.beta_coeff = -std::norm(a) / (beta0 * beta0);
  return rb;
}

EeSubproblem build_ee_subproblem(const ChannelMatrix& h,
                                 const SystemParams& params,
                                 const ExpansionPoint& point,
                                 const BuildOptions& opts) {
  check_inputs(h, params, point);
  const int m_feeds = params.m_feeds;
  const int n_beams = params.n_beams;
  const int q_users = params.users_per_beam;
  const auto include = [&](int n, int q) {
    return !h.is_virtual(n, q) || opts.include_virtual_rows;
  };

  EeLayout L;
  L.feeds = m_feeds;
  L.beams = n_beams;
  L.users_per_beam = q_users;
  L.beta = Eigen::MatrixXi::Constant(n_beams, q_users, -1);
  L.gamma = Eigen::MatrixXi::Constant(n_beams, q_users, -1);
  L.r.resize(n_beams);
  int next = 2 * m_feeds * n_beams;
  for (int n = 0; n < n_beams; ++n) {
    for (int q = 0; q < q_users; ++q) {
      if (include(n, q)) L.beta(n, q) = next++;
    }
  }
  for (int n = 0; n < n_beams; ++n) {
    for (int q = 0; q < q_users; ++q) {
      if (include(n, q)) L.gamma(n, q) = next++;
    }
  }
  for (int n = 0; n < n_beams; ++n) L.r[n] = next++;
  L.phi = next++;
  L.num_vars = next;

  ConeProgramBuilder b(L.num_vars);
  for (int n = 0; n < n_beams; ++n) {
    b.objective_coeff(L.r[n], params.alpha_of(n));
  }

  const double ln_base = log_base_scale(params.log_base);
  const double sigma = std::sqrt(params.sigma2);
  const int w_dim = 2 * m_feeds * n_beams;

  // Scale-power coupling: ||(vec w, sqrt(P0) phi)||^2 <= phi * 1. Active at
  // any maximizer, which pins phi to 1/(total power + P0).
  b.begin_block(Cone::rotated_second_order);
  b.new_row();
  b.coeff(L.phi, 1.0);
  b.new_row(1.0);
  for (int v = 0; v < w_dim; ++v) {
    b.new_row();
    b.coeff(v, 1.0);
  }
  b.new_row();
  b.coeff(L.phi, std::sqrt(params.p_0_watts));
  b.end_block();

  // Transmit budget: ||vec w|| <= sqrt(P_T) phi.
  b.begin_block(Cone::second_order);
  b.new_row();
  b.coeff(L.phi, std::sqrt(params.p_t_watts));
  for (int v = 0; v < w_dim; ++v) {
    b.new_row();
    b.coeff(v, 1.0);
  }
  b.end_block();

  for (int n = 0; n < n_beams; ++n) {
    for (int q = 0; q < q_users; ++q) {
      if (!include(n, q)) continue;
      const bool is_real = !h.is_virtual(n, q);
      const Eigen::RowVectorXcd h_row = h.row(n, q);

      if (is_real) {
        // Rate link r_n <= phi log_base(1 + gamma/phi) as an exp-cone row
        // triple (ln_base r_n, phi, phi + gamma).
        b.begin_block(Cone::exponential);
        b.new_row();
        b.coeff(L.r[n], ln_base);
        b.new_row();
        b.coeff(L.phi, 1.0);
        b.new_row();
        b.coeff(L.phi, 1.0);
        b.coeff(L.gamma(n, q), 1.0);
        b.end_block();
      }

      // Interference bound: sum_{i != n} |h w_i|^2 + sigma2 phi^2 <= phi beta.
      b.begin_block(Cone::rotated_second_order);
      b.new_row();
      b.coeff(L.phi, 1.0);
      b.new_row();
      b.coeff(L.beta(n, q), 1.0);
      for (int i = 0; i < n_beams; ++i) {
        if (i != n) add_hw_rows(b, h_row, i, m_feeds);
      }
      b.new_row();
      b.coeff(L.phi, sigma);
      b.end_block();

      // QoS floor and the linearized SINR lower bound.
      const RateBound rb =
          taylor_lower_bound(h_row, point.w.col(n), point.beta(n, q));
      b.begin_block(Cone::nonneg);
      b.new_row();
      b.coeff(L.gamma(n, q), 1.0);
      if (is_real) b.coeff(L.phi, -params.gamma_bar_of(n));
      b.new_row();
      add_taylor_coeffs(b, rb, n, m_feeds, L.beta(n, q));
      b.coeff(L.gamma(n, q), -1.0);
      b.end_block();
    }
  }

  // Beams with no real user contribute no rate; cap their rate variable so
  // the objective cannot run away through them.
  const std::vector<int> empty_beams = beams_without_real_users(h);
  if (!empty_beams.empty()) {
    b.begin_block(Cone::nonneg);
    for (int n : empty_beams) {
      b.new_row();
      b.coeff(L.r[n], -1.0);
    }
    b.end_block();
  }

  return EeSubproblem{b.build(), L};
}

TransformedSolution de_transform(const EeSubproblem& sub,
                                 const Eigen::VectorXd& x) {
  const EeLayout& L = sub.layout;
  if (x.size() != L.num_vars) {
    throw std::invalid_argument("de_transform: solution has wrong length");
  }
  const double phi = x[L.phi];
  if (!(phi > 1e-12)) {
    throw std::domain_error("de_transform: scale phi is not positive");
  }
  TransformedSolution t;
  t.phi = phi;
  t.w.w.resize(L.feeds, L.beams);
  for (int n = 0; n < L.beams; ++n) {
    for (int m = 0; m < L.feeds; ++m) {
      t.w.w(m, n) =
          std::complex<double>(x[L.w_re(n, m)], x[L.w_im(n, m)]) / phi;
    }
  }
  t.beta = Eigen::MatrixXd::Zero(L.beams, L.users_per_beam);
  for (int n = 0; n < L.beams; ++n) {
    for (int q = 0; q < L.users_per_beam; ++q) {
      if (L.beta(n, q) >= 0) t.beta(n, q) = x[L.beta(n, q)] / phi;
    }
  }
  t.r_bar.resize(L.beams);
  for (int n = 0; n < L.beams; ++n) t.r_bar[n] = x[L.r[n]];
  return t;
}

FeasibilitySubproblem build_feasibility_subproblem(const ChannelMatrix& h,
                                                   const SystemParams& params,
                                                   const ExpansionPoint& point,
                                                   const BuildOptions& opts) {
  check_inputs(h, params, point);
  const int m_feeds = params.m_feeds;
  const int n_beams = params.n_beams;
  const int q_users = params.users_per_beam;
  const auto include = [&](int n, int q) {
    return !h.is_virtual(n, q) || opts.include_virtual_rows;
  };

  FeasibilityLayout L;
  L.feeds = m_feeds;
  L.beams = n_beams;
  L.users_per_beam = q_users;
  L.beta = Eigen::MatrixXi::Constant(n_beams, q_users, -1);
  L.gamma = Eigen::MatrixXi::Constant(n_beams, q_users, -1);
  L.psi_bound = Eigen::MatrixXi::Constant(n_beams, q_users, -1);
  L.psi_interference = Eigen::MatrixXi::Constant(n_beams, q_users, -1);
  L.r.resize(n_beams);
  L.psi_qos.resize(n_beams);
  L.psi_rate.resize(n_beams);
  int next = 2 * m_feeds * n_beams;
  for (int n = 0; n < n_beams; ++n) {
    for (int q = 0; q < q_users; ++q) {
      if (include(n, q)) L.beta(n, q) = next++;
    }
  }
  for (int n = 0; n < n_beams; ++n) {
    for (int q = 0; q < q_users; ++q) {
      if (include(n, q)) L.gamma(n, q) = next++;
    }
  }
  for (int n = 0; n < n_beams; ++n) L.r[n] = next++;
  L.psi_power = next++;
  for (int n = 0; n < n_beams; ++n) {
    for (int q = 0; q < q_users; ++q) {
      if (!h.is_virtual(n, q)) L.psi_bound(n, q) = next++;
    }
  }
  for (int n = 0; n < n_beams; ++n) {
    for (int q = 0; q < q_users; ++q) {
      if (!h.is_virtual(n, q)) L.psi_interference(n, q) = next++;
    }
  }
  for (int n = 0; n < n_beams; ++n) L.psi_qos[n] = next++;
  for (int n = 0; n < n_beams; ++n) L.psi_rate[n] = next++;
  L.num_vars = next;
  L.slack_count = L.num_vars - L.psi_power;

  ConeProgramBuilder b(L.num_vars);
  for (int n = 0; n < n_beams; ++n) {
    b.objective_coeff(L.r[n], params.alpha_of(n));
  }
  for (int v = L.psi_power; v < L.num_vars; ++v) {
    b.objective_coeff(v, -params.penalty_lambda);
  }

  const double ln_base = log_base_scale(params.log_base);
  const int w_dim = 2 * m_feeds * n_beams;

  // Relaxed budget: ||vec w||^2 <= (P_T + psi_power) * 1.
  b.begin_block(Cone::rotated_second_order);
  b.new_row(params.p_t_watts);
  b.coeff(L.psi_power, 1.0);
  b.new_row(1.0);
  for (int v = 0; v < w_dim; ++v) {
    b.new_row();
    b.coeff(v, 1.0);
  }
  b.end_block();

  for (int n = 0; n < n_beams; ++n) {
    for (int q = 0; q < q_users; ++q) {
      if (!include(n, q)) continue;
      const bool is_real = !h.is_virtual(n, q);
      const Eigen::RowVectorXcd h_row = h.row(n, q);

      if (is_real) {
        // Relaxed rate link: r_n - psi_rate <= log_base(1 + gamma).
        b.begin_block(Cone::exponential);
        b.new_row();
        b.coeff(L.r[n], ln_base);
        b.coeff(L.psi_rate[n], -ln_base);
        b.new_row(1.0);
        b.new_row(1.0);
        b.coeff(L.gamma(n, q), 1.0);
        b.end_block();
      }

      // Relaxed interference: sum_{i != n} |h w_i|^2 <= beta + psi - sigma2.
      // With one beam the left side is empty and the row turns linear.
      if (n_beams > 1) {
        b.begin_block(Cone::rotated_second_order);
        b.new_row(-params.sigma2);
        b.coeff(L.beta(n, q), 1.0);
        if (is_real) b.coeff(L.psi_interference(n, q), 1.0);
        b.new_row(1.0);
        for (int i = 0; i < n_beams; ++i) {
          if (i != n) add_hw_rows(b, h_row, i, m_feeds);
        }
        b.end_block();
      } else {
        b.begin_block(Cone::nonneg);
        b.new_row(-params.sigma2);
        b.coeff(L.beta(n, q), 1.0);
        if (is_real) b.coeff(L.psi_interference(n, q), 1.0);
        b.end_block();
      }

      // Relaxed QoS floor and linearized SINR bound.
      const RateBound rb =
          taylor_lower_bound(h_row, point.w.col(n), point.beta(n, q));
      b.begin_block(Cone::nonneg);
      b.new_row(is_real ? -params.gamma_bar_of(n) : 0.0);
      b.coeff(L.gamma(n, q), 1.0);
      if (is_real) b.coeff(L.psi_qos[n], 1.0);
      b.new_row();
      add_taylor_coeffs(b, rb, n, m_feeds, L.beta(n, q));
      b.coeff(L.gamma(n, q), -1.0);
      if (is_real) b.coeff(L.psi_bound(n, q), 1.0);
      b.end_block();
    }
  }

  const std::vector<int> empty_beams = beams_without_real_users(h);
  if (!empty_beams.empty()) {
    b.begin_block(Cone::nonneg);
    for (int n : empty_beams) {
      b.new_row();
      b.coeff(L.r[n], -1.0);
    }
    b.end_block();
  }

  b.begin_block(Cone::nonneg);
  for (int v = L.psi_power; v < L.num_vars; ++v) {
    b.new_row();
    b.coeff(v, 1.0);
  }
  b.end_block();

  return FeasibilitySubproblem{b.build(), L};
}

FeasibilityState extract_feasibility(const FeasibilitySubproblem& sub,
                                     const Eigen::VectorXd& x) {
  const FeasibilityLayout& L = sub.layout;
  if (x.size() != L.num_vars) {
    throw std::invalid_argument(
        "extract_feasibility: solution has wrong length");
  }
  FeasibilityState st;
  st.w.resize(L.feeds, L.beams);
  for (int n = 0; n < L.beams; ++n) {
    for (int m = 0; m < L.feeds; ++m) {
      st.w(m, n) = std::complex<double>(x[L.w_re(n, m)], x[L.w_im(n, m)]);
    }
  }
  st.beta = Eigen::MatrixXd::Zero(L.beams, L.users_per_beam);
  for (int n = 0; n < L.beams; ++n) {
    for (int q = 0; q < L.users_per_beam; ++q) {
      if (L.beta(n, q) >= 0) st.beta(n, q) = x[L.beta(n, q)];
    }
  }
  st.r.resize(L.beams);
  for (int n = 0; n < L.beams; ++n) st.r[n] = x[L.r[n]];
  st.max_slack = 0.0;
  st.slack_sum = 0.0;
  for (int v = L.psi_power; v < L.num_vars; ++v) {
    st.max_slack = std::max(st.max_slack, x[v]);
    st.slack_sum += x[v];
  }
  return st;
}

}  // namespace satee
