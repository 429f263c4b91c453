// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks

#include <cmath>
#include <complex>
#include <random>

#include <doctest.h>

#include "satee/channel.hpp"
#include "satee/cone_solver.hpp"
#include "satee/ee_precoder.hpp"
#include "satee/subproblem.hpp"

using namespace satee;

namespace {

GeometryConfig desk_geometry(int beams) {
  GeometryConfig g;
  g.beam_centers = hex_beam_centers(
      beams, 1.7320508075688772 * g.coverage_radius_m);
  return g;
}

/// 2 beams, 2 users each, slot (1, 1) virtual.
ChannelMatrix masked_channel() {
  const GeometryConfig g = desk_geometry(2);
  UserLayout layout = make_uniform_layout(g, 2, 21);
  layout.virtual_mask[3] = true;
  ChannelMatrix h = generate_channel(g, layout, 21);
  h.set_grouping(2);
  return h;
}

SystemParams masked_params() {
  SystemParams p;
  p.m_feeds = 2;
  p.n_beams = 2;
  p.users_per_beam = 2;
  p.p_t_watts = 25.1;
  p.p_0_watts = 10.0;
  p.validate();
  return p;
}

double quad_over_lin(const Eigen::RowVectorXcd& h_row,
                     const Eigen::VectorXcd& w, double beta) {
  return std::norm((h_row * w).value()) / beta;
}

}  // namespace

TEST_SUITE("subproblem") {

TEST_CASE("linearized bound is tight at its own expansion point") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.1, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(rng() % 5);
    Eigen::RowVectorXcd h_row(m);
    Eigen::VectorXcd w0(m);
    for (int i = 0; i < m; ++i) {
      h_row[i] = std::complex<double>(gauss(rng), gauss(rng));
      w0[i] = std::complex<double>(gauss(rng), gauss(rng));
    }
    const double beta0 = unif(rng);
    const RateBound bound = taylor_lower_bound(h_row, w0, beta0);
    CHECK(bound.value(w0, beta0) ==
          doctest::Approx(quad_over_lin(h_row, w0, beta0)).epsilon(1e-9));
  }
}

TEST_CASE("linearized bound underestimates everywhere") {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.05, 8.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + static_cast<int>(rng() % 4);
    Eigen::RowVectorXcd h_row(m);
    Eigen::VectorXcd w0(m), w(m);
    for (int i = 0; i < m; ++i) {
      h_row[i] = std::complex<double>(gauss(rng), gauss(rng));
      w0[i] = std::complex<double>(gauss(rng), gauss(rng));
      w[i] = std::complex<double>(gauss(rng), gauss(rng));
    }
    const double beta0 = unif(rng);
    const double beta = unif(rng);
    const RateBound bound = taylor_lower_bound(h_row, w0, beta0);
    CHECK(bound.value(w, beta) <= quad_over_lin(h_row, w, beta) + 1e-9);
  }
}

TEST_CASE("bound coefficients contract the precoder as documented") {
  // value() must equal the manual inner product over interleaved re/im parts.
  Eigen::RowVectorXcd h_row(2);
  h_row << std::complex<double>(1.0, -0.5), std::complex<double>(0.2, 0.3);
  Eigen::VectorXcd w0(2);
  w0 << std::complex<double>(0.4, 0.1), std::complex<double>(-0.6, 0.9);
  const RateBound bound = taylor_lower_bound(h_row, w0, 1.7);
  Eigen::VectorXcd w(2);
  w << std::complex<double>(-0.3, 0.8), std::complex<double>(1.1, 0.2);
  double manual = bound.beta_coeff * 0.9;
  for (int i = 0; i < 2; ++i) {
    manual += bound.w_coeffs[2 * i] * w[i].real() +
              bound.w_coeffs[2 * i + 1] * w[i].imag();
  }
  CHECK(bound.value(w, 0.9) == doctest::Approx(manual).epsilon(1e-12));
  CHECK(bound.beta_coeff <= 0.0);
}

TEST_CASE("efficiency subproblem has the documented variable count") {
  const ChannelMatrix h = masked_channel();
  const SystemParams p = masked_params();
  const ExpansionPoint point = initial_expansion_point(h, p);

  const EeSubproblem sub = build_ee_subproblem(h, p, point);
  sub.program.validate();
  // 2MN precoder reals + (beta, gamma) per real slot + r per beam + phi.
  const int real_slots = 3;
  CHECK(sub.layout.num_vars == 2 * 2 * 2 + 2 * real_slots + 2 + 1);
  CHECK(sub.program.num_vars == sub.layout.num_vars);
  CHECK(sub.layout.beta(1, 1) == -1);
  CHECK(sub.layout.gamma(1, 1) == -1);
  CHECK(sub.layout.phi == sub.layout.num_vars - 1);

  const EeSubproblem wide =
      build_ee_subproblem(h, p, point, {.include_virtual_rows = true});
  wide.program.validate();
  CHECK(wide.layout.num_vars == 2 * 2 * 2 + 2 * 4 + 2 + 1);
  CHECK(wide.layout.beta(1, 1) >= 0);
}

TEST_CASE("efficiency objective rewards exactly the per-beam rate variables") {
  const ChannelMatrix h = masked_channel();
  SystemParams p = masked_params();
  p.alpha = Eigen::VectorXd(2);
  p.alpha << 1.5, 0.25;
  const EeSubproblem sub =
      build_ee_subproblem(h, p, initial_expansion_point(h, p));
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(sub.layout.num_vars);
  expected[sub.layout.r[0]] = 1.5;
  expected[sub.layout.r[1]] = 0.25;
  CHECK((sub.program.objective - expected).norm() == 0.0);
}

TEST_CASE("restoration subproblem has one slack per relaxed constraint") {
  const ChannelMatrix h = masked_channel();
  const SystemParams p = masked_params();
  const FeasibilitySubproblem sub =
      build_feasibility_subproblem(h, p, initial_expansion_point(h, p));
  sub.program.validate();
  const int real_slots = 3;
  CHECK(sub.layout.slack_count == 1 + 2 * real_slots + 2 * 2);
  CHECK(sub.layout.num_vars ==
        2 * 2 * 2 + 2 * real_slots + 2 + sub.layout.slack_count);
  CHECK(sub.layout.psi_power >= 0);
  CHECK(sub.layout.psi_bound(1, 1) == -1);
  CHECK(sub.layout.psi_interference(1, 1) == -1);
}

TEST_CASE("building twice from the same inputs is bit-identical") {
  const ChannelMatrix h = masked_channel();
  const SystemParams p = masked_params();
  const ExpansionPoint point = initial_expansion_point(h, p);
  const EeSubproblem a = build_ee_subproblem(h, p, point);
  const EeSubproblem b = build_ee_subproblem(h, p, point);
  CHECK((Eigen::MatrixXd(a.program.rows) - Eigen::MatrixXd(b.program.rows))
            .norm() == 0.0);
  CHECK((a.program.constants - b.program.constants).norm() == 0.0);
  CHECK((a.program.objective - b.program.objective).norm() == 0.0);
}

TEST_CASE("virtual rows are optional and do not move the optimum") {
  const ChannelMatrix h = masked_channel();
  const SystemParams p = masked_params();
  const ExpansionPoint point = initial_expansion_point(h, p);
  const EeSubproblem lean = build_ee_subproblem(h, p, point);
  const EeSubproblem wide =
      build_ee_subproblem(h, p, point, {.include_virtual_rows = true});
  const SolveOutcome lo = solve(lean.program);
  const SolveOutcome wo = solve(wide.program);
  REQUIRE(lo.status == SolveStatus::optimal);
  REQUIRE(wo.status == SolveStatus::optimal);
  CHECK(lo.objective == doctest::Approx(wo.objective).epsilon(1e-6));
  const TransformedSolution lt = de_transform(lean, lo.x);
  const TransformedSolution wt = de_transform(wide, wo.x);
  CHECK((lt.w.w - wt.w.w).norm() < 1e-4 * (1.0 + lt.w.w.norm()));
}

TEST_CASE("scale inversion matches the consumed power exactly at the optimum") {
  const ChannelMatrix h = masked_channel();
  const SystemParams p = masked_params();
  const EeSubproblem sub =
      build_ee_subproblem(h, p, initial_expansion_point(h, p));
  const SolveOutcome o = solve(sub.program);
  REQUIRE(o.status == SolveStatus::optimal);
  const TransformedSolution ts = de_transform(sub, o.x);
  REQUIRE(ts.phi > 0.0);
  const double denom = ts.w.w.squaredNorm() + p.p_0_watts;
  CHECK(1.0 / ts.phi == doctest::Approx(denom).epsilon(1e-6));
  // De-scaled interference of the virtual slot stays zero.
  CHECK(ts.beta(1, 1) == 0.0);
}

TEST_CASE("a vanishing scale variable is rejected during inversion") {
  const ChannelMatrix h = masked_channel();
  const SystemParams p = masked_params();
  const EeSubproblem sub =
      build_ee_subproblem(h, p, initial_expansion_point(h, p));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sub.layout.num_vars);
  CHECK_THROWS_AS(de_transform(sub, x), std::domain_error);
}

TEST_CASE("restoration with zero floors closes all slacks in one solve") {
  const ChannelMatrix h = masked_channel();
  const SystemParams p = masked_params();  // gamma_bar defaults to zero
  const FeasibilitySubproblem sub =
      build_feasibility_subproblem(h, p, initial_expansion_point(h, p));
  const SolveOutcome o = solve(sub.program);
  REQUIRE(o.status == SolveStatus::optimal);
  const FeasibilityState st = extract_feasibility(sub, o.x);
  CHECK(st.max_slack <= 1e-6);
  CHECK(st.slack_sum <= 1e-5);
  CHECK(st.w.allFinite());
  CHECK(st.r.allFinite());
}

TEST_CASE("invalid expansion points are rejected") {
  const ChannelMatrix h = masked_channel();
  const SystemParams p = masked_params();
  ExpansionPoint point = initial_expansion_point(h, p);
  point.beta(0, 0) = 0.0;  // interference estimates must be positive
  CHECK_THROWS_AS(build_ee_subproblem(h, p, point), std::invalid_argument);
  ExpansionPoint wrong = initial_expansion_point(h, p);
  wrong.w.resize(3, 2);
  CHECK_THROWS_AS(build_ee_subproblem(h, p, wrong), std::invalid_argument);
}

}  // TEST_SUITE
