// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks
//
// Acceptance gate: ten independently checkable criteria covering the affine
// rate bound, the ascent loop, the fractional-programming transform, the
// scalar oracle, infeasibility detection, sweep shapes, preset fidelity and
// the closed-form baselines. Prints one PASS/FAIL line per criterion; the
// exit code is the number of failures. Passing criterion numbers as arguments
// restricts the run to those criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "satee/baselines.hpp"
#include "satee/channel.hpp"
#include "satee/config.hpp"
#include "satee/cone_program.hpp"
#include "satee/cone_solver.hpp"
#include "satee/ee_precoder.hpp"
#include "satee/errors.hpp"
#include "satee/experiment.hpp"
#include "satee/metrics.hpp"
#include "satee/subproblem.hpp"
#include "satee/types.hpp"

using namespace satee;
using std::complex;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct CriterionResult {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return std::string(buf);
}

Eigen::RowVectorXcd random_row(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> gauss;
  Eigen::RowVectorXcd h(m);
  for (int i = 0; i < m; ++i) h[i] = complex<double>(gauss(rng), gauss(rng));
  return h;
}

Eigen::VectorXcd random_vec(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd w(m);
  for (int i = 0; i < m; ++i) w[i] = complex<double>(gauss(rng), gauss(rng));
  return w;
}

// ---------------------------------------------------------------------------
// Shared 20-instance design suite: four beams, 100 km coverage disks spaced
// 300 km apart, two users per beam, unity SINR floors, 25.1 W budget. Chosen
// so the floors are attainable for every seed; criteria 3-5 all audit it.
// ---------------------------------------------------------------------------

struct DeskRun {
  std::uint64_t seed = 0;
  ChannelMatrix h;
  SystemParams params;
  PrecoderSolution sol;
};

struct DeskSuite {
  std::vector<DeskRun> runs;
  double wall_seconds = 0.0;
  std::string error;  // nonempty if any instance failed to solve
};

SystemParams desk_suite_params() {
  SystemParams p;
  p.m_feeds = 4;
  p.n_beams = 4;
  p.users_per_beam = 2;
  p.p_t_watts = 25.1;
  p.p_0_watts = 10.0;
  p.sigma2 = 1.0;
  p.gamma_bar = Eigen::VectorXd::Ones(4);
  p.xi = 1e-3;
  return p;
}

GeometryConfig desk_suite_geometry() {
  GeometryConfig g;
  g.coverage_radius_m = 100e3;
  g.beam_centers = hex_beam_centers(4, 300e3);
  return g;
}

const DeskSuite& desk_suite() {
  static const DeskSuite suite = [] {
    DeskSuite s;
    const GeometryConfig g = desk_suite_geometry();
    const SystemParams params = desk_suite_params();
    const double t0 = now_seconds();
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      DeskRun run;
      run.seed = seed;
      run.params = params;
      run.h = generate_channel(g, make_uniform_layout(g, 2, seed), seed);
      run.h.set_grouping(2);
      try {
        run.sol = optimize(run.h, run.params);
      } catch (const std::exception& e) {
        s.error = fmt("seed %llu: %s",
                      static_cast<unsigned long long>(seed), e.what());
        return s;
      }
      s.runs.push_back(std::move(run));
    }
    s.wall_seconds = now_seconds() - t0;
    return s;
  }();
  return suite;
}

/// Interference-plus-noise at each real slot of `w`, as an expansion point.
ExpansionPoint expansion_at(const ChannelMatrix& h, const SystemParams& params,
                            const Eigen::MatrixXcd& w) {
  ExpansionPoint pt;
  pt.w = w;
  pt.beta = Eigen::MatrixXd::Zero(params.n_beams, params.users_per_beam);
  for (int n = 0; n < params.n_beams; ++n) {
    for (int q = 0; q < params.users_per_beam; ++q) {
      if (h.is_virtual(n, q)) continue;
      double interference = params.sigma2;
      for (int i = 0; i < params.n_beams; ++i) {
        if (i == n) continue;
        interference += std::norm((h.row(n, q) * w.col(i)).value());
      }
      pt.beta(n, q) = interference;
    }
  }
  return pt;
}

// ---------------------------------------------------------------------------
// Criterion 1: the affine rate bound is tight at its own expansion point.
// ---------------------------------------------------------------------------
CriterionResult criterion_1() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> beta_draw(0.2, 3.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = dim(rng);
    const Eigen::RowVectorXcd h = random_row(rng, m);
    const Eigen::VectorXcd w0 = random_vec(rng, m);
    const double beta0 = beta_draw(rng);
    const RateBound bound = taylor_lower_bound(h, w0, beta0);
    const double exact = std::norm((h * w0).value()) / beta0;
    worst = std::max(worst, std::abs(bound.value(w0, beta0) - exact));
  }
  return {worst <= 1e-9,
          fmt("max |bound - exact| at the expansion point = %.3g over 1000 "
              "draws (limit 1e-9)",
              worst)};
}

// ---------------------------------------------------------------------------
// Criterion 2: the bound never exceeds the true ratio away from the point.
// ---------------------------------------------------------------------------
CriterionResult criterion_2() {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> beta_draw(0.05, 5.0);
  double worst = -std::numeric_limits<double>::infinity();
  for (int point = 0; point < 20; ++point) {
    const int m = dim(rng);
    const Eigen::RowVectorXcd h = random_row(rng, m);
    const RateBound bound =
        taylor_lower_bound(h, random_vec(rng, m), beta_draw(rng));
    for (int trial = 0; trial < 1000; ++trial) {
      const Eigen::VectorXcd w = random_vec(rng, m);
      const double beta = beta_draw(rng);
      const double exact = std::norm((h * w).value()) / beta;
      worst = std::max(worst, bound.value(w, beta) - exact);
    }
  }
  return {worst <= 1e-9,
          fmt("max (bound - exact) off-point = %.3g over 20x1000 draws "
              "(limit 1e-9)",
              worst)};
}

// ---------------------------------------------------------------------------
// Criterion 3: monotone ascent and the small-gain stopping rule.
// ---------------------------------------------------------------------------
CriterionResult criterion_3() {
  const DeskSuite& suite = desk_suite();
  if (!suite.error.empty()) {
    return {false, "suite failed to solve: " + suite.error};
  }
  double worst_drop = 0.0;
  int max_iters = 0;
  for (const DeskRun& run : suite.runs) {
    if (!run.sol.converged) {
      return {false, fmt("seed %llu did not meet the stopping rule in %d "
                         "iterations",
                         static_cast<unsigned long long>(run.seed),
                         run.sol.iterations)};
    }
    max_iters = std::max(max_iters, run.sol.iterations);
    const auto& ascent = run.sol.trace.ascent;
    for (std::size_t i = 1; i < ascent.size(); ++i) {
      worst_drop = std::max(
          worst_drop, ascent[i - 1].weighted_rate - ascent[i].weighted_rate);
    }
  }
  const bool pass = worst_drop <= 1e-6 && max_iters <= 50 &&
                    suite.wall_seconds <= 300.0;
  return {pass,
          fmt("20 instances converged, max iterations %d (limit 50), worst "
              "trace drop %.3g (limit 1e-6), wall %.1f s (limit 300)",
              max_iters, worst_drop, suite.wall_seconds)};
}

// ---------------------------------------------------------------------------
// Criterion 4: converged designs respect the power budget and SINR floors.
// ---------------------------------------------------------------------------
CriterionResult criterion_4() {
  const DeskSuite& suite = desk_suite();
  if (!suite.error.empty()) {
    return {false, "suite failed to solve: " + suite.error};
  }
  double worst_power = std::numeric_limits<double>::infinity();
  double worst_qos = std::numeric_limits<double>::infinity();
  for (const DeskRun& run : suite.runs) {
    const EvaluationReport rep =
        evaluate(run.h, run.sol.w, run.params, 1e-6);
    worst_power = std::min(worst_power, rep.power_margin);
    worst_qos = std::min(worst_qos, rep.qos_margin.minCoeff());
    if (!rep.power_feasible || !rep.qos_feasible) {
      return {false,
              fmt("seed %llu violates feasibility: power margin %.3g, "
                  "min SINR margin %.3g (tolerance 1e-6)",
                  static_cast<unsigned long long>(run.seed), rep.power_margin,
                  rep.qos_margin.minCoeff())};
    }
  }
  return {true,
          fmt("all 20 designs feasible at 1e-6: min power margin %.3g W, "
              "min SINR margin %.3g",
              worst_power, worst_qos)};
}

// ---------------------------------------------------------------------------
// Criterion 5: the scale transform de-transforms consistently.
// ---------------------------------------------------------------------------
CriterionResult criterion_5() {
  const DeskSuite& suite = desk_suite();
  if (!suite.error.empty()) {
    return {false, "suite failed to solve: " + suite.error};
  }
  double worst_violation = 0.0;
  double worst_rel = 0.0;
  for (const DeskRun& run : suite.runs) {
    const ExpansionPoint pt =
        expansion_at(run.h, run.params, run.sol.w.w);
    const EeSubproblem sub = build_ee_subproblem(run.h, run.params, pt);
    const SolveOutcome out = solve(sub.program);
    if (out.status != SolveStatus::optimal) {
      return {false, fmt("seed %llu: subproblem at the converged point "
                         "returned %s",
                         static_cast<unsigned long long>(run.seed),
                         to_string(out.status))};
    }
    worst_violation =
        std::max(worst_violation, max_cone_violation(sub.program, out.x));
    const TransformedSolution ts = de_transform(sub, out.x);
    const double direct = ts.w.w.squaredNorm() + run.params.p_0_watts;
    const double via_phi = 1.0 / ts.phi;
    worst_rel = std::max(worst_rel, std::abs(via_phi - direct) / direct);
  }
  const bool pass = worst_violation <= 1e-6 && worst_rel <= 1e-6;
  return {pass,
          fmt("20 re-solves: max constraint violation %.3g (limit 1e-6), "
              "max |1/phi - (power + P0)| / (power + P0) = %.3g (limit 1e-6)",
              worst_violation, worst_rel)};
}

// ---------------------------------------------------------------------------
// Criterion 6: single-link designs match a dense power grid search.
// ---------------------------------------------------------------------------
CriterionResult criterion_6() {
  GeometryConfig g;
  g.beam_centers = hex_beam_centers(1, 433e3);
  SystemParams params;
  params.m_feeds = 1;
  params.n_beams = 1;
  params.users_per_beam = 1;

  double worst_rel = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ChannelMatrix h = generate_channel(g, make_uniform_layout(g, 1, seed),
                                       seed);
    h.set_grouping(1);
    const double gain = std::norm(h.entries(0, 0)) / params.sigma2;

    double best = 0.0;
    constexpr int kGrid = 10000;
    for (int i = 0; i <= kGrid; ++i) {
      const double p = params.p_t_watts * i / kGrid;
      const double ee =
          std::log2(1.0 + p * gain) / (p + params.p_0_watts);
      best = std::max(best, ee);
    }

    PrecoderSolution sol;
    try {
      sol = optimize(h, params);
    } catch (const std::exception& e) {
      return {false, fmt("seed %llu: %s",
                         static_cast<unsigned long long>(seed), e.what())};
    }
    worst_rel = std::max(
        worst_rel,
        std::abs(sol.report.energy_efficiency - best) / best);
  }
  return {worst_rel <= 0.01,
          fmt("max relative gap to a 10^4-point power grid = %.3g over 20 "
              "channels (limit 0.01)",
              worst_rel)};
}

// ---------------------------------------------------------------------------
// Criterion 7: floors above the single-link SINR cap raise InfeasibleProblem.
// ---------------------------------------------------------------------------
CriterionResult criterion_7() {
  GeometryConfig g;
  g.beam_centers = hex_beam_centers(1, 433e3);
  SystemParams params;
  params.m_feeds = 1;
  params.n_beams = 1;
  params.users_per_beam = 1;

  int raised = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ChannelMatrix h = generate_channel(g, make_uniform_layout(g, 1, seed),
                                       seed);
    h.set_grouping(1);
    // The best attainable SINR spends the whole budget on a matched filter.
    const double cap =
        h.entries.squaredNorm() * params.p_t_watts / params.sigma2;
    params.gamma_bar = Eigen::VectorXd::Constant(1, 1.2 * cap);
    try {
      (void)optimize(h, params);
      return {false, fmt("seed %llu: floor above the SINR cap was accepted",
                         static_cast<unsigned long long>(seed))};
    } catch (const InfeasibleProblem&) {
      ++raised;
    } catch (const std::exception& e) {
      return {false, fmt("seed %llu: wrong failure mode: %s",
                         static_cast<unsigned long long>(seed), e.what())};
    }
  }
  return {raised == 20,
          fmt("InfeasibleProblem raised on %d/20 over-capped channels",
              raised)};
}

// ---------------------------------------------------------------------------
// Criterion 8: mean-curve shapes over the eight-beam scenario.
// ---------------------------------------------------------------------------
const MeanRow* find_mean(const std::vector<MeanRow>& means, double p_dbw,
                         int q, const std::string& algorithm) {
  for (const auto& m : means) {
    if (m.p_t_dbw == p_dbw && m.q == q && m.algorithm == algorithm) return &m;
  }
  return nullptr;
}

CriterionResult criterion_8() {
  ExperimentConfig cfg = desk8_preset();
  cfg.seeds.clear();
  for (std::uint64_t s = 1; s <= 10; ++s) cfg.seeds.push_back(s);

  // --- (a) + (b): transmit-power sweep at Q = 2 --------------------------
  const std::vector<ResultRow> prows = run_power_sweep(cfg);
  for (const auto& r : prows) {
    if (r.status != "ok") {
      return {false, fmt("power sweep: seed %llu %s at %g dBW ended %s",
                         static_cast<unsigned long long>(r.seed),
                         r.algorithm.c_str(), r.p_t_dbw, r.status.c_str())};
    }
  }
  const std::vector<MeanRow> pmeans = mean_rows(prows);
  const auto& grid = cfg.sweep_p_t_dbw;

  double worst_drop = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const MeanRow* lo = find_mean(pmeans, grid[i - 1], 2, "EE-SCA");
    const MeanRow* hi = find_mean(pmeans, grid[i], 2, "EE-SCA");
    if (!lo || !hi) return {false, "power sweep: missing EE-SCA mean row"};
    worst_drop = std::max(worst_drop, lo->mean_ee - hi->mean_ee);
  }
  if (worst_drop > 1e-6) {
    return {false, fmt("iterative design mean efficiency drops by %.3g "
                       "along the power sweep (limit 1e-6)",
                       worst_drop)};
  }

  for (const char* algo : {"RZF", "MMSE"}) {
    std::vector<double> curve;
    for (double p : grid) {
      const MeanRow* m = find_mean(pmeans, p, 2, algo);
      if (!m) return {false, fmt("power sweep: missing %s mean row", algo)};
      curve.push_back(m->mean_ee);
    }
    const std::size_t peak = static_cast<std::size_t>(
        std::max_element(curve.begin(), curve.end()) - curve.begin());
    if (peak == 0 || peak + 1 == curve.size() ||
        !(curve.front() < curve[peak]) || !(curve.back() < curve[peak])) {
      return {false,
              fmt("%s mean efficiency is not rise-then-fall: peak at index "
                  "%zu of %zu (ends %.4g / %.4g, peak %.4g)",
                  algo, peak, curve.size(), curve.front(), curve.back(),
                  curve[peak])};
    }
  }

  // --- (c): group-size sweep at the 14 dBW budget ------------------------
  const std::vector<ResultRow> urows = run_user_sweep(cfg);
  for (const auto& r : urows) {
    if (r.status != "ok") {
      return {false, fmt("group sweep: seed %llu %s at Q=%d ended %s",
                         static_cast<unsigned long long>(r.seed),
                         r.algorithm.c_str(), r.q, r.status.c_str())};
    }
  }
  const std::vector<MeanRow> umeans = mean_rows(urows);
  const double p14 = watts_to_dbw(cfg.params.p_t_watts);
  double worst_rise = 0.0;
  std::string worst_algo;
  for (const auto& algo : cfg.algorithms) {
    for (std::size_t i = 1; i < cfg.sweep_users.size(); ++i) {
      const MeanRow* lo =
          find_mean(umeans, p14, cfg.sweep_users[i - 1], algo);
      const MeanRow* hi = find_mean(umeans, p14, cfg.sweep_users[i], algo);
      if (!lo || !hi) {
        return {false, fmt("group sweep: missing %s mean row", algo.c_str())};
      }
      if (hi->mean_ee - lo->mean_ee > worst_rise) {
        worst_rise = hi->mean_ee - lo->mean_ee;
        worst_algo = algo;
      }
    }
  }
  if (worst_rise > 1e-6) {
    return {false,
            fmt("%s mean efficiency rises by %.3g as the group grows "
                "(limit 1e-6)",
                worst_algo.c_str(), worst_rise)};
  }
  return {true,
          fmt("10-seed means: iterative design nondecreasing over %zu power "
              "levels, RZF/MMSE peak interior, all 4 algorithms non-increasing "
              "over group sizes 1-4",
              grid.size())};
}

// ---------------------------------------------------------------------------
// Criterion 9: the 16-beam preset carries the published link constants.
// ---------------------------------------------------------------------------
CriterionResult criterion_9() {
  const ExperimentConfig cfg = paper16_preset();
  const bool pass = cfg.geometry.beam_count() == 16 &&
                    cfg.geometry.satellite_altitude_m == 35786000.0 &&
                    cfg.geometry.carrier_frequency_hz == 20e9 &&
                    cfg.geometry.bandwidth_hz == 500e6 &&
                    cfg.geometry.rx_gain == db_to_linear(41.7) &&
                    cfg.geometry.boltzmann_j_per_k == 1.38e-23;
  return {pass,
          fmt("beams %d, altitude %.0f m, carrier %.3g Hz, bandwidth %.3g "
              "Hz, rx gain %.6f dBi, boltzmann %.3g J/K",
              cfg.geometry.beam_count(), cfg.geometry.satellite_altitude_m,
              cfg.geometry.carrier_frequency_hz, cfg.geometry.bandwidth_hz,
              linear_to_db(cfg.geometry.rx_gain),
              cfg.geometry.boltzmann_j_per_k)};
}

// ---------------------------------------------------------------------------
// Criterion 10: baselines spend the budget exactly; RZF matches a cofactor
// oracle on two-beam problems.
// ---------------------------------------------------------------------------
CriterionResult criterion_10() {
  // Exact power spend across sizes and kinds.
  double worst_power = 0.0;
  {
    std::mt19937_64 seed_rng(1010);
    for (int trial = 0; trial < 20; ++trial) {
      const int beams = 2 + trial % 6;
      const int q = 1 + trial % 3;
      GeometryConfig g;
      g.beam_centers =
          hex_beam_centers(beams, 1.7320508075688772 * g.coverage_radius_m);
      SystemParams params;
      params.m_feeds = beams;
      params.n_beams = beams;
      params.users_per_beam = q;
      params.p_t_watts = 25.1;
      const std::uint64_t seed = seed_rng();
      ChannelMatrix h =
          generate_channel(g, make_uniform_layout(g, q, seed), seed);
      h.set_grouping(q);
      for (Baseline kind :
           {Baseline::rzf, Baseline::mmse, Baseline::mbim}) {
        const PrecodingMatrix w = baseline_precoder(h, params, kind);
        worst_power = std::max(
            worst_power, std::abs(total_power(w) - params.p_t_watts));
      }
    }
  }
  if (worst_power > 1e-9) {
    return {false, fmt("baseline power misses the budget by %.3g W "
                       "(limit 1e-9)",
                       worst_power)};
  }

  // Cofactor-inverse oracle for the regularized inversion, two beams.
  std::mt19937_64 rng(2020);
  std::normal_distribution<double> gauss;
  double worst_rel = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXcd entries(2, 2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        entries(i, j) = complex<double>(gauss(rng), gauss(rng));
      }
    }
    ChannelMatrix h;
    h.entries = entries;
    h.virtual_mask.assign(2, false);
    h.set_grouping(1);
    SystemParams params;
    params.m_feeds = 2;
    params.n_beams = 2;
    params.users_per_beam = 1;
    params.p_t_watts = 25.1;

    const double reg = params.n_beams * params.sigma2 / params.p_t_watts;
    const Eigen::MatrixXcd a = entries * entries.adjoint() +
                               reg * Eigen::MatrixXcd::Identity(2, 2);
    const complex<double> det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    Eigen::MatrixXcd inv(2, 2);
    inv << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
    inv /= det;
    Eigen::MatrixXcd expected = entries.adjoint() * inv;
    expected *= std::sqrt(params.p_t_watts) / expected.norm();

    const PrecodingMatrix w =
        baseline_precoder(h, params, Baseline::rzf);
    worst_rel =
        std::max(worst_rel, (w.w - expected).norm() / expected.norm());
  }
  return {worst_rel <= 1e-10,
          fmt("budget exact to %.3g W over 20 channels x 3 baselines; "
              "max RZF gap to the cofactor oracle %.3g (limit 1e-10)",
              worst_power, worst_rel)};
}

using CriterionFn = CriterionResult (*)();

struct Criterion {
  int number;
  const char* name;
  CriterionFn fn;
};

const Criterion kCriteria[] = {
    {1, "rate-bound tightness", criterion_1},
    {2, "rate-bound dominance", criterion_2},
    {3, "monotone ascent and stopping rule", criterion_3},
    {4, "feasibility of converged designs", criterion_4},
    {5, "scale-transform consistency", criterion_5},
    {6, "single-link grid oracle", criterion_6},
    {7, "infeasibility detection", criterion_7},
    {8, "sweep shapes", criterion_8},
    {9, "sixteen-beam preset constants", criterion_9},
    {10, "baseline power and cofactor oracle", criterion_10},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    only.insert(std::atoi(argv[i]));
  }

  int failures = 0;
  for (const Criterion& c : kCriteria) {
    if (!only.empty() && !only.count(c.number)) continue;
    const double t0 = now_seconds();
    CriterionResult result;
    try {
      result = c.fn();
    } catch (const std::exception& e) {
      result = {false, fmt("unexpected exception: %s", e.what())};
    }
    const double dt = now_seconds() - t0;
    std::printf("%s criterion-%d (%s): %s [%.1f s]\n",
                result.pass ? "PASS" : "FAIL", c.number, c.name,
                result.detail.c_str(), dt);
    std::fflush(stdout);
    if (!result.pass) ++failures;
  }
  if (failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criteria failed\n", failures);
  }
  return failures;
}
