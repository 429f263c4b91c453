// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks
//
// Homogeneous self-dual interior-point method over the program
//     minimize c.x   s.t.   G x + s = h,   s in K,
// (the public maximize form is negated on entry). The embedding tracks
// (x, s, z, tau, kappa) with residuals
//     r_d = G'z + c tau,   r_p = G x + s - h tau,   r_g = c.x + h.z + kappa,
// and drives the complementarity mu = (s.z + tau kappa)/(nu+1) to zero along
// the central path z = -mu grad F(s), kappa = mu/tau, where F is the sum of
// the blocks' logarithmically homogeneous barriers (degree nu). Only primal
// barrier information is used, so nonsymmetric (exponential) cones need no
// conjugate-barrier machinery; proximity to the path is restored after every
// affine predictor by Newton centering steps, as in Skajaa-Ye style methods.
//
// Each direction solves one sparse unsymmetric KKT system
//     [ 0   G'            c      ] [dx  ]   [ -eta r_d          ]
//     [ G  -(1/mu)Hinv   -h      ] [dz  ] = [ -eta r_p + Hinv psi/mu ]
//     [ c'  h'           -mu/t^2 ] [dtau]   [ -eta r_g + psi_k  ]
// followed by  ds = Hinv(-psi - dz)/mu,  dkappa = -psi_k - (mu/tau^2) dtau,
// where H = hess F(s). Second-order blocks enter the matrix through a
// diagonal plus two rank-one aux rows (their Hinv is diagonal + rank two in
// closed form), so fill-in stays linear in the cone dimension.

#include "satee/cone_solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace satee {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "?";
}

namespace {

// Central point of the exponential cone: the unique s with grad F(s) = -s.
constexpr double kExpCentralX = -0.8278383990656786;
constexpr double kExpCentralY = 0.8051020015847954;
constexpr double kExpCentralZ = 1.2909277098569580;

double barrier_degree(const std::vector<ConeBlock>& blocks) {
  double nu = 0.0;
  for (const auto& b : blocks) {
    switch (b.cone) {
      case Cone::nonneg: nu += b.dim; break;
      case Cone::second_order: nu += 2.0; break;
      case Cone::rotated_second_order: nu += 2.0; break;
      case Cone::exponential: nu += 3.0; break;
    }
  }
  return nu;
}

void central_init(const std::vector<ConeBlock>& blocks, Eigen::VectorXd& s) {
  for (const auto& b : blocks) {
    auto seg = s.segment(b.offset, b.dim);
    switch (b.cone) {
      case Cone::nonneg:
        seg.setOnes();
        break;
      case Cone::second_order:
        seg.setZero();
        seg[0] = std::numbers::sqrt2;
        break;
      case Cone::rotated_second_order:
        seg.setZero();
        seg[0] = 1.0;
        seg[1] = 1.0;
        break;
      case Cone::exponential:
        seg[0] = kExpCentralX;
        seg[1] = kExpCentralY;
        seg[2] = kExpCentralZ;
        break;
    }
  }
}

bool cone_interior(const std::vector<ConeBlock>& blocks,
                   const Eigen::VectorXd& s) {
  for (const auto& b : blocks) {
    const auto seg = s.segment(b.offset, b.dim);
    switch (b.cone) {
      case Cone::nonneg:
        if (seg.minCoeff() <= 0.0) return false;
        break;
      case Cone::second_order: {
        if (seg[0] <= 0.0) return false;
        const double d = seg[0] * seg[0] - seg.tail(b.dim - 1).squaredNorm();
        if (d <= 0.0) return false;
        break;
      }
      case Cone::rotated_second_order: {
        if (seg[0] <= 0.0 || seg[1] <= 0.0) return false;
        const double d = seg[0] * seg[1] - seg.tail(b.dim - 2).squaredNorm();
        if (d <= 0.0) return false;
        break;
      }
      case Cone::exponential: {
        const double y = seg[1];
        const double zz = seg[2];
        if (y <= 0.0 || zz <= 0.0) return false;
        if (y * std::log(zz / y) - seg[0] <= 0.0) return false;
        break;
      }
    }
  }
  return true;
}

Eigen::Vector3d exp_gradient(double x, double y, double z) {
  const double lzy = std::log(z / y);
  const double omega = y * lzy - x;
  return Eigen::Vector3d(1.0 / omega, -(lzy - 1.0) / omega - 1.0 / y,
                         -(y / z) / omega - 1.0 / z);
}

Eigen::Matrix3d exp_hessian(double x, double y, double z) {
  const double lzy = std::log(z / y);
  const double omega = y * lzy - x;
  const Eigen::Vector3d u(-1.0, lzy - 1.0, y / z);
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  m(1, 1) = 1.0 / y;
  m(1, 2) = m(2, 1) = -1.0 / z;
  m(2, 2) = y / (z * z);
  Eigen::Matrix3d h = (u * u.transpose()) / (omega * omega) + m / omega;
  h(1, 1) += 1.0 / (y * y);
  h(2, 2) += 1.0 / (z * z);
  return h;
}

void barrier_gradient(const std::vector<ConeBlock>& blocks,
                      const Eigen::VectorXd& s, Eigen::VectorXd& g) {
  g.resize(s.size());
  for (const auto& b : blocks) {
    const auto seg = s.segment(b.offset, b.dim);
    auto out = g.segment(b.offset, b.dim);
    switch (b.cone) {
      case Cone::nonneg:
        out = -seg.cwiseInverse();
        break;
      case Cone::second_order: {
        const double d = seg[0] * seg[0] - seg.tail(b.dim - 1).squaredNorm();
        out[0] = -2.0 * seg[0] / d;
        out.tail(b.dim - 1) = 2.0 * seg.tail(b.dim - 1) / d;
        break;
      }
      case Cone::rotated_second_order: {
        const double d = seg[0] * seg[1] - seg.tail(b.dim - 2).squaredNorm();
        out[0] = -seg[1] / d;
        out[1] = -seg[0] / d;
        out.tail(b.dim - 2) = 2.0 * seg.tail(b.dim - 2) / d;
        break;
      }
      case Cone::exponential:
        out = exp_gradient(seg[0], seg[1], seg[2]);
        break;
    }
  }
}

/// out = hess F(s)^{-1} * v, blockwise in closed form (3x3 solve for exp).
void hess_inverse_apply(const std::vector<ConeBlock>& blocks,
                        const Eigen::VectorXd& s, const Eigen::VectorXd& v,
                        Eigen::VectorXd& out) {
  out.resize(v.size());
  for (const auto& b : blocks) {
    const auto sseg = s.segment(b.offset, b.dim);
    const auto vseg = v.segment(b.offset, b.dim);
    auto oseg = out.segment(b.offset, b.dim);
    switch (b.cone) {
      case Cone::nonneg:
        oseg.array() = sseg.array().square() * vseg.array();
        break;
      case Cone::second_order: {
        // Hinv = s s' + (d/2) I - d e1 e1'
        const double d = sseg[0] * sseg[0] - sseg.tail(b.dim - 1).squaredNorm();
        const double sv = sseg.dot(vseg);
        oseg = sv * sseg + 0.5 * d * vseg;
        oseg[0] -= d * vseg[0];
        break;
      }
      case Cone::rotated_second_order: {
        // Hinv = s s' - d f f' + diag(d, d, (d/2) I), f = e_a + e_b
        const double d = sseg[0] * sseg[1] - sseg.tail(b.dim - 2).squaredNorm();
        const double sv = sseg.dot(vseg);
        const double fv = vseg[0] + vseg[1];
        oseg = sv * sseg + 0.5 * d * vseg;
        oseg[0] += 0.5 * d * vseg[0] - d * fv;
        oseg[1] += 0.5 * d * vseg[1] - d * fv;
        break;
      }
      case Cone::exponential:
        oseg = exp_hessian(sseg[0], sseg[1], sseg[2])
                   .fullPivLu()
                   .solve(Eigen::Vector3d(vseg));
        break;
    }
  }
}

/// Distance of (z, kappa) from the central-path target at (s, tau, mu),
/// measured in the local Hinv metric and divided by mu. Values below 1 also
/// certify dual-cone interiority of z.
double proximity(const std::vector<ConeBlock>& blocks, const Eigen::VectorXd& s,
                 const Eigen::VectorXd& z, double tau, double kappa, double mu,
                 Eigen::VectorXd& grad_scratch, Eigen::VectorXd& psi_scratch,
                 Eigen::VectorXd& apply_scratch) {
  barrier_gradient(blocks, s, grad_scratch);
  psi_scratch = z + mu * grad_scratch;
  hess_inverse_apply(blocks, s, psi_scratch, apply_scratch);
  const double quad = std::max(0.0, psi_scratch.dot(apply_scratch));
  const double tk = tau * kappa - mu;
  return std::sqrt(quad + tk * tk) / mu;
}

struct KktAssembler {
  int n = 0;    // variables
  int p = 0;    // constraint rows
  int dim = 0;  // n + p + 1 + 2 * (# second-order-ish blocks)
  std::vector<int> aux_of_block;
  std::vector<Eigen::Triplet<double>> trips;

  void init(const std::vector<ConeBlock>& blocks, int n_, int p_) {
    n = n_;
    p = p_;
    aux_of_block.assign(blocks.size(), -1);
    int a = n + p + 1;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (blocks[i].cone == Cone::second_order ||
          blocks[i].cone == Cone::rotated_second_order) {
        aux_of_block[i] = a;
        a += 2;
      }
    }
    dim = a;
  }

  void assemble(Eigen::SparseMatrix<double>& kkt,
                const std::vector<ConeBlock>& blocks,
                const Eigen::SparseMatrix<double>& G,
                const Eigen::VectorXd& c, const Eigen::VectorXd& h,
                const Eigen::VectorXd& s, double mu, double tau) {
    trips.clear();
    for (int col = 0; col < G.outerSize(); ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(G, col); it; ++it) {
        trips.emplace_back(static_cast<int>(it.col()),
                           n + static_cast<int>(it.row()), it.value());
        trips.emplace_back(n + static_cast<int>(it.row()),
                           static_cast<int>(it.col()), it.value());
      }
    }
    for (int i = 0; i < n; ++i) {
      if (c[i] != 0.0) {
        trips.emplace_back(i, n + p, c[i]);
        trips.emplace_back(n + p, i, c[i]);
      }
    }
    for (int r = 0; r < p; ++r) {
      if (h[r] != 0.0) {
        trips.emplace_back(n + r, n + p, -h[r]);
        trips.emplace_back(n + p, n + r, h[r]);
      }
    }
    trips.emplace_back(n + p, n + p, -mu / (tau * tau));

    for (std::size_t ib = 0; ib < blocks.size(); ++ib) {
      const auto& b = blocks[ib];
      const int off = n + b.offset;
      const auto seg = s.segment(b.offset, b.dim);
      switch (b.cone) {
        case Cone::nonneg:
          for (int i = 0; i < b.dim; ++i) {
            trips.emplace_back(off + i, off + i, -seg[i] * seg[i] / mu);
          }
          break;
        case Cone::second_order: {
          const double d =
              seg[0] * seg[0] - seg.tail(b.dim - 1).squaredNorm();
          for (int i = 0; i < b.dim; ++i) {
            trips.emplace_back(off + i, off + i, -0.5 * d / mu);
          }
          const int a1 = aux_of_block[ib];
          const int a2 = a1 + 1;
          for (int i = 0; i < b.dim; ++i) {
            trips.emplace_back(off + i, a1, seg[i]);
            trips.emplace_back(a1, off + i, seg[i]);
          }
          trips.emplace_back(a1, a1, mu);
          trips.emplace_back(off, a2, 1.0);
          trips.emplace_back(a2, off, 1.0);
          trips.emplace_back(a2, a2, -mu / d);
          break;
        }
        case Cone::rotated_second_order: {
          const double d =
              seg[0] * seg[1] - seg.tail(b.dim - 2).squaredNorm();
          trips.emplace_back(off, off, -d / mu);
          trips.emplace_back(off + 1, off + 1, -d / mu);
          for (int i = 2; i < b.dim; ++i) {
            trips.emplace_back(off + i, off + i, -0.5 * d / mu);
          }
          const int a1 = aux_of_block[ib];
          const int a2 = a1 + 1;
          for (int i = 0; i < b.dim; ++i) {
            trips.emplace_back(off + i, a1, seg[i]);
            trips.emplace_back(a1, off + i, seg[i]);
          }
          trips.emplace_back(a1, a1, mu);
          trips.emplace_back(off, a2, 1.0);
          trips.emplace_back(a2, off, 1.0);
          trips.emplace_back(off + 1, a2, 1.0);
          trips.emplace_back(a2, off + 1, 1.0);
          trips.emplace_back(a2, a2, -mu / d);
          break;
        }
        case Cone::exponential: {
          const Eigen::Matrix3d hinv =
              exp_hessian(seg[0], seg[1], seg[2]).fullPivLu().inverse();
          for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
              trips.emplace_back(off + i, off + j, -hinv(i, j) / mu);
            }
          }
          break;
        }
      }
    }
    kkt.resize(dim, dim);
    kkt.setFromTriplets(trips.begin(), trips.end());
  }
};

struct Iterate {
  Eigen::VectorXd x, s, z;
  double tau = 1.0;
  double kappa = 1.0;
};

}  // namespace

SolveOutcome solve(const ConeProgram& program, const SolverSettings& cfg) {
  program.validate();
  if (program.blocks.empty()) {
    throw std::invalid_argument("solver: program needs at least one block");
  }

  const int n = program.num_vars;
  const int p = program.total_rows();
  const Eigen::VectorXd c = -program.objective;  // internal minimize form
  const Eigen::VectorXd& h = program.constants;
  const Eigen::SparseMatrix<double> G = -program.rows;
  const Eigen::SparseMatrix<double> Gt = G.transpose();
  const auto& blocks = program.blocks;

  const double nu_plus = barrier_degree(blocks) + 1.0;
  const double norm_h = h.norm();
  const double norm_c = c.norm();

  Iterate cur;
  cur.x = Eigen::VectorXd::Zero(n);
  cur.s.resize(p);
  central_init(blocks, cur.s);
  cur.z = cur.s;  // central points satisfy -grad F(s) = s

  KktAssembler kkt_shape;
  kkt_shape.init(blocks, n, p);
  Eigen::SparseMatrix<double> kkt;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;

  Eigen::VectorXd grad_s, psi_s, apply_s;  // scratch for proximity
  Eigen::VectorXd psi, hv, rhs, sol, resid, delta;
  Iterate trial;

  SolveOutcome best;
  double best_score = std::numeric_limits<double>::infinity();
  int consecutive_stalls = 0;

  const auto classify = [&](double tol, const Iterate& it,
                            int iters) -> SolveOutcome {
    // Late acceptance: best iterate first, then certificates at `tol`.
    if (best_score <= tol) {
      SolveOutcome out = best;
      out.status = SolveStatus::optimal;
      out.iterations = iters;
      return out;
    }
    SolveOutcome out;
    out.iterations = iters;
    const double hz = h.dot(it.z);
    if (hz < 0.0) {
      const double q = (Gt * it.z).norm() / (-hz);
      if (q <= tol * (1.0 + norm_c)) {
        out.status = SolveStatus::infeasible;
        out.primal_residual = out.dual_residual = out.gap = q;
        return out;
      }
    }
    const double cx = c.dot(it.x);
    if (cx < 0.0) {
      const double q = (G * it.x + it.s).norm() / (-cx);
      if (q <= tol * (1.0 + norm_h)) {
        out.status = SolveStatus::unbounded;
        out.primal_residual = out.dual_residual = out.gap = q;
        return out;
      }
    }
    out.status = SolveStatus::numerical_failure;
    out.primal_residual = best.primal_residual;
    out.dual_residual = best.dual_residual;
    out.gap = best.gap;
    return out;
  };

  int iter = 0;
  for (;; ++iter) {
    // --- convergence and certificate checks on the scaled point ------------
    const Eigen::VectorXd xs = cur.x / cur.tau;
    const Eigen::VectorXd zs = cur.z / cur.tau;
    const Eigen::VectorXd ss = cur.s / cur.tau;
    const double pres = (G * xs + ss - h).norm() / (1.0 + norm_h);
    const double dres = (Gt * zs + c).norm() / (1.0 + norm_c);
    const double pcost = c.dot(xs);
    const double dcost = -h.dot(zs);
    const double rgap = std::abs(pcost - dcost) /
                        (1.0 + std::max(std::abs(pcost), std::abs(dcost)));
    const double score = std::max({pres, dres, rgap});
    if (score < best_score) {
      best_score = score;
      best.x = xs;
      best.objective = -pcost;  // back to the user's maximize sign
      best.primal_residual = pres;
      best.dual_residual = dres;
      best.gap = rgap;
      best.iterations = iter;
    }
    if (cfg.verbose) {
      std::printf("it %3d  pres %9.2e  dres %9.2e  gap %9.2e  tau %8.2e\n",
                  iter, pres, dres, rgap, cur.tau);
    }
    if (pres <= cfg.feasibility_tol && dres <= cfg.feasibility_tol &&
        rgap <= cfg.gap_tol) {
      SolveOutcome out = best;
      out.status = SolveStatus::optimal;
      out.iterations = iter;
      return out;
    }
    {
      const double hz = h.dot(cur.z);
      if (hz < 0.0) {
        const double q = (Gt * cur.z).norm() / (-hz);
        if (q <= cfg.feasibility_tol * (1.0 + norm_c)) {
          SolveOutcome out;
          out.status = SolveStatus::infeasible;
          out.iterations = iter;
          out.primal_residual = out.dual_residual = out.gap = q;
          return out;
        }
      }
      const double cx = c.dot(cur.x);
      if (cx < 0.0) {
        const double q = (G * cur.x + cur.s).norm() / (-cx);
        if (q <= cfg.feasibility_tol * (1.0 + norm_h)) {
          SolveOutcome out;
          out.status = SolveStatus::unbounded;
          out.iterations = iter;
          out.primal_residual = out.dual_residual = out.gap = q;
          return out;
        }
      }
    }
    if (iter >= cfg.max_iterations || consecutive_stalls >= 3) {
      return classify(cfg.acceptable_tol, cur, iter);
    }

    double mu = (cur.s.dot(cur.z) + cur.tau * cur.kappa) / nu_plus;
    if (mu < 1e-18) {
      return classify(cfg.acceptable_tol, cur, iter);
    }

    // --- predictor ---------------------------------------------------------
    const auto solve_direction = [&](double eta_resid,
                                     const Eigen::VectorXd& psi_in,
                                     double psi_k, Iterate& dir) -> bool {
      kkt_shape.assemble(kkt, blocks, G, c, h, cur.s, mu, cur.tau);
      lu.compute(kkt);
      if (lu.info() != Eigen::Success) return false;
      rhs.setZero(kkt_shape.dim);
      if (eta_resid != 0.0) {
        rhs.head(n) = -eta_resid * (Gt * cur.z + c * cur.tau);
        rhs.segment(n, p) = -eta_resid * (G * cur.x + cur.s - h * cur.tau);
        rhs[n + p] =
            -eta_resid * (c.dot(cur.x) + h.dot(cur.z) + cur.kappa) + psi_k;
      } else {
        rhs[n + p] = psi_k;
      }
      hess_inverse_apply(blocks, cur.s, psi_in, hv);
      rhs.segment(n, p) += hv / mu;
      sol = lu.solve(rhs);
      if (!sol.allFinite()) return false;
      // The KKT blocks carry Hinv/mu, so conditioning degrades as mu -> 0 and
      // the LU solution loses digits; iterative refinement with the factored
      // matrix recovers them at the cost of two triangular solves per round.
      for (int round = 0; round < 2; ++round) {
        resid = rhs - kkt * sol;
        if (resid.norm() <= 1e-14 * (1.0 + rhs.norm())) break;
        delta = lu.solve(resid);
        if (!delta.allFinite()) break;
        sol += delta;
      }
      dir.x = sol.head(n);
      dir.z = sol.segment(n, p);
      dir.tau = sol[n + p];
      hess_inverse_apply(blocks, cur.s, (-psi_in - dir.z).eval(), hv);
      dir.s = hv / mu;
      dir.kappa = -psi_k - (mu / (cur.tau * cur.tau)) * dir.tau;
      return true;
    };

    const auto try_step = [&](const Iterate& dir, double alpha,
                              double proximity_cap, bool require_decrease,
                              double current_prox) -> bool {
      trial.s = cur.s + alpha * dir.s;
      if (!cone_interior(blocks, trial.s)) return false;
      trial.tau = cur.tau + alpha * dir.tau;
      trial.kappa = cur.kappa + alpha * dir.kappa;
      if (trial.tau <= 0.0 || trial.kappa <= 0.0) return false;
      trial.z = cur.z + alpha * dir.z;
      const double mu_t =
          (trial.s.dot(trial.z) + trial.tau * trial.kappa) / nu_plus;
      if (mu_t <= 0.0) return false;
      const double prox = proximity(blocks, trial.s, trial.z, trial.tau,
                                    trial.kappa, mu_t, grad_s, psi_s, apply_s);
      if (require_decrease ? prox >= current_prox : prox > proximity_cap) {
        return false;
      }
      trial.x = cur.x + alpha * dir.x;
      return true;
    };

    Iterate dir;
    bool stepped = false;
    if (solve_direction(1.0, cur.z, cur.kappa, dir)) {
      for (double alpha = 1.0; alpha >= cfg.min_step; alpha *= 0.8) {
        if (try_step(dir, alpha, cfg.neighborhood_out, false, 0.0)) {
          cur = trial;
          stepped = true;
          if (alpha < 1e-5) {
            ++consecutive_stalls;
          } else {
            consecutive_stalls = 0;
          }
          break;
        }
      }
    }
    if (!stepped) ++consecutive_stalls;

    // --- correctors: re-center until inside the tight neighborhood ---------
    for (int corr = 0; corr < cfg.max_correctors; ++corr) {
      mu = (cur.s.dot(cur.z) + cur.tau * cur.kappa) / nu_plus;
      const double prox = proximity(blocks, cur.s, cur.z, cur.tau, cur.kappa,
                                    mu, grad_s, psi_s, apply_s);
      if (prox <= cfg.neighborhood_in) break;
      barrier_gradient(blocks, cur.s, grad_s);
      psi = cur.z + mu * grad_s;
      const double psi_k = cur.kappa - mu / cur.tau;
      if (!solve_direction(0.0, psi, psi_k, dir)) break;
      bool moved = false;
      for (double alpha = 1.0; alpha >= cfg.min_step; alpha *= 0.8) {
        if (try_step(dir, alpha, 0.0, true, prox)) {
          cur = trial;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
  }
}

}  // namespace satee
