// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <initializer_list>
#include <iosfwd>
#include <utility>
#include <vector>

namespace satee {

/// Cone types a slack block can live in. Conventions for a block s:
///  - nonneg:               s_i >= 0 for every row (any dim >= 1)
///  - second_order:         s = (t, u), ||u|| <= t (dim >= 2)
///  - rotated_second_order: s = (a, b, u), a,b >= 0 and ||u||^2 <= a*b
///                          (dim >= 3, no factor of 2)
///  - exponential:          s = (x, y, z), y > 0 and y*exp(x/y) <= z, plus the
///                          closure y = 0, x <= 0, z >= 0 (dim exactly 3)
enum class Cone { nonneg, second_order, rotated_second_order, exponential };

struct ConeBlock {
  Cone cone;
  int offset = 0;  // first row of the block
  int dim = 0;
};

/// maximize objective . x  subject to  rows * x + constants  in  the cones.
struct ConeProgram {
  int num_vars = 0;
  Eigen::VectorXd objective;
  Eigen::SparseMatrix<double> rows;  // total_rows x num_vars
  Eigen::VectorXd constants;
  std::vector<ConeBlock> blocks;

  int total_rows() const { return static_cast<int>(rows.rows()); }
  /// Throws std::invalid_argument on overlapping/misordered blocks, dimension
  /// mismatches or illegal block sizes.
  void validate() const;
};

/// Incremental row-by-row construction. Usage:
///   ConeProgramBuilder b(nvars);
///   b.objective_coeff(v, 1.0);
///   b.begin_block(Cone::second_order);
///   b.new_row(c0); b.coeff(v0, 2.0); ...
///   b.end_block();
///   ConeProgram p = b.build();
class ConeProgramBuilder {
 public:
  explicit ConeProgramBuilder(int num_vars);

  void objective_coeff(int var, double value);

  void begin_block(Cone cone);
  /// Starts a row inside the open block; returns its global row index.
  int new_row(double constant = 0.0);
  /// Adds `value` to the current row's coefficient on `var`.
  void coeff(int var, double value);
  void end_block();

  int rows_so_far() const { return next_row_; }
  /// Finalizes and validates; the builder is left empty.
  ConeProgram build();

 private:
  int num_vars_;
  int next_row_ = 0;
  bool block_open_ = false;
  ConeBlock current_{};
  std::vector<ConeBlock> blocks_;
  std::vector<Eigen::Triplet<double>> triplets_;
  std::vector<double> constants_;
  Eigen::VectorXd objective_;
};

/// Worst constraint violation of x over all blocks, in "linear" units:
/// nonneg -s_i; second order ||u|| - t (rotated blocks are rotated first);
/// exponential blocks use the log-domain residual. Nonpositive means feasible.
double max_cone_violation(const ConeProgram& p, const Eigen::VectorXd& x);

/// Human-readable dump: sizes, objective, cone list and nonzero triplets.
void dump_program(const ConeProgram& p, std::ostream& out);

}  // namespace satee
