// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks

#include "satee/cone_program.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace satee {

namespace {

int min_dim(Cone c) {
  switch (c) {
    case Cone::nonneg: return 1;
    case Cone::second_order: return 2;
    case Cone::rotated_second_order: return 3;
    case Cone::exponential: return 3;
  }
  return 1;
}

const char* cone_name(Cone c) {
  switch (c) {
    case Cone::nonneg: return "nonneg";
    case Cone::second_order: return "soc";
    case Cone::rotated_second_order: return "rsoc";
    case Cone::exponential: return "exp";
  }
  return "?";
}

}  // namespace

void ConeProgram::validate() const {
  if (num_vars <= 0) throw std::invalid_argument("program: no variables");
  if (rows.cols() != num_vars) {
    throw std::invalid_argument("program: matrix column count != num_vars");
  }
  if (constants.size() != rows.rows()) {
    throw std::invalid_argument("program: constants size != row count");
  }
  if (objective.size() != num_vars) {
    throw std::invalid_argument("program: objective size != num_vars");
  }
  int expected_offset = 0;
  for (const auto& b : blocks) {
    if (b.offset != expected_offset) {
      throw std::invalid_argument("program: blocks must tile rows in order");
    }
    if (b.dim < min_dim(b.cone)) {
      throw std::invalid_argument(std::string("program: block of cone ") +
                                  cone_name(b.cone) + " is too small");
    }
    if (b.cone == Cone::exponential && b.dim != 3) {
      throw std::invalid_argument("program: exponential blocks have dim 3");
    }
    expected_offset += b.dim;
  }
  if (expected_offset != rows.rows()) {
    throw std::invalid_argument("program: blocks do not cover all rows");
  }
}

ConeProgramBuilder::ConeProgramBuilder(int num_vars) : num_vars_(num_vars) {
  if (num_vars <= 0) throw std::invalid_argument("builder: num_vars <= 0");
  objective_ = Eigen::VectorXd::Zero(num_vars);
}

void ConeProgramBuilder::objective_coeff(int var, double value) {
  objective_[var] += value;
}

void ConeProgramBuilder::begin_block(Cone cone) {
  if (block_open_) throw std::logic_error("builder: block already open");
  block_open_ = true;
  current_ = ConeBlock{cone, next_row_, 0};
}

int ConeProgramBuilder::new_row(double constant) {
  if (!block_open_) throw std::logic_error("builder: no open block");
  constants_.push_back(constant);
  ++current_.dim;
  return next_row_++;
}

void ConeProgramBuilder::coeff(int var, double value) {
  if (!block_open_ || current_.dim == 0) {
    throw std::logic_error("builder: no current row");
  }
  if (var < 0 || var >= num_vars_) {
    throw std::out_of_range("builder: variable index out of range");
  }
  if (value != 0.0) {
    triplets_.emplace_back(next_row_ - 1, var, value);
  }
}

void ConeProgramBuilder::end_block() {
  if (!block_open_) throw std::logic_error("builder: no open block");
  block_open_ = false;
  blocks_.push_back(current_);
}

ConeProgram ConeProgramBuilder::build() {
  if (block_open_) throw std::logic_error("builder: unterminated block");
  ConeProgram p;
  p.num_vars = num_vars_;
  p.objective = std::move(objective_);
  p.rows.resize(next_row_, num_vars_);
  p.rows.setFromTriplets(triplets_.begin(), triplets_.end());
  p.rows.makeCompressed();
  p.constants =
      Eigen::Map<const Eigen::VectorXd>(constants_.data(), next_row_);
  p.blocks = std::move(blocks_);
  p.validate();
  triplets_.clear();
  constants_.clear();
  blocks_ = {};
  next_row_ = 0;
  return p;
}

double max_cone_violation(const ConeProgram& p, const Eigen::VectorXd& x) {
  const Eigen::VectorXd s = p.rows * x + p.constants;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& b : p.blocks) {
    const auto seg = s.segment(b.offset, b.dim);
    switch (b.cone) {
      case Cone::nonneg:
        worst = std::max(worst, -seg.minCoeff());
        break;
      case Cone::second_order:
        worst = std::max(worst, seg.tail(b.dim - 1).norm() - seg[0]);
        break;
      case Cone::rotated_second_order: {
        // Rotate (a, b, u) into the plain second-order cone via the isometry
        // ((a+b)/sqrt2, (a-b)/sqrt2, sqrt2*u) so the violation is linear.
        const double a = seg[0];
        const double bb = seg[1];
        const double t = (a + bb) / std::numbers::sqrt2;
        const double un = std::sqrt(0.5 * (a - bb) * (a - bb) +
                                    2.0 * seg.tail(b.dim - 2).squaredNorm());
        worst = std::max(worst, un - t);
        break;
      }
      case Cone::exponential: {
        const double xx = seg[0];
        const double y = seg[1];
        const double z = seg[2];
        double v;
        if (y > 0.0 && z > 0.0) {
          // Interior-style log-domain residual x - y*log(z/y).
          v = std::max(xx - y * std::log(z / y), std::max(-y, -z));
        } else if (y <= 0.0) {
          // Closure: y = 0 requires x <= 0 and z >= 0.
          v = std::max({-y, xx, -z});
        } else {
          v = -z;  // y > 0, z <= 0 cannot satisfy y*exp(x/y) <= z
        }
        worst = std::max(worst, v);
        break;
      }
    }
  }
  return worst;
}

void dump_program(const ConeProgram& p, std::ostream& out) {
  out << "vars " << p.num_vars << " rows " << p.total_rows() << " blocks "
      << p.blocks.size() << '\n';
  out << "objective";
  for (int i = 0; i < p.num_vars; ++i) {
    if (p.objective[i] != 0.0) out << ' ' << i << ':' << p.objective[i];
  }
  out << '\n';
  for (const auto& b : p.blocks) {
    out << "block " << cone_name(b.cone) << " offset " << b.offset << " dim "
        << b.dim << '\n';
  }
  for (int col = 0; col < p.rows.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(p.rows, col); it;
         ++it) {
      out << "a " << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
  for (int r = 0; r < p.total_rows(); ++r) {
    if (p.constants[r] != 0.0) out << "b " << r << ' ' << p.constants[r] << '\n';
  }
}

}  // namespace satee
