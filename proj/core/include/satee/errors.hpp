// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks

#pragma once

#include <stdexcept>
#include <string>

namespace satee {

/// Category of a text-format parse failure (channel files, experiment configs).
enum class ParseErrorKind {
  bad_header,   ///< first line is not a valid dimension header
  row_count,    ///< fewer rows/tokens than the header promised
  bad_token,    ///< a token that should be numeric is not
  bad_section,  ///< unknown or malformed config section
  bad_value,    ///< a config value failed validation
};

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ParseErrorKind kind() const noexcept { return kind_; }

 private:
  ParseErrorKind kind_;
};

/// The feasibility-restoration phase could not drive all slack penalties to
/// zero within its iteration budget: the QoS thresholds are incompatible with
/// the power budget for this channel.
class InfeasibleProblem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The conic solver gave up on a subproblem (numerical failure or a
/// certificate where none was expected).
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace satee
