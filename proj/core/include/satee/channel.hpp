// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "satee/types.hpp"

namespace satee {

/// Complex downlink channel, one row per user slot (K = N*Q rows, beam-major),
/// one column per transmit feed. Row magnitudes carry the full link budget;
/// phases model independent user-terminal rotations.
struct ChannelMatrix {
  Eigen::MatrixXcd entries;                // K x M
  std::vector<std::uint8_t> virtual_mask;  // size K, 1 = placeholder slot
  int users_per_beam = 0;  // 0 until a grouping is assigned (e.g. bare loads)

  std::uint64_t seed = 0;           // generator seed, 0 for loaded files
  std::uint64_t geometry_tag = 0;   // hash of the generating geometry

  int rows() const { return static_cast<int>(entries.rows()); }
  int feeds() const { return static_cast<int>(entries.cols()); }
  bool row_is_virtual(int k) const {
    return virtual_mask[static_cast<std::size_t>(k)] != 0;
  }

  /// Assigns the beam grouping; throws std::invalid_argument unless
  /// users_per_beam divides the row count.
  void set_grouping(int users_per_beam);
  bool has_grouping() const { return users_per_beam > 0; }
  int beams() const { return rows() / users_per_beam; }
  int row_index(int beam, int slot) const {
    return beam * users_per_beam + slot;
  }
  bool is_virtual(int beam, int slot) const {
    return row_is_virtual(row_index(beam, slot));
  }
  /// Channel row of slot (beam, slot) as a row vector h with entries h_m.
  Eigen::RowVectorXcd row(int beam, int slot) const {
    return entries.row(row_index(beam, slot));
  }
};

// --- geometry primitives ---------------------------------------------------

/// Earth-centered coordinates of a ground point (spherical Earth), meters.
Eigen::Vector3d ecef(const GroundPosition& p);

/// Satellite position: directly above latitude 0, longitude 0.
Eigen::Vector3d satellite_ecef(const GeometryConfig& g);

/// Distance from the satellite to a ground point, meters.
double slant_range_m(const GeometryConfig& g, const GroundPosition& user);

/// Angle at the satellite between feed m's boresight and the user direction.
double off_axis_angle_rad(const GeometryConfig& g, const GroundPosition& user,
                          int feed);

// --- radiation pattern and link budget -------------------------------------

/// Tapered-aperture radiation taper (J1(u)/(2u) + 36*J3(u)/u^3)^2, normalized
/// so the on-axis value is exactly 1 and u = 2.07123 sits at half power.
double bessel_taper(double u);

/// Feed gain toward a user: peak gain times the taper evaluated at
/// u = 2.07123 * sin(theta) / sin(theta_halfwidth).
double beam_gain(const GeometryConfig& g, const GroundPosition& user, int feed);

/// Real-valued magnitude entry of the normalized channel between feed m and a
/// user: sqrt(G_rx * G_feed) / (4*pi * (d/lambda) * sqrt(kappa * T * B)).
/// Throws std::invalid_argument if the user coincides with the satellite.
double link_coefficient(const GeometryConfig& g, const GroundPosition& user,
                        int feed);

// --- layout and channel generation -----------------------------------------

/// Hexagonal-lattice aim points spiraling out from (lat 0, lon 0); adjacent
/// centers are `spacing_m` apart.
std::vector<GroundPosition> hex_beam_centers(int count, double spacing_m);

/// Draws Q users uniformly over each beam's coverage disk. Slot (n,q) has its
/// own random substream keyed by (seed, n, q), so the users of slot q are the
/// same no matter how many further slots a sweep adds; all slots start real.
UserLayout make_uniform_layout(const GeometryConfig& g, int users_per_beam,
                               std::uint64_t seed);

/// Unit-modulus diagonal of user-terminal phase rotations, one entry per row.
/// Entry (n,q) depends only on (seed, n, q), with the same nesting guarantee
/// as make_uniform_layout.
Eigen::VectorXcd generate_phase_diagonal(const UserLayout& layout,
                                         std::uint64_t seed);

/// Full channel: entry (k,m) = phase_k * link_coefficient(user_k, feed_m).
ChannelMatrix generate_channel(const GeometryConfig& g,
                               const UserLayout& layout, std::uint64_t seed);

/// Stable hash of the geometry fields, stored on generated channels so runs
/// can detect configuration mismatches.
std::uint64_t geometry_hash(const GeometryConfig& g);

// --- serialization ----------------------------------------------------------

/// Text format: a "K M" header line; K rows of 2M floats (re, im interleaved);
/// a final line of K 0/1 virtual flags. Round-trips entries and flags exactly
/// at stored precision. Grouping and generator metadata are not persisted.
void save_channel(const ChannelMatrix& h, std::ostream& out);
void save_channel(const ChannelMatrix& h, const std::filesystem::path& path);

/// Parses the save_channel format. Throws ParseError with kind bad_header,
/// row_count or bad_token; the loaded matrix has no grouping assigned.
ChannelMatrix load_channel(std::istream& in);
ChannelMatrix load_channel(const std::filesystem::path& path);

}  // namespace satee
