// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace satee {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kEarthRadiusM = 6371000.0;    // mean spherical radius

/// Logarithm base used when turning SINRs into rates.
enum class LogBase { two, natural };

/// Returns ln(base), the factor that converts natural log to the chosen base.
inline double log_base_scale(LogBase b) {
  return b == LogBase::two ? std::numbers::ln2 : 1.0;
}

/// Point on the spherical Earth model, degrees.
struct GroundPosition {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
};

/// Physical description of one downlink scenario: a geostationary-style
/// satellite at a fixed altitude above (lat 0, lon 0), an array of feeds whose
/// boresights point at ground reference points, and per-beam coverage disks
/// that users are drawn from.
struct GeometryConfig {
  double satellite_altitude_m = 35786000.0;
  double carrier_frequency_hz = 20e9;
  double bandwidth_hz = 500e6;
  double rx_gain = 14791.0;              // user terminal gain, linear (~41.7 dBi)
  double noise_temperature_k = 252.348;  // clear-sky system temperature
  double boltzmann_j_per_k = 1.38e-23;

  std::vector<GroundPosition> beam_centers;
  /// Feed boresight aim points; empty means one feed per beam, aimed at the
  /// beam centers (the usual single-feed-per-beam payload).
  std::vector<GroundPosition> feed_centers;

  double coverage_radius_m = 250000.0;  // user disk radius around each center
  /// Half-power half-width of the feed pattern, radians. 0 means "derive from
  /// the coverage radius": the angle the disk edge subtends at the satellite.
  double beam_halfwidth_rad = 0.0;
  /// Peak feed gain, linear. 0 means "derive from the half-width" via a
  /// 65%-efficiency circular aperture (G = 0.65 * (0.51*pi/theta_h)^2).
  double peak_feed_gain = 0.0;

  std::uint64_t rng_seed = 1;

  int feed_count() const {
    return static_cast<int>(feed_centers.empty() ? beam_centers.size()
                                                 : feed_centers.size());
  }
  int beam_count() const { return static_cast<int>(beam_centers.size()); }
  double wavelength_m() const { return kSpeedOfLight / carrier_frequency_hz; }
  const GroundPosition& feed_aim(int m) const {
    return feed_centers.empty() ? beam_centers[static_cast<std::size_t>(m)]
                                : feed_centers[static_cast<std::size_t>(m)];
  }
  double halfwidth_rad() const {
    return beam_halfwidth_rad > 0.0
               ? beam_halfwidth_rad
               : std::atan2(coverage_radius_m, satellite_altitude_m);
  }
  double peak_gain() const {
    if (peak_feed_gain > 0.0) return peak_feed_gain;
    const double th = halfwidth_rad();
    const double x = 0.51 * std::numbers::pi / th;
    return 0.65 * x * x;
  }

  /// Throws std::invalid_argument if any physical quantity is out of range.
  void validate() const;
};

/// Users grouped by beam: beam n serves slots (n,0..Q-1); row k of the channel
/// corresponds to beam k/Q, slot k%Q. A slot may be flagged virtual, i.e. the
/// position is a placeholder that must not influence the design.
struct UserLayout {
  std::vector<GroundPosition> positions;  // size K = N*Q, beam-major
  std::vector<std::uint8_t> virtual_mask;  // size K, 1 = virtual
  int users_per_beam = 0;                  // Q

  int total_users() const { return static_cast<int>(positions.size()); }
  int beams() const { return total_users() / users_per_beam; }
  bool is_virtual(int beam, int slot) const {
    return virtual_mask[static_cast<std::size_t>(beam * users_per_beam +
                                                 slot)] != 0;
  }
  /// Throws std::invalid_argument on size mismatches or Q not dividing K.
  void validate() const;
};

/// Optimization-side parameters: dimensions, power budget, QoS thresholds and
/// the iteration controls of the successive-approximation loop.
struct SystemParams {
  int m_feeds = 0;
  int n_beams = 0;
  int users_per_beam = 1;

  double p_t_watts = 25.1;  // transmit power budget
  double p_0_watts = 10.0;  // circuit power offset in the efficiency ratio
  double sigma2 = 1.0;      // receiver noise power (normalized channels)

  Eigen::VectorXd alpha;      // beam weights; empty = all ones
  Eigen::VectorXd gamma_bar;  // per-beam SINR floors, linear; empty = zeros

  double xi = 1e-3;             // stop when the weighted-rate gain drops below
  double penalty_lambda = 100;  // slack penalty in feasibility restoration
  int max_sca_iters = 50;
  int max_feas_iters = 30;
  double slack_tolerance = 1e-6;  // restoration succeeds when slacks fit this

  LogBase log_base = LogBase::two;

  double alpha_of(int n) const {
    return alpha.size() == 0 ? 1.0 : alpha[n];
  }
  double gamma_bar_of(int n) const {
    return gamma_bar.size() == 0 ? 0.0 : gamma_bar[n];
  }

  /// Throws std::invalid_argument on non-positive dimensions/powers or
  /// mis-sized weight vectors.
  void validate() const;
};

/// One precoding vector per beam, stacked as columns (M x N).
struct PrecodingMatrix {
  Eigen::MatrixXcd w;

  int feeds() const { return static_cast<int>(w.rows()); }
  int beams() const { return static_cast<int>(w.cols()); }
};

}  // namespace satee
