// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks

#include "satee/types.hpp"

#include <stdexcept>
#include <string>

namespace satee {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void GeometryConfig::validate() const {
  require(satellite_altitude_m > 0.0, "geometry: altitude must be positive");
  require(carrier_frequency_hz > 0.0, "geometry: carrier must be positive");
  require(bandwidth_hz > 0.0, "geometry: bandwidth must be positive");
  require(rx_gain > 0.0, "geometry: rx gain must be positive");
  require(noise_temperature_k > 0.0,
          "geometry: noise temperature must be positive");
  require(boltzmann_j_per_k > 0.0, "geometry: boltzmann must be positive");
  require(!beam_centers.empty(), "geometry: at least one beam center");
  require(coverage_radius_m > 0.0, "geometry: coverage radius must be positive");
  require(beam_halfwidth_rad >= 0.0, "geometry: negative beam half-width");
  require(peak_feed_gain >= 0.0, "geometry: negative peak feed gain");
  for (const auto& p : beam_centers) {
    require(p.lat_deg >= -90.0 && p.lat_deg <= 90.0,
            "geometry: beam center latitude out of range");
  }
  for (const auto& p : feed_centers) {
    require(p.lat_deg >= -90.0 && p.lat_deg <= 90.0,
            "geometry: feed aim latitude out of range");
  }
}

void UserLayout::validate() const {
  require(users_per_beam > 0, "layout: users_per_beam must be positive");
  require(!positions.empty(), "layout: no users");
  require(positions.size() == virtual_mask.size(),
          "layout: mask size does not match positions");
  require(static_cast<int>(positions.size()) % users_per_beam == 0,
          "layout: users_per_beam must divide the user count");
}

void SystemParams::validate() const {
  require(m_feeds > 0, "params: m_feeds must be positive");
  require(n_beams > 0, "params: n_beams must be positive");
  require(users_per_beam > 0, "params: users_per_beam must be positive");
  require(p_t_watts > 0.0, "params: transmit power budget must be positive");
  require(p_0_watts >= 0.0, "params: circuit power must be nonnegative");
  require(sigma2 > 0.0, "params: noise power must be positive");
  require(alpha.size() == 0 || alpha.size() == n_beams,
          "params: alpha must be empty or one weight per beam");
  require(gamma_bar.size() == 0 || gamma_bar.size() == n_beams,
          "params: gamma_bar must be empty or one floor per beam");
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    require(alpha[i] >= 0.0, "params: negative beam weight");
  }
  for (Eigen::Index i = 0; i < gamma_bar.size(); ++i) {
    require(gamma_bar[i] >= 0.0, "params: negative SINR floor");
  }
  require(xi > 0.0, "params: xi must be positive");
  require(penalty_lambda > 0.0, "params: slack penalty must be positive");
  require(max_sca_iters > 0, "params: max_sca_iters must be positive");
  require(max_feas_iters > 0, "params: max_feas_iters must be positive");
  require(slack_tolerance > 0.0, "params: slack tolerance must be positive");
}

}  // namespace satee
