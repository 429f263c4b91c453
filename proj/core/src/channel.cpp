// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks

#include "satee/channel.hpp"

#include <charconv>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "satee/errors.hpp"

namespace satee {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kHalfPowerArg = 2.07123;  // taper argument at the -3 dB point

// Counter-free splitmix step; used to key independent substreams per slot so
// that adding slots (larger Q) or more seeds never shifts existing draws.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

/// Deterministic stream of doubles for one (seed, beam, slot, purpose) key.
class SlotRng {
 public:
  SlotRng(std::uint64_t seed, int beam, int slot, std::uint64_t purpose) {
    state_ = mix64(seed ^ 0xA0761D6478BD642FULL);
    state_ = mix64(state_ ^ (static_cast<std::uint64_t>(beam) + 1));
    state_ = mix64(state_ ^ (static_cast<std::uint64_t>(slot) + 1));
    state_ = mix64(state_ ^ purpose);
  }

  std::uint64_t next_u64() {
    state_ = mix64(state_);
    return state_;
  }

  /// Uniform draw in the open interval (0,1); bit-identical across platforms.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

constexpr std::uint64_t kPurposePosition = 0x706F736974696F6EULL;  // "position"
constexpr std::uint64_t kPurposePhase = 0x7068617365000000ULL;     // "phase"

GroundPosition offset_on_sphere(const GroundPosition& center, double east_m,
                                double north_m) {
  GroundPosition p;
  p.lat_deg = center.lat_deg + (north_m / kEarthRadiusM) * kRadToDeg;
  const double cos_lat = std::cos(center.lat_deg * kDegToRad);
  p.lon_deg = center.lon_deg + (east_m / (kEarthRadiusM * cos_lat)) * kRadToDeg;
  return p;
}

void fnv_accumulate(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 0x00000100000001B3ULL;
  }
}

void fnv_double(std::uint64_t& h, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  fnv_accumulate(h, &bits, sizeof(bits));
}

}  // namespace

void ChannelMatrix::set_grouping(int q) {
  if (q <= 0 || rows() % q != 0) {
    throw std::invalid_argument(
        "channel grouping: users_per_beam must divide the row count");
  }
  users_per_beam = q;
}

Eigen::Vector3d ecef(const GroundPosition& p) {
  const double lat = p.lat_deg * kDegToRad;
  const double lon = p.lon_deg * kDegToRad;
  return kEarthRadiusM * Eigen::Vector3d(std::cos(lat) * std::cos(lon),
                                         std::cos(lat) * std::sin(lon),
                                         std::sin(lat));
}

Eigen::Vector3d satellite_ecef(const GeometryConfig& g) {
  return Eigen::Vector3d(kEarthRadiusM + g.satellite_altitude_m, 0.0, 0.0);
}

double slant_range_m(const GeometryConfig& g, const GroundPosition& user) {
  return (ecef(user) - satellite_ecef(g)).norm();
}

double off_axis_angle_rad(const GeometryConfig& g, const GroundPosition& user,
                          int feed) {
  const Eigen::Vector3d sat = satellite_ecef(g);
  const Eigen::Vector3d to_user = ecef(user) - sat;
  const Eigen::Vector3d boresight = ecef(g.feed_aim(feed)) - sat;
  return std::atan2(to_user.cross(boresight).norm(), to_user.dot(boresight));
}

double bessel_taper(double u) {
  // Small-argument series of J1(u)/(2u) + 36*J3(u)/u^3 = 1 - 5u^2/64 + O(u^4);
  // avoids 0/0 at boresight and keeps the on-axis value exactly 1.
  if (std::abs(u) < 1e-5) {
    const double t = 1.0 - 5.0 * u * u / 64.0;
    return t * t;
  }
  const double j1 = std::cyl_bessel_j(1, std::abs(u));
  const double j3 = std::cyl_bessel_j(3, std::abs(u));
  const double a = std::abs(u);
  const double t = j1 / (2.0 * a) + 36.0 * j3 / (a * a * a);
  return t * t;
}

double beam_gain(const GeometryConfig& g, const GroundPosition& user,
                 int feed) {
  const double theta = off_axis_angle_rad(g, user, feed);
  const double u =
      kHalfPowerArg * std::sin(theta) / std::sin(g.halfwidth_rad());
  return g.peak_gain() * bessel_taper(u);
}

double link_coefficient(const GeometryConfig& g, const GroundPosition& user,
                        int feed) {
  const double d = slant_range_m(g, user);
  if (d < 1.0) {
    throw std::invalid_argument("link_coefficient: user coincides with the "
                                "satellite position");
  }
  const double gain = g.rx_gain * beam_gain(g, user, feed);
  const double noise = std::sqrt(g.boltzmann_j_per_k * g.noise_temperature_k *
                                 g.bandwidth_hz);
  return std::sqrt(gain) /
         (4.0 * std::numbers::pi * (d / g.wavelength_m()) * noise);
}

std::vector<GroundPosition> hex_beam_centers(int count, double spacing_m) {
  if (count <= 0) throw std::invalid_argument("hex_beam_centers: count <= 0");
  if (spacing_m <= 0.0) {
    throw std::invalid_argument("hex_beam_centers: spacing <= 0");
  }
  // Axial-coordinate ring walk; neighbors end up exactly spacing_m apart.
  static constexpr int dq[6] = {1, 1, 0, -1, -1, 0};
  static constexpr int dr[6] = {0, -1, -1, 0, 1, 1};
  std::vector<std::pair<int, int>> cells;
  cells.emplace_back(0, 0);
  for (int ring = 1; static_cast<int>(cells.size()) < count; ++ring) {
    int q = -ring;
    int r = ring;
    for (int side = 0; side < 6; ++side) {
      for (int step = 0; step < ring; ++step) {
        cells.emplace_back(q, r);
        q += dq[side];
        r += dr[side];
      }
    }
  }
  cells.resize(static_cast<std::size_t>(count));

  std::vector<GroundPosition> centers;
  centers.reserve(cells.size());
  const GroundPosition origin;
  for (const auto& [q, r] : cells) {
    const double east = spacing_m * (q + 0.5 * r);
    const double north = spacing_m * (std::numbers::sqrt3 / 2.0) * r;
    centers.push_back(offset_on_sphere(origin, east, north));
  }
  return centers;
}

UserLayout make_uniform_layout(const GeometryConfig& g, int users_per_beam,
                               std::uint64_t seed) {
  g.validate();
  if (users_per_beam <= 0) {
    throw std::invalid_argument("make_uniform_layout: users_per_beam <= 0");
  }
  UserLayout layout;
  layout.users_per_beam = users_per_beam;
  const int beams = g.beam_count();
  layout.positions.reserve(static_cast<std::size_t>(beams * users_per_beam));
  for (int n = 0; n < beams; ++n) {
    for (int q = 0; q < users_per_beam; ++q) {
      SlotRng rng(seed, n, q, kPurposePosition);
      const double radius = g.coverage_radius_m * std::sqrt(rng.next_unit());
      const double angle = 2.0 * std::numbers::pi * rng.next_unit();
      layout.positions.push_back(offset_on_sphere(g.beam_centers[n],
                                                  radius * std::cos(angle),
                                                  radius * std::sin(angle)));
    }
  }
  layout.virtual_mask.assign(layout.positions.size(), 0);
  layout.validate();
  return layout;
}

Eigen::VectorXcd generate_phase_diagonal(const UserLayout& layout,
                                         std::uint64_t seed) {
  layout.validate();
  Eigen::VectorXcd diag(layout.total_users());
  for (int n = 0; n < layout.beams(); ++n) {
    for (int q = 0; q < layout.users_per_beam; ++q) {
      SlotRng rng(seed, n, q, kPurposePhase);
      const double phase = 2.0 * std::numbers::pi * rng.next_unit();
      diag[n * layout.users_per_beam + q] =
          std::complex<double>(std::cos(phase), std::sin(phase));
    }
  }
  return diag;
}

ChannelMatrix generate_channel(const GeometryConfig& g,
                               const UserLayout& layout, std::uint64_t seed) {
  g.validate();
  layout.validate();
  if (layout.beams() != g.beam_count()) {
    throw std::invalid_argument(
        "generate_channel: layout beams do not match geometry");
  }
  const int k_users = layout.total_users();
  const int m_feeds = g.feed_count();
  const Eigen::VectorXcd phases = generate_phase_diagonal(layout, seed);

  ChannelMatrix h;
  h.entries.resize(k_users, m_feeds);
  for (int k = 0; k < k_users; ++k) {
    for (int m = 0; m < m_feeds; ++m) {
      h.entries(k, m) = phases[k] * link_coefficient(g, layout.positions[k], m);
    }
  }
  h.virtual_mask = layout.virtual_mask;
  h.users_per_beam = layout.users_per_beam;
  h.seed = seed;
  h.geometry_tag = geometry_hash(g);
  return h;
}

std::uint64_t geometry_hash(const GeometryConfig& g) {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a offset basis
  fnv_double(h, g.satellite_altitude_m);
  fnv_double(h, g.carrier_frequency_hz);
  fnv_double(h, g.bandwidth_hz);
  fnv_double(h, g.rx_gain);
  fnv_double(h, g.noise_temperature_k);
  fnv_double(h, g.boltzmann_j_per_k);
  fnv_double(h, g.coverage_radius_m);
  fnv_double(h, g.beam_halfwidth_rad);
  fnv_double(h, g.peak_feed_gain);
  const auto hash_points = [&h](const std::vector<GroundPosition>& pts) {
    const std::uint64_t n = pts.size();
    fnv_accumulate(h, &n, sizeof(n));
    for (const auto& p : pts) {
      fnv_double(h, p.lat_deg);
      fnv_double(h, p.lon_deg);
    }
  };
  hash_points(g.beam_centers);
  hash_points(g.feed_centers);
  return h;
}

void save_channel(const ChannelMatrix& h, std::ostream& out) {
  out << h.rows() << ' ' << h.feeds() << '\n';
  out << std::setprecision(17);
  for (int k = 0; k < h.rows(); ++k) {
    for (int m = 0; m < h.feeds(); ++m) {
      if (m > 0) out << ' ';
      out << h.entries(k, m).real() << ' ' << h.entries(k, m).imag();
    }
    out << '\n';
  }
  for (int k = 0; k < h.rows(); ++k) {
    if (k > 0) out << ' ';
    out << (h.row_is_virtual(k) ? 1 : 0);
  }
  out << '\n';
}

void save_channel(const ChannelMatrix& h, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_channel: cannot open " + path.string());
  }
  save_channel(h, out);
}

namespace {

/// Splits the remaining stream into whitespace-separated tokens on demand.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  bool next(std::string& tok) { return static_cast<bool>(in_ >> tok); }

  double next_double(const char* context) {
    std::string tok;
    if (!next(tok)) {
      throw ParseError(ParseErrorKind::row_count,
                       std::string("channel file ends early while reading ") +
                           context);
    }
    double value = 0.0;
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
      throw ParseError(ParseErrorKind::bad_token,
                       std::string("channel file: non-numeric token '") + tok +
                           "' in " + context);
    }
    return value;
  }

 private:
  std::istream& in_;
};

}  // namespace

ChannelMatrix load_channel(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) {
    throw ParseError(ParseErrorKind::bad_header, "channel file: empty input");
  }
  long long k_users = 0;
  long long m_feeds = 0;
  {
    std::istringstream hs(header);
    std::string extra;
    if (!(hs >> k_users >> m_feeds) || (hs >> extra) || k_users <= 0 ||
        m_feeds <= 0) {
      throw ParseError(ParseErrorKind::bad_header,
                       "channel file: header must be two positive integers "
                       "'K M', got '" + header + "'");
    }
  }

  ChannelMatrix h;
  h.entries.resize(k_users, m_feeds);
  TokenReader tokens(in);
  for (long long k = 0; k < k_users; ++k) {
    for (long long m = 0; m < m_feeds; ++m) {
      const std::string context =
          "row " + std::to_string(k) + ", feed " + std::to_string(m);
      const double re = tokens.next_double(context.c_str());
      const double im = tokens.next_double(context.c_str());
      h.entries(k, m) = std::complex<double>(re, im);
    }
  }
  h.virtual_mask.resize(static_cast<std::size_t>(k_users));
  for (long long k = 0; k < k_users; ++k) {
    const std::string context = "virtual flag " + std::to_string(k);
    const double flag = tokens.next_double(context.c_str());
    if (flag != 0.0 && flag != 1.0) {
      throw ParseError(ParseErrorKind::bad_token,
                       "channel file: virtual flags must be 0 or 1");
    }
    h.virtual_mask[static_cast<std::size_t>(k)] = flag == 1.0 ? 1 : 0;
  }
  std::string trailing;
  if (tokens.next(trailing)) {
    throw ParseError(ParseErrorKind::row_count,
                     "channel file: trailing data after the flag line");
  }
  return h;
}

ChannelMatrix load_channel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_channel: cannot open " + path.string());
  }
  return load_channel(in);
}

}  // namespace satee
