// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks

#include "satee/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "satee/channel.hpp"
#include "satee/errors.hpp"

namespace satee {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
double dbw_to_watts(double dbw) { return db_to_linear(dbw); }
double watts_to_dbw(double watts) { return linear_to_db(watts); }

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_double(std::string_view tok, const std::string& key) {
  double v = 0.0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(ParseErrorKind::bad_token,
                     "config: value of '" + key + "' is not a number: '" +
                         std::string(tok) + "'");
  }
  return v;
}

long long parse_int(std::string_view tok, const std::string& key) {
  long long v = 0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(ParseErrorKind::bad_token,
                     "config: value of '" + key + "' is not an integer: '" +
                         std::string(tok) + "'");
  }
  return v;
}

/// Raw key values before geometry resolution; every field already in linear
/// units.
struct RawConfig {
  double altitude_m = 35786000.0;
  double carrier_hz = 20e9;
  double bandwidth_hz = 500e6;
  double rx_gain = 0.0;  // set in constructor
  double noise_temp_k = 0.0;
  double boltzmann = 1.38e-23;
  int beams = 8;
  double coverage_radius_m = 250e3;
  double spacing_m = -1.0;     // sqrt(3) * radius when unset
  double halfwidth_rad = 0.0;  // derived when 0
  double peak_gain = 0.0;      // derived when 0

  int users_per_beam = 2;
  std::vector<std::pair<int, int>> virtual_slots;

  double p_t_watts;
  double p_0_watts = 10.0;
  double sigma2 = 1.0;
  std::vector<double> qos_linear;  // empty, one value, or one per beam
  std::vector<double> alpha;       // likewise
  double xi = 1e-3;
  double penalty = 100.0;
  int max_sca = 50;
  int max_feas = 30;
  double slack_tol = 1e-6;
  LogBase log_base = LogBase::two;

  std::vector<double> sweep_p_t_dbw = {0, 2, 4, 6, 8, 10, 12, 14};
  std::vector<int> sweep_users = {1, 2, 3, 4};

  std::vector<std::uint64_t> seeds = {1};
  std::vector<std::string> algorithms = {"ee-sca", "rzf", "mmse", "mbim"};
  std::string output_path = "results.csv";
  int workers = 1;

  RawConfig() {
    rx_gain = db_to_linear(41.7);
    noise_temp_k = std::pow(10.0, 2.402);  // 41.7 dBi terminal at G/T 17.68
    p_t_watts = dbw_to_watts(14.0);
  }
};

std::string canonical_algorithm(const std::string& raw) {
  const std::string a = lower(raw);
  if (a == "ee-sca" || a == "ee_sca" || a == "sca") return "EE-SCA";
  if (a == "rzf") return "RZF";
  if (a == "mmse") return "MMSE";
  if (a == "mbim" || a == "mbim-style") return "MBIM-style";
  throw ParseError(ParseErrorKind::bad_value,
                   "config: unknown algorithm '" + raw + "'");
}

ExperimentConfig build_config(const RawConfig& raw) {
  ExperimentConfig cfg;
  cfg.geometry.satellite_altitude_m = raw.altitude_m;
  cfg.geometry.carrier_frequency_hz = raw.carrier_hz;
  cfg.geometry.bandwidth_hz = raw.bandwidth_hz;
  cfg.geometry.rx_gain = raw.rx_gain;
  cfg.geometry.noise_temperature_k = raw.noise_temp_k;
  cfg.geometry.boltzmann_j_per_k = raw.boltzmann;
  cfg.geometry.coverage_radius_m = raw.coverage_radius_m;
  cfg.geometry.beam_halfwidth_rad = raw.halfwidth_rad;
  cfg.geometry.peak_feed_gain = raw.peak_gain;
  const double spacing =
      raw.spacing_m > 0.0 ? raw.spacing_m : kSqrt3 * raw.coverage_radius_m;
  cfg.geometry.beam_centers = hex_beam_centers(raw.beams, spacing);

  cfg.users_per_beam = raw.users_per_beam;
  cfg.virtual_slots = raw.virtual_slots;

  cfg.params.m_feeds = raw.beams;
  cfg.params.n_beams = raw.beams;
  cfg.params.users_per_beam = raw.users_per_beam;
  cfg.params.p_t_watts = raw.p_t_watts;
  cfg.params.p_0_watts = raw.p_0_watts;
  cfg.params.sigma2 = raw.sigma2;
  const auto expand = [&](const std::vector<double>& vals,
                          const char* what) -> Eigen::VectorXd {
    if (vals.empty()) return Eigen::VectorXd();
    if (vals.size() == 1) {
      return Eigen::VectorXd::Constant(raw.beams, vals[0]);
    }
    if (static_cast<int>(vals.size()) == raw.beams) {
      return Eigen::Map<const Eigen::VectorXd>(vals.data(),
                                               static_cast<long>(vals.size()));
    }
    throw ParseError(ParseErrorKind::bad_value,
                     std::string("config: ") + what +
                         " needs one value or one per beam");
  };
  cfg.params.gamma_bar = expand(raw.qos_linear, "qos");
  cfg.params.alpha = expand(raw.alpha, "alpha");
  cfg.params.xi = raw.xi;
  cfg.params.penalty_lambda = raw.penalty;
  cfg.params.max_sca_iters = raw.max_sca;
  cfg.params.max_feas_iters = raw.max_feas;
  cfg.params.slack_tolerance = raw.slack_tol;
  cfg.params.log_base = raw.log_base;

  cfg.sweep_p_t_dbw = raw.sweep_p_t_dbw;
  cfg.sweep_users = raw.sweep_users;
  cfg.seeds = raw.seeds;
  cfg.algorithms.clear();
  for (const auto& a : raw.algorithms) {
    const std::string canon = canonical_algorithm(a);
    if (std::find(cfg.algorithms.begin(), cfg.algorithms.end(), canon) ==
        cfg.algorithms.end()) {
      cfg.algorithms.push_back(canon);
    }
  }
  cfg.output_path = raw.output_path;
  cfg.workers = raw.workers;
  cfg.finalize();
  return cfg;
}

enum class Section { none, geometry, layout, params, sweep, run };

void apply_key(RawConfig& raw, Section section, const std::string& key,
               const std::string& value) {
  const auto bad_key = [&]() -> void {
    throw ParseError(ParseErrorKind::bad_value,
                     "config: unknown key '" + key + "'");
  };
  switch (section) {
    case Section::none:
      throw ParseError(ParseErrorKind::bad_section,
                       "config: key '" + key + "' before any [section]");
    case Section::geometry:
      if (key == "altitude_km") {
        raw.altitude_m = 1e3 * parse_double(value, key);
      } else if (key == "altitude_m") {
        raw.altitude_m = parse_double(value, key);
      } else if (key == "carrier_ghz") {
        raw.carrier_hz = 1e9 * parse_double(value, key);
      } else if (key == "carrier_hz") {
        raw.carrier_hz = parse_double(value, key);
      } else if (key == "bandwidth_mhz") {
        raw.bandwidth_hz = 1e6 * parse_double(value, key);
      } else if (key == "bandwidth_hz") {
        raw.bandwidth_hz = parse_double(value, key);
      } else if (key == "rx_gain_dbi") {
        raw.rx_gain = db_to_linear(parse_double(value, key));
      } else if (key == "rx_gain_linear") {
        raw.rx_gain = parse_double(value, key);
      } else if (key == "noise_temp_k") {
        raw.noise_temp_k = parse_double(value, key);
      } else if (key == "boltzmann") {
        raw.boltzmann = parse_double(value, key);
      } else if (key == "beams") {
        raw.beams = static_cast<int>(parse_int(value, key));
      } else if (key == "coverage_radius_km") {
        raw.coverage_radius_m = 1e3 * parse_double(value, key);
      } else if (key == "coverage_radius_m") {
        raw.coverage_radius_m = parse_double(value, key);
      } else if (key == "beam_spacing_km") {
        raw.spacing_m = 1e3 * parse_double(value, key);
      } else if (key == "beam_spacing_m") {
        raw.spacing_m = parse_double(value, key);
      } else if (key == "beam_halfwidth_deg") {
        raw.halfwidth_rad = parse_double(value, key) * std::numbers::pi / 180.0;
      } else if (key == "peak_feed_gain_dbi") {
        raw.peak_gain = db_to_linear(parse_double(value, key));
      } else {
        bad_key();
      }
      break;
    case Section::layout:
      if (key == "users_per_beam") {
        raw.users_per_beam = static_cast<int>(parse_int(value, key));
      } else if (key == "virtual") {
        raw.virtual_slots.clear();
        for (const auto& tok : split_ws(value)) {
          const auto colon = tok.find(':');
          if (colon == std::string::npos) {
            throw ParseError(ParseErrorKind::bad_token,
                             "config: virtual slots use beam:slot, got '" +
                                 tok + "'");
          }
          raw.virtual_slots.emplace_back(
              static_cast<int>(parse_int(tok.substr(0, colon), key)),
              static_cast<int>(parse_int(tok.substr(colon + 1), key)));
        }
      } else {
        bad_key();
      }
      break;
    case Section::params:
      if (key == "p_t_dbw") {
        raw.p_t_watts = dbw_to_watts(parse_double(value, key));
      } else if (key == "p_t_watts") {
        raw.p_t_watts = parse_double(value, key);
      } else if (key == "p_0_dbw") {
        raw.p_0_watts = dbw_to_watts(parse_double(value, key));
      } else if (key == "p_0_watts") {
        raw.p_0_watts = parse_double(value, key);
      } else if (key == "sigma2") {
        raw.sigma2 = parse_double(value, key);
      } else if (key == "qos_db") {
        raw.qos_linear.clear();
        for (const auto& tok : split_ws(value)) {
          raw.qos_linear.push_back(db_to_linear(parse_double(tok, key)));
        }
      } else if (key == "qos_linear") {
        raw.qos_linear.clear();
        for (const auto& tok : split_ws(value)) {
          raw.qos_linear.push_back(parse_double(tok, key));
        }
      } else if (key == "alpha") {
        raw.alpha.clear();
        if (lower(trim(value)) != "ones") {
          for (const auto& tok : split_ws(value)) {
            raw.alpha.push_back(parse_double(tok, key));
          }
        }
      } else if (key == "xi") {
        raw.xi = parse_double(value, key);
      } else if (key == "penalty") {
        raw.penalty = parse_double(value, key);
      } else if (key == "max_sca_iters") {
        raw.max_sca = static_cast<int>(parse_int(value, key));
      } else if (key == "max_feas_iters") {
        raw.max_feas = static_cast<int>(parse_int(value, key));
      } else if (key == "slack_tolerance") {
        raw.slack_tol = parse_double(value, key);
      } else if (key == "log_base") {
        const std::string v = lower(trim(value));
        if (v == "2") {
          raw.log_base = LogBase::two;
        } else if (v == "e") {
          raw.log_base = LogBase::natural;
        } else {
          throw ParseError(ParseErrorKind::bad_value,
                           "config: log_base must be 2 or e");
        }
      } else {
        bad_key();
      }
      break;
    case Section::sweep:
      if (key == "p_t_dbw") {
        raw.sweep_p_t_dbw.clear();
        for (const auto& tok : split_ws(value)) {
          raw.sweep_p_t_dbw.push_back(parse_double(tok, key));
        }
      } else if (key == "users") {
        raw.sweep_users.clear();
        for (const auto& tok : split_ws(value)) {
          raw.sweep_users.push_back(static_cast<int>(parse_int(tok, key)));
        }
      } else {
        bad_key();
      }
      break;
    case Section::run:
      if (key == "seeds") {
        raw.seeds.clear();
        for (const auto& tok : split_ws(value)) {
          const auto dots = tok.find("..");
          if (dots == std::string::npos) {
            raw.seeds.push_back(
                static_cast<std::uint64_t>(parse_int(tok, key)));
          } else {
            const long long lo = parse_int(tok.substr(0, dots), key);
            const long long hi = parse_int(tok.substr(dots + 2), key);
            if (hi < lo) {
              throw ParseError(ParseErrorKind::bad_value,
                               "config: empty seed range '" + tok + "'");
            }
            for (long long s = lo; s <= hi; ++s) {
              raw.seeds.push_back(static_cast<std::uint64_t>(s));
            }
          }
        }
      } else if (key == "algorithms") {
        raw.algorithms = split_ws(value);
      } else if (key == "output") {
        raw.output_path = value;
      } else if (key == "workers") {
        raw.workers = static_cast<int>(parse_int(value, key));
      } else {
        bad_key();
      }
      break;
  }
}

}  // namespace

void ExperimentConfig::finalize() {
  geometry.validate();
  params.m_feeds = geometry.feed_count();
  params.n_beams = geometry.beam_count();
  params.users_per_beam = users_per_beam;
  params.validate();
  if (seeds.empty()) {
    throw ParseError(ParseErrorKind::bad_value, "config: no seeds");
  }
  if (algorithms.empty()) {
    throw ParseError(ParseErrorKind::bad_value, "config: no algorithms");
  }
  if (workers < 1) {
    throw ParseError(ParseErrorKind::bad_value, "config: workers must be >= 1");
  }
  if (output_path.empty()) {
    throw ParseError(ParseErrorKind::bad_value, "config: empty output path");
  }
  for (const auto& [beam, slot] : virtual_slots) {
    if (beam < 0 || slot < 0) {
      throw ParseError(ParseErrorKind::bad_value,
                       "config: negative virtual slot index");
    }
  }
}

ExperimentConfig desk8_preset() { return build_config(RawConfig{}); }

ExperimentConfig paper16_preset() {
  RawConfig raw;
  raw.beams = 16;
  raw.seeds.clear();
  for (std::uint64_t s = 1; s <= 10; ++s) raw.seeds.push_back(s);
  return build_config(raw);
}

ExperimentConfig preset_by_name(std::string_view name) {
  const std::string n = lower(trim(name));
  if (n == "desk8") return desk8_preset();
  if (n == "paper16") return paper16_preset();
  throw ParseError(ParseErrorKind::bad_value,
                   "config: unknown preset '" + std::string(name) + "'");
}

ExperimentConfig parse_config_text(std::string_view text) {
  RawConfig raw;
  Section section = Section::none;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos
                                           : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string_view::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ParseError(ParseErrorKind::bad_section,
                         "config line " + std::to_string(line_no) +
                             ": unterminated section header");
      }
      const std::string name = lower(trim(line.substr(1, line.size() - 2)));
      if (name == "geometry") {
        section = Section::geometry;
      } else if (name == "layout") {
        section = Section::layout;
      } else if (name == "params") {
        section = Section::params;
      } else if (name == "sweep") {
        section = Section::sweep;
      } else if (name == "run") {
        section = Section::run;
      } else {
        throw ParseError(ParseErrorKind::bad_section,
                         "config line " + std::to_string(line_no) +
                             ": unknown section [" + name + "]");
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(ParseErrorKind::bad_token,
                       "config line " + std::to_string(line_no) +
                           ": expected key = value");
    }
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value{trim(line.substr(eq + 1))};
    apply_key(raw, section, key, value);
  }
  return build_config(raw);
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("config: cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace satee
