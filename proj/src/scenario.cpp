// SPDX-License-Identifier: Apache-2.0
//
// satbeam - fixed on-board beam generation for multibeam satellite payloads
// Copyright (C) 2026 The satbeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "satbeam/scenario.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

#ifndef SATBEAM_DATA_DIR
#define SATBEAM_DATA_DIR "data"
#endif

namespace satbeam {

namespace {

constexpr std::string_view kDataPrefix = "${data}/";

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Resolver {
 public:
  explicit Resolver(const std::map<std::string, std::string>& values) : values_(values) {}

  const std::string& raw(const std::string& key) const { return values_.at(key); }
  bool is_auto(const std::string& key) const { return raw(key) == "auto"; }

  double real(const std::string& key) const {
    const std::string& text = raw(key);
    double value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    require(ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(value), ErrorCode::parse_error,
            "scenario: key '" + key + "' expects a number, got '" + text + "'");
    return value;
  }

  long long integer(const std::string& key) const {
    const std::string& text = raw(key);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    require(ec == std::errc() && ptr == text.data() + text.size(), ErrorCode::parse_error,
            "scenario: key '" + key + "' expects an integer, got '" + text + "'");
    return value;
  }

  std::uint64_t unsigned64(const std::string& key) const {
    const std::string& text = raw(key);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    require(ec == std::errc() && ptr == text.data() + text.size(), ErrorCode::parse_error,
            "scenario: key '" + key + "' expects an unsigned 64-bit integer, got '" + text + "'");
    return value;
  }

  bool boolean(const std::string& key) const {
    const std::string& text = raw(key);
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw Error(ErrorCode::parse_error, "scenario: key '" + key + "' expects true/false, got '" + text + "'");
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split_list(raw(key))) {
      double value = 0;
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
      require(ec == std::errc() && ptr == item.data() + item.size() && std::isfinite(value), ErrorCode::parse_error,
              "scenario: key '" + key + "' has a non-numeric entry '" + item + "'");
      out.push_back(value);
    }
    return out;
  }

 private:
  const std::map<std::string, std::string>& values_;
};

void require_increasing(const std::vector<double>& v, bool allow_zero, const std::string& key) {
  require(!v.empty(), ErrorCode::invalid_argument, "scenario: '" + key + "' must not be empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    require(allow_zero ? v[i] >= 0 : v[i] > 0, ErrorCode::invalid_argument,
            "scenario: '" + key + "' values must be " + (allow_zero ? "nonnegative" : "positive"));
    if (i > 0)
      require(v[i] > v[i - 1], ErrorCode::invalid_argument, "scenario: '" + key + "' must be strictly increasing");
  }
}

std::filesystem::path resolve_path(const std::string& text, const std::filesystem::path& base_dir) {
  if (text.rfind(kDataPrefix, 0) == 0) return data_directory() / text.substr(kDataPrefix.size());
  std::filesystem::path p(text);
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  return p;
}

void apply_override(std::map<std::string, std::string>& values, const std::string& item) {
  const auto eq = item.find('=');
  require(eq != std::string::npos, ErrorCode::parse_error, "override '" + item + "' must have the form key=value");
  const std::string key = trim(item.substr(0, eq));
  const std::string value = trim(item.substr(eq + 1));
  if (key.find('.') != std::string::npos) {
    require(values.count(key) == 1, ErrorCode::parse_error, "unknown scenario key '" + key + "'");
    values[key] = value;
    return;
  }
  std::string match;
  for (const auto& [full, _] : values) {
    if (full.substr(full.find('.') + 1) == key) {
      require(match.empty(), ErrorCode::parse_error, "ambiguous scenario key '" + key + "', qualify it with a section");
      match = full;
    }
  }
  require(!match.empty(), ErrorCode::parse_error, "unknown scenario key '" + key + "'");
  values[match] = value;
}

Scenario build(std::map<std::string, std::string> values, const std::filesystem::path& base_dir) {
  Scenario s;
  const Resolver r(values);

  const auto n = r.integer("geometry.num_feeds");
  const auto k = r.integer("geometry.num_beams");
  require(k >= 1 && n > k, ErrorCode::invalid_argument, "scenario: geometry requires 1 <= num_beams < num_feeds");
  s.geometry = make_hex_geometry<double>(n, k, r.real("geometry.beam_radius"));
  if (!r.is_auto("geometry.feed_pattern_width")) s.geometry.feed_pattern_width = r.real("geometry.feed_pattern_width");
  if (!r.is_auto("geometry.reference_width")) s.geometry.reference_width = r.real("geometry.reference_width");
  s.geometry.altitude = r.real("geometry.altitude");
  s.geometry.coverage_offset = r.real("geometry.coverage_offset");
  s.geometry.validate();

  s.rf.carrier_freq = r.real("rf.carrier_freq");
  s.rf.bandwidth = r.real("rf.bandwidth");
  s.rf.rx_antenna_gain = r.real("rf.rx_antenna_gain");
  s.rf.rx_noise_temp = r.real("rf.rx_noise_temp");
  s.rf.boltzmann = r.real("rf.boltzmann");
  s.rf.fl_scale = r.real("rf.fl_scale");
  s.rf.path_phase = r.boolean("rf.path_phase");
  s.rf.validate();

  s.rain.mean_db = r.real("fading.mean_db");
  s.rain.std_db = r.real("fading.std_db");
  s.rain.rain_prob = r.real("fading.rain_prob");
  require(s.rain.std_db >= 0 && s.rain.rain_prob >= 0 && s.rain.rain_prob <= 1 && s.rain.mean_db > 0,
          ErrorCode::invalid_argument, "scenario: invalid fading parameters");

  const std::string& mode = r.raw("nominal.alpha_mode");
  if (mode == "max") {
    s.alpha_mode = AlphaMax{};
  } else if (mode == "quantile") {
    const double q = r.real("nominal.alpha_quantile");
    require(q > 0 && q <= 1, ErrorCode::invalid_argument, "scenario: alpha_quantile must lie in (0, 1]");
    s.alpha_mode = AlphaQuantile{q};
  } else {
    throw Error(ErrorCode::parse_error, "scenario: alpha_mode must be 'max' or 'quantile'");
  }
  const std::string& norm = r.raw("nominal.gain_normalization");
  require(norm == "scalar" || norm == "per_entry", ErrorCode::parse_error,
          "scenario: gain_normalization must be 'scalar' or 'per_entry'");
  s.gain_normalization = norm == "scalar" ? GainNormalization::scalar : GainNormalization::per_entry;

  s.seed = r.unsigned64("simulation.seed");
  const auto n_cal = r.integer("simulation.n_calibration");
  const auto n_eval = r.integer("simulation.n_eval");
  require(n_cal >= 1, ErrorCode::invalid_argument, "scenario: n_calibration must be >= 1");
  require(n_eval >= 1, ErrorCode::invalid_argument, "scenario: n_eval must be >= 1");
  s.n_calibration = static_cast<int>(n_cal);
  s.n_eval = static_cast<int>(n_eval);

  static const std::set<std::string> known_designs = {"reference", "adaptive", "robust", "perturbation_aware",
                                                      "onground"};
  s.designs = split_list(r.raw("simulation.designs"));
  require(!s.designs.empty(), ErrorCode::invalid_argument, "scenario: designs must not be empty");
  for (const auto& d : s.designs)
    require(known_designs.count(d) == 1, ErrorCode::parse_error, "scenario: unknown design '" + d + "'");

  const std::string& links = r.raw("simulation.direction");
  if (links == "both")
    s.links = LinkSelection::both;
  else if (links == "return")
    s.links = LinkSelection::return_only;
  else if (links == "forward")
    s.links = LinkSelection::forward_only;
  else
    throw Error(ErrorCode::parse_error, "scenario: direction must be return, forward or both");

  s.beta_values = r.reals("simulation.beta_values");
  require_increasing(s.beta_values, false, "beta_values");
  if (r.is_auto("simulation.p_fl_values")) {
    const double kk = double(k);
    s.p_fl_values = {kk / 4, kk / 2, kk, 2 * kk, 4 * kk};
  } else {
    s.p_fl_values = r.reals("simulation.p_fl_values");
  }
  require_increasing(s.p_fl_values, false, "p_fl_values");
  s.alpha_fractions = r.reals("simulation.alpha_fractions");
  require_increasing(s.alpha_fractions, true, "alpha_fractions");
  s.beta = r.real("simulation.beta");
  require(s.beta > 0, ErrorCode::invalid_argument, "scenario: beta must be positive");
  s.p_fl = r.is_auto("simulation.p_fl") ? double(k) : r.real("simulation.p_fl");
  require(s.p_fl > 0, ErrorCode::invalid_argument, "scenario: p_fl must be positive");
  const std::string& dz = r.raw("simulation.dz_mode");
  require(dz == "empirical" || dz == "isotropic", ErrorCode::parse_error,
          "scenario: dz_mode must be 'empirical' or 'isotropic'");
  s.dz_empirical = dz == "empirical";
  const auto threads = r.integer("simulation.threads");
  require(threads >= 0, ErrorCode::invalid_argument, "scenario: threads must be >= 0");
  s.threads = static_cast<int>(threads);

  s.return_modcod = resolve_path(r.raw("metrics.return_modcod"), base_dir);
  s.forward_modcod = resolve_path(r.raw("metrics.forward_modcod"), base_dir);
  const std::string& disp = r.raw("metrics.dispersion");
  require(disp == "variance_over_mean" || disp == "stddev_over_mean", ErrorCode::parse_error,
          "scenario: dispersion must be 'variance_over_mean' or 'stddev_over_mean'");
  s.dispersion = disp == "variance_over_mean" ? DispersionConvention::variance_over_mean
                                              : DispersionConvention::stddev_over_mean;

  s.resolved = std::move(values);
  return s;
}

std::map<std::string, std::string> default_values() {
  std::map<std::string, std::string> values;
  for (const auto& [key, value] : scenario_defaults()) values[key] = value;
  return values;
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& scenario_defaults() {
  static const std::vector<std::pair<std::string, std::string>> defaults = {
      {"geometry.num_feeds", "16"},
      {"geometry.num_beams", "8"},
      {"geometry.beam_radius", "0.0035"},
      {"geometry.feed_pattern_width", "auto"},
      {"geometry.reference_width", "auto"},
      {"geometry.altitude", "35786000"},
      {"geometry.coverage_offset", "0.05"},
      {"rf.carrier_freq", "30e9"},
      {"rf.bandwidth", "500e6"},
      {"rf.rx_antenna_gain", "1"},
      {"rf.rx_noise_temp", "290"},
      {"rf.boltzmann", "1.380649e-23"},
      {"rf.fl_scale", "1"},
      {"rf.path_phase", "false"},
      {"fading.mean_db", "2"},
      {"fading.std_db", "1"},
      {"fading.rain_prob", "0.2"},
      {"nominal.alpha_mode", "max"},
      {"nominal.alpha_quantile", "0.95"},
      {"nominal.gain_normalization", "scalar"},
      {"simulation.seed", "1"},
      {"simulation.n_calibration", "500"},
      {"simulation.n_eval", "200"},
      {"simulation.designs", "reference,robust,perturbation_aware,onground"},
      {"simulation.direction", "both"},
      {"simulation.beta_values", "0.5,1,2,4,8"},
      {"simulation.p_fl_values", "auto"},
      {"simulation.alpha_fractions", "0,0.25,0.5,0.75,1"},
      {"simulation.beta", "2"},
      {"simulation.p_fl", "auto"},
      {"simulation.dz_mode", "empirical"},
      {"simulation.threads", "0"},
      {"metrics.return_modcod", "${data}/modcod/dvb_rcs_return.csv"},
      {"metrics.forward_modcod", "${data}/modcod/dvb_s2_forward.csv"},
      {"metrics.dispersion", "variance_over_mean"},
  };
  return defaults;
}

std::filesystem::path data_directory() {
  if (const char* env = std::getenv("SATBEAM_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return SATBEAM_DATA_DIR;
}

std::uint64_t Scenario::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& [key, value] : resolved) {
    for (char c : key + "=" + value + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
  }
  return h;
}

Scenario load_scenario(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::parse_error, std::string("scenario: ") + e.what());
  }
  auto values = default_values();
  for (const auto& [section, body] : tree) {
    require(!body.empty() || body.data().empty(), ErrorCode::parse_error,
            "scenario: key '" + section + "' outside of a section");
    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      require(values.count(full) == 1, ErrorCode::parse_error, "scenario: unknown key '" + full + "'");
      values[full] = trim(node.data());
    }
  }
  for (const auto& o : overrides) apply_override(values, o);
  return build(std::move(values), path.parent_path());
}

Scenario default_scenario(const std::vector<std::string>& overrides, const std::filesystem::path& base_dir) {
  auto values = default_values();
  for (const auto& o : overrides) apply_override(values, o);
  return build(std::move(values), base_dir);
}

}  // namespace satbeam
