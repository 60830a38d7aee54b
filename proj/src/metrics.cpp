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

#include "satbeam/metrics.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>

namespace satbeam {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& where) {
  double value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  require(ec == std::errc() && ptr == last && std::isfinite(value), ErrorCode::parse_error,
          where + ": invalid number '" + text + "'");
  return value;
}

}  // namespace

ModcodTable::ModcodTable(Direction direction, std::vector<ModcodEntry> entries)
    : direction_(direction), entries_(std::move(entries)) {
  require(!entries_.empty(), ErrorCode::invalid_argument, "ModcodTable: table is empty");
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    require(entries_[i].threshold_db > entries_[i - 1].threshold_db, ErrorCode::invalid_argument,
            "ModcodTable: thresholds must be strictly increasing (entry " + entries_[i].name + ")");
    require(entries_[i].efficiency > entries_[i - 1].efficiency, ErrorCode::invalid_argument,
            "ModcodTable: efficiencies must be strictly increasing (entry " + entries_[i].name + ")");
  }
  for (const auto& e : entries_)
    require(e.efficiency > 0, ErrorCode::invalid_argument, "ModcodTable: efficiencies must be positive");
}

ModcodTable ModcodTable::parse(std::istream& in, Direction direction, const std::string& source) {
  std::vector<ModcodEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto c1 = text.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(',', c1 + 1);
    require(c2 != std::string::npos && text.find(',', c2 + 1) == std::string::npos, ErrorCode::parse_error,
            where + ": expected 'name,threshold_dB,efficiency'");
    ModcodEntry e;
    e.name = trim(text.substr(0, c1));
    e.threshold_db = parse_double(trim(text.substr(c1 + 1, c2 - c1 - 1)), where);
    e.efficiency = parse_double(trim(text.substr(c2 + 1)), where);
    require(!e.name.empty(), ErrorCode::parse_error, where + ": empty modcod name");
    require(e.efficiency > 0, ErrorCode::parse_error, where + ": efficiency must be positive");
    if (!entries.empty()) {
      require(e.threshold_db > entries.back().threshold_db, ErrorCode::parse_error,
              where + ": thresholds must be strictly increasing");
      require(e.efficiency > entries.back().efficiency, ErrorCode::parse_error,
              where + ": efficiencies must be strictly increasing");
    }
    entries.push_back(std::move(e));
  }
  require(!entries.empty(), ErrorCode::parse_error, source + ": no modcod entries");
  return ModcodTable(direction, std::move(entries));
}

ModcodTable ModcodTable::load(const std::filesystem::path& path, Direction direction) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io_error, "cannot open modcod table " + path.string());
  return parse(in, direction, path.string());
}

double shannon(double sinr) {
  require(sinr >= 0, ErrorCode::invalid_argument, "shannon: SINR must be nonnegative");
  return std::log2(1.0 + sinr);
}

double modcod_lookup(double sinr_db, const ModcodTable& table) {
  double efficiency = 0;
  for (const auto& e : table.entries()) {
    if (sinr_db >= e.threshold_db)
      efficiency = e.efficiency;
    else
      break;
  }
  return efficiency;
}

int availability(double sinr_db, const ModcodTable& table) { return sinr_db >= table.outage_floor() ? 1 : 0; }

double dispersion_index(std::span<const double> throughputs, DispersionConvention convention) {
  require(!throughputs.empty(), ErrorCode::empty_input, "dispersion_index: empty input");
  double mean = 0;
  for (double t : throughputs) mean += t;
  mean /= double(throughputs.size());
  require(mean > 0, ErrorCode::all_outage, "dispersion_index: zero mean throughput (all users in outage)");
  double var = 0;
  for (double t : throughputs) var += (t - mean) * (t - mean);
  var /= double(throughputs.size());
  return convention == DispersionConvention::variance_over_mean ? var / mean : std::sqrt(var) / mean;
}

double to_db(double linear) {
  return linear > 0 ? 10.0 * std::log10(linear) : -std::numeric_limits<double>::infinity();
}

MetricsSummary summarize(std::span<const LinkResult<double>> results, const ModcodTable& table,
                         DispersionConvention convention) {
  require(!results.empty(), ErrorCode::empty_input, "summarize: no results");
  const Eigen::Index k = results.front().sinr.size();
  std::vector<double> per_beam(static_cast<std::size_t>(k), 0.0);
  double throughput = 0, available = 0, capacity = 0;
  for (const auto& r : results) {
    require(r.direction == table.direction(), ErrorCode::invalid_argument,
            "summarize: link direction does not match the modcod table");
    require(r.sinr.size() == k, ErrorCode::dimension_mismatch, "summarize: inconsistent user count");
    for (Eigen::Index i = 0; i < k; ++i) {
      const double db = to_db(r.sinr(i));
      const double t = modcod_lookup(db, table);
      per_beam[static_cast<std::size_t>(i)] += t;
      throughput += t;
      available += availability(db, table);
      capacity += shannon(r.sinr(i));
    }
  }
  const double samples = double(results.size()) * double(k);
  MetricsSummary s;
  s.mean_throughput = throughput / samples;
  s.availability = available / samples;
  s.shannon_mean = capacity / samples;
  for (auto& b : per_beam) b /= double(results.size());
  try {
    s.dispersion_index = dispersion_index(per_beam, convention);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::all_outage) throw;
  }
  return s;
}

}  // namespace satbeam
