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

#pragma once

#include "satbeam/link_processing.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace satbeam {

struct ModcodEntry {
  std::string name;
  double threshold_db = 0;
  double efficiency = 0;  // bits/symbol
};

/// SINR threshold -> spectral efficiency map for one link direction.
/// Thresholds and efficiencies are strictly increasing.
class ModcodTable {
 public:
  ModcodTable(Direction direction, std::vector<ModcodEntry> entries);

  /// One "name,threshold_dB,efficiency" per line; '#' starts a comment line.
  static ModcodTable parse(std::istream& in, Direction direction, const std::string& source = "<stream>");
  static ModcodTable load(const std::filesystem::path& path, Direction direction);

  Direction direction() const { return direction_; }
  const std::vector<ModcodEntry>& entries() const { return entries_; }
  double outage_floor() const { return entries_.front().threshold_db; }

 private:
  Direction direction_;
  std::vector<ModcodEntry> entries_;
};

/// log2(1 + sinr), sinr linear.
double shannon(double sinr);

/// Efficiency of the highest entry whose threshold is <= sinr_db; 0 below the
/// lowest threshold.
double modcod_lookup(double sinr_db, const ModcodTable& table);

/// 1 iff sinr_db >= the table's outage floor.
int availability(double sinr_db, const ModcodTable& table);

enum class DispersionConvention { variance_over_mean, stddev_over_mean };

/// Population variance (or standard deviation) over mean. Throws
/// ErrorCode::all_outage when the mean is zero.
double dispersion_index(std::span<const double> throughputs,
                        DispersionConvention convention = DispersionConvention::variance_over_mean);

double to_db(double linear);

struct MetricsSummary {
  double mean_throughput = 0;               // bits/symbol per user
  double availability = 0;                  // fraction of (user, drop) pairs
  std::optional<double> dispersion_index;   // empty when every user is in outage
  double shannon_mean = 0;                  // bits/symbol per user
};

/// Aggregates a set of drops. Throughputs come from the modcod table;
/// dispersion is taken across beams over their drop-averaged throughput.
MetricsSummary summarize(std::span<const LinkResult<double>> results, const ModcodTable& table,
                         DispersionConvention convention = DispersionConvention::variance_over_mean);

}  // namespace satbeam
