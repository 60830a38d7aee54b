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

#include "satbeam/beam_design.hpp"
#include "satbeam/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace satbeam {

enum class GainNormalization { scalar, per_entry };
enum class LinkSelection { both, return_only, forward_only };

/// Fully resolved simulation scenario. Built from a sectioned key-value file
/// ([geometry], [rf], [fading], [nominal], [simulation], [metrics]); every
/// key has a default, unknown keys are rejected.
struct Scenario {
  BeamGeometry<double> geometry;
  RfParams<double> rf;
  RainParams<double> rain;
  AlphaMode alpha_mode = AlphaMax{};
  GainNormalization gain_normalization = GainNormalization::scalar;

  std::uint64_t seed = 1;
  int n_calibration = 500;
  int n_eval = 200;
  std::vector<std::string> designs;  // reference, adaptive, robust, perturbation_aware, onground
  LinkSelection links = LinkSelection::both;
  std::vector<double> beta_values;
  std::vector<double> p_fl_values;
  std::vector<double> alpha_fractions;
  double beta = 2;   // fixed return-link EIRP of the alpha sweep
  double p_fl = 8;   // fixed forward-link power of the alpha sweep
  bool dz_empirical = true;
  int threads = 0;   // 0 = hardware concurrency

  std::filesystem::path return_modcod;
  std::filesystem::path forward_modcod;
  DispersionConvention dispersion = DispersionConvention::variance_over_mean;

  /// "section.key" -> value after defaults, file and overrides.
  std::map<std::string, std::string> resolved;

  std::uint64_t hash() const;  // FNV-1a over the resolved key-value text
};

/// All known keys with their defaults, in file order.
const std::vector<std::pair<std::string, std::string>>& scenario_defaults();

/// Parses a scenario file and applies "key=value" overrides (key may be
/// "section.key" or an unambiguous bare key).
Scenario load_scenario(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Builds a scenario from defaults plus overrides only; relative modcod paths
/// resolve against `base_dir`.
Scenario default_scenario(const std::vector<std::string>& overrides = {},
                          const std::filesystem::path& base_dir = {});

/// Directory holding the shipped data files (modcod tables, scenarios).
std::filesystem::path data_directory();

}  // namespace satbeam
