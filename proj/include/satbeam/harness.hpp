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

// Monte Carlo orchestration. A calibration pass estimates the nominal channel;
// evaluation then runs every design on both links over the parameter sweeps.
//
// Random streams are keyed by (seed, stream, drop index), so drops can run on
// any thread; reductions always run in drop order. Every design at a sweep
// point sees the same channel draws.

#pragma once

#include "satbeam/scenario.hpp"

#include <functional>
#include <iosfwd>
#include <optional>

namespace satbeam {

namespace streams {
inline constexpr std::uint64_t gain_stats = 1;
inline constexpr std::uint64_t calibration = 2;
inline constexpr std::uint64_t evaluation = 3;
inline constexpr std::uint64_t ball = 4;
}  // namespace streams

/// Draws channels from the physical model with a fixed gain normalization.
class ChannelSampler {
 public:
  ChannelSampler(const Scenario& scenario, RMatrix<double> gain_stats);

  /// Per-entry (or pooled) power statistics over n raw gain draws.
  static RMatrix<double> compute_gain_stats(const Scenario& scenario);

  Channel<double> draw(std::uint64_t stream, std::uint64_t index) const;
  const RMatrix<double>& gain_stats() const { return stats_; }

 private:
  const Scenario* scenario_;
  RMatrix<double> stats_;
};

struct Calibration {
  NominalChannel<double> nominal;
  EmpiricalDeltaZ<double> delta_z;
  RMatrix<double> gain_stats;
};

/// Draws n_calibration channels and estimates the nominal channel from them.
Calibration calibrate(const Scenario& scenario);

struct RunRecord {
  std::uint64_t scenario_hash = 0;
  std::string design;
  std::string sweep_param;  // beta, p_fl or alpha
  double sweep_value = 0;
  Direction direction = Direction::return_link;
  std::optional<MetricsSummary> metrics;  // empty when the design was infeasible
  double wall_seconds = 0;
  bool alpha_clamped = false;
  std::string note;
};

/// Per-drop link results, indexed [sweep point][design][drop].
struct DropResults {
  std::vector<std::string> designs;
  std::vector<double> sweep_values;
  Direction direction = Direction::return_link;
  std::vector<std::vector<std::vector<LinkResult<double>>>> results;
};

/// Fixed designs computed once from the calibration; adaptive and onground
/// are evaluated per drop and have no entry here.
struct DesignBook {
  std::map<std::string, BeamMatrix<double>> fixed;
  std::map<std::string, std::string> failures;
  bool alpha_clamped = false;
};

DesignBook build_designs(const Scenario& scenario, const NominalChannel<double>& nominal,
                         const EmpiricalDeltaZ<double>& delta_z);

/// Link result of one design on one channel.
LinkResult<double> evaluate_design(const std::string& design, const DesignBook& book, const Channel<double>& h,
                                   Direction direction, double sweep_value);

/// Runs the physical-model evaluation and keeps every per-drop result.
std::vector<DropResults> evaluate_drops(const Scenario& scenario, const Calibration& calibration);

/// Runs the physical-model evaluation: beta sweep on the return link, P_FL
/// sweep on the forward link.
std::vector<RunRecord> evaluate(const Scenario& scenario, const Calibration& calibration);

/// Evaluation on H = Hbar + Δ with Δ uniform in the alpha-ball, for alpha on
/// the scenario's fraction grid times the feasible (clamped) radius.
std::vector<RunRecord> sweep_alpha(const Scenario& scenario, const Calibration& calibration);

void write_results_csv(std::ostream& out, const std::vector<RunRecord>& records, std::uint64_t seed);

/// Long-format plot table: one row per design x direction x sweep value.
void write_plot_csv(std::ostream& out, const std::vector<RunRecord>& records);

/// Reads records back from a results CSV.
std::vector<RunRecord> read_results_csv(std::istream& in);

std::string manifest_json(const Scenario& scenario, const std::string& command);
std::string calibration_json(const Calibration& calibration, const RobustSurrogate<double>* surrogate);

/// Runs fn(i) for i in [0, n) over `threads` workers (0 = hardware).
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace satbeam
