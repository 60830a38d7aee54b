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

#include "satbeam/harness.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace satbeam {

namespace {

std::vector<Direction> selected_directions(const Scenario& s) {
  switch (s.links) {
    case LinkSelection::return_only: return {Direction::return_link};
    case LinkSelection::forward_only: return {Direction::forward_link};
    case LinkSelection::both: break;
  }
  return {Direction::return_link, Direction::forward_link};
}

const ModcodTable& table_for(Direction d, const ModcodTable& ret, const ModcodTable& fwd) {
  return d == Direction::return_link ? ret : fwd;
}

std::string format_number(double v) { return fmt::format("{:.10g}", v); }

std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<RunRecord> summarize_drops(const Scenario& scenario, const std::vector<DropResults>& all,
                                       const DesignBook& book, const std::string& param_return,
                                       const std::string& param_forward, double wall) {
  const ModcodTable ret = ModcodTable::load(scenario.return_modcod, Direction::return_link);
  const ModcodTable fwd = ModcodTable::load(scenario.forward_modcod, Direction::forward_link);
  std::vector<RunRecord> records;
  for (const auto& dr : all) {
    const auto& table = table_for(dr.direction, ret, fwd);
    for (std::size_t p = 0; p < dr.sweep_values.size(); ++p) {
      for (const auto& design : scenario.designs) {
        RunRecord rec;
        rec.scenario_hash = scenario.hash();
        rec.design = design;
        rec.direction = dr.direction;
        rec.sweep_param = dr.direction == Direction::return_link ? param_return : param_forward;
        rec.sweep_value = dr.sweep_values[p];
        rec.wall_seconds = wall;
        rec.alpha_clamped = book.alpha_clamped;
        const auto it = std::find(dr.designs.begin(), dr.designs.end(), design);
        if (it == dr.designs.end()) {
          rec.note = book.failures.count(design) ? book.failures.at(design) : "not evaluated";
        } else {
          const auto& drops = dr.results[p][static_cast<std::size_t>(it - dr.designs.begin())];
          rec.metrics = summarize(drops, table, scenario.dispersion);
        }
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

/// Evaluates every (direction, sweep value, design) on channel_of(i) for all drops.
std::vector<DropResults> run_drops(const Scenario& scenario, const DesignBook& book,
                                   const std::function<Channel<double>(std::size_t)>& channel_of,
                                   const std::vector<double>& return_values, const std::vector<double>& forward_values) {
  std::vector<std::string> designs;
  for (const auto& d : scenario.designs)
    if (book.failures.count(d) == 0) designs.push_back(d);

  std::vector<DropResults> all;
  for (Direction dir : selected_directions(scenario)) {
    DropResults dr;
    dr.designs = designs;
    dr.direction = dir;
    dr.sweep_values = dir == Direction::return_link ? return_values : forward_values;
    dr.results.assign(dr.sweep_values.size(),
                      std::vector<std::vector<LinkResult<double>>>(
                          designs.size(), std::vector<LinkResult<double>>(static_cast<std::size_t>(scenario.n_eval))));
    all.push_back(std::move(dr));
  }
  parallel_for(static_cast<std::size_t>(scenario.n_eval), scenario.threads, [&](std::size_t i) {
    const Channel<double> h = channel_of(i);
    // the forward link sees the same channel up to the scale factor gamma
    const Channel<double> h_forward{h.values * scenario.rf.fl_scale};
    for (auto& dr : all) {
      const Channel<double>& link = dr.direction == Direction::return_link ? h : h_forward;
      for (std::size_t p = 0; p < dr.sweep_values.size(); ++p)
        for (std::size_t d = 0; d < designs.size(); ++d)
          dr.results[p][d][i] = evaluate_design(designs[d], book, link, dr.direction, dr.sweep_values[p]);
    }
  });
  return all;
}

}  // namespace

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency();
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

ChannelSampler::ChannelSampler(const Scenario& scenario, RMatrix<double> gain_stats)
    : scenario_(&scenario), stats_(std::move(gain_stats)) {}

RMatrix<double> ChannelSampler::compute_gain_stats(const Scenario& scenario) {
  const auto n = static_cast<std::size_t>(scenario.n_calibration);
  std::vector<GainMatrix<double>> gains(n);
  parallel_for(n, scenario.threads, [&](std::size_t i) {
    Rng rng = make_stream(scenario.seed, streams::gain_stats, i);
    gains[i] = build_gain_matrix(scenario.geometry, sample_user_drop(scenario.geometry, rng), scenario.rf);
  });
  RMatrix<double> stats = gain_power_stats<double>(gains);
  if (scenario.gain_normalization == GainNormalization::scalar) stats.setConstant(stats.mean());
  return stats;
}

Channel<double> ChannelSampler::draw(std::uint64_t stream, std::uint64_t index) const {
  const Scenario& s = *scenario_;
  Rng rng = make_stream(s.seed, stream, index);
  const UserDrop<double> drop = sample_user_drop(s.geometry, rng);
  const GainMatrix<double> g = normalize_gain(build_gain_matrix(s.geometry, drop, s.rf), stats_);
  const FadingDiag<double> d = sample_fading(s.geometry.num_beams(), s.rain, rng);
  return assemble_channel(g, d);
}

Calibration calibrate(const Scenario& scenario) {
  Calibration c;
  c.gain_stats = ChannelSampler::compute_gain_stats(scenario);
  const ChannelSampler sampler(scenario, c.gain_stats);
  std::vector<Channel<double>> ensemble(static_cast<std::size_t>(scenario.n_calibration));
  parallel_for(ensemble.size(), scenario.threads,
               [&](std::size_t i) { ensemble[i] = sampler.draw(streams::calibration, i); });
  c.nominal = estimate_nominal<double>(ensemble, scenario.alpha_mode);
  c.delta_z = empirical_delta_z<double>(c.nominal, ensemble);
  return c;
}

DesignBook build_designs(const Scenario& scenario, const NominalChannel<double>& nominal,
                         const EmpiricalDeltaZ<double>& delta_z) {
  DesignBook book;
  try {
    book.alpha_clamped = robust_surrogate(nominal).alpha_clamped;
  } catch (const Error&) {
  }
  for (const auto& name : scenario.designs) {
    if (name == "onground" || name == "adaptive") continue;
    try {
      if (name == "reference") {
        book.fixed.emplace(name, design_reference(scenario.geometry));
      } else if (name == "robust") {
        book.fixed.emplace(name, design_robust(nominal));
      } else if (name == "perturbation_aware") {
        const DeltaZMode<double> mode =
            scenario.dz_empirical ? DeltaZMode<double>{delta_z} : DeltaZMode<double>{IsotropicDeltaZ{}};
        book.fixed.emplace(name, design_perturbation_aware(nominal, mode));
      }
    } catch (const Error& e) {
      book.failures.emplace(name, e.what());
    }
  }
  return book;
}

LinkResult<double> evaluate_design(const std::string& design, const DesignBook& book, const Channel<double>& h,
                                   Direction direction, double sweep_value) {
  if (design == "onground") {
    return direction == Direction::return_link ? onground_return(h, ReturnLinkParams<double>{sweep_value})
                                               : onground_forward(h, ForwardLinkParams<double>{sweep_value});
  }
  const BeamMatrix<double> adaptive = design == "adaptive" ? design_adaptive(h) : BeamMatrix<double>{};
  const BeamMatrix<double>& b = design == "adaptive" ? adaptive : book.fixed.at(design);
  return direction == Direction::return_link ? return_mse(b, h, ReturnLinkParams<double>{sweep_value})
                                             : forward_mse(b, h, ForwardLinkParams<double>{sweep_value});
}

std::vector<DropResults> evaluate_drops(const Scenario& scenario, const Calibration& calibration) {
  const DesignBook book = build_designs(scenario, calibration.nominal, calibration.delta_z);
  const ChannelSampler sampler(scenario, calibration.gain_stats);
  return run_drops(
      scenario, book, [&](std::size_t i) { return sampler.draw(streams::evaluation, i); }, scenario.beta_values,
      scenario.p_fl_values);
}

std::vector<RunRecord> evaluate(const Scenario& scenario, const Calibration& calibration) {
  const auto start = std::chrono::steady_clock::now();
  const DesignBook book = build_designs(scenario, calibration.nominal, calibration.delta_z);
  const ChannelSampler sampler(scenario, calibration.gain_stats);
  const auto drops = run_drops(
      scenario, book, [&](std::size_t i) { return sampler.draw(streams::evaluation, i); }, scenario.beta_values,
      scenario.p_fl_values);
  return summarize_drops(scenario, drops, book, "beta", "p_fl", seconds_since(start));
}

std::vector<RunRecord> sweep_alpha(const Scenario& scenario, const Calibration& calibration) {
  const auto start = std::chrono::steady_clock::now();
  const NominalChannel<double>& nominal = calibration.nominal;
  const RobustSurrogate<double> surrogate = robust_surrogate(nominal);
  const double alpha_hat = surrogate.alpha_used;
  const Eigen::Index n = nominal.num_feeds();
  const Eigen::Index k = nominal.num_beams();

  std::vector<CMatrix<double>> unit_ball(static_cast<std::size_t>(scenario.n_eval));
  parallel_for(unit_ball.size(), scenario.threads, [&](std::size_t i) {
    Rng rng = make_stream(scenario.seed, streams::ball, i);
    unit_ball[i] = sample_in_ball<double>(n, k, 1.0, rng).delta;
  });

  std::vector<RunRecord> records;
  int feasible_points = 0;
  for (double fraction : scenario.alpha_fractions) {
    const double alpha = fraction * alpha_hat;
    NominalChannel<double> at_alpha = nominal;
    at_alpha.alpha = alpha;
    DesignBook book = build_designs(scenario, at_alpha, calibration.delta_z);
    try {
      book.alpha_clamped = robust_surrogate(at_alpha).alpha_clamped;
      ++feasible_points;
    } catch (const Error& e) {
      for (const auto& d : scenario.designs)
        if (d != "onground" && d != "reference") book.failures.emplace(d, e.what());
    }
    const auto drops = run_drops(
        scenario, book, [&](std::size_t i) { return Channel<double>{nominal.mean + alpha * unit_ball[i]}; },
        {scenario.beta}, {scenario.p_fl});
    auto point = summarize_drops(scenario, drops, book, "alpha", "alpha", seconds_since(start));
    for (auto& r : point) r.sweep_value = alpha;
    records.insert(records.end(), point.begin(), point.end());
  }
  require(feasible_points > 0, ErrorCode::infeasible, "sweep_alpha: no feasible alpha on the grid");
  return records;
}

void write_results_csv(std::ostream& out, const std::vector<RunRecord>& records, std::uint64_t seed) {
  out << "design,direction,sweep_param,sweep_value,mean_throughput,availability,dispersion_index,shannon_mean,"
         "alpha_clamped,seed\n";
  for (const auto& r : records) {
    out << r.design << ',' << to_string(r.direction) << ',' << r.sweep_param << ',' << format_number(r.sweep_value)
        << ',';
    if (r.metrics) {
      out << format_number(r.metrics->mean_throughput) << ',' << format_number(r.metrics->availability) << ','
          << optional_number(r.metrics->dispersion_index) << ',' << format_number(r.metrics->shannon_mean);
    } else {
      out << "NA,NA,NA,NA";
    }
    out << ',' << (r.alpha_clamped ? "true" : "false") << ',' << seed << '\n';
  }
}

void write_plot_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "direction,design,x_axis,x_value,throughput_bits_per_symbol,availability_percent,dispersion_index,"
         "shannon_bits_per_symbol\n";
  for (const auto& r : records) {
    const std::string axis = r.sweep_param == "beta" ? "user_eirp_beta"
                             : r.sweep_param == "p_fl" ? "total_power_p_fl"
                                                       : "alpha";
    out << to_string(r.direction) << ',' << r.design << ',' << axis << ',' << format_number(r.sweep_value) << ',';
    if (r.metrics) {
      out << format_number(r.metrics->mean_throughput) << ',' << fmt::format("{:.1f}", 100 * r.metrics->availability)
          << ',' << optional_number(r.metrics->dispersion_index) << ',' << format_number(r.metrics->shannon_mean);
    } else {
      out << "NA,NA,NA,NA";
    }
    out << '\n';
  }
}

std::vector<RunRecord> read_results_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::parse_error, "results csv: missing header");
  require(line.rfind("design,direction,sweep_param,sweep_value", 0) == 0, ErrorCode::parse_error,
          "results csv: unexpected header");
  std::vector<RunRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    require(f.size() == 10, ErrorCode::parse_error, "results csv line " + std::to_string(line_no) + ": expected 10 fields");
    auto num = [&](const std::string& s) {
      try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
      } catch (const std::exception&) {
        throw Error(ErrorCode::parse_error, "results csv line " + std::to_string(line_no) + ": bad number '" + s + "'");
      }
    };
    RunRecord r;
    r.design = f[0];
    require(f[1] == "return" || f[1] == "forward", ErrorCode::parse_error,
            "results csv line " + std::to_string(line_no) + ": bad direction");
    r.direction = f[1] == "return" ? Direction::return_link : Direction::forward_link;
    r.sweep_param = f[2];
    r.sweep_value = num(f[3]);
    if (f[4] != "NA") {
      MetricsSummary m;
      m.mean_throughput = num(f[4]);
      m.availability = num(f[5]);
      if (f[6] != "NA") m.dispersion_index = num(f[6]);
      m.shannon_mean = num(f[7]);
      r.metrics = m;
    }
    r.alpha_clamped = f[8] == "true";
    records.push_back(std::move(r));
  }
  return records;
}

std::string manifest_json(const Scenario& scenario, const std::string& command) {
  nlohmann::ordered_json j;
  j["tool"] = "satbeam";
  j["command"] = command;
  j["seed"] = scenario.seed;
  j["scenario_hash"] = fmt::format("{:016x}", scenario.hash());
  nlohmann::ordered_json sections = nlohmann::ordered_json::object();
  for (const auto& [key, _] : scenario_defaults()) {
    const auto dot = key.find('.');
    sections[key.substr(0, dot)][key.substr(dot + 1)] = scenario.resolved.at(key);
  }
  j["scenario"] = sections;
  auto points = [](const std::vector<Point2<double>>& pts) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& p : pts) arr.push_back({p.x(), p.y()});
    return arr;
  };
  j["derived"]["feed_positions_rad"] = points(scenario.geometry.feed_positions);
  j["derived"]["beam_centers_rad"] = points(scenario.geometry.beam_centers);
  j["derived"]["feed_pattern_width_rad"] = scenario.geometry.feed_pattern_width;
  j["derived"]["reference_width_rad"] = scenario.geometry.reference_width;
  j["derived"]["p_fl_values"] = scenario.p_fl_values;
  j["derived"]["p_fl"] = scenario.p_fl;
  j["derived"]["return_modcod"] = scenario.return_modcod.string();
  j["derived"]["forward_modcod"] = scenario.forward_modcod.string();
  return j.dump(2) + "\n";
}

std::string calibration_json(const Calibration& calibration, const RobustSurrogate<double>* surrogate) {
  nlohmann::ordered_json j;
  j["alpha"] = calibration.nominal.alpha;
  j["rank"] = calibration.nominal.rank;
  std::vector<double> eig(calibration.nominal.eig_values.data(),
                          calibration.nominal.eig_values.data() + calibration.nominal.eig_values.size());
  j["eigenvalues"] = eig;
  if (surrogate != nullptr) {
    j["alpha_used"] = surrogate->alpha_used;
    j["alpha_clamped"] = surrogate->alpha_clamped;
    j["epsilon_h"] = surrogate->epsilon_h;
  }
  return j.dump(2) + "\n";
}

}  // namespace satbeam
