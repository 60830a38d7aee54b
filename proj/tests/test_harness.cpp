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

#include "satbeam/satbeam.hpp"

#include <catch_amalgamated.hpp>

#include <atomic>
#include <sstream>

using namespace satbeam;
using CM = CMatrix<double>;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

Scenario small(std::vector<std::string> overrides = {}) {
  overrides.insert(overrides.begin(), {"n_calibration=100", "n_eval=20"});
  return default_scenario(overrides);
}

const RunRecord& find(const std::vector<RunRecord>& records, const std::string& design, Direction dir,
                      double value) {
  for (const auto& r : records)
    if (r.design == design && r.direction == dir && r.sweep_value == value) return r;
  throw std::runtime_error("record not found");
}

}  // namespace

TEST_CASE("calibrate from a single draw has zero radius", "[harness]") {
  const Scenario s = small({"n_calibration=1"});
  const Calibration c = calibrate(s);
  CHECK(c.nominal.alpha == 0.0);
  const ChannelSampler sampler(s, c.gain_stats);
  CHECK(c.nominal.mean == sampler.draw(streams::calibration, 0).values);
}

TEST_CASE("calibrate is deterministic across thread counts", "[harness]") {
  const Calibration a = calibrate(small({"threads=1"}));
  const Calibration b = calibrate(small({"threads=3"}));
  CHECK(a.nominal.mean == b.nominal.mean);
  CHECK(a.nominal.alpha == b.nominal.alpha);
  CHECK(a.delta_z.matrix == b.delta_z.matrix);
}

TEST_CASE("calibrate converges across independent seeds", "[harness]") {
  const Calibration a = calibrate(default_scenario({"n_calibration=2000", "seed=11"}));
  const Calibration b = calibrate(default_scenario({"n_calibration=2000", "seed=12"}));
  CHECK((a.nominal.mean - b.nominal.mean).norm() / a.nominal.mean.norm() < 0.05);
}

TEST_CASE("scalar gain normalization gives unit mean power", "[harness]") {
  const Scenario s = small();
  const RMatrix<double> stats = ChannelSampler::compute_gain_stats(s);
  CHECK(stats.maxCoeff() == stats.minCoeff());
  std::vector<GainMatrix<double>> gains;
  for (int i = 0; i < s.n_calibration; ++i) {
    Rng rng = make_stream(s.seed, streams::gain_stats, static_cast<std::uint64_t>(i));
    gains.push_back(normalize_gain(build_gain_matrix(s.geometry, sample_user_drop(s.geometry, rng), s.rf), stats));
  }
  CHECK_THAT(gain_power_stats<double>(gains).mean(), WithinAbs(1.0, 1e-12));

  const Scenario per_entry = small({"gain_normalization=per_entry"});
  const RMatrix<double> entry_stats = ChannelSampler::compute_gain_stats(per_entry);
  CHECK(entry_stats.maxCoeff() > entry_stats.minCoeff());
}

TEST_CASE("adaptive design matches on-ground processing on every drop", "[harness]") {
  const Scenario s = small({"designs=adaptive,onground", "direction=return"});
  const auto drops = evaluate_drops(s, calibrate(s));
  REQUIRE(drops.size() == 1);
  const auto& dr = drops.front();
  REQUIRE(dr.designs == std::vector<std::string>{"adaptive", "onground"});
  for (std::size_t p = 0; p < dr.sweep_values.size(); ++p)
    for (std::size_t i = 0; i < dr.results[p][0].size(); ++i)
      CHECK_THAT(dr.results[p][0][i].smse, WithinAbs(dr.results[p][1][i].smse, 1e-9));
}

TEST_CASE("evaluate produces one record per design, direction and sweep value", "[harness]") {
  const Scenario s = small();
  const auto records = evaluate(s, calibrate(s));
  CHECK(records.size() == s.designs.size() * (s.beta_values.size() + s.p_fl_values.size()));
  for (const auto& r : records) {
    REQUIRE(r.metrics.has_value());
    CHECK(r.metrics->availability >= 0.0);
    CHECK(r.metrics->availability <= 1.0);
    CHECK(r.scenario_hash == s.hash());
    CHECK(r.sweep_param == (r.direction == Direction::return_link ? "beta" : "p_fl"));
  }
  // on-ground processing bounds the on-board designs
  for (double beta : s.beta_values)
    for (const char* d : {"reference", "robust", "perturbation_aware"})
      CHECK(find(records, "onground", Direction::return_link, beta).metrics->shannon_mean >=
            find(records, d, Direction::return_link, beta).metrics->shannon_mean);
}

TEST_CASE("evaluate is deterministic across thread counts", "[harness]") {
  const Scenario one = small({"threads=1"});
  const Scenario many = small({"threads=4"});
  std::ostringstream a, b;
  write_results_csv(a, evaluate(one, calibrate(one)), one.seed);
  write_results_csv(b, evaluate(many, calibrate(many)), many.seed);
  CHECK(a.str() == b.str());
}

TEST_CASE("build_designs records infeasible designs", "[harness]") {
  const Scenario s = small({"designs=reference,robust,perturbation_aware"});
  const auto zero = make_nominal<double>(CM::Zero(16, 8), 0.1);
  const auto book = build_designs(s, zero, EmpiricalDeltaZ<double>{CM::Zero(16, 16)});
  CHECK(book.fixed.count("reference") == 1);
  CHECK(book.failures.count("robust") == 1);
  CHECK(book.failures.count("perturbation_aware") == 1);
}

TEST_CASE("sweep_alpha at zero radius evaluates the nominal channel", "[harness]") {
  const Scenario s = small({"designs=robust", "alpha_fractions=0,0.5,1"});
  const Calibration c = calibrate(s);
  const auto records = sweep_alpha(s, c);
  CHECK(records.size() == 3 * 2);
  const auto& zero = find(records, "robust", Direction::return_link, 0.0);
  REQUIRE(zero.metrics.has_value());
  CHECK(zero.sweep_param == "alpha");

  const auto b = design_robust(c.nominal);
  const auto r = return_mse(b, Channel<double>{c.nominal.mean}, ReturnLinkParams<double>{s.beta});
  const std::vector<LinkResult<double>> same(static_cast<std::size_t>(s.n_eval), r);
  const auto expected = summarize(same, ModcodTable::load(s.return_modcod, Direction::return_link));
  CHECK(zero.metrics->mean_throughput == expected.mean_throughput);
  CHECK(zero.metrics->shannon_mean == expected.shannon_mean);
  CHECK(zero.metrics->availability == expected.availability);
}

TEST_CASE("results CSV round trip", "[harness]") {
  std::vector<RunRecord> records(2);
  records[0].design = "robust";
  records[0].sweep_param = "beta";
  records[0].sweep_value = 0.5;
  records[0].metrics = MetricsSummary{1.25, 0.875, std::nullopt, 2.0625};
  records[1].design = "reference";
  records[1].direction = Direction::forward_link;
  records[1].sweep_param = "p_fl";
  records[1].sweep_value = 16;
  records[1].alpha_clamped = true;
  std::stringstream csv;
  write_results_csv(csv, records, 7);
  const auto back = read_results_csv(csv);
  REQUIRE(back.size() == 2);
  CHECK(back[0].design == "robust");
  REQUIRE(back[0].metrics.has_value());
  CHECK(back[0].metrics->mean_throughput == 1.25);
  CHECK_FALSE(back[0].metrics->dispersion_index.has_value());
  CHECK(back[1].direction == Direction::forward_link);
  CHECK_FALSE(back[1].metrics.has_value());
  CHECK(back[1].alpha_clamped);

  std::ostringstream plot;
  write_plot_csv(plot, back);
  CHECK_THAT(plot.str(), ContainsSubstring("return,robust,user_eirp_beta,0.5,1.25,87.5,NA,2.0625"));
  CHECK_THAT(plot.str(), ContainsSubstring("forward,reference,total_power_p_fl,16,NA,NA,NA,NA"));

  std::istringstream bad("design,direction,sweep_param,sweep_value\nrobust,up,beta,1,1,1,1,1,false,1\n");
  CHECK_THROWS_AS(read_results_csv(bad), Error);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_results_csv(empty), Error);
}

TEST_CASE("manifest lists the resolved scenario", "[harness]") {
  const Scenario s = small();
  const std::string json = manifest_json(s, "simulate");
  CHECK_THAT(json, ContainsSubstring("\"simulate\""));
  CHECK_THAT(json, ContainsSubstring("num_feeds"));
  CHECK_THAT(json, ContainsSubstring("n_eval"));
}

TEST_CASE("parallel_for visits every index once and propagates failures", "[harness]") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw Error(ErrorCode::invalid_argument, "boom");
                               }),
                  Error);
}
