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

// satbeam command-line front end: design, simulate, sweep, validate, export.

#include "satbeam/satbeam.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

using namespace satbeam;

struct CommonOptions {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  std::string designs;
  std::string direction;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--scenario", o.scenario, "Scenario file (defaults apply when omitted)")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Output directory (default: $SATBEAM_OUT or ./satbeam_out)");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--set,--override", o.overrides, "Override a scenario key, key=value (repeatable)")->allow_extra_args(false);
  cmd->add_option("--designs", o.designs, "Comma-separated designs");
  cmd->add_option("--direction", o.direction, "Link direction")->check(CLI::IsMember({"return", "forward", "both"}));
}

Scenario resolve(const CommonOptions& o) {
  std::vector<std::string> overrides = o.overrides;
  if (o.seed) overrides.push_back(fmt::format("simulation.seed={}", *o.seed));
  if (!o.designs.empty()) overrides.push_back("simulation.designs=" + o.designs);
  if (!o.direction.empty()) overrides.push_back("simulation.direction=" + o.direction);
  return o.scenario.empty() ? default_scenario(overrides) : load_scenario(o.scenario, overrides);
}

std::filesystem::path output_dir(const CommonOptions& o) {
  std::filesystem::path dir = o.out;
  if (dir.empty()) {
    const char* env = std::getenv("SATBEAM_OUT");
    dir = env != nullptr && *env != '\0' ? env : "satbeam_out";
  }
  std::filesystem::create_directories(dir);
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::io_error, "cannot write " + path.string());
  out << text;
}

template <class Writer>
void write_with(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::io_error, "cannot write " + path.string());
  writer(out);
  require(out.good(), ErrorCode::io_error, "write failed for " + path.string());
}

void print_summary(const std::vector<RunRecord>& records) {
  fmt::print("{:<20} {:<8} {:<6} {:>10} {:>12} {:>10} {:>10}\n", "design", "link", "param", "value",
             "throughput", "avail[%]", "shannon");
  for (const auto& r : records) {
    if (r.metrics) {
      fmt::print("{:<20} {:<8} {:<6} {:>10.4g} {:>12.3f} {:>10.1f} {:>10.3f}\n", r.design, to_string(r.direction),
                 r.sweep_param, r.sweep_value, r.metrics->mean_throughput, 100 * r.metrics->availability,
                 r.metrics->shannon_mean);
    } else {
      fmt::print("{:<20} {:<8} {:<6} {:>10.4g} {:>12} {:>10} {:>10}  ({})\n", r.design, to_string(r.direction),
                 r.sweep_param, r.sweep_value, "NA", "NA", "NA", r.note);
    }
  }
}

int count_failures(const std::vector<RunRecord>& records) {
  int n = 0;
  for (const auto& r : records) {
    if (!r.metrics) {
      std::cerr << "satbeam: design " << r.design << " failed: " << r.note << '\n';
      ++n;
    }
  }
  return n;
}

int cmd_design(const CommonOptions& o, const std::string& kind_name) {
  const DesignKind kind = parse_design_kind(kind_name);
  if (kind == DesignKind::adaptive) {
    std::cerr << "satbeam design: the adaptive design needs a concrete channel realization and cannot be built "
                 "from the nominal channel alone\n";
    return 2;
  }
  const Scenario scenario = resolve(o);
  const auto dir = output_dir(o);
  write_text(dir / "manifest.json", manifest_json(scenario, "design " + kind_name));
  const Calibration cal = calibrate(scenario);
  const RobustSurrogate<double> sur = robust_surrogate(cal.nominal);
  NominalChannel<double> nominal = cal.nominal;
  nominal.alpha = sur.alpha_used;
  BeamMatrixFile file;
  switch (kind) {
    case DesignKind::reference: file.matrix = design_reference(scenario.geometry); break;
    case DesignKind::robust: file.matrix = design_robust(nominal); break;
    case DesignKind::perturbation_aware:
      file.matrix = design_perturbation_aware(
          nominal, scenario.dz_empirical ? DeltaZMode<double>{cal.delta_z} : DeltaZMode<double>{IsotropicDeltaZ{}});
      break;
    case DesignKind::adaptive: break;
  }
  file.alpha = sur.alpha_used;
  file.epsilon_h = sur.epsilon_h;
  file.alpha_clamped = sur.alpha_clamped;
  const auto path = dir / fmt::format("design_{}.txt", kind_name);
  write_text(dir / "calibration.json", calibration_json(cal, &sur));
  save_beam_matrix(path, file);
  fmt::print("design            {}\n", kind_name);
  fmt::print("epsilon_h         {:.6e}\n", sur.epsilon_h);
  fmt::print("alpha (estimated) {:.6e}\n", cal.nominal.alpha);
  fmt::print("alpha (used)      {:.6e}{}\n", sur.alpha_used, sur.alpha_clamped ? "  [clamped]" : "");
  fmt::print("orthonormality    {:.3e}\n", check_orthonormal(file.matrix));
  if (file.matrix.degenerate_fallback) fmt::print("note              eigenvalue gap too small, robust fallback\n");
  fmt::print("written           {}\n", path.string());
  return 0;
}

int cmd_simulate(const CommonOptions& o) {
  const Scenario scenario = resolve(o);
  const auto dir = output_dir(o);
  write_text(dir / "manifest.json", manifest_json(scenario, "simulate"));
  const Calibration cal = calibrate(scenario);
  std::optional<RobustSurrogate<double>> sur;
  try {
    sur = robust_surrogate(cal.nominal);
  } catch (const Error&) {
  }
  write_text(dir / "calibration.json", calibration_json(cal, sur ? &*sur : nullptr));
  const auto records = evaluate(scenario, cal);
  write_with(dir / "results.csv", [&](std::ostream& out) { write_results_csv(out, records, scenario.seed); });
  write_with(dir / "plot.csv", [&](std::ostream& out) { write_plot_csv(out, records); });
  print_summary(records);
  return count_failures(records) == 0 ? 0 : 1;
}

int cmd_sweep(const CommonOptions& o) {
  const Scenario scenario = resolve(o);
  const auto dir = output_dir(o);
  write_text(dir / "manifest.json", manifest_json(scenario, "sweep"));
  const Calibration cal = calibrate(scenario);
  const RobustSurrogate<double> sur = robust_surrogate(cal.nominal);
  write_text(dir / "calibration.json", calibration_json(cal, &sur));
  const auto records = sweep_alpha(scenario, cal);
  write_with(dir / "alpha_sweep.csv", [&](std::ostream& out) { write_results_csv(out, records, scenario.seed); });
  write_with(dir / "alpha_sweep_plot.csv", [&](std::ostream& out) { write_plot_csv(out, records); });
  print_summary(records);
  return count_failures(records) == 0 ? 0 : 1;
}

int cmd_validate(const CommonOptions& o, bool inject_fault) {
  const Scenario scenario = resolve(o);
  const auto dir = output_dir(o);
  write_text(dir / "manifest.json", manifest_json(scenario, inject_fault ? "validate --inject-fault" : "validate"));
  ValidationOptions options;
  options.seed = scenario.seed;
  options.inject_fault = inject_fault;
  const ValidationReport report = run_validation(scenario, options);
  write_text(dir / "validation.json", report.to_json());
  for (const auto& p : report.properties) {
    const char* status = p.informational ? "INFO" : (p.passed ? "PASS" : "FAIL");
    fmt::print("{:<4} {:<24} checks={:<7} violations={:<6} worst={:.3e}  [{}]{}\n", status, p.name, p.checks,
               p.violations, p.worst, p.formula, p.detail.empty() ? "" : "  " + p.detail);
  }
  fmt::print("{}\n", report.all_passed() ? "validation passed" : "validation FAILED");
  return report.all_passed() ? 0 : 1;
}

int cmd_export(const CommonOptions& o, const std::string& input) {
  const auto dir = output_dir(o);
  const std::filesystem::path in_path = input.empty() ? dir / "results.csv" : std::filesystem::path(input);
  std::ifstream in(in_path);
  require(in.good(), ErrorCode::io_error, "cannot open " + in_path.string());
  const auto records = read_results_csv(in);
  const auto out_path = dir / (in_path.stem().string() + "_plot.csv");
  write_with(out_path, [&](std::ostream& out) { write_plot_csv(out, records); });
  fmt::print("wrote {} rows to {}\n", records.size(), out_path.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"satbeam: fixed on-board beam generation for multibeam satellites"};
  app.require_subcommand(1);

  CommonOptions design_opts, sim_opts, sweep_opts, val_opts, export_opts;
  std::string kind = "robust";
  bool inject_fault = false;
  std::string export_input;

  auto* design = app.add_subcommand("design", "Compute a beam-generation matrix and write it to a file");
  add_common(design, design_opts);
  design->add_option("--kind", kind, "Design kind")
      ->check(CLI::IsMember({"reference", "adaptive", "robust", "perturbation_aware"}));
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo evaluation over the beta and P_FL sweeps");
  add_common(simulate, sim_opts);
  auto* sweep = app.add_subcommand("sweep", "Evaluation over the alpha grid with ball-sampled channels");
  add_common(sweep, sweep_opts);
  auto* validate = app.add_subcommand("validate", "Run the property suite");
  add_common(validate, val_opts);
  validate->add_flag("--inject-fault", inject_fault, "Scale every design by 1.01 to exercise failure reporting");
  auto* exporter = app.add_subcommand("export", "Convert a results CSV into the long-format plot table");
  add_common(exporter, export_opts);
  exporter->add_option("--input", export_input, "Results CSV (default: <out>/results.csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (design->parsed()) return cmd_design(design_opts, kind);
    if (simulate->parsed()) return cmd_simulate(sim_opts);
    if (sweep->parsed()) return cmd_sweep(sweep_opts);
    if (validate->parsed()) return cmd_validate(val_opts, inject_fault);
    if (exporter->parsed()) return cmd_export(export_opts, export_input);
  } catch (const satbeam::Error& e) {
    std::cerr << "satbeam: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "satbeam: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
