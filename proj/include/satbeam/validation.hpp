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

// Self-check suite behind `satbeam validate`. Each property is exercised on
// randomized desk-scale instances (plus the scenario's calibrated nominal
// where it applies) and reported with the formula it checks.

#pragma once

#include "satbeam/harness.hpp"

#include <string>
#include <vector>

namespace satbeam {

struct ValidationOptions {
  std::uint64_t seed = 1;
  bool inject_fault = false;  // scale every design by 1.01 before the orthonormality check
  int nominals = 20;
  int samples_per_nominal = 200;
  int random_instances = 200;
  int candidates = 200;
};

struct PropertyResult {
  PropertyResult() = default;
  PropertyResult(std::string name_, std::string formula_) : name(std::move(name_)), formula(std::move(formula_)) {}

  std::string name;
  std::string formula;
  bool passed = true;
  bool informational = false;  // reported, never fails the run
  long checks = 0;
  long violations = 0;
  double worst = 0;  // largest observed deviation in the property's own units
  std::string detail;
};

struct ValidationReport {
  std::vector<PropertyResult> properties;
  bool all_passed() const;
  std::string to_json() const;
};

ValidationReport run_validation(const Scenario& scenario, const ValidationOptions& options);

}  // namespace satbeam
