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

// Plain-text beam matrix files.
//
//   # satbeam beam matrix
//   kind=robust
//   N=16
//   K=8
//   alpha=...
//   epsilon_h=...
//   alpha_clamped=false
//   re,im,re,im,...      (one line per row of B, N pairs)
//
// Numbers are written with 17 significant digits, so a reload reproduces
// every entry bit for bit.

#pragma once

#include "satbeam/beam_design.hpp"

#include <filesystem>
#include <iosfwd>

namespace satbeam {

struct BeamMatrixFile {
  BeamMatrix<double> matrix;
  double alpha = 0;
  double epsilon_h = 0;
  bool alpha_clamped = false;
};

void write_beam_matrix(std::ostream& out, const BeamMatrixFile& file);
BeamMatrixFile read_beam_matrix(std::istream& in, const std::string& source = "<stream>");

void save_beam_matrix(const std::filesystem::path& path, const BeamMatrixFile& file);
BeamMatrixFile load_beam_matrix(const std::filesystem::path& path);

}  // namespace satbeam
