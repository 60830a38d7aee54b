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

#include "satbeam/matrix_io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

namespace satbeam {

namespace {

double parse_number(std::string_view text, const std::string& where) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  require(ec == std::errc() && ptr == text.data() + text.size(), ErrorCode::parse_error,
          where + ": invalid number '" + std::string(text) + "'");
  return v;
}

long parse_count(const std::string& text, const std::string& where) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  require(ec == std::errc() && ptr == text.data() + text.size() && v > 0, ErrorCode::parse_error,
          where + ": invalid dimension '" + text + "'");
  return v;
}

}  // namespace

void write_beam_matrix(std::ostream& out, const BeamMatrixFile& file) {
  const auto& b = file.matrix.values;
  out << "# satbeam beam matrix\n";
  out << "kind=" << to_string(file.matrix.kind) << '\n';
  out << "N=" << b.cols() << '\n';
  out << "K=" << b.rows() << '\n';
  out << fmt::format("alpha={:.17g}\n", file.alpha);
  out << fmt::format("epsilon_h={:.17g}\n", file.epsilon_h);
  out << "alpha_clamped=" << (file.alpha_clamped ? "true" : "false") << '\n';
  for (Eigen::Index r = 0; r < b.rows(); ++r) {
    std::string line;
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
      if (c > 0) line += ',';
      line += fmt::format("{:.17g},{:.17g}", b(r, c).real(), b(r, c).imag());
    }
    out << line << '\n';
  }
}

BeamMatrixFile read_beam_matrix(std::istream& in, const std::string& source) {
  std::map<std::string, std::string> header;
  std::vector<std::string> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      require(rows.empty(), ErrorCode::parse_error, source + ":" + std::to_string(line_no) + ": header after data");
      header[line.substr(0, eq)] = line.substr(eq + 1);
    } else {
      rows.push_back(line);
    }
  }
  for (const char* key : {"kind", "N", "K", "alpha", "epsilon_h", "alpha_clamped"})
    require(header.count(key) == 1, ErrorCode::parse_error, source + ": missing header field '" + key + "'");

  BeamMatrixFile file;
  file.matrix.kind = parse_design_kind(header["kind"]);
  const long n = parse_count(header["N"], source);
  const long k = parse_count(header["K"], source);
  file.alpha = parse_number(header["alpha"], source);
  file.epsilon_h = parse_number(header["epsilon_h"], source);
  require(header["alpha_clamped"] == "true" || header["alpha_clamped"] == "false", ErrorCode::parse_error,
          source + ": alpha_clamped must be true or false");
  file.alpha_clamped = header["alpha_clamped"] == "true";
  require(static_cast<long>(rows.size()) == k, ErrorCode::parse_error,
          source + ": expected " + std::to_string(k) + " rows, found " + std::to_string(rows.size()));

  file.matrix.values.resize(k, n);
  for (long r = 0; r < k; ++r) {
    const std::string where = source + ": row " + std::to_string(r + 1);
    std::vector<double> values;
    std::string_view rest(rows[static_cast<std::size_t>(r)]);
    while (true) {
      const auto comma = rest.find(',');
      values.push_back(parse_number(rest.substr(0, comma), where));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    require(static_cast<long>(values.size()) == 2 * n, ErrorCode::parse_error,
            where + ": expected " + std::to_string(2 * n) + " numbers");
    for (long c = 0; c < n; ++c)
      file.matrix.values(r, c) = Complex<double>(values[static_cast<std::size_t>(2 * c)],
                                                 values[static_cast<std::size_t>(2 * c + 1)]);
  }
  return file;
}

void save_beam_matrix(const std::filesystem::path& path, const BeamMatrixFile& file) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::io_error, "cannot write " + path.string());
  write_beam_matrix(out, file);
  require(out.good(), ErrorCode::io_error, "write failed for " + path.string());
}

BeamMatrixFile load_beam_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io_error, "cannot open " + path.string());
  return read_beam_matrix(in, path.string());
}

}  // namespace satbeam
