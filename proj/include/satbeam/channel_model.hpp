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

// Synthetic multibeam user-link channels H = G D.
//
// G (N feeds x K users) carries the feed radiation pattern, free-space loss and
// receiver-noise normalization; D (K x K, diagonal) carries per-beam rain
// attenuation. The feed pattern is a Gaussian-beam surrogate
//
//     a(theta) = exp(-ln 2 * (theta / theta_3dB)^2),
//
// evaluated on the angular distance between a feed boresight and a user. Beams
// sit on a hexagonal lattice and feeds on a finer hexagonal lattice overlaying
// them, so N > K.

#pragma once

#include "satbeam/core.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <variant>

namespace satbeam {

template <class Real>
using Point2 = Eigen::Matrix<Real, 2, 1>;

inline constexpr double speed_of_light = 299792458.0;
inline constexpr double boltzmann_constant = 1.380649e-23;
inline constexpr double earth_radius = 6371.0e3;
inline constexpr double geo_altitude = 35786.0e3;

template <class Real>
struct RfParams {
  Real carrier_freq = Real(20e9);
  Real bandwidth = Real(500e6);
  Real rx_antenna_gain = Real(1);
  Real rx_noise_temp = Real(290);
  Real boltzmann = Real(boltzmann_constant);
  Real fl_scale = Real(1);
  bool path_phase = false;  // add exp(-j 2 pi d_k / lambda) to column k

  Real wavelength() const { return Real(speed_of_light) / carrier_freq; }

  void validate() const {
    require(carrier_freq > 0 && bandwidth > 0 && rx_antenna_gain > 0 && rx_noise_temp > 0 && boltzmann > 0 &&
                fl_scale > 0,
            ErrorCode::invalid_argument, "RfParams: all parameters must be strictly positive");
  }
};

template <class Real>
struct BeamGeometry {
  std::vector<Point2<Real>> feed_positions;  // feed boresights, rad
  std::vector<Point2<Real>> beam_centers;    // rad
  Real beam_radius = Real(0);
  Real feed_pattern_width = Real(0);  // 3 dB half-width, rad
  Real reference_width = Real(0);     // Gaussian weighting width of the reference design, rad
  Real altitude = Real(geo_altitude);
  Real coverage_offset = Real(0);  // off-nadir angle of the coverage origin, rad

  Eigen::Index num_feeds() const { return static_cast<Eigen::Index>(feed_positions.size()); }
  Eigen::Index num_beams() const { return static_cast<Eigen::Index>(beam_centers.size()); }

  void validate() const {
    require(num_beams() >= 1, ErrorCode::invalid_argument, "BeamGeometry: at least one beam required");
    require(num_beams() < num_feeds(), ErrorCode::invalid_argument, "BeamGeometry: K < N required");
    require(beam_radius > 0, ErrorCode::invalid_argument, "BeamGeometry: beam_radius must be positive");
    require(feed_pattern_width > 0, ErrorCode::invalid_argument, "BeamGeometry: feed_pattern_width must be positive");
    require(reference_width >= 0, ErrorCode::invalid_argument, "BeamGeometry: reference_width must be nonnegative");
    require(altitude > 0, ErrorCode::invalid_argument, "BeamGeometry: altitude must be positive");
  }
};

/// The `count` points of a hexagonal lattice with the given spacing closest to
/// the origin, ordered by radius and then by polar angle.
template <class Real>
std::vector<Point2<Real>> hex_lattice(Eigen::Index count, Real spacing) {
  require(count >= 0 && spacing > 0, ErrorCode::invalid_argument, "hex_lattice: bad arguments");
  std::vector<Point2<Real>> points;
  long rings = 1;
  while (1 + 3 * rings * (rings + 1) < count) ++rings;
  const Real h = std::sqrt(Real(3)) / Real(2);
  for (long j = -rings; j <= rings; ++j) {
    for (long i = -rings; i <= rings; ++i) {
      if (std::abs(i + j) > rings) continue;
      points.emplace_back(spacing * (Real(i) + Real(j) / Real(2)), spacing * h * Real(j));
    }
  }
  const Real eps = spacing * Real(1e-9);
  std::stable_sort(points.begin(), points.end(), [&](const Point2<Real>& a, const Point2<Real>& b) {
    const Real ra = a.norm(), rb = b.norm();
    if (std::abs(ra - rb) > eps) return ra < rb;
    return std::atan2(a.y(), a.x()) < std::atan2(b.y(), b.x());
  });
  points.resize(static_cast<std::size_t>(count));
  return points;
}

/// Hexagonal beam lattice (spacing sqrt(3)·beam_radius, so the discs cover the
/// plane) with a feed lattice whose cell area is K/N of the beam cell area.
/// Feed pattern width defaults to the feed spacing, the reference weighting
/// width to half of it.
template <class Real>
BeamGeometry<Real> make_hex_geometry(Eigen::Index num_feeds, Eigen::Index num_beams, Real beam_radius) {
  require(num_beams >= 1 && num_beams < num_feeds, ErrorCode::invalid_argument, "make_hex_geometry: K < N required");
  require(beam_radius > 0, ErrorCode::invalid_argument, "make_hex_geometry: beam_radius must be positive");
  const Real beam_spacing = std::sqrt(Real(3)) * beam_radius;
  const Real feed_spacing = beam_spacing * std::sqrt(Real(num_beams) / Real(num_feeds));
  BeamGeometry<Real> g;
  g.beam_centers = hex_lattice<Real>(num_beams, beam_spacing);
  g.feed_positions = hex_lattice<Real>(num_feeds, feed_spacing);
  g.beam_radius = beam_radius;
  g.feed_pattern_width = feed_spacing;
  g.reference_width = feed_spacing / Real(2);
  return g;
}

template <class Real>
Real feed_pattern(Real angle, Real width_3db) {
  const Real x = angle / width_3db;
  return std::exp(-std::numbers::ln2_v<Real> * x * x);
}

/// Slant range from the satellite to a point seen at off-nadir angle `theta`.
template <class Real>
Real slant_range(Real theta, Real altitude) {
  const Real re = Real(earth_radius);
  const Real rs = re + altitude;
  const Real s = std::sin(theta);
  const Real disc = re * re - rs * rs * s * s;
  require(disc >= 0, ErrorCode::invalid_argument, "slant_range: line of sight misses the Earth");
  return rs * std::cos(theta) - std::sqrt(disc);
}

template <class Real>
struct UserDrop {
  std::vector<Point2<Real>> positions;  // one per beam, rad
  RVector<Real> distances;              // m
};

template <class Real>
struct GainMatrix {
  CMatrix<Real> values;  // N x K
  bool normalized = false;
};

template <class Real>
struct FadingDiag {
  RVector<Real> values;  // amplitude-domain diagonal of D
};

template <class Real>
struct Channel {
  CMatrix<Real> values;  // N x K
};

template <class Real>
struct RainParams {
  Real mean_db = Real(2);
  Real std_db = Real(1);
  Real rain_prob = Real(0.2);
};

template <class Real>
struct PerturbationSample {
  CMatrix<Real> delta;
  Real norm = Real(0);
};

/// Empirical mean channel, its uncertainty radius and the descending
/// eigendecomposition of mean·meanᴴ.
template <class Real>
struct NominalChannel {
  CMatrix<Real> mean;          // N x K
  Real alpha = Real(0);        // Frobenius radius
  CMatrix<Real> eig_vectors;   // N x N unitary
  RVector<Real> eig_values;    // N, descending, nonnegative
  Eigen::Index rank = 0;

  Eigen::Index num_feeds() const { return mean.rows(); }
  Eigen::Index num_beams() const { return mean.cols(); }
};

/// Uniform position in every beam disc; distances from the orbital geometry.
template <class Real>
UserDrop<Real> sample_user_drop(const BeamGeometry<Real>& geometry, Rng& rng) {
  geometry.validate();
  std::uniform_real_distribution<Real> uni(Real(0), Real(1));
  const Eigen::Index k = geometry.num_beams();
  UserDrop<Real> drop{{}, RVector<Real>(k)};
  drop.positions.reserve(static_cast<std::size_t>(k));
  const Point2<Real> origin(geometry.coverage_offset, Real(0));
  for (Eigen::Index i = 0; i < k; ++i) {
    const Real r = geometry.beam_radius * std::sqrt(uni(rng));
    const Real phi = Real(2) * std::numbers::pi_v<Real> * uni(rng);
    const Point2<Real> p = geometry.beam_centers[static_cast<std::size_t>(i)] + Point2<Real>(r * std::cos(phi), r * std::sin(phi));
    drop.positions.push_back(p);
    drop.distances(i) = slant_range((p + origin).norm(), geometry.altitude);
  }
  return drop;
}

/// Unnormalized gain matrix: G(n,k) = G_R a_kn / (4 pi (d_k / lambda) sqrt(K_B T_R B_W)).
template <class Real>
GainMatrix<Real> build_gain_matrix(const BeamGeometry<Real>& geometry, const UserDrop<Real>& drop,
                                   const RfParams<Real>& rf) {
  rf.validate();
  const Eigen::Index n = geometry.num_feeds();
  const Eigen::Index k = geometry.num_beams();
  require(static_cast<Eigen::Index>(drop.positions.size()) == k && drop.distances.size() == k,
          ErrorCode::dimension_mismatch, "build_gain_matrix: drop must hold one user per beam");
  require(geometry.feed_pattern_width > 0, ErrorCode::invalid_argument,
          "build_gain_matrix: feed_pattern_width must be positive");
  require((drop.distances.array() > 0).all(), ErrorCode::invalid_argument,
          "build_gain_matrix: distances must be positive");
  const Real lambda = rf.wavelength();
  const Real noise = std::sqrt(rf.boltzmann * rf.rx_noise_temp * rf.bandwidth);
  const Real four_pi = Real(4) * std::numbers::pi_v<Real>;
  GainMatrix<Real> g{CMatrix<Real>(n, k), false};
  for (Eigen::Index col = 0; col < k; ++col) {
    const Real d = drop.distances(col);
    const Real path = rf.rx_antenna_gain / (four_pi * (d / lambda) * noise);
    Complex<Real> phase(1, 0);
    if (rf.path_phase) {
      const Real cycles = d / lambda;
      phase = std::polar(Real(1), -Real(2) * std::numbers::pi_v<Real> * (cycles - std::floor(cycles)));
    }
    const Point2<Real>& user = drop.positions[static_cast<std::size_t>(col)];
    for (Eigen::Index row = 0; row < n; ++row) {
      const Real angle = (user - geometry.feed_positions[static_cast<std::size_t>(row)]).norm();
      g.values(row, col) = phase * (path * feed_pattern(angle, geometry.feed_pattern_width));
    }
  }
  return g;
}

/// Per-entry mean power E|g_nk|² over an ensemble of gain matrices.
template <class Real>
RMatrix<Real> gain_power_stats(std::span<const GainMatrix<Real>> ensemble) {
  require(!ensemble.empty(), ErrorCode::empty_input, "gain_power_stats: empty ensemble");
  RMatrix<Real> acc = RMatrix<Real>::Zero(ensemble.front().values.rows(), ensemble.front().values.cols());
  for (const auto& g : ensemble) {
    require(g.values.rows() == acc.rows() && g.values.cols() == acc.cols(), ErrorCode::dimension_mismatch,
            "gain_power_stats: inconsistent dimensions");
    acc += g.values.cwiseAbs2();
  }
  return acc / Real(ensemble.size());
}

/// Entry-wise division by sqrt(stats). A matrix already flagged normalized is
/// returned unchanged.
template <class Real>
GainMatrix<Real> normalize_gain(const GainMatrix<Real>& g, const RMatrix<Real>& stats) {
  if (g.normalized) return g;
  require(stats.rows() == g.values.rows() && stats.cols() == g.values.cols(), ErrorCode::dimension_mismatch,
          "normalize_gain: stats must match G");
  require((stats.array() > 0).all(), ErrorCode::invalid_argument, "normalize_gain: zero variance entry");
  GainMatrix<Real> out{g.values.cwiseQuotient(stats.cwiseSqrt().template cast<Complex<Real>>()), true};
  return out;
}

/// Each entry is 1 (clear sky) with probability 1 - rain_prob, otherwise
/// 10^(-A/20) with A lognormal having mean mean_db and standard deviation
/// std_db (both in dB).
template <class Real>
FadingDiag<Real> sample_fading(Eigen::Index k, const RainParams<Real>& rain, Rng& rng) {
  require(rain.std_db >= 0, ErrorCode::invalid_argument, "sample_fading: std_db must be nonnegative");
  require(rain.rain_prob >= 0 && rain.rain_prob <= 1, ErrorCode::invalid_argument,
          "sample_fading: rain_prob must lie in [0, 1]");
  FadingDiag<Real> d{RVector<Real>::Ones(k)};
  if (rain.rain_prob == 0) return d;
  require(rain.mean_db > 0, ErrorCode::invalid_argument, "sample_fading: mean_db must be positive");
  const Real ratio = rain.std_db / rain.mean_db;
  const Real sigma = std::sqrt(std::log1p(ratio * ratio));
  const Real mu = std::log(rain.mean_db) - sigma * sigma / Real(2);
  std::uniform_real_distribution<Real> uni(Real(0), Real(1));
  std::normal_distribution<Real> normal(Real(0), Real(1));
  for (Eigen::Index i = 0; i < k; ++i) {
    const bool raining = uni(rng) < rain.rain_prob;
    const Real z = normal(rng);
    if (raining) {
      const Real attenuation_db = std::exp(mu + sigma * z);
      d.values(i) = std::pow(Real(10), -attenuation_db / Real(20));
    }
  }
  return d;
}

/// Column k of H is column k of G scaled by D_kk.
template <class Real>
Channel<Real> assemble_channel(const GainMatrix<Real>& g, const FadingDiag<Real>& d) {
  require(g.normalized, ErrorCode::invalid_argument, "assemble_channel: G must be normalized");
  require(g.values.cols() == d.values.size(), ErrorCode::dimension_mismatch,
          "assemble_channel: D must have one entry per user");
  return Channel<Real>{g.values * d.values.template cast<Complex<Real>>().asDiagonal()};
}

/// Uniform sample from the Frobenius ball of radius `alpha` in C^{N x K}.
template <class Real>
PerturbationSample<Real> sample_in_ball(Eigen::Index n, Eigen::Index k, Real alpha, Rng& rng) {
  require(alpha >= 0, ErrorCode::invalid_argument, "sample_in_ball: alpha must be nonnegative");
  std::normal_distribution<Real> g(Real(0), Real(1));
  std::uniform_real_distribution<Real> uni(Real(0), Real(1));
  CMatrix<Real> dir(n, k);
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index r = 0; r < n; ++r) dir(r, c) = Complex<Real>(g(rng), g(rng));
  const Real dims = Real(2 * n * k);
  const Real radius = alpha * std::pow(uni(rng), Real(1) / dims);
  PerturbationSample<Real> s;
  s.delta = dir * (radius / dir.norm());
  s.norm = s.delta.norm();
  // rounding can push the norm a hair past alpha
  if (s.norm > alpha) {
    s.delta *= alpha / s.norm;
    s.norm = s.delta.norm();
    if (s.norm > alpha) s.delta *= Real(1) - std::numeric_limits<Real>::epsilon() * Real(4);
    s.norm = s.delta.norm();
  }
  return s;
}

struct AlphaMax {};
struct AlphaQuantile {
  double q = 0.95;
};
using AlphaMode = std::variant<AlphaMax, AlphaQuantile>;

template <class Real>
NominalChannel<Real> make_nominal(CMatrix<Real> mean, Real alpha) {
  NominalChannel<Real> nominal;
  nominal.mean = std::move(mean);
  nominal.alpha = alpha;
  auto eig = hermitian_eig_descending<Real>(nominal.mean * nominal.mean.adjoint());
  nominal.eig_vectors = std::move(eig.vectors);
  nominal.eig_values = eig.values.cwiseMax(Real(0));
  const Real top = nominal.eig_values.size() ? nominal.eig_values(0) : Real(0);
  const Real tol = top * Real(1e-10);
  nominal.rank = 0;
  for (Eigen::Index i = 0; i < nominal.eig_values.size(); ++i)
    if (nominal.eig_values(i) > tol && top > 0) ++nominal.rank;
  nominal.rank = std::min(nominal.rank, nominal.num_beams());
  return nominal;
}

/// Entry-wise mean of the ensemble, alpha = max (or q-quantile) of the
/// Frobenius deviations from that mean.
template <class Real>
NominalChannel<Real> estimate_nominal(std::span<const Channel<Real>> ensemble, const AlphaMode& mode = AlphaMax{}) {
  require(!ensemble.empty(), ErrorCode::empty_input, "estimate_nominal: empty ensemble");
  const auto rows = ensemble.front().values.rows();
  const auto cols = ensemble.front().values.cols();
  CMatrix<Real> mean = CMatrix<Real>::Zero(rows, cols);
  for (const auto& h : ensemble) {
    require(h.values.rows() == rows && h.values.cols() == cols, ErrorCode::dimension_mismatch,
            "estimate_nominal: inconsistent channel dimensions");
    mean += h.values;
  }
  mean /= Real(ensemble.size());
  std::vector<Real> deviations;
  deviations.reserve(ensemble.size());
  for (const auto& h : ensemble) deviations.push_back((h.values - mean).norm());
  Real alpha = Real(0);
  if (std::holds_alternative<AlphaMax>(mode)) {
    alpha = *std::max_element(deviations.begin(), deviations.end());
  } else {
    const double q = std::get<AlphaQuantile>(mode).q;
    require(q >= 0 && q <= 1, ErrorCode::invalid_argument, "estimate_nominal: quantile must lie in [0, 1]");
    std::sort(deviations.begin(), deviations.end());
    const double pos = q * double(deviations.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, deviations.size() - 1);
    const Real frac = Real(pos - double(lo));
    alpha = deviations[lo] + frac * (deviations[hi] - deviations[lo]);
  }
  return make_nominal<Real>(std::move(mean), alpha);
}

}  // namespace satbeam
