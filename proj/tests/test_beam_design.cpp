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

#include "oracles.hpp"

#include <catch_amalgamated.hpp>

using namespace satbeam;
using CM = CMatrix<double>;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

NominalChannel<double> random_nominal(Eigen::Index n, Eigen::Index k, double alpha, Rng& rng) {
  return make_nominal<double>(random_complex_gaussian<double>(n, k, rng), alpha);
}

/// Feasible radius: largest alpha keeping lambda_K - 2 alpha sigma_max positive.
double alpha_limit(const NominalChannel<double>& nominal) {
  const Eigen::Index k = nominal.num_beams();
  return nominal.eig_values(k - 1) / (2 * std::sqrt(nominal.eig_values(0)));
}

CM embedded_diagonal(Eigen::Index n, const std::vector<double>& diag) {
  CM h = CM::Zero(n, static_cast<Eigen::Index>(diag.size()));
  for (std::size_t i = 0; i < diag.size(); ++i) h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag[i];
  return h;
}

/// |B| equals [I_K | 0] entry-wise.
bool is_leading_selection(const CM& b) {
  CM target = CM::Zero(b.rows(), b.cols());
  target.leftCols(b.rows()).setIdentity();
  return (b.cwiseAbs() - target.cwiseAbs()).cwiseAbs().maxCoeff() <= 1e-12;
}

double return_smse(const CM& b, const CM& h, double beta) {
  return return_mse(BeamMatrix<double>{b}, Channel<double>{h}, ReturnLinkParams<double>{beta}).smse;
}

}  // namespace

TEST_CASE("check_orthonormal basic values", "[design]") {
  CM b = CM::Zero(3, 5);
  b.leftCols(3).setIdentity();
  CHECK(check_orthonormal(BeamMatrix<double>{b}) == 0.0);
  CHECK_THAT(check_orthonormal(BeamMatrix<double>{CM(2.0 * b)}), WithinAbs(3.0, 1e-15));
}

TEST_CASE("design kinds round trip through their names", "[design]") {
  for (auto kind : {DesignKind::reference, DesignKind::adaptive, DesignKind::robust, DesignKind::perturbation_aware})
    CHECK(parse_design_kind(to_string(kind)) == kind);
  CHECK_THROWS_AS(parse_design_kind("optimal"), Error);
}

TEST_CASE("design_reference selects feeds under delta weighting", "[design]") {
  BeamGeometry<double> g;
  g.feed_positions = {{0.0, 0.0}, {0.01, 0.0}, {0.0, 0.01}, {0.02, 0.02}, {-0.01, 0.0}};
  g.beam_centers = {{0.01, 0.0}, {0.02, 0.02}, {-0.01, 0.0}};
  g.beam_radius = 0.003;
  g.feed_pattern_width = 0.005;
  g.reference_width = 0;
  const auto b = design_reference(g);
  CM expected = CM::Zero(3, 5);
  expected(0, 1) = expected(1, 3) = expected(2, 4) = 1.0;
  CHECK(max_abs<double>(CM(b.values - expected)) <= 1e-15);
  CHECK(b.kind == DesignKind::reference);
}

TEST_CASE("design_reference preserves the weighted row space", "[design]") {
  BeamGeometry<double> g;
  g.feed_positions = {{0.0, 0.0}, {0.004, 0.0}, {0.0, 0.004}, {-0.003, -0.002}};
  g.beam_centers = {{0.001, 0.001}, {-0.002, 0.0}};
  g.beam_radius = 0.002;
  g.feed_pattern_width = 0.003;
  g.reference_width = 0.0025;
  CM w(2, 4);
  for (int k = 0; k < 2; ++k)
    for (int n = 0; n < 4; ++n) {
      const double x = (g.beam_centers[k] - g.feed_positions[n]).norm() / g.reference_width;
      w(k, n) = std::exp(-std::log(2.0) * x * x);
    }
  const auto b = design_reference(g);
  CHECK(check_orthonormal(b) <= 1e-10);
  CHECK(max_abs<double>(CM(oracle::row_space_projector(w) - oracle::row_space_projector(b.values))) <= 1e-10);
}

TEST_CASE("design_reference is orthonormal on lattice geometries", "[design]") {
  for (auto [n, k] : {std::pair<Eigen::Index, Eigen::Index>{16, 8}, {7, 3}, {40, 19}, {155, 100}}) {
    const auto b = design_reference(make_hex_geometry<double>(n, k, 0.0035));
    CHECK(b.values.rows() == k);
    CHECK(b.values.cols() == n);
    CHECK(check_orthonormal(b) <= 1e-10);
  }
}

TEST_CASE("design_reference reports collinear weights", "[design]") {
  BeamGeometry<double> g;
  g.feed_positions = {{0.0, 0.0}, {0.01, 0.0}, {0.02, 0.0}};
  g.beam_centers = {{0.0, 0.0}, {0.0, 0.0}};
  g.beam_radius = 0.003;
  g.feed_pattern_width = 0.005;
  g.reference_width = 0.004;
  try {
    design_reference(g);
    FAIL("expected rank_deficient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::rank_deficient);
  }
}

TEST_CASE("design_adaptive on a basis-aligned channel selects the leading feeds", "[design]") {
  const auto b = design_adaptive(Channel<double>{embedded_diagonal(6, {3.0, 2.0, 1.5})});
  CHECK(is_leading_selection(b.values));
  CHECK(b.kind == DesignKind::adaptive);
}

TEST_CASE("design_adaptive attains the on-ground MSE", "[design]") {
  for (int i = 0; i < 20; ++i) {
    Rng rng = make_stream(21, 0, static_cast<std::uint64_t>(i));
    const CM h = random_complex_gaussian<double>(12, 5, rng);
    const auto b = design_adaptive(Channel<double>{h});
    CHECK(check_orthonormal(b) <= 1e-10);
    for (double beta : {0.1, 1.0, 30.0}) {
      const double onboard = return_smse(b.values, h, beta);
      CHECK_THAT(onboard, WithinAbs(onground_return(Channel<double>{h}, ReturnLinkParams<double>{beta}).smse, 1e-9));
      CHECK_THAT(onboard, WithinAbs(oracle::mse_from_singular_values(h, beta), 1e-9));
    }
  }
}

TEST_CASE("design_adaptive beats random orthonormal beam matrices", "[design]") {
  Rng rng = make_stream(22, 0, 0);
  const CM h = random_complex_gaussian<double>(10, 4, rng);
  const double best = return_smse(design_adaptive(Channel<double>{h}).values, h, 2.0);
  for (int i = 0; i < 500; ++i) CHECK(return_smse(random_orthonormal_rows<double>(4, 10, rng), h, 2.0) >= best - 1e-12);
}

TEST_CASE("design_adaptive rejects rank-deficient channels", "[design]") {
  CHECK_THROWS_AS(design_adaptive(Channel<double>{embedded_diagonal(5, {1.0, 0.0})}), Error);
  CHECK_THROWS_AS(design_adaptive(Channel<double>{CM::Ones(2, 2)}), Error);
}

TEST_CASE("epsilon_h values", "[design]") {
  CHECK_THAT(epsilon_h(make_nominal<double>(embedded_diagonal(4, {1.0, 1.0}), 0.1)), WithinRel(0.2, 1e-12));
  Rng rng = make_stream(23, 0, 0);
  CHECK(epsilon_h(random_nominal(6, 3, 0.0, rng)) == 0.0);
  for (int i = 0; i < 20; ++i) {
    const auto nominal = random_nominal(9, 4, 0.37, rng);
    CHECK_THAT(epsilon_h(nominal), WithinRel(2 * 0.37 * oracle::largest_singular_value(nominal.mean), 1e-10));
  }
}

TEST_CASE("robust_surrogate with zero radius returns the nominal Gram matrix", "[design]") {
  Rng rng = make_stream(24, 0, 0);
  const auto nominal = random_nominal(8, 3, 0.0, rng);
  const auto s = robust_surrogate(nominal);
  CHECK_FALSE(s.alpha_clamped);
  CHECK(s.epsilon_h == 0.0);
  const CM gram = nominal.mean * nominal.mean.adjoint();
  CHECK(max_abs<double>(CM(s.z_breve - gram)) <= 1e-12 * max_abs<double>(gram));
}

TEST_CASE("robust_surrogate clamps an infeasible radius", "[design]") {
  // eigenvalues {4, 1}, alpha = 0.5 gives eps_H = 2 and a clipped spectrum {2, -1}
  const auto nominal = make_nominal<double>(embedded_diagonal(3, {2.0, 1.0}), 0.5);
  CHECK_THAT(epsilon_h(nominal), WithinRel(2.0, 1e-12));
  const auto s = robust_surrogate(nominal);
  CHECK(s.alpha_clamped);
  CHECK(s.alpha_used < 0.25);
  CHECK(s.alpha_used > 0.25 * (1 - 1e-5));
  CHECK(nominal.eig_values(1) - s.epsilon_h > 0);
  CHECK_THAT(s.epsilon_h, WithinRel(4 * s.alpha_used, 1e-12));
  const auto eig = hermitian_eig_descending<double>(s.z_breve);
  CHECK(eig.values(1) > 0);
  CHECK_THAT(eig.values(0), WithinRel(4.0 - s.epsilon_h, 1e-12));
}

TEST_CASE("robust_surrogate is feasible below the limit without clamping", "[design]") {
  Rng rng = make_stream(25, 0, 0);
  auto nominal = random_nominal(10, 4, 0.0, rng);
  nominal.alpha = 0.9 * alpha_limit(nominal);
  const auto s = robust_surrogate(nominal);
  CHECK_FALSE(s.alpha_clamped);
  CHECK(s.alpha_used == nominal.alpha);
}

TEST_CASE("robust_surrogate rejects channels without K positive eigenvalues", "[design]") {
  const auto zero = make_nominal<double>(CM::Zero(4, 2), 0.1);
  CHECK_THROWS_AS(robust_surrogate(zero), Error);
  try {
    robust_surrogate(zero);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::infeasible);
  }
  CHECK_THROWS_AS(robust_surrogate(make_nominal<double>(embedded_diagonal(4, {1.0, 0.0}), 0.1)), Error);
}

TEST_CASE("Zbreve bounds the MSE over the uncertainty ball", "[design]") {
  const double beta = 4.0;
  for (int i = 0; i < 5; ++i) {
    Rng rng = make_stream(26, 0, static_cast<std::uint64_t>(i));
    auto nominal = random_nominal(12, 5, 0.0, rng);
    nominal.alpha = 0.8 * alpha_limit(nominal);
    const auto s = robust_surrogate(nominal);
    const CM designs[] = {design_robust(nominal).values, random_orthonormal_rows<double>(5, 12, rng)};
    for (int j = 0; j < 1000; ++j) {
      const CM h = nominal.mean + sample_in_ball<double>(12, 5, s.alpha_used, rng).delta;
      const CM z = h * h.adjoint();
      for (const CM& b : designs)
        CHECK(surrogate_objective_return<double>(b, z, beta) <= surrogate_objective_return<double>(b, s.z_breve, beta) + 1e-12);
    }
  }
}

TEST_CASE("design_robust on a basis-aligned nominal selects the leading feeds", "[design]") {
  const auto b = design_robust(make_nominal<double>(embedded_diagonal(5, {3.0, 2.0}), 0.1));
  CHECK(is_leading_selection(b.values));
  CHECK(b.kind == DesignKind::robust);
}

TEST_CASE("design_robust does not depend on the radius", "[design]") {
  Rng rng = make_stream(27, 0, 0);
  auto a = random_nominal(12, 5, 0.01, rng);
  auto b = a;
  b.alpha = 0.3;
  const auto ba = design_robust(a);
  const auto bb = design_robust(b);
  CHECK(oracle::subspace_distance(ba.values, bb.values) <= 1e-10);
  CHECK(max_abs<double>(CM(ba.values - bb.values)) <= 1e-12);
}

TEST_CASE("design_robust minimizes the surrogate objectives", "[design]") {
  for (int i = 0; i < 5; ++i) {
    Rng rng = make_stream(28, 0, static_cast<std::uint64_t>(i));
    auto nominal = random_nominal(10, 4, 0.0, rng);
    nominal.alpha = 0.5 * alpha_limit(nominal);
    const auto s = robust_surrogate(nominal);
    const CM best = design_robust(nominal).values;
    const double best_rl = surrogate_objective_return<double>(best, s.z_breve, 3.0);
    const double best_fl = surrogate_objective_forward<double>(best, s.z_breve, 4.0);
    for (int j = 0; j < 500; ++j) {
      const CM b = random_orthonormal_rows<double>(4, 10, rng);
      CHECK(surrogate_objective_return<double>(b, s.z_breve, 3.0) >= best_rl - 1e-12);
      CHECK(surrogate_objective_forward<double>(b, s.z_breve, 4.0) >= best_fl - 1e-12);
    }
  }
}

TEST_CASE("eig_perturb_first_order vanishes for scaled identity and zero", "[design]") {
  Rng rng = make_stream(29, 0, 0);
  const auto nominal = random_nominal(9, 4, 0.1, rng);
  const auto zero = eig_perturb_first_order<double>(nominal, CM::Zero(9, 9));
  CHECK(zero.delta_u.norm() == 0.0);
  const auto iso = eig_perturb_first_order<double>(nominal, CM(2.5 * CM::Identity(9, 9)));
  CHECK(iso.delta_u.norm() <= 1e-12);
}

TEST_CASE("eig_perturb_first_order weights are antisymmetric", "[design]") {
  Rng rng = make_stream(30, 0, 0);
  const auto nominal = random_nominal(9, 4, 0.1, rng);
  const CM a = random_complex_gaussian<double>(9, 9, rng);
  const auto p = eig_perturb_first_order<double>(nominal, CM((a + a.adjoint()) / 2.0));
  CHECK((p.d_weights + p.d_weights.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(p.d_weights.diagonal().cwiseAbs().maxCoeff() == 0.0);
  // first-order orthonormality: U_sᴴ dU_s is skew-Hermitian
  const CM us = nominal.eig_vectors.leftCols(4);
  const CM skew = us.adjoint() * p.delta_u;
  CHECK(max_abs<double>(CM(skew + skew.adjoint())) <= 1e-10 * p.delta_u.norm());
}

TEST_CASE("eig_perturb_first_order error is second order in the step", "[design]") {
  for (int i = 0; i < 5; ++i) {
    Rng rng = make_stream(31, 0, static_cast<std::uint64_t>(i));
    const auto nominal = random_nominal(8, 3, 0.0, rng);
    const CM a = random_complex_gaussian<double>(8, 8, rng);
    const CM dz = (a + a.adjoint()) / 2.0;
    const auto p = eig_perturb_first_order<double>(nominal, dz);
    const CM us = nominal.eig_vectors.leftCols(3);
    const CM gram = nominal.mean * nominal.mean.adjoint();
    auto error = [&](double t) {
      // dense eigensolver oracle with column phases aligned to U_s
      Eigen::SelfAdjointEigenSolver<CM> solver(CM(gram + t * dz));
      CM exact = solver.eigenvectors().rightCols(3).rowwise().reverse();
      for (int c = 0; c < 3; ++c) {
        const auto overlap = us.col(c).dot(exact.col(c));
        exact.col(c) *= std::conj(overlap) / std::abs(overlap);
      }
      return (exact - (us + t * p.delta_u)).norm();
    };
    const double t = 1e-3 * nominal.eig_values(2);
    const double ratio = error(t) / error(t / 2);
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
  }
}

TEST_CASE("eig_perturb_first_order refuses repeated eigenvalues", "[design]") {
  const auto nominal = make_nominal<double>(embedded_diagonal(5, {2.0, 2.0, 1.0}), 0.1);
  try {
    eig_perturb_first_order<double>(nominal, CM::Identity(5, 5));
    FAIL("expected ill_conditioned");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ill_conditioned);
  }
  const auto fallback = design_perturbation_aware<double>(nominal, IsotropicDeltaZ{});
  CHECK(fallback.degenerate_fallback);
  CHECK(fallback.kind == DesignKind::perturbation_aware);
}

TEST_CASE("design_perturbation_aware with isotropic dZ equals the robust design", "[design]") {
  Rng rng = make_stream(32, 0, 0);
  auto nominal = random_nominal(10, 4, 0.0, rng);
  nominal.alpha = 0.5 * alpha_limit(nominal);
  const auto pa = design_perturbation_aware<double>(nominal, IsotropicDeltaZ{});
  CHECK_FALSE(pa.degenerate_fallback);
  CHECK(max_abs<double>(CM(pa.values - design_robust(nominal).values)) <= 1e-12);
}

TEST_CASE("design_perturbation_aware with zero radius equals the robust design", "[design]") {
  Rng rng = make_stream(33, 0, 0);
  const auto nominal = random_nominal(10, 4, 0.0, rng);
  const CM a = random_complex_gaussian<double>(10, 10, rng);
  const auto pa = design_perturbation_aware<double>(nominal, EmpiricalDeltaZ<double>{CM((a + a.adjoint()) / 2.0)});
  CHECK(max_abs<double>(CM(pa.values - design_robust(nominal).values)) <= 1e-12);
}

TEST_CASE("design_perturbation_aware moves away from the robust design with the spread", "[design]") {
  Rng rng = make_stream(34, 0, 0);
  const CM mean = random_complex_gaussian<double>(10, 4, rng);
  const CM d0 = random_complex_gaussian<double>(10, 4, rng);
  const auto base = make_nominal<double>(mean, 0.0);
  const double unit = alpha_limit(base) / d0.norm();
  double previous = -1;
  for (double scale : {0.1, 0.3, 0.6}) {
    const CM delta = scale * unit * d0;
    std::vector<Channel<double>> pair = {Channel<double>{mean + delta}, Channel<double>{mean - delta}};
    const auto nominal = estimate_nominal<double>(pair);
    const auto pa = design_perturbation_aware<double>(nominal, empirical_delta_z<double>(nominal, pair));
    CHECK(check_orthonormal(pa) <= 1e-10);
    const double angle = max_principal_angle<double>(pa.values, design_robust(nominal).values);
    CHECK(angle > previous);
    previous = angle;
  }
  CHECK(previous > 0);
}

TEST_CASE("empirical_delta_z of a symmetric pair is the mean outer product", "[design]") {
  Rng rng = make_stream(35, 0, 0);
  const CM mean = random_complex_gaussian<double>(6, 3, rng);
  const CM d0 = random_complex_gaussian<double>(6, 3, rng);
  std::vector<Channel<double>> pair = {Channel<double>{mean + d0}, Channel<double>{mean - d0}};
  const auto nominal = estimate_nominal<double>(pair);
  const auto dz = empirical_delta_z<double>(nominal, pair);
  CHECK(max_abs<double>(CM(dz.matrix - d0 * d0.adjoint())) <= 1e-12);
  CHECK_THROWS_AS(empirical_delta_z<double>(nominal, std::vector<Channel<double>>{}), Error);
}

TEST_CASE("max_principal_angle of identical and orthogonal row spaces", "[design]") {
  CM a = CM::Zero(2, 4), b = CM::Zero(2, 4);
  a(0, 0) = a(1, 1) = 1;
  b(0, 2) = b(1, 3) = 1;
  CHECK(max_principal_angle<double>(a, a) <= 1e-15);
  CHECK_THAT(max_principal_angle<double>(a, b), WithinAbs(std::numbers::pi / 2, 1e-12));
  Rng rng = make_stream(36, 0, 0);
  const CM r = random_orthonormal_rows<double>(3, 7, rng);
  const CM rotated = random_orthonormal_rows<double>(3, 3, rng) * r;
  CHECK(max_principal_angle<double>(r, rotated) <= 1e-7);
}

TEST_CASE("every design is orthonormal on random desk-scale nominals", "[design]") {
  const auto geometry = make_hex_geometry<double>(16, 8, 0.0035);
  for (int i = 0; i < 100; ++i) {
    Rng rng = make_stream(37, 0, static_cast<std::uint64_t>(i));
    auto nominal = random_nominal(16, 8, 0.0, rng);
    nominal.alpha = 0.5 * alpha_limit(nominal);
    const CM a = random_complex_gaussian<double>(16, 16, rng);
    const CM draw = nominal.mean + 0.1 * random_complex_gaussian<double>(16, 8, rng);
    const BeamMatrix<double> designs[] = {
        design_reference(geometry), design_adaptive(Channel<double>{draw}), design_robust(nominal),
        design_perturbation_aware<double>(nominal, EmpiricalDeltaZ<double>{CM((a + a.adjoint()) / 2.0)})};
    for (const auto& b : designs) CHECK(check_orthonormal(b) <= 1e-10);
  }
}
