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

// Beam-generation matrices B (K x N, orthonormal rows).
//
//   reference           geographic weighting of the feeds around each beam
//   adaptive            first K left singular vectors of one channel draw
//   robust              first K eigenvectors of Hbar Hbarᴴ; minimizes the
//                       worst-case surrogate trace((I + beta B Zbreve Bᴴ)^-1)
//   perturbation_aware  robust eigenvectors moved by their first-order
//                       response to a channel-spread perturbation dZ
//
// The surrogate Zbreve = U (Sigma - eps_H I)^+ Uᴴ with eps_H = 2 alpha
// sigma_max(Hbar) lower-bounds Z = H Hᴴ in the sense that the surrogate sum
// MSE upper-bounds the true one for every H in the alpha-ball around Hbar.

#pragma once

#include "satbeam/channel_model.hpp"

#include <optional>
#include <string_view>

namespace satbeam {

enum class DesignKind { reference, adaptive, robust, perturbation_aware };

inline std::string_view to_string(DesignKind kind) {
  switch (kind) {
    case DesignKind::reference: return "reference";
    case DesignKind::adaptive: return "adaptive";
    case DesignKind::robust: return "robust";
    case DesignKind::perturbation_aware: return "perturbation_aware";
  }
  return "unknown";
}

inline DesignKind parse_design_kind(std::string_view name) {
  if (name == "reference") return DesignKind::reference;
  if (name == "adaptive") return DesignKind::adaptive;
  if (name == "robust") return DesignKind::robust;
  if (name == "perturbation_aware") return DesignKind::perturbation_aware;
  throw Error(ErrorCode::parse_error, "unknown design kind '" + std::string(name) + "'");
}

template <class Real>
struct BeamMatrix {
  CMatrix<Real> values;  // K x N
  DesignKind kind = DesignKind::reference;
  bool degenerate_fallback = false;  // perturbation-aware fell back to robust

  Eigen::Index num_beams() const { return values.rows(); }
  Eigen::Index num_feeds() const { return values.cols(); }
};

template <class Real>
struct RobustSurrogate {
  CMatrix<Real> z_breve;  // N x N Hermitian PSD
  Real epsilon_h = Real(0);
  Real alpha_used = Real(0);
  bool alpha_clamped = false;
};

template <class Real>
struct EigPerturbation {
  CMatrix<Real> delta_u;   // N x r
  CMatrix<Real> r_matrix;  // r x r
  RMatrix<Real> d_weights; // r x r, zero diagonal, antisymmetric
};

/// ‖B Bᴴ − I‖_max.
template <class Real>
Real check_orthonormal(const BeamMatrix<Real>& b) {
  return orthonormality_residual<Real>(b.values);
}

/// Gaussian weighting of the feeds around each beam center followed by
/// sequential row orthonormalization. A zero reference width selects the
/// nearest feed only.
template <class Real>
BeamMatrix<Real> design_reference(const BeamGeometry<Real>& geometry) {
  geometry.validate();
  const Eigen::Index k = geometry.num_beams();
  const Eigen::Index n = geometry.num_feeds();
  CMatrix<Real> w = CMatrix<Real>::Zero(k, n);
  for (Eigen::Index row = 0; row < k; ++row) {
    const auto& center = geometry.beam_centers[static_cast<std::size_t>(row)];
    if (geometry.reference_width == 0) {
      Eigen::Index nearest = 0;
      Real best = std::numeric_limits<Real>::infinity();
      for (Eigen::Index col = 0; col < n; ++col) {
        const Real dist = (center - geometry.feed_positions[static_cast<std::size_t>(col)]).norm();
        if (dist < best) {
          best = dist;
          nearest = col;
        }
      }
      w(row, nearest) = Real(1);
    } else {
      for (Eigen::Index col = 0; col < n; ++col) {
        const Real dist = (center - geometry.feed_positions[static_cast<std::size_t>(col)]).norm();
        w(row, col) = feed_pattern(dist, geometry.reference_width);
      }
    }
  }
  try {
    return BeamMatrix<Real>{orthonormalize_rows<Real>(w), DesignKind::reference};
  } catch (const Error& e) {
    throw Error(ErrorCode::rank_deficient, std::string("design_reference: degenerate geometry, ") + e.what());
  }
}

/// Channel-adaptive optimum: the K dominant left singular vectors of H.
template <class Real>
BeamMatrix<Real> design_adaptive(const Channel<Real>& h) {
  const Eigen::Index k = h.values.cols();
  require(k < h.values.rows(), ErrorCode::dimension_mismatch, "design_adaptive: K < N required");
  Eigen::JacobiSVD<CMatrix<Real>> svd(h.values, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  require(s(0) > 0 && s(k - 1) > s(0) * Real(1e-12), ErrorCode::rank_deficient,
          "design_adaptive: channel has fewer than K nonzero singular values");
  CMatrix<Real> u = svd.matrixU().leftCols(k);
  fix_column_phases(u);
  return BeamMatrix<Real>{u.adjoint(), DesignKind::adaptive};
}

/// eps_H = 2 alpha sigma_max(Hbar).
template <class Real>
Real epsilon_h(const NominalChannel<Real>& nominal) {
  if (nominal.eig_values.size() == 0) return Real(0);
  return Real(2) * nominal.alpha * std::sqrt(std::max(nominal.eig_values(0), Real(0)));
}

/// Zbreve with alpha bisected down whenever any of the top-K entries of
/// Sigma - eps_H I is nonpositive.
template <class Real>
RobustSurrogate<Real> robust_surrogate(const NominalChannel<Real>& nominal) {
  const Eigen::Index k = nominal.num_beams();
  const Eigen::Index n = nominal.num_feeds();
  require(nominal.eig_values.size() == n && nominal.eig_vectors.rows() == n, ErrorCode::dimension_mismatch,
          "robust_surrogate: eigendecomposition cache missing");
  require(nominal.eig_values(0) > 0, ErrorCode::infeasible, "robust_surrogate: nominal channel is zero");
  require(nominal.eig_values(k - 1) > 0, ErrorCode::infeasible,
          "robust_surrogate: nominal channel has rank below K, no alpha is feasible");
  const Real sigma_max = std::sqrt(nominal.eig_values(0));
  const Real lambda_k = nominal.eig_values(k - 1);
  auto feasible = [&](Real a) { return lambda_k - Real(2) * a * sigma_max > 0; };

  RobustSurrogate<Real> out;
  out.alpha_used = nominal.alpha;
  if (!feasible(nominal.alpha)) {
    Real lo = Real(0), hi = nominal.alpha;
    for (int it = 0; it < 200 && hi - lo > nominal.alpha * Real(1e-6); ++it) {
      const Real mid = (lo + hi) / Real(2);
      (feasible(mid) ? lo : hi) = mid;
    }
    out.alpha_used = lo;
    out.alpha_clamped = true;
  }
  out.epsilon_h = Real(2) * out.alpha_used * sigma_max;
  const RVector<Real> clipped = (nominal.eig_values.array() - out.epsilon_h).cwiseMax(Real(0)).matrix();
  const CMatrix<Real> z = nominal.eig_vectors * clipped.template cast<Complex<Real>>().asDiagonal() *
                          nominal.eig_vectors.adjoint();
  out.z_breve = (z + z.adjoint()) / Real(2);
  return out;
}

/// Robust design: the first K rows of Ūᴴ. Independent of alpha.
template <class Real>
BeamMatrix<Real> design_robust(const NominalChannel<Real>& nominal) {
  const Eigen::Index k = nominal.num_beams();
  require(nominal.eig_vectors.rows() == nominal.num_feeds() && nominal.eig_values.size() >= k,
          ErrorCode::dimension_mismatch, "design_robust: eigendecomposition cache missing");
  require(k < nominal.num_feeds(), ErrorCode::dimension_mismatch, "design_robust: K < N required");
  require(nominal.eig_values(0) > 0 && nominal.eig_values(k - 1) > nominal.eig_values(0) * Real(1e-12),
          ErrorCode::rank_deficient, "design_robust: top-K eigenvalues of Hbar Hbarᴴ must be positive");
  return BeamMatrix<Real>{nominal.eig_vectors.leftCols(k).adjoint(), DesignKind::robust};
}

/// First-order response of the K dominant eigenvectors of Hbar Hbarᴴ to a
/// Hermitian perturbation dZ:
///
///   dU_s = U_s R + U_n U_nᴴ dZ U_s Sigma_s^-1
///   R    = D ∘ (U_sᴴ dZ U_s Sigma_s + Sigma_s U_sᴴ dZᴴ U_s)
///   D_fg = 1 / (lambda_g² − lambda_f²),  D_ff = 0
template <class Real>
EigPerturbation<Real> eig_perturb_first_order(const NominalChannel<Real>& nominal, const CMatrix<Real>& delta_z) {
  const Eigen::Index n = nominal.num_feeds();
  const Eigen::Index r = nominal.num_beams();
  require(delta_z.rows() == n && delta_z.cols() == n, ErrorCode::dimension_mismatch,
          "eig_perturb_first_order: dZ must be N x N");
  const RVector<Real> lambda = nominal.eig_values.head(r);
  require(lambda(r - 1) > 0, ErrorCode::rank_deficient,
          "eig_perturb_first_order: top-K eigenvalues must be positive");
  const Real gap_tol = Real(1e-8) * lambda(0);
  for (Eigen::Index f = 0; f < r; ++f)
    for (Eigen::Index g = f + 1; g < r; ++g)
      require(std::abs(lambda(f) - lambda(g)) >= gap_tol, ErrorCode::ill_conditioned,
              "eig_perturb_first_order: eigenvalue gap below tolerance");

  const auto us = nominal.eig_vectors.leftCols(r);
  const auto un = nominal.eig_vectors.rightCols(n - r);
  const auto sigma = lambda.template cast<Complex<Real>>().asDiagonal();

  EigPerturbation<Real> out;
  out.d_weights = RMatrix<Real>::Zero(r, r);
  for (Eigen::Index f = 0; f < r; ++f)
    for (Eigen::Index g = 0; g < r; ++g)
      if (f != g) out.d_weights(f, g) = Real(1) / (lambda(g) * lambda(g) - lambda(f) * lambda(f));

  const CMatrix<Real> projected = us.adjoint() * delta_z * us;
  const CMatrix<Real> projected_h = us.adjoint() * delta_z.adjoint() * us;
  const CMatrix<Real> core = projected * sigma + sigma * projected_h;
  out.r_matrix = core.cwiseProduct(out.d_weights.template cast<Complex<Real>>());
  const RVector<Real> inv_lambda = lambda.cwiseInverse();
  out.delta_u = us * out.r_matrix +
                un * (un.adjoint() * delta_z * us) * inv_lambda.template cast<Complex<Real>>().asDiagonal();
  return out;
}

/// Substitution for dZ in the perturbation-aware design.
struct IsotropicDeltaZ {};  // dZ = eps_H I; the correction vanishes identically
template <class Real>
struct EmpiricalDeltaZ {
  CMatrix<Real> matrix;  // Hermitian; rescaled to Frobenius norm eps_H when applied
};
template <class Real>
using DeltaZMode = std::variant<IsotropicDeltaZ, EmpiricalDeltaZ<Real>>;

/// Hermitian part of the ensemble mean of Hbar Δᴴ + Δ Hbarᴴ + Δ Δᴴ with
/// Δ = H_i − Hbar.
template <class Real>
EmpiricalDeltaZ<Real> empirical_delta_z(const NominalChannel<Real>& nominal,
                                        std::span<const Channel<Real>> ensemble) {
  require(!ensemble.empty(), ErrorCode::empty_input, "empirical_delta_z: empty ensemble");
  const Eigen::Index n = nominal.num_feeds();
  CMatrix<Real> acc = CMatrix<Real>::Zero(n, n);
  for (const auto& h : ensemble) {
    require(h.values.rows() == n && h.values.cols() == nominal.num_beams(), ErrorCode::dimension_mismatch,
            "empirical_delta_z: channel dimension mismatch");
    const CMatrix<Real> delta = h.values - nominal.mean;
    acc += nominal.mean * delta.adjoint() + delta * nominal.mean.adjoint() + delta * delta.adjoint();
  }
  acc /= Real(ensemble.size());
  return EmpiricalDeltaZ<Real>{(acc + acc.adjoint()) / Real(2)};
}

template <class Real>
Real spectral_norm_hermitian(const CMatrix<Real>& a) {
  if (a.size() == 0) return Real(0);
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(a, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// Robust design evaluated on the perturbed eigenvectors U_s + dU_s,
/// re-orthonormalized. Falls back to the robust design (flagged) when the
/// dominant eigenvalues are too close for first-order theory.
template <class Real>
BeamMatrix<Real> design_perturbation_aware(const NominalChannel<Real>& nominal, const DeltaZMode<Real>& mode) {
  const RobustSurrogate<Real> surrogate = robust_surrogate(nominal);
  const Eigen::Index n = nominal.num_feeds();
  const Eigen::Index k = nominal.num_beams();
  CMatrix<Real> delta_z = CMatrix<Real>::Zero(n, n);
  if (std::holds_alternative<IsotropicDeltaZ>(mode)) {
    delta_z = CMatrix<Real>::Identity(n, n) * surrogate.epsilon_h;
  } else {
    const auto& dz = std::get<EmpiricalDeltaZ<Real>>(mode).matrix;
    require(dz.rows() == n && dz.cols() == n, ErrorCode::dimension_mismatch,
            "design_perturbation_aware: dZ must be N x N");
    const Real norm = dz.norm();
    if (norm > 0 && surrogate.epsilon_h > 0) delta_z = dz * (surrogate.epsilon_h / norm);
  }
  EigPerturbation<Real> perturbation;
  try {
    perturbation = eig_perturb_first_order(nominal, delta_z);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ill_conditioned) throw;
    BeamMatrix<Real> fallback = design_robust(nominal);
    fallback.kind = DesignKind::perturbation_aware;
    fallback.degenerate_fallback = true;
    return fallback;
  }
  const CMatrix<Real> perturbed = nominal.eig_vectors.leftCols(k) + perturbation.delta_u;
  return BeamMatrix<Real>{orthonormalize_rows<Real>(perturbed.adjoint()), DesignKind::perturbation_aware};
}

/// Return-link surrogate objective trace((I + beta B Z Bᴴ)^-1).
template <class Real>
Real surrogate_objective_return(const CMatrix<Real>& b, const CMatrix<Real>& z, Real beta) {
  const Eigen::Index k = b.rows();
  const CMatrix<Real> m = CMatrix<Real>::Identity(k, k) + beta * (b * z * b.adjoint());
  return hpd_inverse<Real>((m + m.adjoint()) / Real(2)).trace().real();
}

/// Forward-link surrogate objective trace((B Z Bᴴ + (K / P_FL) I)^-1).
template <class Real>
Real surrogate_objective_forward(const CMatrix<Real>& b, const CMatrix<Real>& z, Real p_fl) {
  const Eigen::Index k = b.rows();
  const CMatrix<Real> m = b * z * b.adjoint() + (Real(k) / p_fl) * CMatrix<Real>::Identity(k, k);
  return hpd_inverse<Real>((m + m.adjoint()) / Real(2)).trace().real();
}

/// Largest principal angle (rad) between the row spaces of two matrices with
/// orthonormal rows.
template <class Real>
Real max_principal_angle(const CMatrix<Real>& a, const CMatrix<Real>& b) {
  Eigen::JacobiSVD<CMatrix<Real>> svd(a * b.adjoint());
  const Real smallest = std::clamp(svd.singularValues().minCoeff(), Real(0), Real(1));
  // acos loses precision near 1; the sine of the angle is the distance between projectors
  const CMatrix<Real> diff = a.adjoint() * a - b.adjoint() * b;
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es((diff + diff.adjoint()) / Real(2), Eigen::EigenvaluesOnly);
  const Real sine = std::min(es.eigenvalues().cwiseAbs().maxCoeff(), Real(1));
  return smallest > Real(0.5) ? std::asin(sine) : std::acos(smallest);
}

}  // namespace satbeam
