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

// Gateway-side linear processing.
//
// Return link:  y = sqrt(beta) B H s + B n, LMMSE detection.
// Forward link: y = Hᵀ Bᵀ T c + w, regularized zero forcing with
//               trace(T Tᴴ) = P_FL.
// Noise is unit variance in both directions; B has orthonormal rows.

#pragma once

#include "satbeam/beam_design.hpp"

namespace satbeam {

template <class Real>
struct ReturnLinkParams {
  Real beta = Real(1);  // per-user EIRP after noise normalization
};

template <class Real>
struct ForwardLinkParams {
  Real p_fl = Real(1);  // total transmit power
};

template <class Real>
struct Detector {
  CMatrix<Real> w_h;  // K x K
};

template <class Real>
struct Precoder {
  CMatrix<Real> t;  // K x K on board, N x K on ground
  Real rho = Real(0);
};

enum class Direction { return_link, forward_link };

inline std::string_view to_string(Direction d) { return d == Direction::return_link ? "return" : "forward"; }

template <class Real>
struct LinkResult {
  RVector<Real> sinr;      // linear, per user
  RVector<Real> mse_diag;  // per user
  Real smse = Real(0);
  Direction direction = Direction::return_link;
  Real crosscheck = Real(0);  // forward: |trace(MSE matrix) - closed-form SMSE|
};

namespace detail {

template <class Real>
void require_link_dims(const CMatrix<Real>& b, const CMatrix<Real>& h, const char* who) {
  require(b.cols() == h.rows() && b.rows() == h.cols(), ErrorCode::dimension_mismatch,
          std::string(who) + ": B must be K x N for an N x K channel");
  require(orthonormality_residual<Real>(b) <= Real(1e-8), ErrorCode::invalid_argument,
          std::string(who) + ": B must have orthonormal rows");
}

template <class Real>
CMatrix<Real> hermitian_part(const CMatrix<Real>& m) {
  return (m + m.adjoint()) / Real(2);
}

template <class Real>
LinkResult<Real> return_result_from_mse(const CMatrix<Real>& mse) {
  LinkResult<Real> r;
  r.direction = Direction::return_link;
  r.mse_diag = mse.diagonal().real();
  r.sinr = (r.mse_diag.cwiseInverse().array() - Real(1)).cwiseMax(Real(0)).matrix();
  r.smse = r.mse_diag.sum();
  return r;
}

/// sqrt(rho) G* (c I + Gᵀ G*)^-1 for an effective channel G (rows = transmit
/// dimensions), with rho meeting the power budget with equality.
template <class Real>
Precoder<Real> rzf_from_effective(const CMatrix<Real>& g, Real p_fl) {
  const Eigen::Index k = g.cols();
  require(p_fl > 0, ErrorCode::invalid_argument, "rzf: P_FL must be positive");
  require(max_abs<Real>(g) > 0, ErrorCode::invalid_argument, "rzf: zero channel leaves rho undefined");
  const Real c = Real(k) / p_fl;
  const CMatrix<Real> gram = hermitian_part<Real>(g.transpose() * g.conjugate()) + c * CMatrix<Real>::Identity(k, k);
  const CMatrix<Real> t0 = g.conjugate() * hpd_inverse<Real>(gram);
  const Real power = t0.squaredNorm();
  require(power > 0 && std::isfinite(power), ErrorCode::ill_conditioned, "rzf: degenerate precoder power");
  const Real rho = p_fl / power;
  return Precoder<Real>{std::sqrt(rho) * t0, rho};
}

}  // namespace detail

/// Wᴴ = sqrt(beta) (I + beta Hᴴ Bᴴ B H)^-1 Hᴴ Bᴴ.
template <class Real>
Detector<Real> lmmse_detector(const BeamMatrix<Real>& b, const Channel<Real>& h, const ReturnLinkParams<Real>& rl) {
  detail::require_link_dims<Real>(b.values, h.values, "lmmse_detector");
  require(rl.beta > 0, ErrorCode::invalid_argument, "lmmse_detector: beta must be positive");
  const Eigen::Index k = h.values.cols();
  const CMatrix<Real> heff = b.values * h.values;
  const CMatrix<Real> m = CMatrix<Real>::Identity(k, k) + rl.beta * detail::hermitian_part<Real>(heff.adjoint() * heff);
  Eigen::LLT<CMatrix<Real>> llt(m);
  require(llt.info() == Eigen::Success, ErrorCode::ill_conditioned, "lmmse_detector: numerical failure");
  return Detector<Real>{std::sqrt(rl.beta) * llt.solve(heff.adjoint())};
}

/// MSE = (I + beta Hᴴ Bᴴ B H)^-1, SINR_i = 1 / MSE_ii − 1.
template <class Real>
LinkResult<Real> return_mse(const BeamMatrix<Real>& b, const Channel<Real>& h, const ReturnLinkParams<Real>& rl) {
  detail::require_link_dims<Real>(b.values, h.values, "return_mse");
  require(rl.beta > 0, ErrorCode::invalid_argument, "return_mse: beta must be positive");
  const Eigen::Index k = h.values.cols();
  const CMatrix<Real> heff = b.values * h.values;
  const CMatrix<Real> m = CMatrix<Real>::Identity(k, k) + rl.beta * detail::hermitian_part<Real>(heff.adjoint() * heff);
  return detail::return_result_from_mse<Real>(hpd_inverse<Real>(m));
}

template <class Real>
Precoder<Real> rzf_precoder(const BeamMatrix<Real>& b, const Channel<Real>& h, const ForwardLinkParams<Real>& fl) {
  detail::require_link_dims<Real>(b.values, h.values, "rzf_precoder");
  return detail::rzf_from_effective<Real>(b.values * h.values, fl.p_fl);
}

/// SINR_i = |F_ii|² / (sum_{j != i} |F_ij|² + 1) with F = Hᵀ Bᵀ T.
template <class Real>
RVector<Real> sinr_forward(const BeamMatrix<Real>& b, const Channel<Real>& h, const Precoder<Real>& p) {
  require(b.values.cols() == h.values.rows() && p.t.rows() == b.values.rows(), ErrorCode::dimension_mismatch,
          "sinr_forward: inconsistent dimensions");
  const CMatrix<Real> f = (b.values * h.values).transpose() * p.t;
  const RMatrix<Real> power = f.cwiseAbs2();
  RVector<Real> sinr(f.rows());
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    const Real signal = power(i, i);
    sinr(i) = signal / (power.row(i).sum() - signal + Real(1));
  }
  return sinr;
}

/// Forward MSE matrix (K/P)(HᵀBᵀB*BᵀB*H* + (K/P)I)(HᵀBᵀB*H* + (K/P)I)^-2,
/// cross-checked against (K/P) trace((HᴴBᴴBH + (K/P)I)^-1).
template <class Real>
LinkResult<Real> forward_mse(const BeamMatrix<Real>& b, const Channel<Real>& h, const ForwardLinkParams<Real>& fl) {
  detail::require_link_dims<Real>(b.values, h.values, "forward_mse");
  require(fl.p_fl > 0, ErrorCode::invalid_argument, "forward_mse: P_FL must be positive");
  const Eigen::Index k = h.values.cols();
  const Real c = Real(k) / fl.p_fl;
  const CMatrix<Real> id = CMatrix<Real>::Identity(k, k);
  const CMatrix<Real> bb = b.values.transpose() * b.values.conjugate();  // Bᵀ B*
  const CMatrix<Real> x = h.values.transpose() * bb * h.values.conjugate();
  const CMatrix<Real> x2 = h.values.transpose() * bb * bb * h.values.conjugate();
  const CMatrix<Real> inv = hpd_inverse<Real>(detail::hermitian_part<Real>(x) + c * id);
  const CMatrix<Real> mse = c * ((x2 + c * id) * inv * inv);

  const CMatrix<Real> heff = b.values * h.values;
  const Real closed = c * hpd_inverse<Real>(detail::hermitian_part<Real>(heff.adjoint() * heff) + c * id).trace().real();

  LinkResult<Real> r;
  r.direction = Direction::forward_link;
  r.mse_diag = mse.diagonal().real();
  r.smse = r.mse_diag.sum();
  r.crosscheck = std::abs(r.smse - closed);
  r.sinr = sinr_forward(b, h, rzf_precoder(b, h, fl));
  return r;
}

/// LMMSE on all N feed signals (no on-board processing).
template <class Real>
LinkResult<Real> onground_return(const Channel<Real>& h, const ReturnLinkParams<Real>& rl) {
  require(rl.beta > 0, ErrorCode::invalid_argument, "onground_return: beta must be positive");
  const Eigen::Index k = h.values.cols();
  const CMatrix<Real> m =
      CMatrix<Real>::Identity(k, k) + rl.beta * detail::hermitian_part<Real>(h.values.adjoint() * h.values);
  return detail::return_result_from_mse<Real>(hpd_inverse<Real>(m));
}

template <class Real>
Precoder<Real> onground_precoder(const Channel<Real>& h, const ForwardLinkParams<Real>& fl) {
  return detail::rzf_from_effective<Real>(h.values, fl.p_fl);
}

/// RZF over all N feeds; SINR from F = Hᵀ T_og.
template <class Real>
LinkResult<Real> onground_forward(const Channel<Real>& h, const ForwardLinkParams<Real>& fl) {
  const Eigen::Index k = h.values.cols();
  const Precoder<Real> p = onground_precoder(h, fl);
  const Real c = Real(k) / fl.p_fl;
  const CMatrix<Real> mse =
      c * hpd_inverse<Real>(detail::hermitian_part<Real>(h.values.adjoint() * h.values) +
                            c * CMatrix<Real>::Identity(k, k));
  LinkResult<Real> r;
  r.direction = Direction::forward_link;
  r.mse_diag = mse.diagonal().real();
  r.smse = r.mse_diag.sum();
  const CMatrix<Real> f = h.values.transpose() * p.t;
  const RMatrix<Real> power = f.cwiseAbs2();
  r.sinr.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) r.sinr(i) = power(i, i) / (power.row(i).sum() - power(i, i) + Real(1));
  return r;
}

}  // namespace satbeam
