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

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace satbeam {

template <class Real>
using Complex = std::complex<Real>;
template <class Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <class Real>
using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using Rng = std::mt19937_64;

enum class ErrorCode {
  dimension_mismatch,
  invalid_argument,
  rank_deficient,
  infeasible,
  ill_conditioned,
  empty_input,
  parse_error,
  io_error,
  all_outage,
};

/// Every library failure is reported through this exception; `code()` lets
/// callers branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

/// Independent stream for (seed, stream, index). Streams with different
/// (stream, index) pairs never share state, so drops can be drawn in any order
/// or on any thread and still reproduce bit for bit.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

template <class Real>
Real max_abs(const CMatrix<Real>& m) {
  return m.size() == 0 ? Real(0) : m.cwiseAbs().maxCoeff();
}

/// ‖A Aᴴ − I‖_max for a matrix whose rows are meant to be orthonormal.
template <class Real>
Real orthonormality_residual(const CMatrix<Real>& rows) {
  const CMatrix<Real> gram = rows * rows.adjoint();
  return max_abs<Real>(gram - CMatrix<Real>::Identity(gram.rows(), gram.cols()));
}

/// Rotates every column so that its largest-magnitude entry (first on ties)
/// is real and positive.
template <class Real>
void fix_column_phases(CMatrix<Real>& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Eigen::Index best = 0;
    Real best_abs = Real(-1);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const Real a = std::abs(m(r, c));
      if (a > best_abs) {
        best_abs = a;
        best = r;
      }
    }
    if (best_abs > Real(0)) m.col(c) *= std::conj(m(best, c)) / best_abs;
  }
}

/// Sequential projection-and-normalize (Gram-Schmidt, two passes) over the
/// rows of `rows`. Throws if a row collapses onto the span of its predecessors.
template <class Real>
CMatrix<Real> orthonormalize_rows(const CMatrix<Real>& rows) {
  CMatrix<Real> q = rows;
  const Real scale = rows.size() == 0 ? Real(0) : rows.rowwise().norm().maxCoeff();
  const Real tol = std::numeric_limits<Real>::epsilon() * Real(1e4) * std::max(scale, Real(1e-300));
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < i; ++j) {
        const Complex<Real> proj = q.row(j).dot(q.row(i));
        q.row(i) -= proj * q.row(j);
      }
    }
    const Real norm = q.row(i).norm();
    require(norm > tol, ErrorCode::rank_deficient,
            "orthonormalize_rows: row " + std::to_string(i) + " is linearly dependent on previous rows");
    q.row(i) /= norm;
  }
  return q;
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues in descending
/// order (stable with respect to the solver's index on ties) and
/// deterministic eigenvector phases.
template <class Real>
struct HermitianEig {
  CMatrix<Real> vectors;
  RVector<Real> values;
};

template <class Real>
HermitianEig<Real> hermitian_eig_descending(const CMatrix<Real>& a) {
  require(a.rows() == a.cols(), ErrorCode::dimension_mismatch, "hermitian_eig: matrix must be square");
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(a);
  require(solver.info() == Eigen::Success, ErrorCode::ill_conditioned, "hermitian_eig: solver failed");
  const Eigen::Index n = a.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto& ev = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return ev(x) > ev(y); });
  HermitianEig<Real> out{CMatrix<Real>(n, n), RVector<Real>(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.vectors.col(i) = solver.eigenvectors().col(order[static_cast<std::size_t>(i)]);
    out.values(i) = ev(order[static_cast<std::size_t>(i)]);
  }
  fix_column_phases(out.vectors);
  return out;
}

/// Solves A X = I for a Hermitian positive definite A.
template <class Real>
CMatrix<Real> hpd_inverse(const CMatrix<Real>& a) {
  Eigen::LLT<CMatrix<Real>> llt(a);
  require(llt.info() == Eigen::Success, ErrorCode::ill_conditioned, "hpd_inverse: matrix is not positive definite");
  return llt.solve(CMatrix<Real>::Identity(a.rows(), a.cols()));
}

/// Haar-distributed K×N matrix with orthonormal rows (QR of a complex
/// Gaussian matrix with the R-diagonal phase correction).
template <class Real>
CMatrix<Real> random_orthonormal_rows(Eigen::Index k, Eigen::Index n, Rng& rng) {
  std::normal_distribution<Real> g(Real(0), Real(1));
  CMatrix<Real> x(n, k);
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index r = 0; r < n; ++r) x(r, c) = Complex<Real>(g(rng), g(rng));
  Eigen::HouseholderQR<CMatrix<Real>> qr(x);
  CMatrix<Real> q = qr.householderQ() * CMatrix<Real>::Identity(n, k);
  const CMatrix<Real> r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < k; ++c) {
    const Real a = std::abs(r(c, c));
    if (a > Real(0)) q.col(c) *= r(c, c) / a;
  }
  return q.adjoint();
}

template <class Real>
CMatrix<Real> random_complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<Real> g(Real(0), Real(1) / std::sqrt(Real(2)));
  CMatrix<Real> x(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) x(r, c) = Complex<Real>(g(rng), g(rng));
  return x;
}

}  // namespace satbeam
