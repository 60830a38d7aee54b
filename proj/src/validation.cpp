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

#include "satbeam/validation.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <functional>

namespace satbeam {

namespace {

using CM = CMatrix<double>;

/// Random nominal of the scenario's size; alpha drawn around the feasibility
/// limit so that some instances get clamped.
NominalChannel<double> random_nominal(Eigen::Index n, Eigen::Index k, Rng& rng) {
  CM mean = random_complex_gaussian<double>(n, k, rng);
  NominalChannel<double> nominal = make_nominal<double>(mean, 0.0);
  const double limit = nominal.eig_values(k - 1) / (2 * std::sqrt(nominal.eig_values(0)));
  std::uniform_real_distribution<double> frac(0.1, 1.5);
  nominal.alpha = frac(rng) * limit;
  return nominal;
}

double mse_trace(const CM& b, const CM& z, double beta) { return surrogate_objective_return<double>(b, z, beta); }

std::vector<BeamMatrix<double>> all_designs(const Scenario& scenario, const NominalChannel<double>& nominal,
                                            const Channel<double>& draw, const CM& delta_z) {
  std::vector<BeamMatrix<double>> out;
  out.push_back(design_reference(scenario.geometry));
  out.push_back(design_adaptive(draw));
  out.push_back(design_robust(nominal));
  out.push_back(design_perturbation_aware(nominal, DeltaZMode<double>{EmpiricalDeltaZ<double>{delta_z}}));
  return out;
}

CM random_hermitian(Eigen::Index n, Rng& rng) {
  const CM a = random_complex_gaussian<double>(n, n, rng);
  return (a + a.adjoint()) / 2.0;
}

class Suite {
 public:
  Suite(const Scenario& scenario, const ValidationOptions& options, const Calibration& calibration)
      : s_(scenario), o_(options), cal_(calibration), n_(scenario.geometry.num_feeds()),
        k_(scenario.geometry.num_beams()) {}

  Rng rng(std::uint64_t property, std::uint64_t index) const { return make_stream(o_.seed, 100 + property, index); }

  /// Calibrated nominal first, then random ones.
  NominalChannel<double> nominal(int i) const {
    if (i == 0) return cal_.nominal;
    Rng r = rng(0, static_cast<std::uint64_t>(i));
    return random_nominal(n_, k_, r);
  }

  PropertyResult orthonormality() const {
    PropertyResult p{"orthonormality", "max|B B^H - I| <= 1e-10"};
    for (int i = 0; i < o_.nominals; ++i) {
      const auto nom = nominal(i);
      Rng r = rng(1, static_cast<std::uint64_t>(i));
      const Channel<double> draw{nom.mean + 0.1 * random_complex_gaussian<double>(n_, k_, r) * nom.mean.norm() /
                                                std::sqrt(double(n_ * k_))};
      NominalChannel<double> clamped = nom;
      clamped.alpha = robust_surrogate(nom).alpha_used;
      for (auto b : all_designs(s_, clamped, draw, spread_for(clamped, r))) {
        if (o_.inject_fault) b.values *= 1.01;
        const double res = check_orthonormal(b);
        record(p, res > 1e-10, res);
      }
    }
    return p;
  }

  PropertyResult inverse_trace_identity() const {
    PropertyResult p{"inverse_trace_identity", "trace((I + A A^H)^-1) = trace((I + A^H A)^-1), A square"};
    for (int i = 0; i < o_.random_instances; ++i) {
      Rng r = rng(2, static_cast<std::uint64_t>(i));
      const Eigen::Index m = 2 + static_cast<Eigen::Index>(r() % 15);
      const CM a = random_complex_gaussian<double>(m, m, r);
      const CM id = CM::Identity(m, m);
      const double lhs = hpd_inverse<double>(id + a * a.adjoint()).trace().real();
      const double rhs = hpd_inverse<double>(id + a.adjoint() * a).trace().real();
      record(p, std::abs(lhs - rhs) > 1e-9 * double(m), std::abs(lhs - rhs));
    }
    return p;
  }

  PropertyResult onboard_vs_onground() const {
    PropertyResult p{"onboard_vs_onground",
                     "trace((I + beta H^H B^H B H)^-1) >= trace((I + beta H^H H)^-1), equal for B = adaptive"};
    for (int i = 0; i < o_.random_instances; ++i) {
      Rng r = rng(3, static_cast<std::uint64_t>(i));
      const Channel<double> h{random_complex_gaussian<double>(n_, k_, r)};
      const BeamMatrix<double> b{random_orthonormal_rows<double>(k_, n_, r)};
      std::uniform_real_distribution<double> log_beta(-2, 2);
      const ReturnLinkParams<double> rl{std::pow(10.0, log_beta(r))};
      const double ground = onground_return(h, rl).smse;
      const double board = return_mse(b, h, rl).smse;
      record(p, board < ground - 1e-12 * double(k_), std::max(0.0, ground - board));
      const double adaptive = return_mse(design_adaptive(h), h, rl).smse;
      record(p, std::abs(adaptive - ground) > 1e-9, std::abs(adaptive - ground));
    }
    return p;
  }

  PropertyResult worst_case_bound() const {
    PropertyResult p{"worst_case_bound",
                     "trace((I + beta B Z B^H)^-1) <= trace((I + beta B Zbreve B^H)^-1) for ||H - Hbar||_F <= alpha"};
    const double beta = s_.beta;
    for (int i = 0; i < o_.nominals; ++i) {
      const auto nom = nominal(i);
      const RobustSurrogate<double> sur = robust_surrogate(nom);
      NominalChannel<double> clamped = nom;
      clamped.alpha = sur.alpha_used;
      Rng r = rng(4, static_cast<std::uint64_t>(i));
      const CM dz = spread_for(clamped, r);
      const BeamMatrix<double> fixed[] = {design_reference(s_.geometry), design_robust(clamped),
                                          design_perturbation_aware(clamped, DeltaZMode<double>{EmpiricalDeltaZ<double>{dz}})};
      for (int j = 0; j < o_.samples_per_nominal; ++j) {
        const CM h = nom.mean + sample_in_ball<double>(n_, k_, sur.alpha_used, r).delta;
        const CM z = h * h.adjoint();
        for (const auto& b : fixed) {
          const double gap = mse_trace(b.values, z, beta) - mse_trace(b.values, sur.z_breve, beta);
          record(p, gap > 1e-10, std::max(0.0, gap));
        }
        const BeamMatrix<double> adaptive = design_adaptive(Channel<double>{h});
        const double gap = mse_trace(adaptive.values, z, beta) - mse_trace(adaptive.values, sur.z_breve, beta);
        record(p, gap > 1e-10, std::max(0.0, gap));
      }
    }
    return p;
  }

  PropertyResult robust_argmin(Direction direction) const {
    const bool ret = direction == Direction::return_link;
    PropertyResult p{ret ? "robust_argmin_return" : "robust_argmin_forward",
                     ret ? "B* minimizes trace((I + beta B Zbreve B^H)^-1) over orthonormal B"
                         : "B* minimizes trace((B Zbreve B^H + (K/P) I)^-1) over orthonormal B"};
    for (int i = 0; i < o_.nominals; ++i) {
      const auto nom = nominal(i);
      const RobustSurrogate<double> sur = robust_surrogate(nom);
      NominalChannel<double> clamped = nom;
      clamped.alpha = sur.alpha_used;
      const CM best = design_robust(clamped).values;
      for (double scale : {0.1, 1.0, 10.0}) {
        auto objective = [&](const CM& b) {
          return ret ? surrogate_objective_return<double>(b, sur.z_breve, scale * s_.beta)
                     : surrogate_objective_forward<double>(b, sur.z_breve, scale * double(k_));
        };
        const double star = objective(best);
        Rng r = rng(ret ? 5 : 6, static_cast<std::uint64_t>(i));
        for (int c = 0; c < o_.candidates; ++c) {
          const double other = objective(random_orthonormal_rows<double>(k_, n_, r));
          const double gap = star - other;
          record(p, gap > 1e-10 * std::abs(other), std::max(0.0, gap));
        }
      }
    }
    return p;
  }

  std::pair<PropertyResult, PropertyResult> majorization() const {
    PropertyResult maj{"majorization", "diag(M D M^H) is majorized by eig(M D M^H)"};
    PropertyResult schur{"schur_convexity", "sum 1/(1 + d_i) <= sum 1/(1 + lambda_i), equality iff M D M^H diagonal"};
    for (int i = 0; i < o_.random_instances; ++i) {
      Rng r = rng(7, static_cast<std::uint64_t>(i));
      const CM m = random_orthonormal_rows<double>(n_, n_, r);
      std::exponential_distribution<double> expo(1.0);
      RVector<double> diag(n_);
      for (Eigen::Index j = 0; j < n_; ++j) diag(j) = expo(r);
      const CM a = m * diag.cast<Complex<double>>().asDiagonal() * m.adjoint();
      std::vector<double> d(static_cast<std::size_t>(n_)), lam(diag.data(), diag.data() + n_);
      for (Eigen::Index j = 0; j < n_; ++j) d[static_cast<std::size_t>(j)] = a(j, j).real();
      std::sort(d.begin(), d.end(), std::greater<>());
      std::sort(lam.begin(), lam.end(), std::greater<>());
      double sd = 0, sl = 0, worst = 0;
      for (std::size_t j = 0; j < d.size(); ++j) {
        sd += d[j];
        sl += lam[j];
        worst = std::max(worst, sd - sl);
      }
      const double total = std::abs(sd - sl);
      record(maj, worst > 1e-10 || total > 1e-10, std::max(worst, total));
      double fd = 0, fl = 0;
      for (std::size_t j = 0; j < d.size(); ++j) {
        fd += 1 / (1 + d[j]);
        fl += 1 / (1 + lam[j]);
      }
      record(schur, fd > fl + 1e-10, std::max(0.0, fd - fl));
    }
    return {maj, schur};
  }

  PropertyResult eigvec_first_order() const {
    PropertyResult p{"eigvec_first_order", "||U_s(t) - (U_s + t dU_s)||_F = O(t^2): err(t)/err(t/2) in [3, 5]"};
    for (int i = 0; i < o_.nominals; ++i) {
      Rng r = rng(8, static_cast<std::uint64_t>(i));
      NominalChannel<double> nom = separated_nominal(r);
      const CM dz = random_hermitian(n_, r);
      const CM z0 = nom.mean * nom.mean.adjoint();
      const EigPerturbation<double> pert = eig_perturb_first_order(nom, dz);
      const double t = 1e-3 * nom.eig_values(k_ - 1) / spectral_norm_hermitian<double>(dz);
      auto error = [&](double step) {
        CM exact = hermitian_eig_descending<double>(z0 + step * dz).vectors.leftCols(k_);
        const CM predicted = nom.eig_vectors.leftCols(k_) + step * pert.delta_u;
        for (Eigen::Index c = 0; c < k_; ++c) {
          const Complex<double> overlap = nom.eig_vectors.col(c).dot(exact.col(c));
          exact.col(c) *= std::conj(overlap) / std::abs(overlap);
        }
        return (exact - predicted).norm();
      };
      const double ratio = error(t) / error(t / 2);
      record(p, !(ratio >= 3 && ratio <= 5), std::abs(ratio - 4));
    }
    return p;
  }

  PropertyResult isotropic_null() const {
    PropertyResult p{"isotropic_dz_null", "dZ = c I gives dU_s = 0"};
    for (int i = 0; i < o_.nominals; ++i) {
      Rng r = rng(9, static_cast<std::uint64_t>(i));
      const auto nom = separated_nominal(r);
      const double c = std::uniform_real_distribution<double>(0.1, 10)(r);
      const double norm = eig_perturb_first_order<double>(nom, c * CM::Identity(n_, n_)).delta_u.norm();
      record(p, norm > 1e-12 * std::max(1.0, c), norm);
    }
    return p;
  }

  std::pair<PropertyResult, PropertyResult> forward_link() const {
    PropertyResult power{"precoder_power", "trace(T T^H) = P_FL"};
    PropertyResult trace{"forward_mse_trace", "trace(full forward MSE) = (K/P) trace((H^H B^H B H + (K/P) I)^-1)"};
    for (int i = 0; i < o_.random_instances; ++i) {
      Rng r = rng(10, static_cast<std::uint64_t>(i));
      const Channel<double> h{random_complex_gaussian<double>(n_, k_, r)};
      const BeamMatrix<double> b{random_orthonormal_rows<double>(k_, n_, r)};
      const ForwardLinkParams<double> fl{double(k_) * std::pow(10.0, std::uniform_real_distribution<double>(-2, 2)(r))};
      const Precoder<double> t = rzf_precoder(b, h, fl);
      const double rel = std::abs(t.t.squaredNorm() / fl.p_fl - 1);
      record(power, rel > 1e-9, rel);
      const double og = std::abs(onground_precoder(h, fl).t.squaredNorm() / fl.p_fl - 1);
      record(power, og > 1e-9, og);
      const LinkResult<double> res = forward_mse(b, h, fl);
      record(trace, res.crosscheck > 1e-9, res.crosscheck);
    }
    return {power, trace};
  }

  /// Eigenvalue ordering lambda_i(Z) >= lambda_i(Zhat) >= lambda_i(Zbreve),
  /// i <= K, over ball samples around the calibrated nominal.
  PropertyResult surrogate_ordering() const {
    PropertyResult p{"surrogate_ordering", "lambda_i(Z) >= lambda_i(Zhat) >= lambda_i(Zbreve), i <= K"};
    p.informational = true;
    NominalChannel<double> nom = cal_.nominal;
    const RobustSurrogate<double> sur = robust_surrogate(nom);
    nom.alpha = sur.alpha_used;
    const CM dz = scaled_spread(nom, cal_.delta_z.matrix);
    EigPerturbation<double> pert;
    try {
      pert = eig_perturb_first_order(nom, dz);
    } catch (const Error& e) {
      p.detail = e.what();
      return p;
    }
    const CM us = nom.eig_vectors.leftCols(k_) + pert.delta_u;
    const RVector<double> shifted = (nom.eig_values.head(k_).array() - sur.epsilon_h).matrix();
    const CM zhat = us * shifted.cast<Complex<double>>().asDiagonal() * us.adjoint();
    const RVector<double> lhat = hermitian_eig_descending<double>((zhat + zhat.adjoint()) / 2.0).values.head(k_);
    const RVector<double> lbreve = hermitian_eig_descending<double>(sur.z_breve).values.head(k_);
    long upper = 0, lower = 0;
    for (int j = 0; j < o_.samples_per_nominal * 5; ++j) {
      Rng r = rng(11, static_cast<std::uint64_t>(j));
      const CM h = nom.mean + sample_in_ball<double>(n_, k_, nom.alpha, r).delta;
      const RVector<double> lz = hermitian_eig_descending<double>(h * h.adjoint()).values.head(k_);
      const bool bad_upper = ((lz - lhat).array() < -1e-12).any();
      const bool bad_lower = ((lhat - lbreve).array() < -1e-12).any();
      upper += bad_upper;
      lower += bad_lower;
      record(p, bad_upper || bad_lower, std::max(0.0, std::max((lhat - lz).maxCoeff(), (lbreve - lhat).maxCoeff())));
    }
    p.passed = true;
    p.detail = fmt::format("violation rate {:.4f} (Z < Zhat in {} samples, Zhat < Zbreve in {} samples)",
                           double(p.violations) / double(std::max<long>(1, p.checks)), upper, lower);
    return p;
  }

 private:
  static void record(PropertyResult& p, bool violated, double deviation) {
    ++p.checks;
    if (violated) {
      ++p.violations;
      p.passed = false;
    }
    if (std::isfinite(deviation)) p.worst = std::max(p.worst, deviation);
  }

  /// Channel-spread matrix for a random nominal: mean of Δ Δᴴ over a few
  /// ball draws (the cross terms average out).
  CM spread_for(const NominalChannel<double>& nom, Rng& r) const {
    CM acc = CM::Zero(n_, n_);
    for (int j = 0; j < 16; ++j) {
      const CM d = sample_in_ball<double>(n_, k_, std::max(nom.alpha, 1e-12), r).delta;
      acc += d * d.adjoint();
    }
    return (acc + acc.adjoint()) / 32.0;
  }

  static CM scaled_spread(const NominalChannel<double>& nom, const CM& dz) {
    const double norm = dz.norm();
    const double eps = epsilon_h(nom);
    return norm > 0 ? CM(dz * (eps / norm)) : CM(CM::Zero(dz.rows(), dz.cols()));
  }

  /// Nominal whose top-K eigenvalues are spread over a decade, so first-order
  /// theory is well conditioned.
  NominalChannel<double> separated_nominal(Rng& r) const {
    const CM u = random_orthonormal_rows<double>(n_, n_, r).adjoint();
    const CM v = random_orthonormal_rows<double>(k_, k_, r);
    RVector<double> sv(k_);
    for (Eigen::Index j = 0; j < k_; ++j) sv(j) = std::pow(10.0, 1.0 - double(j) / double(std::max<Eigen::Index>(1, k_ - 1)));
    const CM mean = u.leftCols(k_) * sv.cast<Complex<double>>().asDiagonal() * v;
    return make_nominal<double>(mean, 0.0);
  }

  const Scenario& s_;
  const ValidationOptions& o_;
  const Calibration& cal_;
  Eigen::Index n_, k_;
};

}  // namespace

bool ValidationReport::all_passed() const {
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyResult& p) { return p.informational || p.passed; });
}

std::string ValidationReport::to_json() const {
  nlohmann::ordered_json j;
  j["passed"] = all_passed();
  j["properties"] = nlohmann::ordered_json::array();
  for (const auto& p : properties) {
    nlohmann::ordered_json e;
    e["name"] = p.name;
    e["formula"] = p.formula;
    e["status"] = p.informational ? "info" : (p.passed ? "pass" : "fail");
    e["checks"] = p.checks;
    e["violations"] = p.violations;
    e["worst_deviation"] = p.worst;
    if (!p.detail.empty()) e["detail"] = p.detail;
    j["properties"].push_back(e);
  }
  return j.dump(2) + "\n";
}

ValidationReport run_validation(const Scenario& scenario, const ValidationOptions& options) {
  const Calibration calibration = calibrate(scenario);
  const Suite suite(scenario, options, calibration);
  ValidationReport report;
  auto& out = report.properties;
  out.push_back(suite.orthonormality());
  out.push_back(suite.inverse_trace_identity());
  out.push_back(suite.onboard_vs_onground());
  out.push_back(suite.worst_case_bound());
  out.push_back(suite.robust_argmin(Direction::return_link));
  out.push_back(suite.robust_argmin(Direction::forward_link));
  auto [maj, schur] = suite.majorization();
  out.push_back(maj);
  out.push_back(schur);
  out.push_back(suite.eigvec_first_order());
  out.push_back(suite.isotropic_null());
  auto [power, trace] = suite.forward_link();
  out.push_back(power);
  out.push_back(trace);
  out.push_back(suite.surrogate_ordering());
  return report;
}

}  // namespace satbeam
