/*******************************************************************************
 * Copyright 2026 The sketchov Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *******************************************************************************/
#include "sketchov/proxies.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sketchov/random.hpp"

namespace sketchov {

namespace {

Vector ranked_cumulative_share(const Vector& weights, const Vector& theta) {
  const double total = weights.sum();
  if (!(total > 0.0)) throw DomainError("normalized summation: nonpositive total");
  const auto order = magnitude_ranking(theta);
  Vector curve(weights.size());
  double running = 0.0;
  for (Index j = 0; j < weights.size(); ++j) {
    running += weights[order[static_cast<std::size_t>(j)]];
    curve[j] = running / total;
  }
  // Summation order differs from total's; pin the endpoint.
  curve[weights.size() - 1] = 1.0;
  return curve;
}

void check_k(Index k, Index dim, const char* who) {
  if (k < 1 || k > dim) throw ParameterError(std::string(who) + ": need 1 <= k <= D");
}

}  // namespace

QuadraticObjective::QuadraticObjective(OperatorPtr h0, Vector g0, double c0)
    : h0_(std::move(h0)), g0_(std::move(g0)), c0_(c0) {
  if (!h0_) throw ContractError("QuadraticObjective: null Hessian");
  if (!h0_->hermitian()) throw ContractError("QuadraticObjective: Hessian must be hermitian");
  if (h0_->rows() != g0_.size()) throw ShapeError("QuadraticObjective: H0 / g0 size mismatch");
}

double QuadraticObjective::value(const Vector& theta) const {
  if (theta.size() != dim()) throw ShapeError("QuadraticObjective::value: wrong dimension");
  const Matrix h_theta = h0_->apply(theta);
  return c0_ + g0_.dot(theta) + 0.5 * theta.dot(h_theta.col(0));
}

Vector QuadraticObjective::gradient(const Vector& theta) const {
  if (theta.size() != dim()) throw ShapeError("QuadraticObjective::gradient: wrong dimension");
  return g0_ + h0_->apply(theta).col(0);
}

MonteCarloEstimate masked_perturbation_expectation(const ScalarObjective& obj,
                                                   const ParameterVector& theta,
                                                   const SparseMask& mask, int n_samples,
                                                   std::uint64_t seed) {
  if (n_samples < 2) throw ParameterError("masked_perturbation_expectation: n_samples >= 2");
  if (theta.dim() != obj.dim() || mask.dim() != obj.dim())
    throw ShapeError("masked_perturbation_expectation: dimension mismatch");
  Engine engine = make_engine(seed, 0xa1);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double base = obj.value(theta.values());
  double mean = 0.0;
  double m2 = 0.0;
  Vector point = theta.values();
  for (int s = 0; s < n_samples; ++s) {
    for (auto i : mask.indices()) point[i] = theta.values()[i] + normal(engine);
    const double delta = obj.value(point) - base;
    // Welford update
    const double shift = delta - mean;
    mean += shift / (s + 1);
    m2 += shift * (delta - mean);
  }
  const double var = m2 / (n_samples - 1);
  return {mean, std::sqrt(var / n_samples)};
}

Vector psd_subtrace_curve(const Vector& psd_diagonal, const ParameterVector& theta) {
  if (psd_diagonal.size() != theta.dim()) throw ShapeError("psd_subtrace: dimension mismatch");
  Vector clamped = psd_diagonal;
  for (Index i = 0; i < clamped.size(); ++i) {
    if (!std::isfinite(clamped[i]) || clamped[i] < -1e-10)
      throw DomainError("psd_subtrace: diagonal entry " + std::to_string(i) +
                        " is not nonnegative");
    clamped[i] = std::max(clamped[i], 0.0);
  }
  if (!(clamped.sum() > 0.0)) throw DomainError("psd_subtrace: nonpositive trace");
  return ranked_cumulative_share(clamped, theta.values());
}

double psd_subtrace(const Vector& psd_diagonal, const ParameterVector& theta, Index k) {
  check_k(k, theta.dim(), "psd_subtrace");
  return psd_subtrace_curve(psd_diagonal, theta)[k - 1];
}

double squared_hessian_diag(const LinearOperator& h, Index i) {
  if (!h.hermitian()) throw ContractError("squared_hessian_diag: operator must be hermitian");
  if (i < 0 || i >= h.cols())
    throw ShapeError("squared_hessian_diag: index " + std::to_string(i) + " out of range");
  Matrix e = Matrix::Zero(h.cols(), 1);
  e(i, 0) = 1.0;
  return h.apply(e).col(0).squaredNorm();
}

Vector sam_deltas(const ScalarObjective& obj, const ParameterVector& theta, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ParameterError("sam_deltas: radius must be positive");
  if (theta.dim() != obj.dim()) throw ShapeError("sam_deltas: dimension mismatch");
  const Vector g = obj.gradient(theta.values());
  const double gnorm = g.norm();
  if (!(gnorm > 0.0)) throw DomainError("sam_deltas: zero gradient, direction undefined");
  const Vector direction = g / gnorm;
  const double base = obj.value(theta.values());
  Vector deltas(theta.dim());
  Vector point = theta.values();
  for (Index i = 0; i < theta.dim(); ++i) {
    point[i] = theta.values()[i] + lambda * direction[i];
    deltas[i] = std::abs(base - obj.value(point));
    point[i] = theta.values()[i];
  }
  return deltas;
}

Vector sam_feature_curve(const ScalarObjective& obj, const ParameterVector& theta,
                         double lambda) {
  return ranked_cumulative_share(sam_deltas(obj, theta, lambda), theta.values());
}

double sam_feature(const ScalarObjective& obj, const ParameterVector& theta, double lambda,
                   Index k) {
  check_k(k, theta.dim(), "sam_feature");
  return sam_feature_curve(obj, theta, lambda)[k - 1];
}

double gradient_check(const ScalarObjective& obj, int n_points, std::uint64_t seed,
                      double step) {
  Engine engine = make_engine(seed, 0xd1);
  double worst = 0.0;
  for (int p = 0; p < n_points; ++p) {
    Vector theta = gaussian_matrix(obj.dim(), 1, engine).col(0);
    const Vector g = obj.gradient(theta);
    Vector fd(obj.dim());
    for (Index i = 0; i < obj.dim(); ++i) {
      const double keep = theta[i];
      theta[i] = keep + step;
      const double up = obj.value(theta);
      theta[i] = keep - step;
      const double down = obj.value(theta);
      theta[i] = keep;
      fd[i] = (up - down) / (2.0 * step);
    }
    worst = std::max(worst, (fd - g).norm() / std::max(g.norm(), 1e-12));
  }
  return worst;
}

double hessian_check(const ScalarObjective& obj, int n_points, std::uint64_t seed, double step) {
  const LinearOperator* h = obj.hessian();
  if (h == nullptr) throw ContractError("hessian_check: objective has no Hessian operator");
  Engine engine = make_engine(seed, 0xd2);
  double worst = 0.0;
  for (int p = 0; p < n_points; ++p) {
    const Vector theta = gaussian_matrix(obj.dim(), 1, engine).col(0);
    const Vector dir = gaussian_matrix(obj.dim(), 1, engine).col(0).normalized();
    const Vector fd =
        (obj.gradient(theta + step * dir) - obj.gradient(theta - step * dir)) / (2.0 * step);
    const Vector hv = h->apply(dir).col(0);
    worst = std::max(worst, (fd - hv).norm() / std::max(hv.norm(), 1e-12));
  }
  return worst;
}

}  // namespace sketchov
