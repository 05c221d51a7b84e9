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
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "sketchov/common.hpp"
#include "sketchov/masks.hpp"
#include "sketchov/operator.hpp"

namespace sketchov {

/// Differentiable loss L: R^D -> R.
class ScalarObjective {
 public:
  virtual ~ScalarObjective() = default;
  virtual Index dim() const = 0;
  virtual double value(const Vector& theta) const = 0;
  virtual Vector gradient(const Vector& theta) const = 0;
  /// Hessian as an operator, when available.
  virtual const LinearOperator* hessian() const { return nullptr; }
};

/// L(theta) = c0 + g0^T theta + 1/2 theta^T H0 theta. Its third-order
/// Taylor remainder vanishes, so masked perturbation expectations are exact.
class QuadraticObjective final : public ScalarObjective {
 public:
  QuadraticObjective(OperatorPtr h0, Vector g0, double c0 = 0.0);

  Index dim() const override { return g0_.size(); }
  double value(const Vector& theta) const override;
  Vector gradient(const Vector& theta) const override;
  const LinearOperator* hessian() const override { return h0_.get(); }
  const Vector& linear_term() const { return g0_; }

 private:
  OperatorPtr h0_;
  Vector g0_;
  double c0_;
};

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// E[L(theta + delta_m)] - L(theta) with delta ~ N(0, I) restricted to the
/// mask. For quadratics the exact value is 1/2 sum_{i in m} H_ii.
MonteCarloEstimate masked_perturbation_expectation(const ScalarObjective& obj,
                                                   const ParameterVector& theta,
                                                   const SparseMask& mask, int n_samples,
                                                   std::uint64_t seed);

/// xi_k: share of the PSD trace carried by the k largest-|theta| indices.
/// Diagonal entries in [-1e-10, 0) are clamped to zero.
double psd_subtrace(const Vector& psd_diagonal, const ParameterVector& theta, Index k);
/// xi_k for k = 1..D.
Vector psd_subtrace_curve(const Vector& psd_diagonal, const ParameterVector& theta);

/// ||H e_i||^2 = (H^2)_ii from a single application.
double squared_hessian_diag(const LinearOperator& h, Index i);

/// |L(theta) - L(theta + lambda * eps_i e_i)| for every i, eps = g / ||g||.
Vector sam_deltas(const ScalarObjective& obj, const ParameterVector& theta, double lambda);
/// zeta_{lambda,k}: normalized sum of the deltas over the top-k magnitude indices.
double sam_feature(const ScalarObjective& obj, const ParameterVector& theta, double lambda,
                   Index k);
/// zeta_{lambda,k} for k = 1..D.
Vector sam_feature_curve(const ScalarObjective& obj, const ParameterVector& theta,
                         double lambda);

/// Default perturbation radii.
inline const std::vector<double> kDefaultSamRadii = {0.01, 0.1, 1.0};

/// Largest relative deviation between the analytic gradient and central
/// finite differences at n_points random points.
double gradient_check(const ScalarObjective& obj, int n_points, std::uint64_t seed,
                      double step = 1e-5);

/// Same against finite differences of the gradient along random directions.
double hessian_check(const ScalarObjective& obj, int n_points, std::uint64_t seed,
                     double step = 1e-5);

}  // namespace sketchov
