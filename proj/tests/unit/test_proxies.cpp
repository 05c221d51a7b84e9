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
#include <doctest.h>

#include <cmath>
#include <memory>

#include "sketchov/masks.hpp"
#include "sketchov/operator.hpp"
#include "sketchov/proxies.hpp"
#include "sketchov/random.hpp"
#include "test_util.hpp"

using namespace sketchov;

namespace {

std::shared_ptr<DiagonalOperator> diag_op(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return std::make_shared<DiagonalOperator>(v);
}

}  // namespace

TEST_CASE("masked perturbation expectation on diag(2, -2, 4)") {
  const QuadraticObjective obj(diag_op({2.0, -2.0, 4.0}), Vector::Zero(3));
  const ParameterVector theta(Vector{{0.3, -1.0, 2.0}});
  const MonteCarloEstimate cancel =
      masked_perturbation_expectation(obj, theta, SparseMask(3, {0, 1}), 100000, 1);
  CHECK(std::abs(cancel.estimate) <= 3.0 * cancel.std_error);
  const MonteCarloEstimate single =
      masked_perturbation_expectation(obj, theta, SparseMask(3, {2}), 100000, 2);
  CHECK(std::abs(single.estimate - 2.0) <= 3.0 * single.std_error);
  CHECK(single.std_error > 0.0);
}

TEST_CASE("flat objective has zero perturbation response") {
  const QuadraticObjective flat(std::make_shared<DiagonalOperator>(Vector::Zero(4)), Vector::Zero(4), 1.5);
  const MonteCarloEstimate e = masked_perturbation_expectation(
      flat, ParameterVector(Vector::Ones(4)), SparseMask(4, {0, 2}), 1000, 3);
  CHECK(e.estimate == 0.0);
  CHECK_THROWS_AS(masked_perturbation_expectation(flat, ParameterVector(Vector::Ones(4)),
                                                  SparseMask(4, {0}), 1, 3),
                  ParameterError);
}

TEST_CASE("perturbation estimates converge to half the masked trace") {
  for (int t = 0; t < 20; ++t) {
    const Index dim = 4 + t % 13;
    const Matrix h = test::random_symmetric(dim, 500 + t);
    auto op = std::make_shared<DenseOperator>(h, true);
    const Vector g0 = gaussian_matrix(dim, 1, 600 + t, 0).col(0);
    const QuadraticObjective obj(op, g0, 0.25);
    const SparseMask m = sample_mask(dim, 1 + t % dim, 700 + t);
    double truth = 0.0;
    for (auto i : m.indices()) truth += 0.5 * h(i, i);
    const ParameterVector theta(gaussian_matrix(dim, 1, 800 + t, 0).col(0));
    const MonteCarloEstimate e = masked_perturbation_expectation(obj, theta, m, 100000, 900 + t);
    CHECK(std::abs(e.estimate - truth) <= 4.0 * e.std_error);
  }
}

TEST_CASE("psd subtrace features") {
  const ParameterVector theta(Vector{{4.0, -3.0, 2.0, 1.0}});
  CHECK(psd_subtrace(Vector{{4.0, 3.0, 2.0, 1.0}}, theta, 2) == doctest::Approx(0.7));
  for (Index k = 1; k <= 7; ++k) {
    const ParameterVector any(gaussian_matrix(7, 1, 10 + k, 0).col(0));
    CHECK(psd_subtrace(Vector::Ones(7), any, k) == static_cast<double>(k) / 7.0);
  }
  const Vector diag = gaussian_matrix(9, 1, 3, 0).col(0).cwiseAbs();
  const ParameterVector th(gaussian_matrix(9, 1, 4, 0).col(0));
  const Vector curve = psd_subtrace_curve(diag, th);
  CHECK(curve[8] == 1.0);
  CHECK(psd_subtrace(diag, th, 9) == 1.0);
  for (Index k = 1; k < 9; ++k) CHECK(curve[k] >= curve[k - 1]);
  // Tiny negative round-off is clamped; real negatives are rejected.
  CHECK(psd_subtrace(Vector{{1.0, -1e-12, 1.0}}, ParameterVector(Vector{{3.0, 2.0, 1.0}}), 1) ==
        doctest::Approx(0.5));
  CHECK_THROWS_AS(psd_subtrace(Vector{{1.0, -0.5}}, ParameterVector(Vector{{1.0, 2.0}}), 1), DomainError);
  CHECK_THROWS_AS(psd_subtrace(Vector::Zero(3), ParameterVector(Vector::Ones(3)), 1), DomainError);
  CHECK_THROWS_AS(psd_subtrace(Vector::Ones(3), ParameterVector(Vector::Ones(3)), 4), ParameterError);
}

TEST_CASE("squared hessian diagonal") {
  CHECK(squared_hessian_diag(*diag_op({2.0, -2.0, 4.0}), 1) == 4.0);
  CHECK(squared_hessian_diag(DiagonalOperator(Vector::Zero(5)), 3) == 0.0);
  const Matrix h = test::random_symmetric(20, 77);
  const Matrix h2 = h * h;
  DenseOperator op(h, true);
  for (Index i = 0; i < 20; ++i) {
    const double v = squared_hessian_diag(op, i);
    CHECK(v >= 0.0);
    CHECK(std::abs(v - h2(i, i)) <= 1e-10 * std::max(1.0, h2(i, i)));
  }
  CHECK_THROWS_AS(squared_hessian_diag(op, 20), ShapeError);
}

TEST_CASE("sam features") {
  SUBCASE("gradient along e_0 leaves index 1 untouched") {
    // theta = 0, g0 = (1, 0): g(theta) = (1, 0), H = I.
    const QuadraticObjective obj(std::make_shared<IdentityOperator>(2), Vector{{1.0, 0.0}});
    const ParameterVector theta(Vector{{2.0, 1.0}});
    // g(theta) = g0 + theta = (3, 1); use a theta that keeps g on e_0.
    const ParameterVector aligned(Vector{{1.0, 0.0}});
    const Vector deltas = sam_deltas(obj, aligned, 0.1);
    CHECK(deltas[1] == 0.0);
    CHECK(sam_feature(obj, aligned, 0.1, 1) == 1.0);
    CHECK(sam_feature(obj, theta, 0.1, 2) == 1.0);
  }
  SUBCASE("closed form on a quadratic") {
    const Index dim = 12;
    const Matrix h = test::random_symmetric(dim, 5);
    const Vector g0 = gaussian_matrix(dim, 1, 6, 0).col(0);
    const QuadraticObjective obj(std::make_shared<DenseOperator>(h, true), g0);
    const ParameterVector theta(gaussian_matrix(dim, 1, 7, 0).col(0));
    const Vector g = g0 + h * theta.values();
    const Vector eps = g / g.norm();
    for (double lambda : kDefaultSamRadii) {
      Vector closed(dim);
      for (Index i = 0; i < dim; ++i) {
        const double t = lambda * eps[i];
        closed[i] = std::abs(t * g[i] + 0.5 * t * t * h(i, i));
      }
      const Vector deltas = sam_deltas(obj, theta, lambda);
      for (Index i = 0; i < dim; ++i) CHECK(std::abs(deltas[i] - closed[i]) <= 1e-10);
      const Vector curve = sam_feature_curve(obj, theta, lambda);
      const auto order = magnitude_ranking(theta.values());
      double running = 0.0;
      for (Index k = 1; k <= dim; ++k) {
        running += closed[order[static_cast<std::size_t>(k - 1)]];
        CHECK(std::abs(curve[k - 1] - running / closed.sum()) <= 1e-10);
        if (k > 1) CHECK(curve[k - 1] >= curve[k - 2]);
      }
      CHECK(curve[dim - 1] == 1.0);
      CHECK(sam_feature(obj, theta, lambda, dim) == 1.0);
    }
  }
  SUBCASE("errors") {
    const QuadraticObjective obj(std::make_shared<IdentityOperator>(2), Vector::Zero(2));
    CHECK_THROWS_AS(sam_deltas(obj, ParameterVector(Vector::Zero(2)), 0.1), DomainError);
    CHECK_THROWS_AS(sam_deltas(obj, ParameterVector(Vector::Ones(2)), 0.0), ParameterError);
    CHECK_THROWS_AS(sam_feature(obj, ParameterVector(Vector::Ones(2)), 0.1, 3), ParameterError);
  }
}

TEST_CASE("quadratic objective derivatives") {
  const Matrix h = test::random_symmetric(10, 8);
  const QuadraticObjective obj(std::make_shared<DenseOperator>(h, true),
                               gaussian_matrix(10, 1, 9, 0).col(0), -0.5);
  CHECK(gradient_check(obj, 10, 1) <= 1e-5);
  CHECK(hessian_check(obj, 10, 2) <= 1e-4);
  const Vector theta = gaussian_matrix(10, 1, 10, 0).col(0);
  CHECK((obj.gradient(theta) - (obj.linear_term() + h * theta)).norm() <= 1e-12);
  CHECK_THROWS_AS(QuadraticObjective(std::make_shared<DenseOperator>(gaussian_matrix(3, 3, 1, 0)),
                                     Vector::Zero(3)),
                  ContractError);
  CHECK_THROWS_AS(QuadraticObjective(std::make_shared<IdentityOperator>(3), Vector::Zero(4)),
                  ShapeError);
}
