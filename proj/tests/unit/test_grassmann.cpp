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
#include <numbers>
#include <vector>

#include "sketchov/grassmann.hpp"
#include "sketchov/random.hpp"

using namespace sketchov;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

OrthonormalBasis coordinate_span(Index dim, Index first, Index k) {
  Matrix q = Matrix::Zero(dim, k);
  for (Index j = 0; j < k; ++j) q(first + j, j) = 1.0;
  return OrthonormalBasis::from_columns(q);
}

Matrix random_orthogonal(Index k, std::uint64_t seed) {
  return sample_stiefel(k, k, seed).columns();
}

}  // namespace

TEST_SUITE("grassmann") {

TEST_CASE("principal angles on canonical configurations") {
  const OrthonormalBasis q = sample_stiefel(12, 4, 1);
  const PrincipalAngles same = principal_angles(q, q);
  CHECK(same.sigma().cwiseAbs().maxCoeff() <= 1e-7);

  const PrincipalAngles orth = principal_angles(coordinate_span(10, 0, 3), coordinate_span(10, 3, 3));
  for (Index i = 0; i < 3; ++i) CHECK(orth.sigma()[i] == doctest::Approx(kHalfPi));

  Matrix e1(2, 1);
  e1 << 1.0, 0.0;
  Matrix rot(2, 1);
  rot << std::cos(0.3), std::sin(0.3);
  const PrincipalAngles planar =
      principal_angles(OrthonormalBasis::from_columns(e1), OrthonormalBasis::from_columns(rot));
  CHECK(planar.sigma()[0] == doctest::Approx(0.3).epsilon(1e-12));

  CHECK_THROWS_AS(principal_angles(sample_stiefel(10, 3, 1), sample_stiefel(10, 4, 1)), ShapeError);
  CHECK_THROWS_AS(principal_angles(sample_stiefel(10, 3, 1), sample_stiefel(11, 3, 1)), ShapeError);
}

TEST_CASE("metric values at the extremes") {
  const PrincipalAngles zero(Vector::Zero(5));
  CHECK(metric(MetricKind::geodesic, zero) == 0.0);
  CHECK(metric(MetricKind::overlap, zero) == 1.0);
  CHECK(metric(MetricKind::projF, zero) == 0.0);
  CHECK(metric(MetricKind::fubini_study, zero) == 0.0);

  const PrincipalAngles right(Vector::Constant(4, kHalfPi));
  CHECK(metric(MetricKind::chordalF, right) == doctest::Approx(std::sqrt(8.0)));
  CHECK(metric(MetricKind::overlap, right) == doctest::Approx(0.0));
  CHECK(metric(MetricKind::fubini_study, right) == doctest::Approx(kHalfPi));
  CHECK(metric(MetricKind::geodesic, right) == doctest::Approx(analytic_max(MetricKind::geodesic, 4)));
  CHECK(metric(MetricKind::chordal2, right) == doctest::Approx(std::sqrt(2.0)));
  CHECK(metric(MetricKind::proj2, right) == doctest::Approx(1.0));
  CHECK(metric(MetricKind::projF, right) == doctest::Approx(2.0));
}

TEST_CASE("fubini-study stays finite for tiny cosines") {
  // prod cos(sigma) underflows in linear space; log-space keeps it at pi/2.
  Vector s = Vector::Constant(400, 1.5);
  const double v = metric(MetricKind::fubini_study, PrincipalAngles(s));
  CHECK(std::isfinite(v));
  CHECK(v == doctest::Approx(kHalfPi));
  const double one = metric(MetricKind::fubini_study, PrincipalAngles(Vector::Constant(1, 0.4)));
  CHECK(one == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("similarity normalization") {
  CHECK(similarity(MetricKind::projF, 0.0, 3) == 1.0);
  CHECK(similarity(MetricKind::overlap, 0.25, 3) == 0.25);
  CHECK(similarity(MetricKind::geodesic, analytic_max(MetricKind::geodesic, 7), 7) == 0.0);
  CHECK_THROWS_AS(similarity(MetricKind::proj2, 1.5, 3), DomainError);
  CHECK_THROWS_AS(similarity(MetricKind::proj2, -0.1, 3), DomainError);
  // One near-orthogonal angle collapses proj2 and chordal2 but not geodesic.
  Vector s = Vector::Constant(10, 0.1);
  s[9] = kHalfPi - 1e-9;
  const PrincipalAngles a(s);
  CHECK(similarity(MetricKind::proj2, metric(MetricKind::proj2, a), 10) < 1e-12);
  CHECK(similarity(MetricKind::geodesic, metric(MetricKind::geodesic, a), 10) > 0.5);
}

TEST_CASE("metric names round-trip") {
  for (MetricKind kind : kAllMetricKinds) CHECK(parse_metric_kind(to_string(kind)) == kind);
  CHECK_FALSE(parse_metric_kind("nope").has_value());
}

TEST_CASE("overlap basics") {
  CHECK(overlap(coordinate_span(8, 0, 2), coordinate_span(8, 2, 2)) == 0.0);
  const OrthonormalBasis q = sample_stiefel(9, 4, 2);
  CHECK(overlap(q, q) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(overlap(sample_stiefel(6, 6, 1), sample_stiefel(6, 6, 2)) == 1.0);
  CHECK(overlap_baseline(2048, 102) == doctest::Approx(0.049805).epsilon(1e-5));
  CHECK(overlap_baseline(17, 17) == 1.0);
  CHECK_THROWS_AS(overlap_baseline(5, 6), ParameterError);
}

TEST_CASE("stiefel sampling") {
  const OrthonormalBasis q = sample_stiefel(30, 30, 5);
  CHECK(q.orthonormality_error() <= 1e-10);
  CHECK(sample_stiefel(20, 5, 9).columns() == sample_stiefel(20, 5, 9).columns());
  CHECK(sample_stiefel(20, 5, 9).columns() != sample_stiefel(20, 5, 10).columns());
  CHECK_THROWS_AS(sample_stiefel(4, 5, 1), ParameterError);
  CHECK_THROWS_AS(OrthonormalBasis::from_columns(Matrix::Ones(4, 2)), DomainError);
  CHECK_THROWS_AS(OrthonormalBasis::from_columns(Matrix::Identity(3, 4)), ShapeError);
}

TEST_CASE("properties on random pairs") {
  for (int t = 0; t < 40; ++t) {
    const Index dim = 8 + t;
    const Index k = 1 + t % 7;
    const OrthonormalBasis q1 = sample_stiefel(dim, k, 100 + t);
    const OrthonormalBasis q2 = sample_stiefel(dim, k, 200 + t);
    const PrincipalAngles a12 = principal_angles(q1, q2);
    const PrincipalAngles a21 = principal_angles(q2, q1);
    const OrthonormalBasis r1 =
        OrthonormalBasis::unchecked(q1.columns() * random_orthogonal(k, 300 + t));
    const OrthonormalBasis r2 =
        OrthonormalBasis::unchecked(q2.columns() * random_orthogonal(k, 400 + t));
    const PrincipalAngles rot = principal_angles(r1, r2);
    for (MetricKind kind : kAllMetricKinds) {
      const double v = metric(kind, a12);
      CAPTURE(to_string(kind));
      CHECK(std::abs(v - metric(kind, a21)) <= 1e-10);
      CHECK(std::abs(v - metric(kind, rot)) <= 1e-9);
      CHECK(v >= 0.0);
      CHECK(v <= analytic_max(kind, k) + 1e-12);
      const double s = similarity(kind, v, k);
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
    }
    const double proj = metric(MetricKind::projF, a12);
    CHECK(std::abs(overlap(q1, q2) - (1.0 - proj * proj / static_cast<double>(k))) <= 1e-10);
    CHECK(std::abs(overlap(q1, q2) - metric(MetricKind::overlap, a12)) <= 1e-10);
  }
}

TEST_CASE("baseline spread shrinks with D") {
  auto spread = [](Index dim) {
    const Index k = std::max<Index>(1, std::llround(0.05 * static_cast<double>(dim)));
    std::vector<double> v;
    for (int t = 0; t < 50; ++t)
      v.push_back(overlap(sample_stiefel(dim, k, 7000 + 2 * t), sample_stiefel(dim, k, 7001 + 2 * t)));
    double mean = 0.0;
    for (double x : v) mean += x / 50.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / 49.0);
  };
  const double s64 = spread(64);
  const double s256 = spread(256);
  const double s1024 = spread(1024);
  CHECK(s64 >= s256);
  CHECK(s256 >= s1024);
}

}  // TEST_SUITE
