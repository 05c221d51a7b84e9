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
#include <string>
#include <vector>

#include "sketchov/dense.hpp"
#include "sketchov/grassmann.hpp"
#include "sketchov/masks.hpp"
#include "sketchov/operator.hpp"
#include "sketchov/random.hpp"
#include "sketchov/sketch.hpp"
#include "test_util.hpp"

using namespace sketchov;

namespace {

double orth_error(const Matrix& q) {
  return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

double subspace_overlap(const Matrix& a, const Matrix& b) {
  return overlap(OrthonormalBasis::unchecked(a), OrthonormalBasis::unchecked(b));
}

// Captures warnings for the lifetime of the object.
struct WarningCapture {
  std::vector<std::string> messages;
  WarningCapture() {
    set_warning_sink([this](const std::string& m) { messages.push_back(m); });
  }
  ~WarningCapture() { set_warning_sink(nullptr); }
};

}  // namespace

TEST_SUITE("sketch") {

TEST_CASE("measurement ensembles") {
  const MeasurementEnsemble a = draw_measurements(8, 4, 2, 7);
  const MeasurementEnsemble b = draw_measurements(8, 4, 2, 7);
  CHECK(a.upsilon == b.upsilon);
  CHECK(a.omega_inner == b.omega_inner);
  CHECK(a.omega_outer == b.omega_outer);
  CHECK(a.upsilon.rows() == 8);
  CHECK(a.upsilon.cols() == 4);
  CHECK(a.omega_inner.cols() == 2);
  CHECK(a.omega_outer.cols() == 2);
  CHECK(a.omega_outer != draw_measurements(8, 4, 2, 8).omega_outer);
  CHECK_THROWS_AS(draw_measurements(8, 2, 4, 1), ParameterError);
  CHECK_THROWS_AS(draw_measurements(8, 9, 2, 1), ParameterError);
  CHECK_THROWS_AS(draw_measurements(8, 4, 0, 1), ParameterError);
  CHECK(default_inner(10, 1000) == 21);
  CHECK(default_inner(10, 15) == 15);
}

TEST_CASE("seigh recovers an exact-rank diagonal operator") {
  Vector d = Vector::Zero(100);
  for (Index i = 0; i < 10; ++i) d[i] = 10.0 - static_cast<double>(i);
  DiagonalOperator op(d);
  const SketchedEigh dec = seigh(op, draw_measurements(100, 31, 15, 3));
  for (Index i = 0; i < 10; ++i) CHECK(test::rel_err(dec.eigvals[i], d[i]) <= 1e-8);
  CHECK(subspace_overlap(dec.eigenbasis().leftCols(10), Matrix::Identity(100, 10)) >= 1.0 - 1e-8);
  CHECK(orth_error(dec.q) <= 1e-10);
  CHECK(orth_error(dec.eigenbasis()) <= 1e-10);
  for (Index i = 1; i < dec.rank(); ++i)
    CHECK(std::abs(dec.eigvals[i]) <= std::abs(dec.eigvals[i - 1]));
  CHECK(dec.diagnostics.degenerate_columns == 5);
  for (Index i = 10; i < 15; ++i) CHECK(dec.eigvals[i] == 0.0);

  const SketchedEigh one = truncate(dec, 1);
  CHECK(one.eigvals[0] == doctest::Approx(10.0).epsilon(1e-8));
  CHECK(std::abs(std::abs(one.eigenbasis()(0, 0)) - 1.0) <= 1e-8);
  const SketchedEigh full = truncate(dec, dec.rank());
  CHECK(full.eigvals == dec.eigvals);
  CHECK(full.u == dec.u);
  CHECK_THROWS_AS(truncate(dec, 0), ParameterError);
  CHECK_THROWS_AS(truncate(dec, 16), ParameterError);
}

TEST_CASE("seigh orders by magnitude: negative rank-one") {
  const Vector q = gaussian_matrix(30, 1, 4, 0).col(0).normalized();
  DenseOperator op(-3.0 * q * q.transpose(), true);
  const SketchedEigh dec = seigh(op, draw_measurements(30, 5, 2, 9));
  CHECK(dec.eigvals[0] == doctest::Approx(-3.0).epsilon(1e-10));
  CHECK(std::abs(dec.eigvals[1]) <= 1e-10);
  CHECK(std::abs(q.dot(dec.eigenbasis().col(0))) >= 1.0 - 1e-8);
}

TEST_CASE("seigh scalar case") {
  DenseOperator op(Matrix::Constant(1, 1, 3.0), true);
  const SketchedEigh dec = seigh(op, draw_measurements(1, 1, 1, 2));
  CHECK(dec.eigvals.size() == 1);
  CHECK(dec.eigvals[0] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("seigh rejects non-hermitian operators") {
  DenseOperator op(gaussian_matrix(6, 6, 1, 0));
  CHECK_THROWS_AS(seigh(op, draw_measurements(6, 5, 2, 1)), ContractError);
  DiagonalOperator d(Vector::Ones(5));
  CHECK_THROWS_AS(seigh(d, draw_measurements(6, 5, 2, 1)), ShapeError);
}

TEST_CASE("zero operator is handled without error") {
  WarningCapture warnings;
  DiagonalOperator zero(Vector::Zero(20));
  const SketchedEigh dec = seigh(zero, draw_measurements(20, 9, 4, 1));
  CHECK(dec.eigvals == Vector::Zero(4));
  CHECK(dec.diagnostics.degenerate_columns == 4);
  CHECK(orth_error(dec.q) <= 1e-10);
  const SketchedSvd svd = ssvd(zero, draw_svd_measurements(20, 20, 9, 4, 1));
  CHECK(svd.singvals == Vector::Zero(4));
}

TEST_CASE("ssvd recovers exact-rank matrices") {
  SUBCASE("rank one") {
    const Vector u = gaussian_matrix(40, 1, 1, 0).col(0).normalized();
    const Vector v = gaussian_matrix(25, 1, 2, 0).col(0).normalized();
    DenseOperator op(2.0 * u * v.transpose());
    WarningCapture warnings;
    const SketchedSvd dec = ssvd(op, draw_svd_measurements(40, 25, 7, 3, 5));
    CHECK(dec.singvals[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(dec.singvals[1] <= 1e-10);
    CHECK(std::abs(u.dot(dec.left_vectors().col(0))) >= 1.0 - 1e-8);
    CHECK(std::abs(v.dot(dec.right_vectors().col(0))) >= 1.0 - 1e-8);
  }
  SUBCASE("60 x 40, rank 5") {
    const Matrix a = gaussian_matrix(60, 5, 3, 0) * gaussian_matrix(5, 40, 4, 0);
    DenseOperator op(a);
    WarningCapture warnings;
    const SketchedSvd dec = ssvd(op, draw_svd_measurements(60, 40, 21, 10, 6));
    Eigen::JacobiSVD<Matrix> oracle(a);
    for (Index i = 0; i < 5; ++i)
      CHECK(test::rel_err(dec.singvals[i], oracle.singularValues()[i]) <= 1e-8);
    CHECK(orth_error(dec.p) <= 1e-10);
    CHECK(orth_error(dec.q) <= 1e-10);
    CHECK((dec.apply_reconstruction(Matrix::Identity(40, 40)) - a).norm() <= 1e-8 * a.norm());
  }
  CHECK_THROWS_AS(draw_svd_measurements(10, 4, 8, 5, 1), ParameterError);
}

TEST_CASE("measurement counts") {
  auto planted = std::make_shared<PlantedOperator>(
      make_planted_operator(60, Vector::LinSpaced(8, 8, 1), sample_mask(60, 8, 1), 0.0, 2));
  {
    CountingOperator counter(planted);
    seigh(counter, draw_measurements(60, 25, 12, 1));
    CHECK(counter.total_columns() == 25);
  }
  {
    CountingOperator counter(planted);
    MeasureOptions opt;
    opt.block_columns = 4;
    opt.workers = 3;
    seigh(counter, draw_measurements(60, 25, 12, 1), opt);
    CHECK(counter.total_columns() == 25);
  }
  {
    CountingOperator counter(planted);
    ssvd(counter, draw_svd_measurements(60, 60, 25, 12, 1));
    CHECK(counter.total_columns() == 25 + 2 * 12);
  }
  {
    auto dense = std::make_shared<DenseOperator>(gaussian_matrix(30, 20, 1, 0));
    CountingOperator counter(dense);
    ssvd(counter, draw_svd_measurements(30, 20, 13, 6, 1));
    CHECK(counter.apply_columns() == 13 + 6);
    CHECK(counter.adjoint_columns() == 6);
  }
}

TEST_CASE("threaded measurement is bit-identical to serial at equal block width") {
  const auto planted =
      make_planted_operator(80, Vector::LinSpaced(10, 10, 1), sample_mask(80, 10, 1), 0.5, 3);
  const MeasurementEnsemble ens = draw_measurements(80, 31, 15, 4);
  MeasureOptions opt;
  opt.block_columns = 3;
  const SketchedEigh serial = seigh(planted, ens, opt);
  opt.workers = 4;
  const SketchedEigh threaded = seigh(planted, ens, opt);
  CHECK(test::bit_equal(serial.q, threaded.q));
  CHECK(test::bit_equal(serial.u, threaded.u));
  CHECK(serial.eigvals == threaded.eigvals);
}

TEST_CASE("exact-rank capture over 20 seeds, and seigh/ssvd consistency") {
  Vector ev(12);
  for (Index i = 0; i < 12; ++i) ev[i] = (i % 3 == 0 ? -1.0 : 1.0) * (12.0 - static_cast<double>(i));
  int failures = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const PlantedOperator op = make_planted_operator(150, ev, sample_mask(150, 12, s), 0.2, s);
    const DenseEigh oracle = dense_top_eigh(op.materialize(), 12);
    const SketchedEigh dec = seigh(op, draw_measurements(150, 35, 17, 100 + s));
    bool ok = true;
    for (Index i = 0; i < 12; ++i) ok = ok && test::rel_err(dec.eigvals[i], oracle.eigvals[i]) <= 1e-6;
    ok = ok && subspace_overlap(dec.eigenbasis().leftCols(12), oracle.eigvecs) >= 1.0 - 1e-8;
    WarningCapture quiet;
    const SketchedSvd svd = ssvd(op, draw_svd_measurements(150, 150, 35, 17, 200 + s));
    for (Index i = 0; i < 12; ++i)
      ok = ok && test::rel_err(svd.singvals[i], std::abs(dec.eigvals[i])) <= 1e-6;
    if (!ok) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("truncated reconstruction of a rank-10 operator") {
  const PlantedOperator op =
      make_planted_operator(90, Vector::LinSpaced(10, 10, 1), sample_mask(90, 10, 2), 0.0, 7);
  const SketchedEigh dec = truncate(seigh(op, draw_measurements(90, 41, 20, 8)), 10);
  const Matrix recon = dec.apply_reconstruction(Matrix::Identity(90, 90));
  CHECK((recon - op.materialize()).norm() <= 1e-8);
  CHECK(residual_estimate(op, dec, 10, 1) <= 1e-6 * op.materialize().norm());
}

TEST_CASE("residual estimate of a zero reconstruction") {
  DiagonalOperator op(Vector::Ones(2));
  SketchedEigh zero;
  zero.q = Matrix::Identity(2, 1);
  zero.u = Matrix::Identity(1, 1);
  zero.eigvals = Vector::Zero(1);
  const ResidualEstimate r = residual_estimate_detailed(op, zero, 4000, 3);
  // E ||A x||^2 = ||A||_F^2 = 2.
  CHECK(std::abs(r.squared_mean - 2.0) <= 3.0 * r.squared_stderr);
  CHECK(r.frobenius == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
  CHECK_THROWS_AS(residual_estimate(op, zero, 0, 1), ParameterError);
}

TEST_CASE("residual shrinks as n_o grows on a decaying spectrum") {
  Vector ev(60);
  for (Index i = 0; i < 60; ++i) ev[i] = 1.0 / std::pow(static_cast<double>(i + 1), 1.5);
  const PlantedOperator op = make_planted_operator(300, ev, sample_mask(300, 10, 1), 0.0, 5);
  const Index k = 10;
  double previous = 1e300;
  double previous_se = 0.0;
  for (Index n_o : {k + 5, 2 * k, 4 * k}) {
    const SketchedEigh dec = seigh(op, draw_measurements(300, default_inner(n_o, 300), n_o, 11));
    const ResidualEstimate r = residual_estimate_detailed(op, dec, 200, 12);
    CHECK(r.squared_mean <= previous + 2.0 * (r.squared_stderr + previous_se));
    previous = r.squared_mean;
    previous_se = r.squared_stderr;
  }
}

TEST_CASE("rank-deficient core solve warns and stays finite") {
  WarningCapture warnings;
  DiagonalOperator op(Vector::LinSpaced(12, 12, 1));
  MeasurementEnsemble ens = draw_measurements(12, 7, 3, 1);
  ens.upsilon.col(1) = ens.upsilon.col(0);
  ens.upsilon.col(2) = ens.upsilon.col(0);
  ens.upsilon.col(3) = ens.upsilon.col(0);
  ens.upsilon.col(4) = ens.upsilon.col(0);
  ens.upsilon.col(5) = ens.upsilon.col(0);
  ens.upsilon.col(6) = ens.upsilon.col(0);
  const SketchedEigh dec = seigh(op, ens);
  CHECK(dec.eigvals.allFinite());
  CHECK(dec.diagnostics.left_solve_rank < 3);
  CHECK_FALSE(warnings.messages.empty());
}

}  // TEST_SUITE
