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
#include "sketchov/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "sketchov/kernels.hpp"

namespace sketchov {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kCosineExcessTolerance = 1e-8;
constexpr double kFubiniSaturation = 1e-12;

std::span<const double> values_of(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

OrthonormalBasis::OrthonormalBasis(Matrix columns) : columns_(std::move(columns)) {
  if (columns_.cols() < 1 || columns_.cols() > columns_.rows())
    throw ShapeError("OrthonormalBasis: need 1 <= k <= D, got D=" +
                     std::to_string(columns_.rows()) + " k=" + std::to_string(columns_.cols()));
}

OrthonormalBasis OrthonormalBasis::from_columns(Matrix columns, double tolerance) {
  OrthonormalBasis basis(std::move(columns));
  const double err = basis.orthonormality_error();
  if (!(err <= tolerance))
    throw DomainError("OrthonormalBasis: columns not orthonormal (error " + std::to_string(err) +
                      ")");
  return basis;
}

OrthonormalBasis OrthonormalBasis::unchecked(Matrix columns) {
  return OrthonormalBasis(std::move(columns));
}

double OrthonormalBasis::orthonormality_error() const {
  const Matrix gram = columns_.transpose() * columns_;
  return (gram - Matrix::Identity(rank(), rank())).cwiseAbs().maxCoeff();
}

PrincipalAngles::PrincipalAngles(Vector sigma) : sigma_(std::move(sigma)) {
  for (Index i = 0; i < sigma_.size(); ++i) {
    if (!(sigma_[i] >= 0.0 && sigma_[i] <= kHalfPi))
      throw DomainError("PrincipalAngles: angle outside [0, pi/2]");
    if (i > 0 && sigma_[i] < sigma_[i - 1])
      throw DomainError("PrincipalAngles: angles must be nondecreasing");
  }
}

PrincipalAngles PrincipalAngles::from_cosines(const Vector& cosines) {
  Vector sigma(cosines.size());
  for (Index i = 0; i < cosines.size(); ++i) {
    double c = cosines[i];
    if (!std::isfinite(c) || c > 1.0 + kCosineExcessTolerance || c < -kCosineExcessTolerance)
      throw DomainError("principal angles: cosine " + std::to_string(c) + " outside [0, 1]");
    c = std::clamp(c, 0.0, 1.0);
    sigma[i] = std::acos(c);
  }
  std::sort(sigma.begin(), sigma.end());
  return PrincipalAngles(std::move(sigma));
}

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::geodesic: return "geodesic";
    case MetricKind::chordal2: return "chordal2";
    case MetricKind::chordalF: return "chordalF";
    case MetricKind::proj2: return "proj2";
    case MetricKind::projF: return "projF";
    case MetricKind::fubini_study: return "fubini_study";
    case MetricKind::overlap: return "overlap";
  }
  return "unknown";
}

std::optional<MetricKind> parse_metric_kind(std::string_view name) {
  for (MetricKind kind : kAllMetricKinds)
    if (to_string(kind) == name) return kind;
  return std::nullopt;
}

double analytic_max(MetricKind kind, Index k) {
  const double kd = static_cast<double>(k);
  switch (kind) {
    case MetricKind::geodesic: return std::sqrt(kd) * kHalfPi;
    case MetricKind::chordal2: return std::numbers::sqrt2;
    case MetricKind::chordalF: return std::sqrt(2.0 * kd);
    case MetricKind::proj2: return 1.0;
    case MetricKind::projF: return std::sqrt(kd);
    case MetricKind::fubini_study: return kHalfPi;
    case MetricKind::overlap: return 1.0;
  }
  return 0.0;
}

PrincipalAngles principal_angles(const OrthonormalBasis& q1, const OrthonormalBasis& q2) {
  if (q1.dim() != q2.dim() || q1.rank() != q2.rank())
    throw ShapeError("principal_angles: bases must share D and k");
  // Two rank-D subspaces of R^D coincide.
  if (q1.rank() == q1.dim()) return PrincipalAngles(Vector::Zero(q1.rank()));
  const Matrix cross = q1.columns().transpose() * q2.columns();
  Eigen::BDCSVD<Matrix> svd(cross);
  return PrincipalAngles::from_cosines(svd.singularValues());
}

double metric(MetricKind kind, const PrincipalAngles& angles) {
  const Vector& s = angles.sigma();
  const Index k = s.size();
  switch (kind) {
    case MetricKind::geodesic: return s.norm();
    case MetricKind::chordal2: return k == 0 ? 0.0 : 2.0 * std::sin(s[k - 1] / 2.0);
    case MetricKind::chordalF: return (2.0 * (s.array() / 2.0).sin()).matrix().norm();
    case MetricKind::proj2: return k == 0 ? 0.0 : std::sin(s[k - 1]);
    case MetricKind::projF: return s.array().sin().matrix().norm();
    case MetricKind::fubini_study: {
      double log_prod = 0.0;
      for (Index i = 0; i < k; ++i) {
        if (s[i] >= kHalfPi - kFubiniSaturation) return kHalfPi;
        log_prod += std::log(std::cos(s[i]));
      }
      return std::acos(std::min(1.0, std::exp(log_prod)));
    }
    case MetricKind::overlap: {
      if (k == 0) return 1.0;
      const Vector c = s.array().cos();
      return kernels::sum_squares(values_of(c)) / static_cast<double>(k);
    }
  }
  return 0.0;
}

double similarity(MetricKind kind, double value, Index k) {
  if (k < 1) throw ParameterError("similarity: k must be >= 1");
  const double top = analytic_max(kind, k);
  const double slack = 1e-12 * std::max(1.0, top);
  if (!std::isfinite(value) || value < -slack || value > top + slack)
    throw DomainError("similarity: " + std::string(to_string(kind)) + " value " +
                      std::to_string(value) + " outside [0, " + std::to_string(top) + "]");
  value = std::clamp(value, 0.0, top);
  return is_distance(kind) ? 1.0 - value / top : value;
}

double overlap(const OrthonormalBasis& q1, const OrthonormalBasis& q2) {
  if (q1.dim() != q2.dim() || q1.rank() != q2.rank())
    throw ShapeError("overlap: bases must share D and k");
  if (q1.rank() == q1.dim()) return 1.0;
  const Matrix cross = q1.columns().transpose() * q2.columns();
  const double energy =
      kernels::sum_squares({cross.data(), static_cast<std::size_t>(cross.size())});
  return energy / static_cast<double>(q1.rank());
}

Matrix orthonormalize(const Matrix& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(m, n);
  const auto& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

OrthonormalBasis sample_stiefel(Index dim, Index k, Engine& engine) {
  if (k < 1 || k > dim)
    throw ParameterError("sample_stiefel: need 1 <= k <= D, got D=" + std::to_string(dim) +
                         " k=" + std::to_string(k));
  return OrthonormalBasis::unchecked(orthonormalize(gaussian_matrix(dim, k, engine)));
}

OrthonormalBasis sample_stiefel(Index dim, Index k, std::uint64_t seed) {
  Engine engine = make_engine(seed, 0x5715);
  return sample_stiefel(dim, k, engine);
}

double overlap_baseline(Index dim, Index k) {
  if (k < 1 || k > dim) throw ParameterError("overlap_baseline: need 1 <= k <= D");
  return static_cast<double>(k) / static_cast<double>(dim);
}

}  // namespace sketchov
