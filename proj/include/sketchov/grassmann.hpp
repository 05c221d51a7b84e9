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

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "sketchov/common.hpp"
#include "sketchov/random.hpp"

namespace sketchov {

/// A D x k matrix with orthonormal columns: a point on the Stiefel manifold
/// standing for its column span on the Grassmannian.
class OrthonormalBasis {
 public:
  /// Validates Q^T Q = I_k to `tolerance` (max abs entry deviation).
  static OrthonormalBasis from_columns(Matrix columns, double tolerance = 1e-10);
  /// For bases produced by an orthogonalizing routine; only shapes are checked.
  static OrthonormalBasis unchecked(Matrix columns);

  Index dim() const { return columns_.rows(); }
  Index rank() const { return columns_.cols(); }
  const Matrix& columns() const { return columns_; }

  /// max_ij |(Q^T Q - I)_ij|
  double orthonormality_error() const;

 private:
  explicit OrthonormalBasis(Matrix columns);
  Matrix columns_;
};

/// Principal angles, nondecreasing, each in [0, pi/2].
class PrincipalAngles {
 public:
  explicit PrincipalAngles(Vector sigma);

  /// From singular values of Q1^T Q2 (any order). Values above 1 by at most
  /// 1e-8 are clamped; a larger excess throws DomainError.
  static PrincipalAngles from_cosines(const Vector& cosines);

  const Vector& sigma() const { return sigma_; }
  Index size() const { return sigma_.size(); }

 private:
  Vector sigma_;
};

enum class MetricKind { geodesic, chordal2, chordalF, proj2, projF, fubini_study, overlap };

inline constexpr std::array<MetricKind, 7> kAllMetricKinds = {
    MetricKind::geodesic, MetricKind::chordal2,     MetricKind::chordalF, MetricKind::proj2,
    MetricKind::projF,    MetricKind::fubini_study, MetricKind::overlap};

std::string_view to_string(MetricKind kind);
std::optional<MetricKind> parse_metric_kind(std::string_view name);

/// Largest value the metric attains on rank-k subspaces.
double analytic_max(MetricKind kind, Index k);

/// Overlap is a similarity; every other kind is a distance.
constexpr bool is_distance(MetricKind kind) { return kind != MetricKind::overlap; }

PrincipalAngles principal_angles(const OrthonormalBasis& q1, const OrthonormalBasis& q2);

double metric(MetricKind kind, const PrincipalAngles& angles);

/// Map a metric value into [0, 1] with 1 meaning identical spans:
/// 1 - value / analytic_max for distances, identity for overlap.
double similarity(MetricKind kind, double value, Index k);

/// (1/k) ||Q1^T Q2||_F^2
double overlap(const OrthonormalBasis& q1, const OrthonormalBasis& q2);

/// Haar-uniform D x k Stiefel sample (Gaussian QR with sign correction).
OrthonormalBasis sample_stiefel(Index dim, Index k, std::uint64_t seed);
OrthonormalBasis sample_stiefel(Index dim, Index k, Engine& engine);

/// Expected overlap of two independent uniform rank-k subspaces: k / D.
double overlap_baseline(Index dim, Index k);

/// QR-based orthonormalization with the R-diagonal sign fix; the leading j
/// columns of the result span the leading j columns of the input.
Matrix orthonormalize(const Matrix& a);

}  // namespace sketchov
