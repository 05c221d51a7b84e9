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
#include <string>
#include <vector>

#include "sketchov/common.hpp"
#include "sketchov/operator.hpp"

namespace sketchov {

/// Gaussian test matrices for the hermitian sketch.
struct MeasurementEnsemble {
  std::uint64_t seed = 0;
  Index dim = 0;
  Index n_inner = 0;
  Index n_outer = 0;
  Matrix upsilon;      ///< D x n_i, left inner
  Matrix omega_inner;  ///< D x (n_i - n_o), right inner
  Matrix omega_outer;  ///< D x n_o, right outer (recycled into the core)
};

/// Gaussian test matrices for the general (rectangular) sketch.
struct SvdMeasurementEnsemble {
  std::uint64_t seed = 0;
  Index rows = 0;
  Index cols = 0;
  Index n_inner = 0;
  Index n_outer = 0;
  Matrix upsilon_inner;  ///< D_L x n_i
  Matrix upsilon_outer;  ///< D_L x n_o
  Matrix omega_inner;    ///< D_R x n_i
  Matrix omega_outer;    ///< D_R x n_o
};

/// 2 * n_outer + 1, capped at dim.
Index default_inner(Index n_outer, Index dim);

/// Requires 1 <= n_outer <= n_inner <= dim. Each matrix comes from its own
/// derived RNG stream, so the three are independent and reproducible.
MeasurementEnsemble draw_measurements(Index dim, Index n_inner, Index n_outer,
                                      std::uint64_t seed);

/// Requires 1 <= n_outer <= n_inner and n_outer <= min(rows, cols).
SvdMeasurementEnsemble draw_svd_measurements(Index rows, Index cols, Index n_inner,
                                             Index n_outer, std::uint64_t seed);

/// Numerical side information collected while solving a sketch.
struct SketchDiagnostics {
  /// Columns of the outer sketch below 1e-14 * ||M_O||_F after pivoted QR;
  /// the same number of trailing spectral values are reported as exact zeros.
  Index degenerate_columns = 0;
  Index left_solve_rank = 0;
  Index right_solve_rank = 0;
  /// ||C - C^T||_F / ||C||_F before symmetrization (hermitian sketch only).
  double core_asymmetry = 0.0;
  std::vector<std::string> warnings;
};

struct SketchedEigh {
  Matrix q;        ///< D x n_o, orthonormal columns
  Matrix u;        ///< n_o x r, orthonormal columns (r = n_o until truncated)
  Vector eigvals;  ///< length r, nonincreasing magnitude
  Index n_inner = 0;
  std::uint64_t seed = 0;
  SketchDiagnostics diagnostics;

  Index dim() const { return q.rows(); }
  Index n_outer() const { return q.cols(); }
  Index rank() const { return eigvals.size(); }
  /// Q U: approximate eigenvectors, ordered like eigvals.
  Matrix eigenbasis() const { return q * u; }
  /// Q U diag(eigvals) U^T Q^T X without forming the D x D reconstruction.
  Matrix apply_reconstruction(const Matrix& block) const;
};

struct SketchedSvd {
  Matrix p;         ///< D_L x n_o
  Matrix u;         ///< n_o x r
  Vector singvals;  ///< length r, nonincreasing, nonnegative
  Matrix v;         ///< n_o x r
  Matrix q;         ///< D_R x n_o
  Index n_inner = 0;
  std::uint64_t seed = 0;
  SketchDiagnostics diagnostics;

  Index rank() const { return singvals.size(); }
  Matrix left_vectors() const { return p * u; }
  Matrix right_vectors() const { return q * v; }
  Matrix apply_reconstruction(const Matrix& block) const;
};

/// How operator measurements are scheduled.
struct MeasureOptions {
  /// Worker threads for the measurement stage; each gets disjoint column ranges.
  unsigned workers = 1;
  /// Columns per operator call; 0 applies each test matrix as one block.
  Index block_columns = 0;
};

/// Raw operator measurements of the hermitian sketch.
struct EighMeasurements {
  Matrix outer;  ///< A * omega_outer (D x n_o)
  Matrix inner;  ///< A * omega_inner (D x (n_i - n_o))
};

/// Apply `op` to `block`, split column-wise across workers.
Matrix measure(const LinearOperator& op, const Matrix& block, const MeasureOptions& options = {});

/// First pass of the hermitian sketch: exactly n_i columns of operator applications.
EighMeasurements measure_eigh(const LinearOperator& op, const MeasurementEnsemble& ens,
                              const MeasureOptions& options = {});

/// Second pass: orthogonalize, solve the core, eigendecompose. Does not touch
/// the operator.
SketchedEigh seigh_from_measurements(const MeasurementEnsemble& ens,
                                     const EighMeasurements& measurements);

/// Single-pass sketched eigendecomposition of a hermitian operator.
SketchedEigh seigh(const LinearOperator& op, const MeasurementEnsemble& ens,
                   const MeasureOptions& options = {});

/// Single-pass sketched SVD (n_i + 2 n_o columns of applications).
SketchedSvd ssvd(const LinearOperator& op, const SvdMeasurementEnsemble& ens,
                 const MeasureOptions& options = {});

/// Keep the k leading spectral columns (1 <= k <= current rank).
SketchedEigh truncate(const SketchedEigh& dec, Index k);
SketchedSvd truncate(const SketchedSvd& dec, Index k);

struct ResidualEstimate {
  double frobenius = 0.0;      ///< sqrt(squared_mean)
  double squared_mean = 0.0;   ///< unbiased estimate of ||A - QU L U^T Q^T||_F^2
  double squared_stderr = 0.0; ///< standard error of squared_mean (0 if n_probe == 1)
  int n_probe = 0;
};

/// Gaussian-probe estimate of the Frobenius reconstruction error.
ResidualEstimate residual_estimate_detailed(const LinearOperator& op, const SketchedEigh& dec,
                                            int n_probe, std::uint64_t seed);
double residual_estimate(const LinearOperator& op, const SketchedEigh& dec, int n_probe,
                         std::uint64_t seed);

}  // namespace sketchov
