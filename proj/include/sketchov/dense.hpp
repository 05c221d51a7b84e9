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

#include <vector>

#include "sketchov/common.hpp"

namespace sketchov {

/// Eigenpairs of a dense symmetric matrix, ordered by nonincreasing
/// magnitude (ties: larger signed value first, then original position).
struct DenseEigh {
  Vector eigvals;
  Matrix eigvecs;
};

enum class DenseBackend { lapack, eigen };

/// Solver used by the functions below. LAPACK is probed once against a
/// random symmetric matrix; Eigen's solver is used if the probe fails or
/// SKETCHOV_DENSE=eigen is set.
DenseBackend dense_backend();

/// Permutation sorting `values` by the magnitude ordering above.
std::vector<Index> magnitude_order(const Vector& values);

/// Full symmetric eigendecomposition (LAPACK dsyevd or the Eigen fallback). Reads the lower triangle.
DenseEigh dense_eigh(const Matrix& symmetric);

/// The k eigenpairs of largest magnitude (LAPACK dsyevr on both spectrum
/// ends). Falls back to dense_eigh when 2k >= n.
DenseEigh dense_top_eigh(const Matrix& symmetric, Index k);

}  // namespace sketchov
