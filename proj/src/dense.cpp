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
#include "sketchov/dense.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "sketchov/grassmann.hpp"
#include "sketchov/random.hpp"

namespace sketchov {

namespace {

DenseEigh reorder(const Vector& w, const Matrix& z, Index keep) {
  const auto order = magnitude_order(w);
  DenseEigh out{Vector(keep), Matrix(z.rows(), keep)};
  for (Index j = 0; j < keep; ++j) {
    out.eigvals[j] = w[order[static_cast<std::size_t>(j)]];
    out.eigvecs.col(j) = z.col(order[static_cast<std::size_t>(j)]);
  }
  return out;
}

void check_square(const Matrix& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw ShapeError(std::string(who) + ": matrix must be square and nonempty");
  if (!a.allFinite()) throw DomainError(std::string(who) + ": non-finite entry");
}

// dsyevr over the index range [il, iu] (1-based, ascending eigenvalues).
void syevr_range(const Matrix& a, lapack_int il, lapack_int iu, Vector& w, Matrix& z) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Matrix work = a;
  const lapack_int count = iu - il + 1;
  Vector wall(n);
  z.resize(n, count);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(count));
  lapack_int found = 0;
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, work.data(), n, 0.0, 0.0, il, iu, 0.0,
                     &found, wall.data(), z.data(), n, support.data());
  if (info != 0 || found != count)
    throw DomainError("dsyevr failed (info=" + std::to_string(info) + ")");
  w = wall.head(count);
}

DenseEigh lapack_eigh(const Matrix& symmetric) {
  const lapack_int n = static_cast<lapack_int>(symmetric.rows());
  Matrix z = symmetric;
  Vector w(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, z.data(), n, w.data());
  if (info != 0) throw DomainError("dsyevd failed (info=" + std::to_string(info) + ")");
  return DenseEigh{std::move(w), std::move(z)};
}

// Some optimized LAPACK builds return wrong eigenvectors on CPUs whose kernel
// selection they get wrong. Probe once and fall back to Eigen if so.
DenseBackend probe_backend() {
  if (const char* env = std::getenv("SKETCHOV_DENSE"); env != nullptr) {
    if (std::string(env) == "eigen") return DenseBackend::eigen;
  }
  const Index n = 160;
  const Matrix g = gaussian_matrix(n, n, 0x1a9ac4, 0);
  const Matrix a = g + g.transpose();
  const DenseEigh e = lapack_eigh(a);
  const double resid = (a * e.eigvecs - e.eigvecs * e.eigvals.asDiagonal()).norm() / a.norm();
  const double orth = (e.eigvecs.transpose() * e.eigvecs - Matrix::Identity(n, n)).norm();
  Vector w_top;
  Matrix z_top;
  syevr_range(a, static_cast<lapack_int>(n - 9), static_cast<lapack_int>(n), w_top, z_top);
  const double resid_top =
      (a * z_top - z_top * w_top.asDiagonal()).norm() / a.norm();
  if (resid < 1e-10 && orth < 1e-10 && resid_top < 1e-10) return DenseBackend::lapack;
  warn("LAPACK eigensolver failed its self-check (residual " + std::to_string(resid) +
       "); using the slower Eigen solver. For OpenBLAS, setting OPENBLAS_CORETYPE=Haswell "
       "usually fixes this.");
  return DenseBackend::eigen;
}

DenseEigh eigen_eigh(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric);
  if (solver.info() != Eigen::Success) throw DomainError("dense eigensolver did not converge");
  return DenseEigh{solver.eigenvalues(), solver.eigenvectors()};
}

}  // namespace

DenseBackend dense_backend() {
  static const DenseBackend backend = probe_backend();
  return backend;
}

std::vector<Index> magnitude_order(const Vector& values) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double ma = std::abs(values[a]);
    const double mb = std::abs(values[b]);
    if (ma != mb) return ma > mb;
    return values[a] > values[b];
  });
  return order;
}

DenseEigh dense_eigh(const Matrix& symmetric) {
  check_square(symmetric, "dense_eigh");
  const DenseEigh raw =
      dense_backend() == DenseBackend::lapack ? lapack_eigh(symmetric) : eigen_eigh(symmetric);
  return reorder(raw.eigvals, raw.eigvecs, symmetric.rows());
}

DenseEigh dense_top_eigh(const Matrix& symmetric, Index k) {
  check_square(symmetric, "dense_top_eigh");
  const Index n = symmetric.rows();
  if (k < 1 || k > n) throw ParameterError("dense_top_eigh: need 1 <= k <= n");
  if (2 * k >= n || dense_backend() == DenseBackend::eigen) {
    DenseEigh full = dense_eigh(symmetric);
    return DenseEigh{full.eigvals.head(k), full.eigvecs.leftCols(k)};
  }
  Vector w_low, w_high;
  Matrix z_low, z_high;
  syevr_range(symmetric, 1, static_cast<lapack_int>(k), w_low, z_low);
  syevr_range(symmetric, static_cast<lapack_int>(n - k + 1), static_cast<lapack_int>(n), w_high,
              z_high);
  // Ascending order overall: low block then high block; positions stay
  // consistent with dense_eigh's tie rule.
  Vector w(2 * k);
  w << w_low, w_high;
  Matrix z(n, 2 * k);
  z << z_low, z_high;
  const auto order = magnitude_order(w);
  const bool mixed = std::any_of(order.begin(), order.begin() + k, [&](Index i) { return i < k; }) &&
                     std::any_of(order.begin(), order.begin() + k, [&](Index i) { return i >= k; });
  DenseEigh out = reorder(w, z, k);
  // The two calls pick independent bases of any eigenspace they share.
  if (mixed) out.eigvecs = orthonormalize(out.eigvecs);
  return out;
}

}  // namespace sketchov
