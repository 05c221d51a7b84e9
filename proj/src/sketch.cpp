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
#include "sketchov/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "sketchov/dense.hpp"
#include "sketchov/kernels.hpp"
#include "sketchov/random.hpp"

namespace sketchov {

namespace {

constexpr double kDegenerateColumnTol = 1e-14;

enum Stream : std::uint64_t {
  kUpsilon = 1,
  kOmegaInner = 2,
  kOmegaOuter = 3,
  kSvdUpsilonInner = 11,
  kSvdUpsilonOuter = 12,
  kSvdOmegaInner = 13,
  kSvdOmegaOuter = 14,
  kResidualProbe = 77,
};

struct RangeBasis {
  Matrix q;
  Index rank = 0;
};

// Orthonormal basis for range(m) by column-pivoted Householder QR. All
// columns of q are orthonormal; the first `rank` span the numerical range,
// the rest are the Householder completion.
RangeBasis orthonormal_range(const Matrix& m) {
  const Index cols = m.cols();
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  RangeBasis out;
  out.q = qr.householderQ() * Matrix::Identity(m.rows(), cols);
  const double scale = m.norm();
  const auto& r = qr.matrixQR();
  for (Index j = 0; j < std::min(m.rows(), cols); ++j)
    if (scale > 0.0 && std::abs(r(j, j)) >= kDegenerateColumnTol * scale) ++out.rank;
  return out;
}

// Minimum-norm least-squares solution X of lhs * X = rhs, i.e. pinv(lhs) * rhs.
// Singular values below max(m, n) * eps * sigma_max are treated as zero.
Matrix pinv_solve(const Matrix& lhs, const Matrix& rhs, Index& rank_out,
                  SketchDiagnostics& diag, const char* label) {
  Eigen::BDCSVD<Matrix> svd(lhs, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double smax = s.size() > 0 ? s[0] : 0.0;
  const double cutoff = static_cast<double>(std::max(lhs.rows(), lhs.cols())) *
                        std::numeric_limits<double>::epsilon() * smax;
  Index rank = 0;
  Vector inv(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    if (smax > 0.0 && s[i] > cutoff) {
      inv[i] = 1.0 / s[i];
      ++rank;
    } else {
      inv[i] = 0.0;
    }
  }
  rank_out = rank;
  if (rank < lhs.cols()) {
    std::string msg = std::string(label) + " is rank deficient (rank " + std::to_string(rank) +
                      " of " + std::to_string(lhs.cols()) + "); using minimum-norm solve";
    diag.warnings.push_back(msg);
    warn(msg);
  }
  return svd.matrixV() * (inv.asDiagonal() * (svd.matrixU().transpose() * rhs));
}

void check_ensemble_dims(Index dim, Index n_inner, Index n_outer) {
  if (n_outer < 1 || n_outer > n_inner || n_inner > dim)
    throw ParameterError("measurements: need 1 <= n_o <= n_i <= D, got n_o=" +
                         std::to_string(n_outer) + " n_i=" + std::to_string(n_inner) +
                         " D=" + std::to_string(dim));
}

}  // namespace

Index default_inner(Index n_outer, Index dim) { return std::min(2 * n_outer + 1, dim); }

MeasurementEnsemble draw_measurements(Index dim, Index n_inner, Index n_outer,
                                      std::uint64_t seed) {
  check_ensemble_dims(dim, n_inner, n_outer);
  MeasurementEnsemble ens;
  ens.seed = seed;
  ens.dim = dim;
  ens.n_inner = n_inner;
  ens.n_outer = n_outer;
  ens.upsilon = gaussian_matrix(dim, n_inner, seed, kUpsilon);
  ens.omega_inner = gaussian_matrix(dim, n_inner - n_outer, seed, kOmegaInner);
  ens.omega_outer = gaussian_matrix(dim, n_outer, seed, kOmegaOuter);
  return ens;
}

SvdMeasurementEnsemble draw_svd_measurements(Index rows, Index cols, Index n_inner,
                                             Index n_outer, std::uint64_t seed) {
  if (n_outer < 1 || n_outer > n_inner || n_outer > std::min(rows, cols))
    throw ParameterError("svd measurements: need 1 <= n_o <= n_i and n_o <= min(D_L, D_R)");
  SvdMeasurementEnsemble ens;
  ens.seed = seed;
  ens.rows = rows;
  ens.cols = cols;
  ens.n_inner = n_inner;
  ens.n_outer = n_outer;
  ens.upsilon_inner = gaussian_matrix(rows, n_inner, seed, kSvdUpsilonInner);
  ens.upsilon_outer = gaussian_matrix(rows, n_outer, seed, kSvdUpsilonOuter);
  ens.omega_inner = gaussian_matrix(cols, n_inner, seed, kSvdOmegaInner);
  ens.omega_outer = gaussian_matrix(cols, n_outer, seed, kSvdOmegaOuter);
  return ens;
}

Matrix SketchedEigh::apply_reconstruction(const Matrix& block) const {
  Matrix coeffs = u.transpose() * (q.transpose() * block);
  coeffs = eigvals.asDiagonal() * coeffs;
  return q * (u * coeffs);
}

Matrix SketchedSvd::apply_reconstruction(const Matrix& block) const {
  Matrix coeffs = v.transpose() * (q.transpose() * block);
  coeffs = singvals.asDiagonal() * coeffs;
  return p * (u * coeffs);
}

Matrix measure(const LinearOperator& op, const Matrix& block, const MeasureOptions& options) {
  const Index n = block.cols();
  if (n == 0) return Matrix(op.rows(), 0);
  const Index width = options.block_columns > 0 ? options.block_columns : n;
  if (options.workers <= 1 && width >= n) return op.apply(block);

  Matrix out(op.rows(), n);
  const Index n_blocks = (n + width - 1) / width;
  const unsigned workers =
      std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(n_blocks)));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&](unsigned w) {
    try {
      for (Index b = w; b < n_blocks; b += workers) {
        const Index start = b * width;
        const Index len = std::min(width, n - start);
        out.middleCols(start, len) = op.apply(block.middleCols(start, len));
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

EighMeasurements measure_eigh(const LinearOperator& op, const MeasurementEnsemble& ens,
                              const MeasureOptions& options) {
  if (!op.hermitian()) throw ContractError("seigh: operator is not flagged hermitian");
  if (op.rows() != ens.dim || op.cols() != ens.dim)
    throw ShapeError("seigh: ensemble dimension does not match operator");
  EighMeasurements m;
  m.outer = measure(op, ens.omega_outer, options);
  m.inner = measure(op, ens.omega_inner, options);
  return m;
}

SketchedEigh seigh_from_measurements(const MeasurementEnsemble& ens,
                                     const EighMeasurements& measurements) {
  const Index d = ens.dim;
  const Index n_o = ens.n_outer;
  const Index n_i = ens.n_inner;
  if (measurements.outer.rows() != d || measurements.outer.cols() != n_o ||
      measurements.inner.rows() != d || measurements.inner.cols() != n_i - n_o)
    throw ShapeError("seigh: measurement blocks do not match the ensemble");
  if (!measurements.outer.allFinite() || !measurements.inner.allFinite())
    throw DomainError("seigh: non-finite measurements");

  SketchedEigh out;
  out.n_inner = n_i;
  out.seed = ens.seed;
  SketchDiagnostics& diag = out.diagnostics;

  // Core measurement Upsilon^T A [Omega_I, Omega_O], recycling A Omega_O.
  Matrix measured(d, n_i);
  measured << measurements.inner, measurements.outer;
  const Matrix core_measure = ens.upsilon.transpose() * measured;
  Matrix omega(d, n_i);
  omega << ens.omega_inner, ens.omega_outer;

  RangeBasis range = orthonormal_range(measurements.outer);
  out.q = std::move(range.q);
  diag.degenerate_columns = n_o - range.rank;

  Eigen::BDCSVD<Matrix> msvd(core_measure, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix left = pinv_solve(ens.upsilon.transpose() * out.q, msvd.matrixU(),
                                 diag.left_solve_rank, diag, "Upsilon^T Q");
  const Matrix right = pinv_solve(omega.transpose() * out.q, msvd.matrixV(),
                                  diag.right_solve_rank, diag, "Omega^T Q");
  Matrix core = left * msvd.singularValues().asDiagonal() * right.transpose();

  const double core_norm = core.norm();
  diag.core_asymmetry = core_norm > 0.0 ? (core - core.transpose()).norm() / core_norm : 0.0;
  core = (0.5 * (core + core.transpose())).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(core);
  if (eig.info() != Eigen::Success) throw DomainError("seigh: core eigensolver failed");
  const auto order = magnitude_order(eig.eigenvalues());
  out.eigvals.resize(n_o);
  out.u.resize(n_o, n_o);
  for (Index j = 0; j < n_o; ++j) {
    out.eigvals[j] = eig.eigenvalues()[order[static_cast<std::size_t>(j)]];
    out.u.col(j) = eig.eigenvectors().col(order[static_cast<std::size_t>(j)]);
  }
  for (Index j = n_o - diag.degenerate_columns; j < n_o; ++j) out.eigvals[j] = 0.0;
  return out;
}

SketchedEigh seigh(const LinearOperator& op, const MeasurementEnsemble& ens,
                   const MeasureOptions& options) {
  return seigh_from_measurements(ens, measure_eigh(op, ens, options));
}

SketchedSvd ssvd(const LinearOperator& op, const SvdMeasurementEnsemble& ens,
                 const MeasureOptions& options) {
  if (op.rows() != ens.rows || op.cols() != ens.cols)
    throw ShapeError("ssvd: ensemble dimensions do not match operator");
  const Index n_o = ens.n_outer;

  SketchedSvd out;
  out.n_inner = ens.n_inner;
  out.seed = ens.seed;
  SketchDiagnostics& diag = out.diagnostics;

  // Row sketch (Upsilon_O^T A)^T, column sketch A Omega_O, core Upsilon_I^T A Omega_I.
  Matrix row_sketch;
  if (op.hermitian()) {
    row_sketch = measure(op, ens.upsilon_outer, options);
  } else {
    row_sketch = op.apply_adjoint(ens.upsilon_outer);
  }
  const Matrix col_sketch = measure(op, ens.omega_outer, options);
  const Matrix core_measure = ens.upsilon_inner.transpose() * measure(op, ens.omega_inner, options);

  RangeBasis left_range = orthonormal_range(col_sketch);
  RangeBasis right_range = orthonormal_range(row_sketch);
  out.p = std::move(left_range.q);
  out.q = std::move(right_range.q);
  diag.degenerate_columns = n_o - std::min(left_range.rank, right_range.rank);

  const Matrix half = pinv_solve(ens.upsilon_inner.transpose() * out.p, core_measure,
                                 diag.left_solve_rank, diag, "Upsilon_I^T P");
  const Matrix core = pinv_solve(ens.omega_inner.transpose() * out.q, half.transpose(),
                                 diag.right_solve_rank, diag, "Omega_I^T Q")
                          .transpose();

  Eigen::BDCSVD<Matrix> csvd(core, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.u = csvd.matrixU();
  out.v = csvd.matrixV();
  out.singvals = csvd.singularValues();
  for (Index j = n_o - diag.degenerate_columns; j < n_o; ++j) out.singvals[j] = 0.0;
  return out;
}

SketchedEigh truncate(const SketchedEigh& dec, Index k) {
  if (k < 1 || k > dec.rank())
    throw ParameterError("truncate: need 1 <= k <= " + std::to_string(dec.rank()));
  SketchedEigh out = dec;
  out.u = dec.u.leftCols(k);
  out.eigvals = dec.eigvals.head(k);
  return out;
}

SketchedSvd truncate(const SketchedSvd& dec, Index k) {
  if (k < 1 || k > dec.rank())
    throw ParameterError("truncate: need 1 <= k <= " + std::to_string(dec.rank()));
  SketchedSvd out = dec;
  out.u = dec.u.leftCols(k);
  out.v = dec.v.leftCols(k);
  out.singvals = dec.singvals.head(k);
  return out;
}

ResidualEstimate residual_estimate_detailed(const LinearOperator& op, const SketchedEigh& dec,
                                            int n_probe, std::uint64_t seed) {
  if (n_probe < 1) throw ParameterError("residual_estimate: n_probe must be >= 1");
  if (op.rows() != dec.dim() || op.cols() != dec.dim())
    throw ShapeError("residual_estimate: decomposition does not match operator");
  const Matrix probes = gaussian_matrix(dec.dim(), n_probe, seed, kResidualProbe);
  const Matrix err = op.apply(probes) - dec.apply_reconstruction(probes);
  Vector sq(n_probe);
  for (int p = 0; p < n_probe; ++p)
    sq[p] = kernels::sum_squares({err.col(p).data(), static_cast<std::size_t>(err.rows())});
  ResidualEstimate out;
  out.n_probe = n_probe;
  out.squared_mean = sq.mean();
  if (n_probe > 1) {
    const double var = (sq.array() - out.squared_mean).square().sum() / (n_probe - 1);
    out.squared_stderr = std::sqrt(var / n_probe);
  }
  out.frobenius = std::sqrt(out.squared_mean);
  return out;
}

double residual_estimate(const LinearOperator& op, const SketchedEigh& dec, int n_probe,
                         std::uint64_t seed) {
  return residual_estimate_detailed(op, dec, n_probe, seed).frobenius;
}

}  // namespace sketchov
