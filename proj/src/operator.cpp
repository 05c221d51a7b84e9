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
#include "sketchov/operator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sketchov/grassmann.hpp"
#include "sketchov/random.hpp"

namespace sketchov {

Matrix LinearOperator::apply(const Matrix& block) const {
  if (block.rows() != cols())
    throw ShapeError("apply: block has " + std::to_string(block.rows()) +
                     " rows, operator expects " + std::to_string(cols()));
  if (block.cols() < 1) throw ShapeError("apply: empty block");
  if (!block.allFinite()) throw DomainError("apply: non-finite input");
  return do_apply(block);
}

Matrix LinearOperator::apply_adjoint(const Matrix& block) const {
  if (block.rows() != rows())
    throw ShapeError("apply_adjoint: block has " + std::to_string(block.rows()) +
                     " rows, operator expects " + std::to_string(rows()));
  if (block.cols() < 1) throw ShapeError("apply_adjoint: empty block");
  if (!block.allFinite()) throw DomainError("apply_adjoint: non-finite input");
  return do_apply_adjoint(block);
}

Matrix LinearOperator::do_apply_adjoint(const Matrix& block) const {
  if (hermitian()) return do_apply(block);
  throw ContractError("apply_adjoint: operator provides no adjoint");
}

Matrix apply_block(const LinearOperator& op, const Matrix& block) { return op.apply(block); }

double diagonal_entry(const LinearOperator& op, Index i) {
  if (!op.hermitian()) throw ContractError("diagonal_entry: operator must be hermitian");
  if (i < 0 || i >= op.cols())
    throw ShapeError("diagonal_entry: index " + std::to_string(i) + " out of range");
  Matrix e = Matrix::Zero(op.cols(), 1);
  e(i, 0) = 1.0;
  return op.apply(e)(i, 0);
}

IdentityOperator::IdentityOperator(Index dim) : dim_(dim) {
  if (dim < 1) throw ShapeError("IdentityOperator: dim must be positive");
}

DiagonalOperator::DiagonalOperator(Vector diagonal) : diag_(std::move(diagonal)) {
  if (diag_.size() < 1) throw ShapeError("DiagonalOperator: empty diagonal");
  if (!diag_.allFinite()) throw DomainError("DiagonalOperator: non-finite entry");
}

Matrix DiagonalOperator::do_apply(const Matrix& block) const {
  return diag_.asDiagonal() * block;
}

DenseOperator::DenseOperator(Matrix matrix, bool hermitian)
    : matrix_(std::move(matrix)), hermitian_(hermitian) {
  if (matrix_.rows() < 1 || matrix_.cols() < 1) throw ShapeError("DenseOperator: empty matrix");
  if (!matrix_.allFinite()) throw DomainError("DenseOperator: non-finite entry");
  if (hermitian_) {
    if (matrix_.rows() != matrix_.cols())
      throw ShapeError("DenseOperator: hermitian operator must be square");
    const double scale = std::max(matrix_.cwiseAbs().maxCoeff(), 1e-300);
    const double asym = (matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale)
      throw ContractError("DenseOperator: matrix flagged hermitian is not symmetric");
  }
}

PlantedOperator::PlantedOperator(Vector eigvals, Matrix basis, double alignment)
    : eigvals_(std::move(eigvals)), basis_(std::move(basis)), alignment_(alignment) {
  if (eigvals_.size() < 1 || eigvals_.size() != basis_.cols() || basis_.cols() > basis_.rows())
    throw ShapeError("PlantedOperator: need 1 <= r <= D eigenpairs");
  for (Index i = 1; i < eigvals_.size(); ++i)
    if (std::abs(eigvals_[i]) > std::abs(eigvals_[i - 1]))
      throw ParameterError("PlantedOperator: eigenvalues must have nonincreasing magnitude");
}

Matrix PlantedOperator::materialize() const {
  return basis_ * eigvals_.asDiagonal() * basis_.transpose();
}

Matrix PlantedOperator::do_apply(const Matrix& block) const {
  Matrix coeffs = basis_.transpose() * block;
  coeffs = eigvals_.asDiagonal() * coeffs;
  return basis_ * coeffs;
}

PlantedOperator make_planted_operator(Index dim, const Vector& eigvals,
                                      const SparseMask& mask_target, double alignment,
                                      std::uint64_t seed) {
  if (!(alignment >= 0.0 && alignment <= 1.0))
    throw DomainError("make_planted_operator: alignment must lie in [0, 1]");
  const Index r = eigvals.size();
  if (r < 1 || r > dim) throw ParameterError("make_planted_operator: need 1 <= |eigvals| <= D");
  if (mask_target.dim() != dim) throw ShapeError("make_planted_operator: mask dimension != D");

  Matrix blended = sample_stiefel(dim, r, seed).columns();
  const Index pulled = std::min<Index>(mask_target.k(), r);
  const double off_mask_scale = 1.0 - alignment;
  std::vector<char> on_mask(static_cast<std::size_t>(dim), 0);
  for (auto i : mask_target.indices()) on_mask[static_cast<std::size_t>(i)] = 1;
  for (Index row = 0; row < dim; ++row)
    if (!on_mask[static_cast<std::size_t>(row)]) blended.row(row).head(pulled) *= off_mask_scale;

  return PlantedOperator(eigvals, orthonormalize(blended), alignment);
}

CountingOperator::CountingOperator(OperatorPtr inner) : inner_(std::move(inner)) {
  if (!inner_) throw ContractError("CountingOperator: null operator");
}

Matrix CountingOperator::do_apply(const Matrix& block) const {
  apply_calls_.fetch_add(1);
  apply_columns_.fetch_add(block.cols());
  return inner_->apply(block);
}

Matrix CountingOperator::do_apply_adjoint(const Matrix& block) const {
  adjoint_calls_.fetch_add(1);
  adjoint_columns_.fetch_add(block.cols());
  return inner_->apply_adjoint(block);
}

double hermitian_defect(const LinearOperator& op, int n_probes, std::uint64_t seed) {
  if (op.rows() != op.cols()) return INFINITY;
  const Matrix x = gaussian_matrix(op.cols(), n_probes, seed, 1);
  const Matrix y = gaussian_matrix(op.cols(), n_probes, seed, 2);
  const Matrix ax = op.apply(x);
  const Matrix ay = op.apply(y);
  double worst = 0.0;
  for (int p = 0; p < n_probes; ++p) {
    const double lhs = x.col(p).dot(ay.col(p));
    const double rhs = ax.col(p).dot(y.col(p));
    const double scale = std::max({x.col(p).norm() * ay.col(p).norm(),
                                   ax.col(p).norm() * y.col(p).norm(), 1e-300});
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

double linearity_defect(const LinearOperator& op, int n_probes, std::uint64_t seed) {
  const Matrix x = gaussian_matrix(op.cols(), n_probes, seed, 3);
  const Matrix y = gaussian_matrix(op.cols(), n_probes, seed, 4);
  const double a = 1.75;
  const double b = -0.6;
  const Matrix combined = op.apply(a * x + b * y);
  const Matrix separate = a * op.apply(x) + b * op.apply(y);
  double worst = 0.0;
  for (int p = 0; p < n_probes; ++p) {
    const double scale = std::max(separate.col(p).norm(), 1e-300);
    worst = std::max(worst, (combined.col(p) - separate.col(p)).norm() / scale);
  }
  return worst;
}

}  // namespace sketchov
