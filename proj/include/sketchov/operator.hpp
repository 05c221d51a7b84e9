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

#include <atomic>
#include <cstdint>
#include <memory>

#include "sketchov/common.hpp"
#include "sketchov/masks.hpp"

namespace sketchov {

/// Matrix-free linear map acting on blocks of column vectors.
///
/// Implementations must be immutable after construction: apply() and
/// apply_adjoint() may be called concurrently on disjoint blocks.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual Index rows() const = 0;
  virtual Index cols() const = 0;
  virtual bool hermitian() const { return false; }

  /// Validates shape and finiteness, then applies the operator column-wise.
  Matrix apply(const Matrix& block) const;
  /// Adjoint (= transpose, real arithmetic). Hermitian operators reuse apply.
  Matrix apply_adjoint(const Matrix& block) const;

 protected:
  virtual Matrix do_apply(const Matrix& block) const = 0;
  /// Default throws ContractError unless hermitian().
  virtual Matrix do_apply_adjoint(const Matrix& block) const;
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

/// Free-function form of LinearOperator::apply.
Matrix apply_block(const LinearOperator& op, const Matrix& block);

/// e_i^T A e_i from a single application of e_i.
double diagonal_entry(const LinearOperator& op, Index i);

class IdentityOperator final : public LinearOperator {
 public:
  explicit IdentityOperator(Index dim);
  Index rows() const override { return dim_; }
  Index cols() const override { return dim_; }
  bool hermitian() const override { return true; }

 protected:
  Matrix do_apply(const Matrix& block) const override { return block; }

 private:
  Index dim_;
};

class DiagonalOperator final : public LinearOperator {
 public:
  explicit DiagonalOperator(Vector diagonal);
  Index rows() const override { return diag_.size(); }
  Index cols() const override { return diag_.size(); }
  bool hermitian() const override { return true; }
  const Vector& diagonal() const { return diag_; }

 protected:
  Matrix do_apply(const Matrix& block) const override;

 private:
  Vector diag_;
};

/// Explicit matrix. When constructed as hermitian the matrix is checked for
/// symmetry to 1e-12 relative.
class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Matrix matrix, bool hermitian = false);
  Index rows() const override { return matrix_.rows(); }
  Index cols() const override { return matrix_.cols(); }
  bool hermitian() const override { return hermitian_; }
  const Matrix& matrix() const { return matrix_; }

 protected:
  Matrix do_apply(const Matrix& block) const override { return matrix_ * block; }
  Matrix do_apply_adjoint(const Matrix& block) const override {
    return matrix_.transpose() * block;
  }

 private:
  Matrix matrix_;
  bool hermitian_;
};

/// A = U diag(lambda) U^T with a column-orthonormal U (D x r) and eigenvalues
/// ordered by nonincreasing magnitude.
class PlantedOperator final : public LinearOperator {
 public:
  PlantedOperator(Vector eigvals, Matrix basis, double alignment);

  Index rows() const override { return basis_.rows(); }
  Index cols() const override { return basis_.rows(); }
  bool hermitian() const override { return true; }

  Index dim() const { return basis_.rows(); }
  Index rank() const { return eigvals_.size(); }
  const Vector& eigvals() const { return eigvals_; }
  const Matrix& basis() const { return basis_; }
  double alignment() const { return alignment_; }

  /// Dense D x D matrix U diag(lambda) U^T.
  Matrix materialize() const;

 protected:
  Matrix do_apply(const Matrix& block) const override;

 private:
  Vector eigvals_;
  Matrix basis_;
  double alignment_;
};

/// Planted operator whose leading eigenvectors are pulled towards the
/// coordinates of `mask_target`.
///
/// A Haar basis H (D x r) is drawn; its first min(k, r) columns have their
/// off-mask rows scaled by (1 - alignment) and the result is
/// re-orthonormalized column by column. alignment = 0 leaves H Haar
/// distributed; alignment = 1 puts the leading min(k, r) eigenvectors
/// exactly on the mask coordinates. The mask overlap of every leading
/// eigenspace is nondecreasing in alignment for a fixed seed.
PlantedOperator make_planted_operator(Index dim, const Vector& eigvals,
                                      const SparseMask& mask_target, double alignment,
                                      std::uint64_t seed);

/// Forwards to a wrapped operator while counting calls and columns.
class CountingOperator final : public LinearOperator {
 public:
  explicit CountingOperator(OperatorPtr inner);
  Index rows() const override { return inner_->rows(); }
  Index cols() const override { return inner_->cols(); }
  bool hermitian() const override { return inner_->hermitian(); }

  std::int64_t apply_calls() const { return apply_calls_.load(); }
  std::int64_t apply_columns() const { return apply_columns_.load(); }
  std::int64_t adjoint_calls() const { return adjoint_calls_.load(); }
  std::int64_t adjoint_columns() const { return adjoint_columns_.load(); }
  std::int64_t total_columns() const { return apply_columns() + adjoint_columns(); }

 protected:
  Matrix do_apply(const Matrix& block) const override;
  Matrix do_apply_adjoint(const Matrix& block) const override;

 private:
  OperatorPtr inner_;
  mutable std::atomic<std::int64_t> apply_calls_{0};
  mutable std::atomic<std::int64_t> apply_columns_{0};
  mutable std::atomic<std::int64_t> adjoint_calls_{0};
  mutable std::atomic<std::int64_t> adjoint_columns_{0};
};

/// Largest relative violation of x.(Ay) == (Ax).y over random probe pairs.
double hermitian_defect(const LinearOperator& op, int n_probes, std::uint64_t seed);

/// Largest relative violation of A(ax + by) == aAx + bAy over random probes.
double linearity_defect(const LinearOperator& op, int n_probes, std::uint64_t seed);

}  // namespace sketchov
