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
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "sketchov/common.hpp"
#include "sketchov/grassmann.hpp"

namespace sketchov {

/// A k-subset of [0, D), stored as strictly increasing indices.
class SparseMask {
 public:
  /// Indices may arrive in any order; duplicates or out-of-range entries throw.
  SparseMask(Index dim, std::vector<std::int64_t> indices);

  Index dim() const { return dim_; }
  Index k() const { return static_cast<Index>(indices_.size()); }
  const std::vector<std::int64_t>& indices() const { return indices_; }
  bool contains(std::int64_t i) const;

  friend bool operator==(const SparseMask&, const SparseMask&) = default;

 private:
  Index dim_;
  std::vector<std::int64_t> indices_;
};

/// Strong type for a parameter vector theta.
class ParameterVector {
 public:
  explicit ParameterVector(Vector values);
  Index dim() const { return values_.size(); }
  const Vector& values() const { return values_; }

 private:
  Vector values_;
};

/// Order of indices by nonincreasing |theta_i|, ties by lower index.
std::vector<std::int64_t> magnitude_ranking(const Vector& theta);

/// The k largest |theta_i|; ties resolved towards the lower index.
SparseMask topk_magnitude_mask(const ParameterVector& theta, Index k);

/// D x k basis whose j-th column is e_{indices[j]}.
OrthonormalBasis mask_basis(const SparseMask& mask);

/// (1/k) * sum over masked rows of the squared row norms of the eigenbasis.
/// Equals overlap(mask_basis(mask), eigbasis) without building either
/// permuted matrix.
double mask_eigenspace_overlap(const SparseMask& mask, const OrthonormalBasis& eigbasis, Index k);

Index intersection_size(const SparseMask& a, const SparseMask& b);
double iou(const SparseMask& a, const SparseMask& b);
/// Bit flips between the 0/1 indicator vectors (|symmetric difference|).
Index hamming(const SparseMask& a, const SparseMask& b);

/// Fraction of ||v||^2 carried by the masked entries.
double sparsity_kappa(const ParameterVector& v, const SparseMask& mask);

/// Uniform k-subset of [0, D) (partial Fisher-Yates).
SparseMask sample_mask(Index dim, Index k, std::uint64_t seed);
SparseMask sample_mask(Index dim, Index k, Engine& engine);

// Text format: header line `mask D=<D> k=<k>` then one decimal index per line.
void write_mask(std::ostream& out, const SparseMask& mask);
SparseMask read_mask(std::istream& in);
void save_mask(const std::filesystem::path& path, const SparseMask& mask);
SparseMask load_mask(const std::filesystem::path& path);

}  // namespace sketchov
