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
#include "sketchov/masks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "sketchov/kernels.hpp"

namespace sketchov {

SparseMask::SparseMask(Index dim, std::vector<std::int64_t> indices)
    : dim_(dim), indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (indices_.empty() || static_cast<Index>(indices_.size()) > dim_)
    throw ShapeError("SparseMask: need 1 <= k <= D");
  if (indices_.front() < 0 || indices_.back() >= dim_)
    throw ShapeError("SparseMask: index out of range [0, " + std::to_string(dim_) + ")");
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
    throw ShapeError("SparseMask: duplicate index");
}

bool SparseMask::contains(std::int64_t i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

ParameterVector::ParameterVector(Vector values) : values_(std::move(values)) {
  if (!values_.allFinite()) throw DomainError("ParameterVector: non-finite entry");
}

std::vector<std::int64_t> magnitude_ranking(const Vector& theta) {
  std::vector<std::int64_t> order(static_cast<std::size_t>(theta.size()));
  std::iota(order.begin(), order.end(), std::int64_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    return std::abs(theta[a]) > std::abs(theta[b]);
  });
  return order;
}

SparseMask topk_magnitude_mask(const ParameterVector& theta, Index k) {
  if (k < 1 || k > theta.dim())
    throw ParameterError("topk_magnitude_mask: need 1 <= k <= D");
  auto order = magnitude_ranking(theta.values());
  order.resize(static_cast<std::size_t>(k));
  return SparseMask(theta.dim(), std::move(order));
}

OrthonormalBasis mask_basis(const SparseMask& mask) {
  Matrix cols = Matrix::Zero(mask.dim(), mask.k());
  for (Index j = 0; j < mask.k(); ++j) cols(mask.indices()[j], j) = 1.0;
  return OrthonormalBasis::unchecked(std::move(cols));
}

double mask_eigenspace_overlap(const SparseMask& mask, const OrthonormalBasis& eigbasis,
                               Index k) {
  if (mask.k() != k || eigbasis.rank() != k)
    throw ShapeError("mask_eigenspace_overlap: mask k, eigbasis rank and k must agree");
  if (mask.dim() != eigbasis.dim())
    throw ShapeError("mask_eigenspace_overlap: dimension mismatch");
  const Matrix& u = eigbasis.columns();
  const std::span<const std::int64_t> idx(mask.indices());
  double energy = 0.0;
  for (Index j = 0; j < k; ++j) {
    const std::span<const double> col(u.col(j).data(), static_cast<std::size_t>(u.rows()));
    energy += kernels::gather_sum_squares(col, idx);
  }
  return energy / static_cast<double>(k);
}

Index intersection_size(const SparseMask& a, const SparseMask& b) {
  if (a.dim() != b.dim()) throw ShapeError("mask comparison: dimension mismatch");
  Index count = 0;
  auto ia = a.indices().begin();
  auto ib = b.indices().begin();
  while (ia != a.indices().end() && ib != b.indices().end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

double iou(const SparseMask& a, const SparseMask& b) {
  const Index inter = intersection_size(a, b);
  const Index uni = a.k() + b.k() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

Index hamming(const SparseMask& a, const SparseMask& b) {
  const Index inter = intersection_size(a, b);
  return a.k() + b.k() - 2 * inter;
}

double sparsity_kappa(const ParameterVector& v, const SparseMask& mask) {
  if (mask.dim() != v.dim()) throw ShapeError("sparsity_kappa: dimension mismatch");
  const std::span<const double> vals(v.values().data(), static_cast<std::size_t>(v.dim()));
  const double total = kernels::sum_squares(vals);
  if (!(total > 0.0)) throw DomainError("sparsity_kappa: zero vector");
  return kernels::gather_sum_squares(vals, mask.indices()) / total;
}

SparseMask sample_mask(Index dim, Index k, Engine& engine) {
  if (k < 1 || k > dim) throw ParameterError("sample_mask: need 1 <= k <= D");
  std::vector<std::int64_t> pool(static_cast<std::size_t>(dim));
  std::iota(pool.begin(), pool.end(), std::int64_t{0});
  for (Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Index> pick(i, dim - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(engine))]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return SparseMask(dim, std::move(pool));
}

SparseMask sample_mask(Index dim, Index k, std::uint64_t seed) {
  Engine engine = make_engine(seed, 0x3a5c);
  return sample_mask(dim, k, engine);
}

void write_mask(std::ostream& out, const SparseMask& mask) {
  out << "mask D=" << mask.dim() << " k=" << mask.k() << '\n';
  for (std::int64_t i : mask.indices()) out << i << '\n';
}

SparseMask read_mask(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw IntegrityError("mask file: missing header");
  long long dim = 0;
  long long k = 0;
  std::istringstream hs(header);
  std::string tag, dtok, ktok;
  hs >> tag >> dtok >> ktok;
  if (tag != "mask" || dtok.rfind("D=", 0) != 0 || ktok.rfind("k=", 0) != 0)
    throw IntegrityError("mask file: bad header '" + header + "'");
  try {
    dim = std::stoll(dtok.substr(2));
    k = std::stoll(ktok.substr(2));
  } catch (const std::exception&) {
    throw IntegrityError("mask file: bad header '" + header + "'");
  }
  std::vector<std::int64_t> indices;
  indices.reserve(static_cast<std::size_t>(std::max(0LL, k)));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      std::size_t used = 0;
      indices.push_back(std::stoll(line, &used));
      if (used != line.size()) throw std::invalid_argument(line);
    } catch (const std::exception&) {
      throw IntegrityError("mask file: bad index line '" + line + "'");
    }
  }
  if (static_cast<long long>(indices.size()) != k)
    throw IntegrityError("mask file: header says k=" + std::to_string(k) + " but found " +
                         std::to_string(indices.size()) + " indices");
  return SparseMask(static_cast<Index>(dim), std::move(indices));
}

void save_mask(const std::filesystem::path& path, const SparseMask& mask) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_mask(out, mask);
  if (!out) throw IoError("write failed: " + path.string());
}

SparseMask load_mask(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_mask(in);
}

}  // namespace sketchov
