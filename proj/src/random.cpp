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
#include "sketchov/random.hpp"

namespace sketchov {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
  return Engine(derive_seed(seed, stream));
}

Matrix gaussian_matrix(Index rows, Index cols, Engine& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  double* p = m.data();
  for (Index i = 0; i < rows * cols; ++i) p[i] = normal(engine);
  return m;
}

Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed, std::uint64_t stream) {
  Engine engine = make_engine(seed, stream);
  return gaussian_matrix(rows, cols, engine);
}

}  // namespace sketchov
