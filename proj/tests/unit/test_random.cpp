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
#include <doctest.h>

#include "sketchov/random.hpp"

using namespace sketchov;

TEST_CASE("random streams are deterministic and independent") {
  const Matrix a = gaussian_matrix(6, 4, 42, 1);
  const Matrix b = gaussian_matrix(6, 4, 42, 1);
  const Matrix c = gaussian_matrix(6, 4, 42, 2);
  const Matrix d = gaussian_matrix(6, 4, 43, 1);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a != d);
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
}

TEST_CASE("gaussian_matrix moments") {
  const Matrix g = gaussian_matrix(200, 200, 7, 0);
  const double mean = g.mean();
  const double var = (g.array() - mean).square().mean();
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.03);
}
