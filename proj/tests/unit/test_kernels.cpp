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

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "sketchov/kernels.hpp"

namespace k = sketchov::kernels;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar reference values") {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const std::vector<double> b{2, 0, -1, 1, 0.5};
  CHECK(k::scalar::dot(a, b) == doctest::Approx(2 - 3 + 4 + 2.5));
  CHECK(k::scalar::sum_squares(a) == 55.0);
  const std::vector<std::int64_t> idx{4, 0, 2};
  CHECK(k::scalar::gather_sum_squares(a, idx) == 25.0 + 1.0 + 9.0);
  std::vector<double> y = b;
  k::scalar::axpby(2.0, a, -1.0, y);
  CHECK(y == std::vector<double>{0, 4, 7, 7, 9.5});
  CHECK(k::scalar::dot({}, {}) == 0.0);
  CHECK(k::scalar::gather_sum_squares(a, {}) == 0.0);
}

TEST_CASE("avx2 variants agree with scalar on every tail length") {
  if (!k::avx2::compiled() || k::detected_level() != k::SimdLevel::avx2) {
    MESSAGE("AVX2 not available; equivalence test skipped");
    return;
  }
  for (std::size_t n = 0; n < 70; ++n) {
    const auto a = random_values(n, 11 + n);
    const auto b = random_values(n, 101 + n);
    CHECK(close(k::avx2::dot(a, b), k::scalar::dot(a, b)));
    CHECK(close(k::avx2::sum_squares(a), k::scalar::sum_squares(a)));
    std::vector<std::int64_t> idx;
    for (std::size_t i = 0; i < n; i += 1 + (i % 3)) idx.push_back(static_cast<std::int64_t>(n - 1 - i));
    CHECK(close(k::avx2::gather_sum_squares(a, idx), k::scalar::gather_sum_squares(a, idx)));
    std::vector<double> y1 = b, y2 = b;
    k::avx2::axpby(0.75, a, -1.25, y1);
    k::scalar::axpby(0.75, a, -1.25, y2);
    for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i]));
  }
  const auto big = random_values(100003, 5);
  const auto big2 = random_values(100003, 6);
  CHECK(close(k::avx2::dot(big, big2), k::scalar::dot(big, big2)));
  CHECK(close(k::avx2::sum_squares(big), k::scalar::sum_squares(big)));
}

TEST_CASE("dispatch follows the active level") {
  const auto saved = k::active_level();
  const auto a = random_values(37, 1);
  k::set_active_level(k::SimdLevel::scalar);
  CHECK(k::active_level() == k::SimdLevel::scalar);
  CHECK(k::sum_squares(a) == k::scalar::sum_squares(a));
  CHECK(k::dot(a, a) == k::scalar::dot(a, a));
  if (k::detected_level() == k::SimdLevel::avx2) {
    k::set_active_level(k::SimdLevel::avx2);
    CHECK(k::sum_squares(a) == k::avx2::sum_squares(a));
  }
  k::set_active_level(saved);
  CHECK(k::to_string(k::SimdLevel::scalar) == "scalar");
  CHECK(k::to_string(k::SimdLevel::avx2) == "avx2");
}

}  // TEST_SUITE
