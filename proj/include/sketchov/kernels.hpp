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

// Data-parallel inner loops used by the metric and sketching code.
//
// Every kernel has a scalar reference implementation and an AVX2+FMA
// variant. The public entry points dispatch at runtime on the detected CPU
// level; the per-level namespaces stay callable so tests can check the
// variants against each other.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace sketchov::kernels {

enum class SimdLevel { scalar, avx2 };

std::string_view to_string(SimdLevel level);

/// Best level supported by this CPU, honouring the SKETCHOV_SIMD
/// environment variable ("scalar" forces the reference path).
SimdLevel detected_level();

/// Level used by the dispatching entry points.
SimdLevel active_level();

/// Override the active level. Requesting avx2 on a CPU without it throws.
void set_active_level(SimdLevel level);

double dot(std::span<const double> a, std::span<const double> b);
double sum_squares(std::span<const double> a);
/// sum_i a[idx[i]]^2
double gather_sum_squares(std::span<const double> a, std::span<const std::int64_t> idx);
/// y <- alpha * x + beta * y
void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y);

namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
double sum_squares(std::span<const double> a);
double gather_sum_squares(std::span<const double> a, std::span<const std::int64_t> idx);
void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y);
}  // namespace scalar

namespace avx2 {
bool compiled();
double dot(std::span<const double> a, std::span<const double> b);
double sum_squares(std::span<const double> a);
double gather_sum_squares(std::span<const double> a, std::span<const std::int64_t> idx);
void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y);
}  // namespace avx2

}  // namespace sketchov::kernels
