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
#include <atomic>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "sketchov/common.hpp"
#include "sketchov/kernels.hpp"

namespace sketchov {

namespace {
std::mutex g_sink_mutex;
WarningSink g_sink;
}  // namespace

void set_warning_sink(WarningSink sink) {
  std::lock_guard lock(g_sink_mutex);
  g_sink = std::move(sink);
}

void warn(const std::string& message) {
  std::lock_guard lock(g_sink_mutex);
  if (g_sink) {
    g_sink(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

}  // namespace sketchov

namespace sketchov::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  if (!avx2::compiled()) return false;
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<int>& active_slot() {
  static std::atomic<int> slot{static_cast<int>(detected_level())};
  return slot;
}

}  // namespace

std::string_view to_string(SimdLevel level) {
  switch (level) {
    case SimdLevel::scalar: return "scalar";
    case SimdLevel::avx2: return "avx2";
  }
  return "unknown";
}

SimdLevel detected_level() {
  static const SimdLevel level = [] {
    const char* env = std::getenv("SKETCHOV_SIMD");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return SimdLevel::scalar;
    return cpu_has_avx2() ? SimdLevel::avx2 : SimdLevel::scalar;
  }();
  return level;
}

SimdLevel active_level() { return static_cast<SimdLevel>(active_slot().load()); }

void set_active_level(SimdLevel level) {
  if (level == SimdLevel::avx2 && !cpu_has_avx2())
    throw std::runtime_error("avx2 kernels requested but not supported on this CPU");
  active_slot().store(static_cast<int>(level));
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("dot: length mismatch");
  return active_level() == SimdLevel::avx2 ? avx2::dot(a, b) : scalar::dot(a, b);
}

double sum_squares(std::span<const double> a) {
  return active_level() == SimdLevel::avx2 ? avx2::sum_squares(a) : scalar::sum_squares(a);
}

double gather_sum_squares(std::span<const double> a, std::span<const std::int64_t> idx) {
  return active_level() == SimdLevel::avx2 ? avx2::gather_sum_squares(a, idx)
                                           : scalar::gather_sum_squares(a, idx);
}

void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y) {
  if (x.size() != y.size()) throw ShapeError("axpby: length mismatch");
  if (active_level() == SimdLevel::avx2) {
    avx2::axpby(alpha, x, beta, y);
  } else {
    scalar::axpby(alpha, x, beta, y);
  }
}

}  // namespace sketchov::kernels
