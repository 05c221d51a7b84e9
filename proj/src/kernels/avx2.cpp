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
#include "sketchov/kernels.hpp"

#if !defined(SKETCHOV_NO_AVX2) && (defined(__x86_64__) || defined(_M_X64))
#include <immintrin.h>
#define SKETCHOV_HAVE_AVX2 1
#define SKETCHOV_AVX2_FN __attribute__((target("avx2,fma")))
#endif

#include <stdexcept>

namespace sketchov::kernels::avx2 {

#ifdef SKETCHOV_HAVE_AVX2

namespace {

SKETCHOV_AVX2_FN inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

bool compiled() { return true; }

SKETCHOV_AVX2_FN double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const double* pa = a.data();
  const double* pb = b.data();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i + 4), _mm256_loadu_pd(pb + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += pa[i] * pb[i];
  return s;
}

SKETCHOV_AVX2_FN double sum_squares(std::span<const double> a) {
  const std::size_t n = a.size();
  const double* p = a.data();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d x0 = _mm256_loadu_pd(p + i);
    const __m256d x1 = _mm256_loadu_pd(p + i + 4);
    acc0 = _mm256_fmadd_pd(x0, x0, acc0);
    acc1 = _mm256_fmadd_pd(x1, x1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(p + i);
    acc0 = _mm256_fmadd_pd(x, x, acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += p[i] * p[i];
  return s;
}

SKETCHOV_AVX2_FN double gather_sum_squares(std::span<const double> a,
                                           std::span<const std::int64_t> idx) {
  const std::size_t n = idx.size();
  const double* base = a.data();
  const auto* pi = reinterpret_cast<const long long*>(idx.data());
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i vi = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(pi + i));
    const __m256d x = _mm256_i64gather_pd(base, vi, 8);
    acc = _mm256_fmadd_pd(x, x, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double v = base[idx[i]];
    s += v * v;
  }
  return s;
}

SKETCHOV_AVX2_FN void axpby(double alpha, std::span<const double> x, double beta,
                            std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d yb = _mm256_mul_pd(vb, _mm256_loadu_pd(y.data() + i));
    _mm256_storeu_pd(y.data() + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i), yb));
  }
  for (; i < n; ++i) y[i] = alpha * x[i] + beta * y[i];
}

#else

bool compiled() { return false; }

namespace {
[[noreturn]] void unavailable() { throw std::logic_error("AVX2 kernels not compiled in"); }
}  // namespace

double dot(std::span<const double>, std::span<const double>) { unavailable(); }
double sum_squares(std::span<const double>) { unavailable(); }
double gather_sum_squares(std::span<const double>, std::span<const std::int64_t>) {
  unavailable();
}
void axpby(double, std::span<const double>, double, std::span<double>) { unavailable(); }

#endif

}  // namespace sketchov::kernels::avx2
