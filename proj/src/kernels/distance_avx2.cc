/*
 * Copyright 2026 The FedST Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <immintrin.h>

#include "fedst/kernels.h"

namespace fedst::kernels {

// Four windows per vector. Separate multiply and add (no FMA) keep rounding
// identical to the scalar kernel.
__attribute__((target("avx2"))) void window_sqdist_avx2(const double* s, size_t len,
                                                        const double* t, size_t n,
                                                        double* out) {
  if (len > n) return;
  size_t windows = n - len + 1;
  size_t p = 0;
  for (; p + 4 <= windows; p += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (size_t i = 0; i < len; ++i) {
      __m256d sv = _mm256_broadcast_sd(s + i);
      __m256d tv = _mm256_loadu_pd(t + p + i);
      __m256d d = _mm256_sub_pd(sv, tv);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    _mm256_storeu_pd(out + p, acc);
  }
  if (p < windows) window_sqdist_scalar(s, len, t + p, n - p, out + p);
}

}  // namespace fedst::kernels
