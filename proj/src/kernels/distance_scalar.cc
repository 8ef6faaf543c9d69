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

#include "fedst/kernels.h"

namespace fedst::kernels {

void window_sqdist_scalar(const double* s, size_t len, const double* t, size_t n, double* out) {
  for (size_t p = 0; p + len <= n; ++p) {
    double acc = 0.0;
    for (size_t i = 0; i < len; ++i) {
      double d = s[i] - t[p + i];
      acc = acc + d * d;
    }
    out[p] = acc;
  }
}

}  // namespace fedst::kernels
