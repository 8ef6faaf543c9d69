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

#include <algorithm>
#include <atomic>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fedst/kernels.h"

namespace fedst::kernels {
namespace {

Isa detect() { return cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar; }

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() { return current().load(); }

void set_isa(Isa isa) {
  if (isa == Isa::kAvx2 && !cpu_has_avx2()) throw std::runtime_error("AVX2 not supported");
  current().store(isa);
}

const char* isa_name(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

void window_sqdist(const double* s, size_t len, const double* t, size_t n, double* out) {
  if (active_isa() == Isa::kAvx2)
    window_sqdist_avx2(s, len, t, n, out);
  else
    window_sqdist_scalar(s, len, t, n, out);
}

double min_window_sqdist(const double* s, size_t len, const double* t, size_t n) {
  if (len == 0 || len > n) throw std::invalid_argument("window longer than series");
  std::vector<double> d(n - len + 1);
  window_sqdist(s, len, t, n, d.data());
  return *std::min_element(d.begin(), d.end());
}

}  // namespace fedst::kernels
