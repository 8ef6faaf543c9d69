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

#ifndef FEDST_KERNELS_H_
#define FEDST_KERNELS_H_

#include <cstddef>

// Plaintext sliding-window kernels used for P0's local distances and for the
// reference search. Every variant accumulates in the same order, so results
// are bit-identical across instruction sets.
namespace fedst::kernels {

enum class Isa { kScalar, kAvx2 };

// out[p] = sum_i (s[i] - t[p + i])^2 for p in [0, n - len].
void window_sqdist_scalar(const double* s, size_t len, const double* t, size_t n, double* out);
void window_sqdist_avx2(const double* s, size_t len, const double* t, size_t n, double* out);

bool cpu_has_avx2();
// The variant used by window_sqdist. Defaults to the best supported one.
Isa active_isa();
// Overrides dispatch (tests). Throws if the CPU lacks the requested ISA.
void set_isa(Isa isa);
const char* isa_name(Isa isa);

void window_sqdist(const double* s, size_t len, const double* t, size_t n, double* out);
double min_window_sqdist(const double* s, size_t len, const double* t, size_t n);

}  // namespace fedst::kernels

#endif  // FEDST_KERNELS_H_
