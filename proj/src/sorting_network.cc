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
#include <stdexcept>

#include "fedst/mpc.h"

namespace fedst {

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<std::vector<Gate>> batcher_layers(size_t n) {
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("size must be a power of two");
  std::vector<std::vector<Gate>> layers;
  for (size_t p = 1; p < n; p <<= 1) {
    for (size_t k = p; k >= 1; k >>= 1) {
      std::vector<Gate> layer;
      for (size_t j = k % p; j + k < n; j += 2 * k) {
        for (size_t i = 0; i < std::min(k, n - j - k); ++i) {
          if ((i + j) / (2 * p) == (i + j + k) / (2 * p)) layer.emplace_back(i + j, i + j + k);
        }
      }
      if (!layer.empty()) layers.push_back(std::move(layer));
    }
  }
  return layers;
}

size_t batcher_gate_count(size_t n) {
  size_t total = 0;
  for (const auto& l : batcher_layers(n)) total += l.size();
  return total;
}

}  // namespace fedst
