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

#ifndef FEDST_PRG_H_
#define FEDST_PRG_H_

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "fedst/ring.h"

namespace fedst {

// ChaCha20 keystream generator. Deterministic for a given (seed, domain).
// Satisfies UniformRandomBitGenerator so it can drive <random> and std::shuffle.
class Prg {
 public:
  using result_type = uint64_t;

  Prg(uint64_t seed, std::string_view domain, uint64_t index = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  uint64_t next_u64();
  // Uniform in [0, 2^bits), bits <= 127.
  u128 next_bits(int bits);
  Zq next_zq();
  // Uniform in [0, bound).
  uint64_t uniform(uint64_t bound);
  double uniform01();
  double normal();

 private:
  void refill();

  std::array<uint8_t, 32> key_{};
  uint64_t nonce_ = 0;
  std::vector<uint8_t> buf_;
  size_t pos_ = 0;
};

}  // namespace fedst

#endif  // FEDST_PRG_H_
