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

#include "fedst/prg.h"

#include <sodium.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace fedst {
namespace {

constexpr size_t kBlockBytes = 4096;

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium init failed");
  });
}

}  // namespace

Prg::Prg(uint64_t seed, std::string_view domain, uint64_t index) : buf_(kBlockBytes) {
  ensure_sodium();
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, key_.size());
  uint8_t tmp[8];
  for (int i = 0; i < 8; ++i) tmp[i] = static_cast<uint8_t>(seed >> (8 * i));
  crypto_generichash_update(&st, tmp, sizeof tmp);
  crypto_generichash_update(&st, reinterpret_cast<const uint8_t*>(domain.data()), domain.size());
  for (int i = 0; i < 8; ++i) tmp[i] = static_cast<uint8_t>(index >> (8 * i));
  crypto_generichash_update(&st, tmp, sizeof tmp);
  crypto_generichash_final(&st, key_.data(), key_.size());
  pos_ = buf_.size();
}

void Prg::refill() {
  uint8_t nonce[crypto_stream_chacha20_NONCEBYTES] = {};
  static_assert(crypto_stream_chacha20_NONCEBYTES == 8);
  std::memcpy(nonce, &nonce_, sizeof nonce);
  ++nonce_;
  crypto_stream_chacha20(buf_.data(), buf_.size(), nonce, key_.data());
  pos_ = 0;
}

uint64_t Prg::next_u64() {
  if (pos_ + 8 > buf_.size()) refill();
  uint64_t v;
  std::memcpy(&v, buf_.data() + pos_, 8);
  pos_ += 8;
  return v;
}

u128 Prg::next_bits(int bits) {
  if (bits < 0 || bits > 127) throw std::out_of_range("next_bits");
  if (bits == 0) return 0;
  u128 v = (u128{next_u64()} << 64) | next_u64();
  return bits == 128 ? v : v & ((u128{1} << bits) - 1);
}

Zq Prg::next_zq() {
  for (;;) {
    u128 v = next_bits(127);
    if (v != Zq::kModulus) return Zq(v);
  }
}

uint64_t Prg::uniform(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform: empty range");
  uint64_t limit = max() - max() % bound;
  for (;;) {
    uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

double Prg::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Prg::normal() {
  // Box-Muller; the second variate is discarded to keep the stream position simple.
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace fedst
