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

#include "fedst/ring.h"

#include <cmath>

namespace fedst {

Zq Zq::from_signed(i128 v) {
  if (v >= 0) return Zq(static_cast<u128>(v));
  return -Zq(static_cast<u128>(-v));
}

i128 Zq::to_signed() const {
  if (v_ > kModulus / 2) return -static_cast<i128>(kModulus - v_);
  return static_cast<i128>(v_);
}

Zq Zq::pow(u128 e) const {
  Zq base = *this, acc = Zq::from_u64(1);
  while (e != 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

Zq Zq::inverse() const {
  if (is_zero()) throw std::domain_error("inverse of zero in Z_q");
  return pow(kModulus - 2);
}

Zq Zq::pow2(int e) {
  if (e < 0 || e >= 127) throw std::out_of_range("pow2 exponent");
  return Zq(u128{1} << e);
}

std::array<uint8_t, 16> Zq::to_bytes() const {
  std::array<uint8_t, 16> out{};
  u128 v = v_;
  for (auto& b : out) {
    b = static_cast<uint8_t>(v);
    v >>= 8;
  }
  return out;
}

Zq Zq::from_bytes(std::span<const uint8_t, 16> b) {
  u128 v = 0;
  for (int i = 15; i >= 0; --i) v = (v << 8) | b[i];
  return Zq(v);
}

std::string Zq::to_string() const {
  if (v_ == 0) return "0";
  std::string s;
  u128 v = v_;
  while (v != 0) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return s;
}

RingElement encode_fixed(double x, int scale, int int_bits) {
  if (!std::isfinite(x) || std::fabs(x) >= std::ldexp(1.0, int_bits)) {
    throw OverflowError("fixed-point overflow: |x| >= 2^" + std::to_string(int_bits));
  }
  double scaled = std::nearbyint(std::ldexp(x, scale));
  auto mag = static_cast<u128>(static_cast<i128>(std::fabs(scaled)));
  Zq v(mag);
  return {scaled < 0 ? -v : v, scale};
}

double decode_fixed(Zq v, int scale) {
  i128 s = v.to_signed();
  double mag = static_cast<double>(static_cast<u128>(s < 0 ? -s : s));
  return std::ldexp(s < 0 ? -mag : mag, -scale);
}

double decode_fixed(const RingElement& e) { return decode_fixed(e.value, e.scale); }

RingElement ring_add(const RingElement& a, const RingElement& b) {
  if (a.scale != b.scale) throw std::invalid_argument("ring_add: scale mismatch");
  return {a.value + b.value, a.scale};
}

RingElement ring_sub(const RingElement& a, const RingElement& b) {
  if (a.scale != b.scale) throw std::invalid_argument("ring_sub: scale mismatch");
  return {a.value - b.value, a.scale};
}

RingElement ring_mul(const RingElement& a, const RingElement& b) {
  return {a.value * b.value, a.scale + b.scale};
}

std::vector<Zq> encode_vector(std::span<const double> xs, int scale) {
  std::vector<Zq> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(encode_fixed(x, scale).value);
  return out;
}

std::vector<double> decode_vector(std::span<const Zq> vs, int scale) {
  std::vector<double> out;
  out.reserve(vs.size());
  for (Zq v : vs) out.push_back(decode_fixed(v, scale));
  return out;
}

}  // namespace fedst
