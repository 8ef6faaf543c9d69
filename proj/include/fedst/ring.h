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

#ifndef FEDST_RING_H_
#define FEDST_RING_H_

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedst {

using u128 = unsigned __int128;
using i128 = __int128;

// Fixed-point and statistical-security parameters shared by every protocol.
inline constexpr int kFracBits = 20;   // f
inline constexpr int kIntBits = 40;    // k, magnitude bound 2^k on reals
inline constexpr int kKappa = 40;      // statistical security parameter
inline constexpr int kModulusBits = 127;

struct SecurityParams {
  int kappa = kKappa;
  int frac_bits = kFracBits;
  int int_bits = kIntBits;

  // Masked openings of products (2f + k bits) must not wrap.
  constexpr bool valid() const {
    return 2 * frac_bits + int_bits + kappa < kModulusBits;
  }
};

class OverflowError : public std::range_error {
 public:
  using std::range_error::range_error;
};

// An element of Z_q with q = 2^127 - 1. Always kept reduced.
class Zq {
 public:
  static constexpr u128 kModulus = (u128{1} << 127) - 1;

  constexpr Zq() = default;
  // Reduces an arbitrary 128-bit value.
  constexpr explicit Zq(u128 v) : v_(reduce(v)) {}
  static constexpr Zq from_u64(uint64_t v) { return Zq(u128{v}); }
  static Zq from_signed(i128 v);

  constexpr u128 value() const { return v_; }
  constexpr bool is_zero() const { return v_ == 0; }

  // Lift to (-q/2, q/2].
  i128 to_signed() const;

  friend constexpr Zq operator+(Zq a, Zq b) {
    u128 s = a.v_ + b.v_;
    if (s >= kModulus) s -= kModulus;
    return raw(s);
  }
  friend constexpr Zq operator-(Zq a, Zq b) {
    return raw(a.v_ >= b.v_ ? a.v_ - b.v_ : a.v_ + (kModulus - b.v_));
  }
  constexpr Zq operator-() const { return raw(v_ == 0 ? 0 : kModulus - v_); }
  friend constexpr Zq operator*(Zq a, Zq b) { return raw(mul_reduce(a.v_, b.v_)); }
  Zq& operator+=(Zq o) { return *this = *this + o; }
  Zq& operator-=(Zq o) { return *this = *this - o; }
  Zq& operator*=(Zq o) { return *this = *this * o; }

  friend constexpr bool operator==(Zq, Zq) = default;

  Zq pow(u128 e) const;
  // Multiplicative inverse; throws std::domain_error on zero.
  Zq inverse() const;

  static Zq pow2(int e);

  std::array<uint8_t, 16> to_bytes() const;  // little-endian
  static Zq from_bytes(std::span<const uint8_t, 16> b);

  std::string to_string() const;

 private:
  static constexpr Zq raw(u128 v) {
    Zq z;
    z.v_ = v;
    return z;
  }
  static constexpr u128 reduce(u128 v) {
    v = (v & kModulus) + (v >> 127);
    return v >= kModulus ? v - kModulus : v;
  }
  static constexpr u128 mul_reduce(u128 a, u128 b) {
    constexpr u128 kLo = ~uint64_t{0};
    u128 a0 = a & kLo, a1 = a >> 64;
    u128 b0 = b & kLo, b1 = b >> 64;
    u128 p00 = a0 * b0;
    u128 mid = a0 * b1 + a1 * b0;  // both < 2^127, no overflow
    u128 p11 = a1 * b1;
    u128 lo = p00 + (mid << 64);
    u128 carry = lo < p00 ? 1 : 0;
    u128 hi = p11 + (mid >> 64) + carry;
    // 2^127 == 1 (mod q)
    u128 s = (lo & kModulus) + ((hi << 1) | (lo >> 127));
    return reduce(s);
  }

  u128 v_ = 0;
};

// A ring element carrying its fixed-point scale: it encodes round(x * 2^scale).
struct RingElement {
  Zq value;
  int scale = kFracBits;

  friend bool operator==(const RingElement&, const RingElement&) = default;
};

// Throws OverflowError if |x| >= 2^int_bits.
RingElement encode_fixed(double x, int scale = kFracBits, int int_bits = kIntBits);
double decode_fixed(const RingElement& e);
double decode_fixed(Zq v, int scale);

RingElement ring_add(const RingElement& a, const RingElement& b);
RingElement ring_sub(const RingElement& a, const RingElement& b);
RingElement ring_mul(const RingElement& a, const RingElement& b);

std::vector<Zq> encode_vector(std::span<const double> xs, int scale = kFracBits);
std::vector<double> decode_vector(std::span<const Zq> vs, int scale = kFracBits);

}  // namespace fedst

#endif  // FEDST_RING_H_
