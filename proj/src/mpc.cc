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

#include "fedst/mpc.h"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

namespace fedst::mpc {
namespace {

using OK = OpKind;

// Bounds the working set of a comparison batch (m random bits per element).
constexpr size_t kChunk = size_t{1} << 13;

Zq inv_pow2(int m) { return Zq::pow2(kModulusBits - m); }  // 2^127 = 1 (mod q)

int ceil_log2(int n) {
  int b = 0;
  while ((1 << b) < n) ++b;
  return b;
}

Zq enc(double x, int scale = kFracBits) { return encode_fixed(x, scale).value; }

const std::array<Zq, 127>& pow2_table() {
  static const std::array<Zq, 127> t = [] {
    std::array<Zq, 127> a{};
    for (int i = 0; i < 127; ++i) a[i] = Zq::pow2(i);
    return a;
  }();
  return t;
}

Shares concat(const Shares& a, const Shares& b) {
  Shares r;
  r.reserve(a.size() + b.size());
  r.insert(r.end(), a.begin(), a.end());
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

void check_same(const Shares& x, const Shares& y) {
  if (x.size() != y.size()) throw std::invalid_argument("share vectors differ in length");
}

// Result of opening a + 2^(ell-1) + r' + 2^m r'', where r' has m dealer bits
// and r'' sums each party's private kappa-padded random integer.
struct MaskedOpen {
  std::vector<u128> low;  // opened value mod 2^m
  Shares rprime;
  Shares bits;  // m per element
};

MaskedOpen mask_open(Party& p, std::span<const Zq> a, int m, int ell) {
  if (m < 1 || m >= ell) throw std::invalid_argument("mask width");
  if (ell > max_mask_width(p.parties()))
    throw std::invalid_argument("masked opening of " + std::to_string(ell) +
                                " bits would wrap the ring for this party count");
  const auto& pw = pow2_table();
  size_t n = a.size();
  MaskedOpen out;
  p.pool().take_bits(n * m, out.bits);
  out.rprime.resize(n);
  int w = ell - m + kKappa;
  Shares masked(n);
  for (size_t e = 0; e < n; ++e) {
    Zq r;
    for (int i = 0; i < m; ++i) r += out.bits[e * m + i] * pw[i];
    out.rprime[e] = r;
    Zq rho(p.rng().next_bits(w));
    masked[e] = a[e] + r + pw[m] * rho;
    if (p.is_initiator()) masked[e] += pw[ell - 1];
  }
  auto c = open(p, masked);
  out.low.resize(n);
  u128 mask = (u128{1} << m) - 1;
  for (size_t e = 0; e < n; ++e) out.low[e] = c[e].value() & mask;
  return out;
}

// Shared [c < r] for public c and shared bits r (LSB first), as a carry chain.
Shares bit_lt(Party& p, const MaskedOpen& mo, int m) {
  size_t n = mo.low.size();
  Shares u(n), r(n);
  for (size_t e = 0; e < n; ++e) u[e] = (mo.low[e] & 1) ? Zq() : mo.bits[e * m];
  for (int i = 1; i < m; ++i) {
    for (size_t e = 0; e < n; ++e) r[e] = mo.bits[e * m + i];
    Shares prod = mul(p, r, u);
    for (size_t e = 0; e < n; ++e) {
      bool ci = (mo.low[e] >> i) & 1;
      u[e] = ci ? prod[e] : r[e] + u[e] - prod[e];
    }
  }
  return u;
}

Shares ltz_chunk(Party& p, std::span<const Zq> a, int m) {
  MaskedOpen mo = mask_open(p, a, m, m + 1);
  Shares u = bit_lt(p, mo, m);
  Zq inv = inv_pow2(m);
  Shares out(a.size());
  for (size_t e = 0; e < a.size(); ++e) {
    Zq t = a[e] + mo.rprime[e];
    if (p.is_initiator()) t -= Zq(mo.low[e]);
    out[e] = u[e] - t * inv;
  }
  return out;
}

// b ? x : y, metered as `count` selections.
Shares select_counted(Party& p, const Shares& b, const Shares& x, const Shares& y,
                      uint64_t count) {
  Party::OpScope s(p, OK::kSel, count);
  return add(y, mul(p, b, sub(x, y)));
}

// Horner evaluation of the log2 polynomial at u = xn - 0.75 (scale f).
Shares log_poly(Party& p, const Shares& u) {
  auto c = log2_poly();
  int deg = static_cast<int>(c.size()) - 1;
  Shares acc = trunc(p, scale(u, enc(c[deg])), kFracBits);
  acc = add_public(p, acc, enc(c[deg - 1]));
  for (int i = deg - 2; i >= 0; --i) acc = add_public(p, fmul(p, acc, u), enc(c[i]));
  return acc;
}

// Pairwise tree reduction over `rows` groups of `len`. When `idx` is given it
// is carried along. take_right(l, r) returns the shared bit choosing r.
template <typename TakeRight>
void tree_reduce(Party& p, Shares& v, Shares* idx, size_t rows, size_t len,
                 TakeRight take_right) {
  if (len == 0) throw std::invalid_argument("empty vector");
  if (v.size() != rows * len) throw std::invalid_argument("reduction shape");
  size_t width = len;
  while (width > 1) {
    size_t pairs = width / 2;
    size_t next = width - pairs;
    Shares l(rows * pairs), r(rows * pairs), li, ri;
    if (idx) {
      li.resize(rows * pairs);
      ri.resize(rows * pairs);
    }
    for (size_t row = 0; row < rows; ++row)
      for (size_t q = 0; q < pairs; ++q) {
        l[row * pairs + q] = v[row * width + 2 * q];
        r[row * pairs + q] = v[row * width + 2 * q + 1];
        if (idx) {
          li[row * pairs + q] = (*idx)[row * width + 2 * q];
          ri[row * pairs + q] = (*idx)[row * width + 2 * q + 1];
        }
      }
    Shares b = take_right(l, r);
    Shares nv, ni;
    if (idx) {
      Shares sel = select_counted(p, concat(b, b), concat(r, ri), concat(l, li), rows * pairs);
      nv.assign(sel.begin(), sel.begin() + rows * pairs);
      ni.assign(sel.begin() + rows * pairs, sel.end());
    } else {
      nv = select_counted(p, b, r, l, rows * pairs);
    }
    Shares v2(rows * next), i2;
    if (idx) i2.resize(rows * next);
    for (size_t row = 0; row < rows; ++row) {
      for (size_t q = 0; q < pairs; ++q) {
        v2[row * next + q] = nv[row * pairs + q];
        if (idx) i2[row * next + q] = ni[row * pairs + q];
      }
      if (width % 2) {
        v2[row * next + pairs] = v[row * width + width - 1];
        if (idx) i2[row * next + pairs] = (*idx)[row * width + width - 1];
      }
    }
    v = std::move(v2);
    if (idx) *idx = std::move(i2);
    width = next;
  }
}

}  // namespace

int max_mask_width(int n) { return 125 - kKappa - ceil_log2(n); }

// ---- Local ----

Shares add(const Shares& x, const Shares& y) {
  check_same(x, y);
  Shares r(x.size());
  for (size_t i = 0; i < x.size(); ++i) r[i] = x[i] + y[i];
  return r;
}

Shares sub(const Shares& x, const Shares& y) {
  check_same(x, y);
  Shares r(x.size());
  for (size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
  return r;
}

Shares neg(const Shares& x) {
  Shares r(x.size());
  for (size_t i = 0; i < x.size(); ++i) r[i] = -x[i];
  return r;
}

Shares scale(const Shares& x, Zq c) {
  Shares r(x.size());
  for (size_t i = 0; i < x.size(); ++i) r[i] = x[i] * c;
  return r;
}

Shares add_public(const Party& p, const Shares& x, std::span<const Zq> c) {
  if (c.size() != x.size()) throw std::invalid_argument("public vector length");
  Shares r = x;
  if (p.is_initiator())
    for (size_t i = 0; i < r.size(); ++i) r[i] += c[i];
  return r;
}

Shares add_public(const Party& p, const Shares& x, Zq c) {
  Shares r = x;
  if (p.is_initiator())
    for (auto& v : r) v += c;
  return r;
}

Shares constant(const Party& p, std::span<const Zq> c) {
  if (p.is_initiator()) return Shares(c.begin(), c.end());
  return Shares(c.size());
}

Shares constant(const Party& p, size_t count, Zq c) {
  return Shares(count, p.is_initiator() ? c : Zq());
}

Shares trivial(const Party& p, int owner, std::span<const Zq> values, size_t count) {
  if (p.id() != owner) return Shares(count);
  if (values.size() != count) throw std::invalid_argument("trivial sharing length");
  return Shares(values.begin(), values.end());
}

Zq local_sum(std::span<const Zq> x) {
  Zq s;
  for (auto v : x) s += v;
  return s;
}

// ---- Communication ----

Shares input(Party& p, int owner, std::span<const Zq> values, size_t count) {
  Party::OpScope s(p, OK::kInput, count);
  if (p.id() == owner) {
    if (values.size() != count) throw std::invalid_argument("input length");
    Shares mine(values.begin(), values.end());
    for (int j = 0; j < p.parties(); ++j) {
      if (j == owner) continue;
      Shares r(count);
      for (auto& v : r) v = p.rng().next_zq();
      for (size_t i = 0; i < count; ++i) mine[i] -= r[i];
      p.send_elements(j, r);
    }
    p.note_round();
    return mine;
  }
  Shares mine = p.recv_elements(owner, count);
  p.note_round();
  return mine;
}

std::vector<Zq> open(Party& p, const Shares& x) {
  Party::OpScope s(p, OK::kOpen, x.size());
  for (int j = 0; j < p.parties(); ++j)
    if (j != p.id()) p.send_elements(j, x);
  Shares sum = x;
  for (int j = 0; j < p.parties(); ++j) {
    if (j == p.id()) continue;
    auto r = p.recv_elements(j, x.size());
    for (size_t i = 0; i < x.size(); ++i) sum[i] += r[i];
  }
  p.note_round();
  return sum;
}

std::optional<std::vector<Zq>> open_to(Party& p, const Shares& x, int target) {
  Party::OpScope s(p, OK::kOpen, x.size());
  if (p.id() != target) {
    p.send_elements(target, x);
    p.note_round();
    return std::nullopt;
  }
  Shares sum = x;
  for (int j = 0; j < p.parties(); ++j) {
    if (j == target) continue;
    auto r = p.recv_elements(j, x.size());
    for (size_t i = 0; i < x.size(); ++i) sum[i] += r[i];
  }
  p.note_round();
  return sum;
}

// ---- Arithmetic ----

Shares mul(Party& p, const Shares& x, const Shares& y) {
  check_same(x, y);
  size_t n = x.size();
  Party::OpScope s(p, OK::kMul, n);
  if (n == 0) return {};
  Shares a, b, c;
  p.pool().take_triples(n, a, b, c);
  Shares de(2 * n);
  for (size_t i = 0; i < n; ++i) {
    de[i] = x[i] - a[i];
    de[n + i] = y[i] - b[i];
  }
  auto opened = open(p, de);
  Shares z(n);
  for (size_t i = 0; i < n; ++i) {
    Zq d = opened[i], e = opened[n + i];
    z[i] = c[i] + d * b[i] + e * a[i];
    if (p.is_initiator()) z[i] += d * e;
  }
  return z;
}

Shares trunc(Party& p, const Shares& a, int m, int ell) {
  Party::OpScope s(p, OK::kTrunc, a.size());
  if (a.empty()) return {};
  MaskedOpen mo = mask_open(p, a, m, ell);
  Zq inv = inv_pow2(m);
  Shares out(a.size());
  for (size_t e = 0; e < a.size(); ++e) {
    Zq t = a[e] + mo.rprime[e];
    if (p.is_initiator()) t -= Zq(mo.low[e]);
    out[e] = t * inv;
  }
  return out;
}

Shares fmul(Party& p, const Shares& x, const Shares& y) {
  Party::OpScope s(p, OK::kMul, x.size());
  return trunc(p, mul(p, x, y), kFracBits, kProductBits);
}

// ---- Comparison ----

Shares ltz(Party& p, const Shares& a, int m) {
  Party::OpScope s(p, OK::kCmp, a.size());
  Shares out;
  out.reserve(a.size());
  for (size_t off = 0; off < a.size(); off += kChunk) {
    size_t len = std::min(kChunk, a.size() - off);
    Shares part = ltz_chunk(p, std::span<const Zq>(a).subspan(off, len), m);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

Shares lt(Party& p, const Shares& x, const Shares& y, int m) { return ltz(p, sub(x, y), m); }

Shares select(Party& p, const Shares& b, const Shares& x, const Shares& y) {
  check_same(x, y);
  return select_counted(p, b, x, y, x.size());
}

std::vector<Shares> bit_length_onehot(Party& p, const Shares& x, int bits) {
  size_t n = x.size();
  const auto& pw = pow2_table();
  Shares diffs(n * bits);
  for (int i = 0; i < bits; ++i)
    for (size_t e = 0; e < n; ++e)
      diffs[i * n + e] = p.is_initiator() ? x[e] - pw[i] : x[e];
  Shares c = ltz(p, diffs, bits + 1);  // c[i*n+e] = [x_e < 2^i]
  std::vector<Shares> h(bits + 1, Shares(n));
  for (size_t e = 0; e < n; ++e) {
    h[0][e] = c[e];
    for (int t = 1; t < bits; ++t) h[t][e] = c[t * n + e] - c[(t - 1) * n + e];
    h[bits][e] = (p.is_initiator() ? Zq::from_u64(1) : Zq()) - c[(bits - 1) * n + e];
  }
  return h;
}

// ---- Division and logarithm ----

std::span<const double> log2_poly() {
  static const double kCoef[] = {-0.4150372346700758, 1.9235919434026227, -1.2825293308170636,
                                 1.1402109613511613,  -1.129434810792175,  1.1988140004073982,
                                 -1.6078850103134625, 1.8916762580646176};
  return kCoef;
}

PoisonedResult div(Party& p, const Shares& x, const Shares& y) {
  check_same(x, y);
  size_t n = x.size();
  Party::OpScope s(p, OK::kDiv, n);
  if (n == 0) return {};
  const auto& pw = pow2_table();
  constexpr int kB = kCmpBits;  // raw magnitudes below 2^60
  constexpr int kG = 36;        // Goldschmidt working scale

  Shares sgn = ltz(p, x);
  Shares flip = add_public(p, scale(sgn, -Zq::from_u64(2)), Zq::from_u64(1));
  Shares ax = mul(p, x, flip);

  Shares both = concat(ax, y);
  auto h = bit_length_onehot(p, both, kB);
  Shares fac(2 * n), tlen(2 * n);
  for (int t = 0; t <= kB; ++t)
    for (size_t e = 0; e < 2 * n; ++e) {
      fac[e] += h[t][e] * pw[kB - t];
      tlen[e] += h[t][e] * Zq::from_u64(t);
    }
  Shares norm = trunc(p, mul(p, both, fac), kB - kG, kB + 2);
  Shares xn(norm.begin(), norm.begin() + n), yn(norm.begin() + n, norm.end());

  Shares w0 = add_public(p, scale(yn, -Zq::from_u64(2)), enc(2.9142, kG));
  Shares nd = trunc(p, mul(p, concat(xn, yn), concat(w0, w0)), kG, 2 * kG + 3);
  for (int it = 0; it < 5; ++it) {
    Shares d(nd.begin() + n, nd.end());
    Shares e = add_public(p, neg(d), enc(2.0, kG));
    nd = trunc(p, mul(p, nd, concat(e, e)), kG, 2 * kG + 3);
  }
  Shares qn = trunc(p, Shares(nd.begin(), nd.begin() + n), kG - kFracBits, kG + 4);

  // Exponent e = tx - ty in [-60, 60]; one-hot over j in [-20, 40].
  constexpr int kLo = -kFracBits, kHi = kIntBits;
  constexpr int kCount = kHi - kLo + 2;  // thresholds kLo..kHi+1
  Shares ediff(n * kCount);
  for (int j = 0; j < kCount; ++j) {
    Zq thr = Zq::from_signed(kLo + j);
    for (size_t e = 0; e < n; ++e) {
      Zq d = tlen[e] - tlen[n + e];
      ediff[j * n + e] = p.is_initiator() ? d - thr : d;
    }
  }
  Shares ce = ltz(p, ediff, 8);  // [e < kLo + j]
  Shares shift(n);
  for (int j = 0; j + 1 < kCount; ++j)
    for (size_t e = 0; e < n; ++e)
      shift[e] += (ce[(j + 1) * n + e] - ce[j * n + e]) * pw[kLo + j + kFracBits];
  Shares mag = trunc(p, mul(p, qn, shift), kFracBits, kFracBits + 2 + kB);
  PoisonedResult r;
  r.value = mul(p, mag, flip);
  r.poisoned.assign(h[0].begin() + n, h[0].end());
  return r;
}

PoisonedResult log2(Party& p, const Shares& x) {
  size_t n = x.size();
  Party::OpScope s(p, OK::kLog, n);
  if (n == 0) return {};
  const auto& pw = pow2_table();
  constexpr int kB = kCmpBits;
  auto h = bit_length_onehot(p, x, kB);
  Shares fac(n), expo(n);
  for (int t = 0; t <= kB; ++t)
    for (size_t e = 0; e < n; ++e) {
      fac[e] += h[t][e] * pw[kB - t];
      expo[e] += h[t][e] * (Zq::from_signed(t - kFracBits) * pw[kFracBits]);
    }
  Shares xn = trunc(p, mul(p, x, fac), kB - kFracBits, kB + 2);
  Shares u = add_public(p, xn, -enc(0.75));
  PoisonedResult r;
  r.value = add(log_poly(p, u), expo);
  r.poisoned = std::move(h[0]);
  return r;
}

Shares log2_count(Party& p, const Shares& cnt, int bits) {
  if (bits < 1 || bits > kFracBits) throw std::invalid_argument("log2_count width");
  size_t n = cnt.size();
  Party::OpScope s(p, OK::kLog, n);
  if (n == 0) return {};
  const auto& pw = pow2_table();
  auto h = bit_length_onehot(p, cnt, bits);
  Shares fac(n), expo(n);
  for (int t = 0; t <= bits; ++t)
    for (size_t e = 0; e < n; ++e) {
      fac[e] += h[t][e] * pw[kFracBits - t];
      expo[e] += h[t][e] * (Zq::from_u64(t) * pw[kFracBits]);
    }
  Shares xn = mul(p, cnt, fac);  // exact: n * 2^(f - t)
  Shares u = add_public(p, xn, -enc(0.75));
  return add(log_poly(p, u), expo);
}

// ---- Reductions ----

std::pair<Shares, Shares> min_argmin(Party& p, const Shares& v, size_t rows, size_t len) {
  Shares val = v;
  Shares idx(rows * len);
  for (size_t r = 0; r < rows; ++r)
    for (size_t i = 0; i < len; ++i)
      idx[r * len + i] = p.is_initiator() ? Zq::from_u64(i) : Zq();
  tree_reduce(p, val, &idx, rows, len,
              [&](const Shares& l, const Shares& r) { return lt(p, r, l); });
  return {std::move(val), std::move(idx)};
}

Shares min_rows(Party& p, const Shares& v, size_t rows, size_t len) {
  Shares val = v;
  tree_reduce(p, val, nullptr, rows, len,
              [&](const Shares& l, const Shares& r) { return lt(p, r, l); });
  return val;
}

Shares max_rows(Party& p, const Shares& v, size_t rows, size_t len) {
  Shares val = v;
  tree_reduce(p, val, nullptr, rows, len,
              [&](const Shares& l, const Shares& r) { return lt(p, l, r); });
  return val;
}

Shares topk(Party& p, const Shares& v, size_t k) {
  size_t len = v.size();
  if (k < 1 || k > len) throw std::invalid_argument("top-k: k out of range");
  Zq one = Zq::from_u64(1);
  Zq sentinel = -Zq::pow2(kSentinelBits);
  Shares cur = v;
  Shares out;
  for (size_t pass = 0; pass < k; ++pass) {
    // Nodes cover contiguous index ranges; each carries its max and a one-hot
    // over its range.
    struct Node {
      Zq val;
      Shares onehot;
    };
    std::vector<Node> nodes(len);
    for (size_t i = 0; i < len; ++i) nodes[i] = {cur[i], constant(p, 1, one)};
    while (nodes.size() > 1) {
      size_t pairs = nodes.size() / 2;
      Shares l(pairs), r(pairs);
      for (size_t q = 0; q < pairs; ++q) {
        l[q] = nodes[2 * q].val;
        r[q] = nodes[2 * q + 1].val;
      }
      Shares b = lt(p, l, r);  // right strictly larger
      Shares nv = select_counted(p, b, r, l, pairs);
      Shares bb, oh;
      for (size_t q = 0; q < pairs; ++q) {
        for (auto z : nodes[2 * q].onehot) {
          bb.push_back(b[q]);
          oh.push_back(z);
        }
        for (auto z : nodes[2 * q + 1].onehot) {
          bb.push_back(b[q]);
          oh.push_back(z);
        }
      }
      Shares prod = mul(p, bb, oh);
      std::vector<Node> next;
      size_t off = 0;
      for (size_t q = 0; q < pairs; ++q) {
        Node m;
        m.val = nv[q];
        for (auto z : nodes[2 * q].onehot) m.onehot.push_back(z - prod[off++]);
        for (size_t t = 0; t < nodes[2 * q + 1].onehot.size(); ++t) m.onehot.push_back(prod[off++]);
        next.push_back(std::move(m));
      }
      if (nodes.size() % 2) next.push_back(std::move(nodes.back()));
      nodes = std::move(next);
    }
    const Shares& oh = nodes[0].onehot;
    Zq index;
    for (size_t i = 0; i < len; ++i) index += oh[i] * Zq::from_u64(i);
    out.push_back(index);
    if (pass + 1 < k) {
      Shares gap = add_public(p, neg(cur), sentinel);
      cur = add(cur, mul(p, oh, gap));
    }
  }
  return out;
}

void oblivious_sort(Party& p, Shares& keys, std::vector<Shares>& payloads) {
  size_t n0 = keys.size();
  for (const auto& pl : payloads)
    if (pl.size() != n0) throw std::invalid_argument("payload length mismatch");
  if (n0 <= 1) return;
  size_t n = next_pow2(n0);
  Zq sentinel = Zq::pow2(kCmpBits - 1) - Zq::from_u64(1);
  keys.resize(n, p.is_initiator() ? sentinel : Zq());
  for (auto& pl : payloads) pl.resize(n);
  size_t nv = 1 + payloads.size();
  auto vec = [&](size_t v) -> Shares& { return v == 0 ? keys : payloads[v - 1]; };
  for (const auto& layer : batcher_layers(n)) {
    size_t g = layer.size();
    Shares ki(g), kj(g);
    for (size_t t = 0; t < g; ++t) {
      ki[t] = keys[layer[t].first];
      kj[t] = keys[layer[t].second];
    }
    Shares b = lt(p, kj, ki);  // swap when key_j < key_i
    Shares bb(g * nv), diff(g * nv);
    for (size_t v = 0; v < nv; ++v)
      for (size_t t = 0; t < g; ++t) {
        bb[v * g + t] = b[t];
        diff[v * g + t] = vec(v)[layer[t].second] - vec(v)[layer[t].first];
      }
    Shares delta;
    {
      Party::OpScope s(p, OK::kSel, g * nv);
      delta = mul(p, bb, diff);
    }
    for (size_t v = 0; v < nv; ++v)
      for (size_t t = 0; t < g; ++t) {
        vec(v)[layer[t].first] += delta[v * g + t];
        vec(v)[layer[t].second] -= delta[v * g + t];
      }
  }
  keys.resize(n0);
  for (auto& pl : payloads) pl.resize(n0);
}

}  // namespace fedst::mpc
