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

#include "fedst/dot_product.h"

#include <cstring>
#include <stdexcept>

namespace fedst {
namespace {

Zq nonzero(Prg& rng) {
  Zq v;
  while (v.is_zero()) v = rng.next_zq();
  return v;
}

void put_elements(std::vector<uint8_t>& out, std::span<const Zq> vs) {
  for (auto v : vs) {
    auto b = v.to_bytes();
    out.insert(out.end(), b.begin(), b.end());
  }
}

Zq read_element(const uint8_t* p) { return Zq::from_bytes(std::span<const uint8_t, 16>(p, 16)); }

std::vector<uint8_t> encode_scalars(std::span<const Zq> vs) {
  std::vector<uint8_t> out;
  out.reserve(vs.size() * 16);
  put_elements(out, vs);
  return out;
}

std::vector<Zq> decode_scalars(std::span<const uint8_t> b, size_t count) {
  if (b.size() != count * 16) throw std::runtime_error("dot product: unexpected reply size");
  std::vector<Zq> out(count);
  for (size_t i = 0; i < count; ++i) out[i] = read_element(b.data() + 16 * i);
  return out;
}

Zq inner(std::span<const Zq> a, std::span<const Zq> y, Zq last) {
  Zq s;
  for (size_t l = 0; l < y.size(); ++l) s += a[l] * y[l];
  return s + a[y.size()] * last;
}

}  // namespace

DpMask dp_make_mask(Prg& rng, std::span<const Zq> x) {
  if (x.empty()) throw std::invalid_argument("dot product: empty vector");
  DpMask m;
  size_t d = kDpRows;
  m.width = x.size() + 1;
  m.r = static_cast<size_t>(rng.uniform(d));
  m.q.resize(d * d);
  do {
    for (auto& v : m.q) v = rng.next_zq();
    m.b = Zq();
    for (size_t j = 0; j < d; ++j) m.b += m.q[j * d + m.r];
  } while (m.b.is_zero());
  m.x.resize(d * m.width);
  for (size_t i = 0; i < d; ++i) {
    for (size_t l = 0; l < m.width; ++l) {
      if (i == m.r)
        m.x[i * m.width + l] = l < x.size() ? x[l] : Zq::from_u64(1);
      else
        m.x[i * m.width + l] = rng.next_zq();
    }
  }
  m.f.resize(m.width);
  for (auto& v : m.f) v = rng.next_zq();
  m.r1 = nonzero(rng);
  m.r2 = rng.next_zq();
  m.r3 = nonzero(rng);
  return m;
}

DpMessage1 dp_message1(const DpMask& m) {
  size_t d = kDpRows, w = m.width;
  DpMessage1 out;
  out.width = w;
  out.u.assign(d * w, Zq());
  for (size_t i = 0; i < d; ++i)
    for (size_t k = 0; k < d; ++k) {
      Zq qik = m.q[i * d + k];
      for (size_t l = 0; l < w; ++l) out.u[i * w + l] += qik * m.x[k * w + l];
    }
  Zq r12 = m.r1 * m.r2, r13 = m.r1 * m.r3;
  out.c.resize(w);
  out.g.resize(w);
  for (size_t l = 0; l < w; ++l) {
    out.c[l] = r12 * m.f[l];
    out.g[l] = r13 * m.f[l];
  }
  for (size_t i = 0; i < d; ++i) {
    if (i == m.r) continue;
    Zq colsum;
    for (size_t j = 0; j < d; ++j) colsum += m.q[j * d + i];
    for (size_t l = 0; l < w; ++l) out.c[l] += colsum * m.x[i * w + l];
  }
  return out;
}

std::vector<uint8_t> encode_message1(const DpMessage1& m) {
  size_t count = m.u.size() + m.c.size() + m.g.size();
  uint64_t bytes = count * 16;
  if (bytes > 0xffffffffu) throw std::length_error("dot product message too large");
  std::vector<uint8_t> out;
  out.reserve(4 + bytes);
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<uint8_t>(bytes >> s));
  put_elements(out, m.u);
  put_elements(out, m.c);
  put_elements(out, m.g);
  return out;
}

DpMessage1 decode_message1(std::span<const uint8_t> bytes) {
  if (bytes.size() < 4) throw std::runtime_error("dot product message truncated");
  uint64_t len = (uint64_t{bytes[0]} << 24) | (uint64_t{bytes[1]} << 16) |
                 (uint64_t{bytes[2]} << 8) | bytes[3];
  if (len != bytes.size() - 4 || len % 16 != 0) throw std::runtime_error("dot product message size");
  size_t count = len / 16, per = kDpRows + 2;
  if (count % per != 0) throw std::runtime_error("dot product message shape");
  DpMessage1 m;
  m.width = count / per;
  const uint8_t* p = bytes.data() + 4;
  auto take = [&](std::vector<Zq>& v, size_t n) {
    v.resize(n);
    for (auto& e : v) {
      e = read_element(p);
      p += 16;
    }
  };
  take(m.u, kDpRows * m.width);
  take(m.c, m.width);
  take(m.g, m.width);
  return m;
}

std::vector<Zq> dp_reply_basis(const DpMessage1& m) {
  std::vector<Zq> s(m.width);
  for (size_t l = 0; l < m.width; ++l) {
    Zq col;
    for (size_t j = 0; j < kDpRows; ++j) col += m.u[j * m.width + l];
    s[l] = col - m.c[l];
  }
  return s;
}

DpReply dp_reply(const DpMessage1& m, std::span<const Zq> basis, std::span<const Zq> y, Zq alpha) {
  if (y.size() + 1 != m.width) throw std::invalid_argument("dot product: length mismatch");
  return {inner(basis, y, alpha), inner(m.g, y, alpha)};
}

Zq dp_beta(const DpMask& m, const DpReply& reply) {
  Zq inv_b = m.b.inverse();
  return reply.a * inv_b + reply.h * m.r2 * (m.b * m.r3).inverse();
}

DpRawResult dp_raw_insecure(Party& p, int pi, std::span<const Zq> x, std::span<const Zq> y) {
  DpRawResult out;
  if (p.id() == 0) {
    DpMask mask = dp_make_mask(p.rng(), x);
    p.send(pi, encode_message1(dp_message1(mask)));
    auto r = decode_scalars(p.recv(pi), 2);
    out.beta = dp_beta(mask, {r[0], r[1]});
  } else if (p.id() == pi) {
    DpMessage1 m = decode_message1(p.recv(0));
    if (y.size() + 1 != m.width) throw std::invalid_argument("dot product: length mismatch");
    out.alpha = p.rng().next_zq();
    DpReply rep = dp_reply(m, dp_reply_basis(m), y, out.alpha);
    Zq both[2] = {rep.a, rep.h};
    p.send(0, encode_scalars(both));
  }
  return out;
}

mpc::Shares dp_batch(Party& p, std::span<const Zq> x, const std::vector<std::vector<Zq>>& ys,
                     std::span<const size_t> counts, size_t L) {
  int n = p.parties();
  if (static_cast<int>(counts.size()) != n) throw std::invalid_argument("dot product: counts");
  size_t total = 0;
  std::vector<size_t> offset(n + 1, 0);
  for (int i = 1; i < n; ++i) {
    offset[i] = total;
    total += counts[i];
  }
  offset[n] = total;

  // Per result: P0's term, the participant's a and -alpha, and 1/b (P0).
  std::vector<Zq> inv_b(total), a(total), p0_term(total), pi_term(total);
  if (p.id() == 0) {
    if (x.size() != L) throw std::invalid_argument("dot product: length mismatch");
    std::vector<DpMask> masks(n);
    for (int i = 1; i < n; ++i) {
      if (counts[i] == 0) continue;
      masks[i] = dp_make_mask(p.rng(), x);
      p.send(i, encode_message1(dp_message1(masks[i])));
    }
    for (int i = 1; i < n; ++i) {
      if (counts[i] == 0) continue;
      auto h = decode_scalars(p.recv(i), counts[i]);
      Zq ib = masks[i].b.inverse();
      Zq k = masks[i].r2 * (masks[i].b * masks[i].r3).inverse();
      for (size_t t = 0; t < counts[i]; ++t) {
        inv_b[offset[i] + t] = ib;
        p0_term[offset[i] + t] = h[t] * k;
      }
    }
  } else if (counts[p.id()] > 0) {
    int me = p.id();
    if (ys.size() != counts[me]) throw std::invalid_argument("dot product: vector count");
    DpMessage1 m = decode_message1(p.recv(0));
    if (m.width != L + 1) throw std::invalid_argument("dot product: length mismatch");
    auto basis = dp_reply_basis(m);
    std::vector<Zq> h(counts[me]);
    for (size_t t = 0; t < counts[me]; ++t) {
      Zq alpha = p.rng().next_zq();
      DpReply rep = dp_reply(m, basis, ys[t], alpha);
      h[t] = rep.h;
      a[offset[me] + t] = rep.a;
      pi_term[offset[me] + t] = -alpha;
    }
    p.send(0, encode_scalars(h));
  }
  p.note_round();
  // <1/b> and <a> are held locally by their owners; the Beaver openings mask them.
  mpc::Shares z = mpc::mul(p, inv_b, a);
  for (size_t t = 0; t < total; ++t) z[t] += p0_term[t] + pi_term[t];
  return z;
}

mpc::Shares dp_secure(Party& p, int pi, std::span<const Zq> x, std::span<const Zq> y, size_t L) {
  std::vector<size_t> counts(p.parties(), 0);
  if (pi <= 0 || pi >= p.parties()) throw std::invalid_argument("dot product: participant id");
  counts[pi] = 1;
  std::vector<std::vector<Zq>> ys;
  if (p.id() == pi) {
    if (y.size() != L) throw std::invalid_argument("dot product: length mismatch");
    ys.emplace_back(y.begin(), y.end());
  }
  return dp_batch(p, x, ys, counts, L);
}

}  // namespace fedst
