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

#include "fedst/sharing.h"

#include <algorithm>
#include <fstream>
#include <string>

namespace fedst {
namespace {

constexpr size_t kDealerBatch = 1 << 14;

void write_header(std::ofstream& out, uint32_t count) {
  out.write("FSTD", 4);
  out.put(static_cast<char>(kPoolFileVersion));
  for (int i = 3; i >= 0; --i) out.put(static_cast<char>((count >> (8 * i)) & 0xff));
}

void write_element(std::ofstream& out, Zq v) {
  auto bytes = v.to_bytes();
  out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

struct PoolFile {
  uint32_t count = 0;
  std::vector<uint8_t> body;
};

PoolFile read_pool_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open pool file " + path.string());
  std::vector<uint8_t> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (raw.size() < 9 || std::string(raw.begin(), raw.begin() + 4) != "FSTD") {
    throw std::runtime_error("bad pool file magic: " + path.string());
  }
  if (raw[4] != kPoolFileVersion) throw std::runtime_error("unsupported pool file version");
  PoolFile f;
  for (int i = 0; i < 4; ++i) f.count = (f.count << 8) | raw[5 + i];
  f.body.assign(raw.begin() + 9, raw.end());
  return f;
}

Zq element_at(const std::vector<uint8_t>& body, size_t index) {
  return Zq::from_bytes(std::span<const uint8_t, 16>(body.data() + 16 * index, 16));
}

}  // namespace

std::vector<Share> share(const RingElement& x, int n, Prg& rng, uint64_t session) {
  if (n < 2) throw std::invalid_argument("share: need at least two parties");
  std::vector<Share> out;
  out.reserve(n);
  Zq rest = x.value;
  for (int p = 0; p + 1 < n; ++p) {
    Zq r = rng.next_zq();
    rest -= r;
    out.push_back({{r, x.scale}, p, session});
  }
  out.push_back({{rest, x.scale}, n - 1, session});
  return out;
}

RingElement reconstruct(std::span<const Share> shares, int n) {
  if (static_cast<int>(shares.size()) != n) {
    throw MissingShareError("reconstruct: expected " + std::to_string(n) + " shares, got " +
                            std::to_string(shares.size()));
  }
  std::vector<bool> seen(n, false);
  Zq sum;
  for (const Share& s : shares) {
    if (s.session != shares.front().session) throw SessionMismatchError("reconstruct: mixed sessions");
    if (s.owner < 0 || s.owner >= n || seen[s.owner]) {
      throw MissingShareError("reconstruct: duplicate or foreign share owner");
    }
    seen[s.owner] = true;
    sum += s.element.value;
  }
  return {sum, shares.front().element.scale};
}

void ElementQueue::pop_into(size_t count, std::vector<Zq>& out) {
  out.assign(data_.begin() + head_, data_.begin() + head_ + count);
  head_ += count;
  if (head_ > 4096 && head_ * 2 > data_.size()) {
    data_.erase(data_.begin(), data_.begin() + head_);
    head_ = 0;
  }
}

void PartyPool::add_triple(Zq a, Zq b, Zq c) {
  ta_.push(a);
  tb_.push(b);
  tc_.push(c);
}

void PartyPool::add_triples(std::span<const Zq> a, std::span<const Zq> b,
                            std::span<const Zq> c) {
  ta_.append(a);
  tb_.append(b);
  tc_.append(c);
}

void PartyPool::take_triples(size_t count, std::vector<Zq>& a, std::vector<Zq>& b,
                             std::vector<Zq>& c) {
  if (ta_.size() < count && refill_) refill_(*this, count - ta_.size(), 0);
  if (ta_.size() < count) {
    throw PoolExhausted("triple pool exhausted: need " + std::to_string(count) + ", have " +
                        std::to_string(ta_.size()));
  }
  ta_.pop_into(count, a);
  tb_.pop_into(count, b);
  tc_.pop_into(count, c);
  triples_consumed_ += count;
}

void PartyPool::take_bits(size_t count, std::vector<Zq>& out) {
  if (bits_.size() < count && refill_) refill_(*this, 0, count - bits_.size());
  if (bits_.size() < count) {
    throw PoolExhausted("random-bit pool exhausted: need " + std::to_string(count) + ", have " +
                        std::to_string(bits_.size()));
  }
  bits_.pop_into(count, out);
  bits_consumed_ += count;
}

Dealer::Dealer(int n, uint64_t seed)
    : n_(n),
      triple_rng_(seed, "dealer/triples"),
      bit_rng_(seed, "dealer/bits"),
      pa_(n),
      pb_(n),
      pc_(n),
      pbits_(n) {
  if (n < 2) throw std::invalid_argument("dealer: need at least two parties");
}

void Dealer::generate_triples(size_t count) {
  std::vector<Zq> sh(n_);
  auto split = [&](Zq v) {
    Zq rest = v;
    for (int p = 0; p + 1 < n_; ++p) {
      sh[p] = triple_rng_.next_zq();
      rest -= sh[p];
    }
    sh[n_ - 1] = rest;
  };
  for (size_t i = 0; i < count; ++i) {
    Zq a = triple_rng_.next_zq();
    Zq b = triple_rng_.next_zq();
    split(a);
    for (int p = 0; p < n_; ++p) pa_[p].push(sh[p]);
    split(b);
    for (int p = 0; p < n_; ++p) pb_[p].push(sh[p]);
    split(a * b);
    for (int p = 0; p < n_; ++p) pc_[p].push(sh[p]);
  }
}

void Dealer::generate_bits(size_t count) {
  for (size_t i = 0; i < count; ++i) {
    Zq rest = Zq::from_u64(bit_rng_.next_u64() & 1);
    for (int p = 0; p + 1 < n_; ++p) {
      Zq r = bit_rng_.next_zq();
      rest -= r;
      pbits_[p].push(r);
    }
    pbits_[n_ - 1].push(rest);
  }
}

void Dealer::supply(int party, PartyPool& pool, size_t triples, size_t bits) {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<Zq> a, b, c;
  if (triples > 0) {
    if (pa_[party].size() < triples) {
      generate_triples(std::max(triples - pa_[party].size(), kDealerBatch));
    }
    pa_[party].pop_into(triples, a);
    pb_[party].pop_into(triples, b);
    pc_[party].pop_into(triples, c);
    pool.add_triples(a, b, c);
  }
  if (bits > 0) {
    if (pbits_[party].size() < bits) {
      generate_bits(std::max(bits - pbits_[party].size(), kDealerBatch));
    }
    pbits_[party].pop_into(bits, a);
    pool.add_bits(a);
  }
}

std::vector<PartyPool> Dealer::deal(size_t triples, size_t bits) {
  std::vector<PartyPool> pools(n_);
  for (int p = 0; p < n_; ++p) supply(p, pools[p], triples, bits);
  return pools;
}

std::vector<PartyPool> Dealer::deal_triples(size_t count) { return deal(count, 0); }
std::vector<PartyPool> Dealer::deal_random_bits(size_t count) { return deal(0, count); }

void Dealer::attach(int party, PartyPool& pool) {
  if (party < 0 || party >= n_) throw std::out_of_range("dealer: party id");
  pool.set_refill([this, party](PartyPool& p, size_t t, size_t b) { supply(party, p, t, b); });
}

void write_pool_files(const std::filesystem::path& dir, int n, uint64_t seed, size_t triples,
                      size_t bits) {
  if (triples > UINT32_MAX || bits > UINT32_MAX) throw std::invalid_argument("pool too large");
  std::filesystem::create_directories(dir);
  Dealer dealer(n, seed);
  auto pools = dealer.deal(triples, bits);
  std::ofstream tf(dir / "triples.fstd", std::ios::binary);
  std::ofstream bf(dir / "bits.fstd", std::ios::binary);
  write_header(tf, static_cast<uint32_t>(triples));
  write_header(bf, static_cast<uint32_t>(bits));
  std::vector<Zq> a, b, c;
  for (auto& pool : pools) {
    pool.take_triples(triples, a, b, c);
    for (size_t i = 0; i < triples; ++i) {
      write_element(tf, a[i]);
      write_element(tf, b[i]);
      write_element(tf, c[i]);
    }
    pool.take_bits(bits, a);
    for (Zq r : a) write_element(bf, r);
  }
  if (!tf || !bf) throw std::runtime_error("failed writing pool files in " + dir.string());
}

PartyPool load_party_pool(const std::filesystem::path& dir, int party, int n) {
  if (party < 0 || party >= n) throw std::out_of_range("load_party_pool: party id");
  PartyPool pool;
  PoolFile t = read_pool_file(dir / "triples.fstd");
  if (t.body.size() != size_t{48} * t.count * n) {
    throw std::runtime_error("triples.fstd size does not match party count");
  }
  size_t base = size_t{3} * t.count * party;
  for (size_t i = 0; i < t.count; ++i) {
    pool.add_triple(element_at(t.body, base + 3 * i), element_at(t.body, base + 3 * i + 1),
                    element_at(t.body, base + 3 * i + 2));
  }
  PoolFile b = read_pool_file(dir / "bits.fstd");
  if (b.body.size() != size_t{16} * b.count * n) {
    throw std::runtime_error("bits.fstd size does not match party count");
  }
  for (size_t i = 0; i < b.count; ++i) pool.add_bit(element_at(b.body, size_t{b.count} * party + i));
  return pool;
}

}  // namespace fedst
