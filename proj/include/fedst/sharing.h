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

#ifndef FEDST_SHARING_H_
#define FEDST_SHARING_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include "fedst/prg.h"
#include "fedst/ring.h"

namespace fedst {

class MissingShareError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SessionMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PoolExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One party's additive share of a ring element.
struct Share {
  RingElement element;
  int owner = 0;
  uint64_t session = 0;
};

// Splits x into n additive shares; any n-1 of them are jointly uniform.
std::vector<Share> share(const RingElement& x, int n, Prg& rng, uint64_t session = 0);

// Sums one share per party. Throws MissingShareError or SessionMismatchError.
RingElement reconstruct(std::span<const Share> shares, int n);

// FIFO of ring elements with amortized O(1) pops from the front.
class ElementQueue {
 public:
  size_t size() const { return data_.size() - head_; }
  void push(Zq v) { data_.push_back(v); }
  void append(std::span<const Zq> vs) { data_.insert(data_.end(), vs.begin(), vs.end()); }
  // Moves the first count elements to out. Caller checks size().
  void pop_into(size_t count, std::vector<Zq>& out);

 private:
  std::vector<Zq> data_;
  size_t head_ = 0;
};

// Per-party store of dealer-provided correlated randomness: Beaver triples and
// shared random bits. Consumed by exactly one party thread.
class PartyPool {
 public:
  // Invoked when a request cannot be served; must add at least the missing amount.
  using Refill = std::function<void(PartyPool&, size_t triples_missing, size_t bits_missing)>;

  void add_triple(Zq a, Zq b, Zq c);
  void add_triples(std::span<const Zq> a, std::span<const Zq> b, std::span<const Zq> c);
  void add_bits(std::span<const Zq> r) { bits_.append(r); }
  void add_bit(Zq r) { bits_.push(r); }
  void set_refill(Refill r) { refill_ = std::move(r); }

  // Each throws PoolExhausted when no refill is configured and the pool is short.
  void take_triples(size_t count, std::vector<Zq>& a, std::vector<Zq>& b, std::vector<Zq>& c);
  void take_bits(size_t count, std::vector<Zq>& out);

  size_t triples_available() const { return ta_.size(); }
  size_t bits_available() const { return bits_.size(); }
  uint64_t triples_consumed() const { return triples_consumed_; }
  uint64_t bits_consumed() const { return bits_consumed_; }

 private:
  ElementQueue ta_, tb_, tc_, bits_;
  Refill refill_;
  uint64_t triples_consumed_ = 0;
  uint64_t bits_consumed_ = 0;
};

// Trusted dealer for the semi-honest offline phase. Triples and bits come from
// independent deterministic streams, so pools are identical for equal seeds
// regardless of how requests are batched.
class Dealer {
 public:
  Dealer(int n, uint64_t seed);

  int parties() const { return n_; }

  // Fixed-size pools, one per party (no refill).
  std::vector<PartyPool> deal_triples(size_t count);
  std::vector<PartyPool> deal_random_bits(size_t count);
  std::vector<PartyPool> deal(size_t triples, size_t bits);

  // Installs a thread-safe refill on an in-process party's pool.
  void attach(int party, PartyPool& pool);

 private:
  void generate_triples(size_t count);
  void generate_bits(size_t count);
  void supply(int party, PartyPool& pool, size_t triples, size_t bits);

  int n_;
  Prg triple_rng_;
  Prg bit_rng_;
  std::mutex mu_;
  // Generated but not yet delivered, per party.
  std::vector<ElementQueue> pa_, pb_, pc_, pbits_;
};

// Dealer output files: "FSTD", version u8, count u32 big-endian, then each
// party's block in party order (triples: a, b, c; bits: r), 16-byte LE elements.
inline constexpr uint8_t kPoolFileVersion = 1;
void write_pool_files(const std::filesystem::path& dir, int n, uint64_t seed, size_t triples,
                      size_t bits);
PartyPool load_party_pool(const std::filesystem::path& dir, int party, int n);

}  // namespace fedst

#endif  // FEDST_SHARING_H_
