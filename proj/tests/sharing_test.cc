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

#include <gtest/gtest.h>

#include <filesystem>

#include "fedst/prg.h"
#include "fedst/sharing.h"

namespace fedst {
namespace {

TEST(Sharing, ReconstructsAndHidesWithFewerShares) {
  Prg rng(1, "sharing-test");
  for (int n = 2; n <= 5; ++n) {
    for (int i = 0; i < 100; ++i) {
      RingElement x = encode_fixed((rng.uniform01() - 0.5) * 1000);
      auto shares = share(x, n, rng, 7);
      ASSERT_EQ(shares.size(), static_cast<size_t>(n));
      EXPECT_EQ(reconstruct(shares, n), x);
    }
  }
}

TEST(Sharing, SingleShareIsNotTheSecret) {
  Prg rng(2, "sharing-test");
  RingElement x = encode_fixed(42.0);
  int hits = 0;
  for (int i = 0; i < 100; ++i) hits += share(x, 3, rng)[0].element.value == x.value;
  EXPECT_EQ(hits, 0);
}

TEST(Sharing, ReconstructValidatesShares) {
  Prg rng(3, "sharing-test");
  auto shares = share(encode_fixed(1.0), 3, rng, 1);
  std::vector<Share> two(shares.begin(), shares.begin() + 2);
  EXPECT_THROW(reconstruct(two, 3), MissingShareError);
  auto mixed = shares;
  mixed[1].session = 2;
  EXPECT_THROW(reconstruct(mixed, 3), SessionMismatchError);
  auto dup = shares;
  dup[2].owner = 0;
  EXPECT_THROW(reconstruct(dup, 3), MissingShareError);
  EXPECT_THROW(share(encode_fixed(1.0), 1, rng), std::invalid_argument);
}

Zq sum_of(const std::vector<std::vector<Zq>>& per_party, size_t i) {
  Zq s;
  for (const auto& v : per_party) s += v[i];
  return s;
}

TEST(Dealer, TriplesAndBitsAreCorrelated) {
  const int n = 3;
  Dealer dealer(n, 5);
  auto pools = dealer.deal(200, 300);
  std::vector<std::vector<Zq>> a(n), b(n), c(n), r(n);
  for (int i = 0; i < n; ++i) {
    pools[i].take_triples(200, a[i], b[i], c[i]);
    pools[i].take_bits(300, r[i]);
  }
  for (size_t t = 0; t < 200; ++t) EXPECT_EQ(sum_of(a, t) * sum_of(b, t), sum_of(c, t));
  for (size_t t = 0; t < 300; ++t) {
    Zq bit = sum_of(r, t);
    EXPECT_TRUE(bit.value() == 0 || bit.value() == 1);
  }
  EXPECT_EQ(pools[0].triples_consumed(), 200u);
  EXPECT_EQ(pools[0].bits_consumed(), 300u);
}

TEST(Dealer, PoolsAreIndependentOfBatching) {
  Dealer one(2, 8), two(2, 8);
  auto p1 = one.deal(10, 0);
  auto q1 = two.deal_triples(4);
  auto q2 = two.deal_triples(6);
  std::vector<Zq> a, b, c, x, y, z;
  p1[1].take_triples(10, a, b, c);
  q1[1].take_triples(4, x, y, z);
  std::vector<Zq> x2, y2, z2;
  q2[1].take_triples(6, x2, y2, z2);
  x.insert(x.end(), x2.begin(), x2.end());
  EXPECT_EQ(a, x);
}

TEST(PartyPool, ThrowsWhenExhaustedWithoutRefill) {
  PartyPool pool;
  pool.add_triple(Zq::from_u64(1), Zq::from_u64(2), Zq::from_u64(2));
  std::vector<Zq> a, b, c;
  EXPECT_THROW(pool.take_triples(2, a, b, c), PoolExhausted);
  EXPECT_THROW(pool.take_bits(1, a), PoolExhausted);
}

TEST(PartyPool, RefillServesShortfall) {
  Dealer dealer(2, 9);
  PartyPool pool;
  dealer.attach(0, pool);
  std::vector<Zq> a, b, c;
  pool.take_triples(50, a, b, c);
  pool.take_bits(70, a);
  EXPECT_EQ(pool.triples_consumed(), 50u);
  EXPECT_EQ(pool.bits_consumed(), 70u);
}

TEST(PoolFiles, RoundTripMatchesDealer) {
  auto dir = std::filesystem::temp_directory_path() / "fedst_pool_test";
  std::filesystem::remove_all(dir);
  write_pool_files(dir, 3, 11, 25, 40);
  Dealer dealer(3, 11);
  auto dealt = dealer.deal(25, 40);
  for (int i = 0; i < 3; ++i) {
    PartyPool loaded = load_party_pool(dir, i, 3);
    EXPECT_EQ(loaded.triples_available(), 25u);
    EXPECT_EQ(loaded.bits_available(), 40u);
    std::vector<Zq> a, b, c, x, y, z;
    loaded.take_triples(25, a, b, c);
    dealt[i].take_triples(25, x, y, z);
    EXPECT_EQ(c, z);
  }
  EXPECT_THROW(load_party_pool(dir, 0, 4), std::runtime_error);
  EXPECT_THROW(load_party_pool(dir, 3, 3), std::out_of_range);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace fedst
