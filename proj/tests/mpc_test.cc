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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedst/mpc.h"
#include "test_util.h"

namespace fedst {
namespace {

using testing::input_fixed;
using testing::open_fixed;
using testing::open_ints;
using testing::quantize;
using testing::run_parties;

constexpr double kUlp = 1.0 / (1 << kFracBits);

mpc::Shares input_ints(Party& p, const std::vector<int64_t>& v) {
  std::vector<Zq> enc;
  if (p.id() == 0)
    for (auto x : v) enc.push_back(Zq::from_signed(x));
  return mpc::input(p, 0, enc, v.size());
}

TEST(MaskWidth, ShrinksWithPartyCount) {
  EXPECT_EQ(mpc::max_mask_width(2), 84);
  EXPECT_EQ(mpc::max_mask_width(8), 82);
  EXPECT_GE(mpc::max_mask_width(8), mpc::kProductBits + 1);
}

TEST(Mpc, LinearOpsAndOpen) {
  run_parties(3, 1, [](Party& p) {
    std::vector<double> a{1.5, -2.0, 3.25}, b{0.5, 4.0, -1.0};
    auto x = input_fixed(p, a), y = input_fixed(p, b);
    EXPECT_EQ(open_fixed(p, mpc::add(x, y)), (std::vector<double>{2.0, 2.0, 2.25}));
    EXPECT_EQ(open_fixed(p, mpc::sub(x, y)), (std::vector<double>{1.0, -6.0, 4.25}));
    EXPECT_EQ(open_fixed(p, mpc::neg(x)), (std::vector<double>{-1.5, 2.0, -3.25}));
    EXPECT_EQ(open_fixed(p, mpc::scale(x, Zq::from_u64(2))), (std::vector<double>{3.0, -4.0, 6.5}));
    EXPECT_EQ(open_fixed(p, mpc::add_public(p, x, encode_fixed(1.0).value)),
              (std::vector<double>{2.5, -1.0, 4.25}));
    EXPECT_EQ(open_fixed(p, mpc::constant(p, 2, encode_fixed(7.0).value)),
              (std::vector<double>{7.0, 7.0}));
    auto at2 = mpc::open_to(p, x, 2);
    EXPECT_EQ(at2.has_value(), p.id() == 2);
    if (at2) EXPECT_EQ(decode_vector(*at2), a);
  });
}

TEST(Mpc, InputFromEveryParty) {
  run_parties(4, 2, [](Party& p) {
    for (int owner = 0; owner < 4; ++owner) {
      std::vector<Zq> mine{Zq::from_u64(10 * owner + 1)};
      auto s = mpc::input(p, owner, p.id() == owner ? mine : std::vector<Zq>{}, 1);
      EXPECT_EQ(mpc::open(p, s)[0], Zq::from_u64(10 * owner + 1));
    }
  });
}

TEST(Mpc, MultiplicationIsExact) {
  run_parties(3, 3, [](Party& p) {
    std::vector<int64_t> a{3, -7, 0, 1 << 30}, b{5, 6, 9, -(1 << 20)};
    auto got = open_ints(p, mpc::mul(p, input_ints(p, a), input_ints(p, b)));
    for (size_t i = 0; i < a.size(); ++i) EXPECT_EQ(got[i], a[i] * b[i]);
  });
}

TEST(Mpc, TruncationIsFloorOrFloorPlusOne) {
  run_parties(3, 4, [](Party& p) {
    std::vector<int64_t> a{0, 1, -1, 1023, -1024, (int64_t{1} << 50) + 17, -(int64_t{1} << 55)};
    auto got = open_ints(p, mpc::trunc(p, input_ints(p, a), 10, 60));
    for (size_t i = 0; i < a.size(); ++i) {
      int64_t fl = a[i] >> 10;
      EXPECT_TRUE(got[i] == fl || got[i] == fl + 1) << a[i] << " -> " << got[i];
    }
  });
}

TEST(Mpc, FixedPointProduct) {
  run_parties(2, 5, [](Party& p) {
    Prg rng(5, "fmul");
    auto a = testing::uniform_vector(rng, 200, -1000, 1000);
    auto b = testing::uniform_vector(rng, 200, -1000, 1000);
    auto got = open_fixed(p, mpc::fmul(p, input_fixed(p, a), input_fixed(p, b)));
    for (size_t i = 0; i < a.size(); ++i)
      EXPECT_NEAR(got[i], quantize(a[i]) * quantize(b[i]), kUlp);
  });
}

TEST(Mpc, ComparisonEdges) {
  run_parties(3, 6, [](Party& p) {
    int64_t big = int64_t{1} << mpc::kCmpBits;
    std::vector<int64_t> a{0, -1, 1, -big, big - 1, -big + 1, 12345, -12345};
    auto got = open_ints(p, mpc::ltz(p, input_ints(p, a)));
    for (size_t i = 0; i < a.size(); ++i) EXPECT_EQ(got[i], a[i] < 0 ? 1 : 0) << a[i];
    std::vector<int64_t> x{1, 2, 3, -5}, y{2, 2, 1, -4};
    auto lt = open_ints(p, mpc::lt(p, input_ints(p, x), input_ints(p, y)));
    EXPECT_EQ(lt, (std::vector<int64_t>{1, 0, 0, 1}));
  });
}

TEST(Mpc, ComparisonAcrossChunks) {
  run_parties(2, 7, [](Party& p) {
    const size_t n = 9000;
    std::vector<int64_t> a(n);
    for (size_t i = 0; i < n; ++i) a[i] = (i % 3 == 0) ? -static_cast<int64_t>(i) - 1 : i;
    auto got = open_ints(p, mpc::ltz(p, input_ints(p, a), 20));
    for (size_t i = 0; i < n; ++i) ASSERT_EQ(got[i], a[i] < 0) << i;
  });
}

TEST(Mpc, Select) {
  run_parties(3, 8, [](Party& p) {
    auto b = input_ints(p, {1, 0, 1});
    auto x = input_ints(p, {10, 20, 30}), y = input_ints(p, {-1, -2, -3});
    EXPECT_EQ(open_ints(p, mpc::select(p, b, x, y)), (std::vector<int64_t>{10, -2, 30}));
    EXPECT_EQ(p.stats().total().op(OpKind::kSel), 3u);
  });
}

TEST(Mpc, BitLengthOneHot) {
  run_parties(2, 9, [](Party& p) {
    std::vector<int64_t> x{0, 1, 2, 3, 4, 255, 256, 1000};
    auto h = mpc::bit_length_onehot(p, input_ints(p, x), 10);
    ASSERT_EQ(h.size(), 11u);
    for (size_t e = 0; e < x.size(); ++e) {
      int want = x[e] == 0 ? 0 : 64 - __builtin_clzll(static_cast<uint64_t>(x[e]));
      for (int t = 0; t <= 10; ++t) {
        auto v = open_ints(p, mpc::Shares{h[t][e]});
        EXPECT_EQ(v[0], t == want ? 1 : 0) << x[e] << " t=" << t;
      }
    }
  });
}

TEST(Mpc, DivisionAccuracyAndPoison) {
  run_parties(3, 10, [](Party& p) {
    std::vector<double> x{1.0, -7.5, 1000.0, 0.001, 0.0, 3.0, 5.0, 123456.0};
    std::vector<double> y{3.0, 2.0, 0.01, 1000.0, 4.0, 0.0, -2.0, 0.5};
    auto r = mpc::div(p, input_fixed(p, x), input_fixed(p, y));
    auto q = open_fixed(p, r.value);
    auto poisoned = open_ints(p, r.poisoned);
    for (size_t i = 0; i < x.size(); ++i) {
      bool bad = quantize(y[i]) < kUlp;
      EXPECT_EQ(poisoned[i], bad ? 1 : 0) << i;
      if (bad) continue;
      double want = quantize(x[i]) / quantize(y[i]);
      EXPECT_LE(std::fabs(q[i] - want), std::ldexp(1.0, -18) * std::max(std::fabs(want), 1.0))
          << x[i] << "/" << y[i] << " got " << q[i];
    }
    EXPECT_EQ(p.stats().total().op(OpKind::kDiv), x.size());
  });
}

TEST(Mpc, Log2Accuracy) {
  run_parties(2, 11, [](Party& p) {
    std::vector<double> x{1.0, 2.0, 0.5, 3.0, 1e-5, 1e6, 0.75, 1e11};
    auto r = mpc::log2(p, input_fixed(p, x));
    auto got = open_fixed(p, r.value);
    auto poisoned = open_ints(p, r.poisoned);
    for (size_t i = 0; i < x.size(); ++i) {
      EXPECT_NEAR(got[i], std::log2(quantize(x[i])), 1e-3) << x[i];
      EXPECT_EQ(poisoned[i], 0);
    }
    auto z = mpc::log2(p, input_fixed(p, std::vector<double>{0.0, -3.0}));
    EXPECT_EQ(open_ints(p, z.poisoned), (std::vector<int64_t>{1, 1}));
  });
}

TEST(Mpc, Log2PolynomialFitsOnReducedRange) {
  auto c = mpc::log2_poly();
  for (double x = 0.5; x < 1.0; x += 1.0 / 512) {
    double t = x - 0.75, acc = 0;
    for (size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
    EXPECT_NEAR(acc, std::log2(x), 2e-5) << x;
  }
}

TEST(Mpc, Log2OfCounts) {
  run_parties(3, 12, [](Party& p) {
    std::vector<int64_t> n{1, 2, 3, 5, 64, 100, 511, 512, 1000};
    auto got = open_fixed(p, mpc::log2_count(p, input_ints(p, n), 11));
    for (size_t i = 0; i < n.size(); ++i) EXPECT_NEAR(got[i], std::log2(double(n[i])), 1e-4);
  });
}

TEST(Mpc, MinArgminKeepsFirstOnTies) {
  run_parties(2, 13, [](Party& p) {
    std::vector<int64_t> v{5, 3, 3, 9, /**/ -1, -1, -1, -1, /**/ 7, 8, 9, 2};
    auto [mn, idx] = mpc::min_argmin(p, input_ints(p, v), 3, 4);
    EXPECT_EQ(open_ints(p, mn), (std::vector<int64_t>{3, -1, 2}));
    EXPECT_EQ(open_ints(p, idx), (std::vector<int64_t>{1, 0, 3}));
    auto mx = mpc::max_rows(p, input_ints(p, v), 3, 4);
    EXPECT_EQ(open_ints(p, mx), (std::vector<int64_t>{9, -1, 9}));
  });
}

TEST(Mpc, TopKPrefersLowerIndexOnTies) {
  run_parties(3, 14, [](Party& p) {
    std::vector<int64_t> v{4, 9, 1, 9, 7, 4};
    EXPECT_EQ(open_ints(p, mpc::topk(p, input_ints(p, v), 4)),
              (std::vector<int64_t>{1, 3, 4, 0}));
    EXPECT_THROW(mpc::topk(p, input_ints(p, v), 7), std::invalid_argument);
  });
}

TEST(Mpc, ObliviousSortMatchesStdSort) {
  run_parties(2, 15, [](Party& p) {
    Prg rng(15, "sort");
    std::vector<int64_t> keys(37), pay(37);
    for (size_t i = 0; i < keys.size(); ++i) {
      keys[i] = static_cast<int64_t>(rng.uniform(40)) - 20;
      pay[i] = static_cast<int64_t>(i);
    }
    auto k = input_ints(p, keys);
    std::vector<mpc::Shares> payloads{input_ints(p, pay)};
    mpc::oblivious_sort(p, k, payloads);
    auto ks = open_ints(p, k);
    auto ps = open_ints(p, payloads[0]);
    ASSERT_EQ(ks.size(), keys.size());
    auto want = keys;
    std::sort(want.begin(), want.end());
    for (size_t i = 0; i < keys.size(); ++i) {
      EXPECT_EQ(ks[i], want[i]);
      EXPECT_EQ(keys[ps[i]], ks[i]);
    }
    std::vector<int64_t> perm(ps.begin(), ps.begin() + keys.size());
    std::sort(perm.begin(), perm.end());
    for (size_t i = 0; i < perm.size(); ++i) EXPECT_EQ(perm[i], static_cast<int64_t>(i));
  });
}

TEST(Batcher, GateCountsAndZeroOnePrinciple) {
  EXPECT_EQ(batcher_gate_count(8), 19u);
  EXPECT_EQ(batcher_gate_count(16), 63u);
  EXPECT_EQ(next_pow2(37), 64u);
  EXPECT_EQ(next_pow2(64), 64u);
  const size_t n = 16;
  auto layers = batcher_layers(n);
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> v(n);
    for (size_t i = 0; i < n; ++i) v[i] = (mask >> i) & 1;
    for (const auto& layer : layers) {
      std::vector<bool> used(n);
      for (auto [i, j] : layer) {
        ASSERT_LT(i, j);
        ASSERT_FALSE(used[i] || used[j]);
        used[i] = used[j] = true;
        if (v[i] > v[j]) std::swap(v[i], v[j]);
      }
    }
    ASSERT_TRUE(std::is_sorted(v.begin(), v.end())) << mask;
  }
}

}  // namespace
}  // namespace fedst
