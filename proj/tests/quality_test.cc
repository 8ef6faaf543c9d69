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

#include <cmath>

#include "fedst/quality.h"
#include "test_util.h"

namespace fedst {
namespace {

TEST(Entropy, KnownValues) {
  EXPECT_DOUBLE_EQ(entropy_binary(0.5), 1.0);
  EXPECT_DOUBLE_EQ(entropy_binary(0.0), 0.0);
  EXPECT_DOUBLE_EQ(entropy_binary(1.0), 0.0);
  EXPECT_NEAR(entropy_binary(0.25), 0.8112781244591328, 1e-15);
  EXPECT_THROW(entropy_binary(1.5), std::invalid_argument);
}

TEST(InformationGain, PerfectSplitGainsParentEntropy) {
  std::vector<double> d{0.1, 0.2, 0.3, 5.0, 6.0, 7.0};
  std::vector<int> l{1, 1, 1, 2, 2, 2};
  EXPECT_DOUBLE_EQ(ig_plain(d, l, 1), 1.0);
  EXPECT_DOUBLE_EQ(ig_plain(d, l, 2), 1.0);
}

TEST(InformationGain, HandWorkedExample) {
  // Best threshold is tau = 2: a pure left side {+, +}.
  std::vector<double> d{1, 2, 3, 4, 5};
  std::vector<int> l{1, 1, 2, 1, 2};
  double parent = entropy_binary(3.0 / 5);
  double at2 = parent - 3.0 / 5 * entropy_binary(1.0 / 3);
  double at4 = parent - 4.0 / 5 * entropy_binary(3.0 / 4);
  EXPECT_NEAR(ig_plain(d, l, 1), std::max(at2, at4), 1e-12);
  // Ties share a threshold.
  std::vector<double> tied{1, 1, 1, 1, 1};
  EXPECT_NEAR(ig_plain(tied, l, 1), 0.0, 1e-12);
}

TEST(FStatistic, HandWorkedExample) {
  std::vector<double> d{1, 2, 3, 5, 6, 7};
  std::vector<int> l{1, 1, 1, 2, 2, 2};
  // Means 2 and 6, overall 4: between (4 + 4) / 1, within (1+0+1+1+0+1) / 4.
  FStat f = fstat_plain(d, l, 2);
  EXPECT_FALSE(f.poisoned);
  EXPECT_DOUBLE_EQ(f.value, 8.0);
  std::vector<double> flat{1, 1, 1, 2, 2, 2};
  EXPECT_TRUE(fstat_plain(flat, l, 2).poisoned);
  std::vector<int> one_class{1, 1, 1, 1, 1, 1};
  EXPECT_THROW(fstat_plain(d, one_class, 2), std::invalid_argument);
}

TEST(CountBits, CoversZeroToM) {
  EXPECT_EQ(count_bits(0), 1);
  EXPECT_EQ(count_bits(1), 1);
  EXPECT_EQ(count_bits(2), 2);
  EXPECT_EQ(count_bits(7), 3);
  EXPECT_EQ(count_bits(8), 4);
  EXPECT_EQ(count_bits(512), 10);
}

struct Instance {
  std::vector<double> dists;
  std::vector<int> labels;
  std::vector<size_t> counts;  // per party, labels concatenated in party order
  int classes;
  int y_s;
};

Instance random_instance(Prg& rng, size_t m, int classes, int parties) {
  Instance in;
  in.classes = classes;
  in.y_s = 1 + static_cast<int>(rng.uniform(classes));
  for (size_t j = 0; j < m; ++j) {
    int c = 1 + static_cast<int>(j % classes);
    in.labels.push_back(c);
    // Coarse grid so that ties occur.
    in.dists.push_back(std::round(rng.uniform01() * 40 + 3 * c) / 4);
  }
  in.counts.assign(parties, m / parties);
  in.counts[0] += m % parties;
  return in;
}

struct SecureOut {
  double naive = 0, sorted = 0, fstat = 0;
};

SecureOut run_secure(const Instance& in, int parties, uint64_t seed) {
  SecureOut out;
  testing::run_parties(parties, seed, [&](Party& p) {
    size_t off = 0;
    for (int i = 0; i < p.id(); ++i) off += in.counts[i];
    std::span<const int> mine(in.labels.data() + off, in.counts[p.id()]);
    auto gamma = build_class_vectors(p, mine, in.counts, in.classes);
    auto y = share_class_onehot(p, in.y_s, in.classes);
    auto d = testing::input_fixed(p, in.dists);
    double a = testing::open_fixed(p, ig_secure_naive(p, d, gamma, y))[0];
    double b = testing::open_fixed(p, ig_secure_sorted(p, d, gamma, y))[0];
    double f = testing::open_fixed(p, fstat_secure(p, d, gamma))[0];
    if (p.id() == 0) out = {a, b, f};
  });
  return out;
}

TEST(SecureQuality, MatchesPlaintextOnRandomInstances) {
  Prg rng(1, "quality-test");
  for (int trial = 0; trial < 6; ++trial) {
    int classes = 2 + trial % 2;
    Instance in = random_instance(rng, 12 + 5 * trial, classes, 3);
    SecureOut s = run_secure(in, 3, 100 + trial);
    double ig = ig_plain(in.dists, in.labels, in.y_s);
    EXPECT_NEAR(s.naive, ig, 5e-3) << trial;
    EXPECT_NEAR(s.sorted, ig, 5e-3) << trial;
    FStat f = fstat_plain(in.dists, in.labels, classes);
    ASSERT_FALSE(f.poisoned);
    EXPECT_NEAR(s.fstat, f.value, 1e-2 * std::max(f.value, 1.0)) << trial;
  }
}

TEST(SecureQuality, ClassVectorsFollowPartyOrder) {
  std::vector<int> labels{2, 1, 1, 2, 3};
  std::vector<size_t> counts{2, 3};
  testing::run_parties(2, 7, [&](Party& p) {
    std::span<const int> mine(labels.data() + (p.id() ? 2 : 0), counts[p.id()]);
    auto g = build_class_vectors(p, mine, counts, 3);
    ASSERT_EQ(g.size(), 3u);
    EXPECT_EQ(testing::open_ints(p, g[0]), (std::vector<int64_t>{0, 1, 1, 0, 0}));
    EXPECT_EQ(testing::open_ints(p, g[2]), (std::vector<int64_t>{0, 0, 0, 0, 1}));
    auto y = share_class_onehot(p, 3, 3);
    EXPECT_EQ(testing::open_ints(p, y), (std::vector<int64_t>{0, 0, 1}));
  });
}

TEST(SecureQuality, ConstantDistancesDoNotBreakFStat) {
  Instance in;
  in.dists = {2, 2, 2, 2, 2, 2};
  in.labels = {1, 2, 1, 2, 1, 2};
  in.counts = {3, 3};
  in.classes = 2;
  in.y_s = 1;
  SecureOut s = run_secure(in, 2, 9);
  EXPECT_NEAR(s.fstat, 0.0, 1e-3);
  EXPECT_NEAR(s.naive, 0.0, 5e-3);
  EXPECT_NEAR(s.sorted, 0.0, 5e-3);
}

TEST(SecureQuality, CostOrderingOnSmallInstance) {
  Prg rng(2, "quality-test");
  Instance in = random_instance(rng, 32, 2, 2);
  std::array<uint64_t, 3> ops{};
  testing::run_parties(2, 11, [&](Party& p) {
    std::span<const int> mine(in.labels.data() + (p.id() ? in.counts[0] : 0), in.counts[p.id()]);
    auto gamma = build_class_vectors(p, mine, in.counts, 2);
    auto y = share_class_onehot(p, in.y_s, 2);
    auto d = testing::input_fixed(p, in.dists);
    Party::StageScope st(p, Stage::kQuality);
    auto measure = [&](auto fn) {
      CommStats before = p.stats();
      fn();
      return (p.stats() - before).stage(Stage::kQuality).interactive_ops();
    };
    uint64_t a = measure([&] { ig_secure_naive(p, d, gamma, y); });
    uint64_t b = measure([&] { ig_secure_sorted(p, d, gamma, y); });
    uint64_t c = measure([&] { fstat_secure(p, d, gamma); });
    if (p.id() == 0) ops = {a, b, c};
  });
  EXPECT_GT(ops[0], ops[1]);
  EXPECT_GT(ops[1], ops[2]);
}

}  // namespace
}  // namespace fedst
