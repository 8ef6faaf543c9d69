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
#include <cstring>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "fedst/dataset.h"
#include "fedst/fedss.h"
#include "test_util.h"

namespace fedst {
namespace {

struct Fixture {
  Dataset train = make_synthetic_motif({12, 16, 0.1, 21});
  std::vector<Dataset> parts = partition_stratified(train, 2, 21);
};

std::vector<SearchResult> search(const Fixture& f, const SearchConfig& cfg) {
  int n = static_cast<int>(f.parts.size());
  std::vector<SearchResult> out(n);
  testing::run_parties(n, cfg.seed, [&](Party& p) {
    out[p.id()] = fedss_run(p, cfg, f.parts[p.id()].samples);
  });
  return out;
}

std::vector<TimeSeries> pooled(const Fixture& f) {
  std::vector<TimeSeries> all;
  for (const auto& d : f.parts) all.insert(all.end(), d.samples.begin(), d.samples.end());
  return all;
}

TEST(Search, RevealsTheReferenceTopK) {
  Fixture f;
  for (Measure m : {Measure::kIG, Measure::kFStat}) {
    SearchConfig cfg;
    cfg.k = 3;
    cfg.candidate_count = 8;
    cfg.measure = m;
    cfg.use_dp = true;
    cfg.use_sorted_ig = true;
    cfg.reveal_qualities = true;
    auto r = search(f, cfg);
    const auto& p0 = r[0];
    ASSERT_EQ(p0.revealed_indices.size(), 3u);
    ASSERT_EQ(p0.shapelets.size(), 3u);
    EXPECT_TRUE(r[1].revealed_indices.empty());
    EXPECT_EQ(p0.evaluated_count, 8u);
    EXPECT_EQ(r[1].evaluated_count, 8u);
    auto all = pooled(f);
    auto ref = centralized_search(p0.candidates, all, m, 3, 2);
    EXPECT_TRUE(topk_equivalent(p0.revealed_indices, ref, 1e-2)) << measure_name(m);
    for (size_t i = 0; i < 3; ++i) {
      double want = ref.qualities[p0.revealed_indices[i]];
      EXPECT_NEAR(p0.qualities[i], want, 1e-2 * std::max(1.0, std::fabs(want)));
    }
  }
}

TEST(Search, TransformTableMatchesPlaintextDistances) {
  Fixture f;
  SearchConfig cfg;
  cfg.k = 2;
  cfg.candidate_count = 5;
  cfg.transform = true;
  auto r = search(f, cfg);
  const auto& p0 = r[0];
  auto all = pooled(f);
  ASSERT_EQ(p0.table.size(), all.size());
  ASSERT_EQ(p0.table_labels.size(), all.size());
  for (size_t j = 0; j < all.size(); ++j) {
    EXPECT_EQ(p0.table_labels[j], all[j].label);
    for (size_t k = 0; k < 2; ++k)
      EXPECT_NEAR(p0.table[j][k], shapelet_distance_plain(p0.shapelets[k], all[j]), 1e-3);
  }
  EXPECT_TRUE(r[1].table.empty());
}

TEST(Search, RevealedShapeletsAreSlicesOfInitiatorData) {
  Fixture f;
  SearchConfig cfg;
  cfg.k = 3;
  cfg.candidate_count = 6;
  cfg.use_dp = true;
  auto r = search(f, cfg);
  const auto& mine = f.parts[0].samples;
  for (const auto& s : r[0].shapelets) {
    ASSERT_LT(s.sample, mine.size());
    ASSERT_LE(s.start + s.length(), mine[s.sample].values.size());
    std::vector<double> slice(mine[s.sample].values.begin() + s.start,
                              mine[s.sample].values.begin() + s.start + s.length());
    EXPECT_EQ(s.values, slice);
  }
}

// Keeps a copy of every frame delivered to the wrapped endpoint.
class RecordingTransport : public Transport {
 public:
  explicit RecordingTransport(std::unique_ptr<Transport> inner) : inner_(std::move(inner)) {}
  int id() const override { return inner_->id(); }
  int parties() const override { return inner_->parties(); }
  void send(int to, Frame frame) override { inner_->send(to, std::move(frame)); }
  Frame recv(int from) override {
    Frame f = inner_->recv(from);
    received.push_back(f.payload);
    return f;
  }
  void close() override { inner_->close(); }

  std::vector<std::vector<uint8_t>> received;

 private:
  std::unique_ptr<Transport> inner_;
};

TEST(Search, InitiatorNeverReceivesRawParticipantValues) {
  Dataset train = make_synthetic_motif({12, 16, 0.1, 31});
  auto parts = partition_stratified(train, 3, 31);
  std::set<std::array<uint8_t, 16>> raw;
  for (int i = 1; i < 3; ++i)
    for (const auto& s : parts[i].samples)
      for (double v : s.values) {
        Zq e = encode_fixed(v).value;
        if (!e.is_zero()) raw.insert(e.to_bytes());
      }

  for (bool dp : {false, true}) {
    SearchConfig cfg;
    cfg.k = 2;
    cfg.candidate_count = 4;
    cfg.use_dp = dp;
    cfg.transform = true;
    Dealer dealer(3, 31);
    auto pools = dealer.deal(0, 0);
    for (int i = 0; i < 3; ++i) dealer.attach(i, pools[i]);
    MemoryHub hub(3);
    auto* rec = new RecordingTransport(hub.endpoint(0));
    std::vector<std::unique_ptr<Transport>> transports;
    transports.emplace_back(rec);
    for (int i = 1; i < 3; ++i) transports.push_back(hub.endpoint(i));
    std::vector<std::thread> threads;
    for (int i = 0; i < 3; ++i)
      threads.emplace_back([&, i] {
        Party p(i, 3, *transports[i], pools[i], 31 + i);
        fedss_run(p, cfg, parts[i].samples);
      });
    for (auto& t : threads) t.join();

    ASSERT_FALSE(rec->received.empty());
    size_t hits = 0;
    std::array<uint8_t, 16> block;
    for (const auto& payload : rec->received)
      for (size_t off = 0; off + 16 <= payload.size(); ++off) {
        std::memcpy(block.data(), payload.data() + off, 16);
        hits += raw.count(block);
      }
    EXPECT_EQ(hits, 0u) << (dp ? "dp" : "basic");
  }
}

TEST(Search, ContractStopsAfterK) {
  Fixture f;
  SearchConfig cfg;
  cfg.k = 2;
  cfg.candidate_count = 10;
  cfg.contract_seconds = 0.0;
  auto r = search(f, cfg);
  EXPECT_EQ(r[0].evaluated_count, 2u);
  EXPECT_EQ(r[1].evaluated_count, 2u);
  EXPECT_EQ(r[0].shapelets.size(), 2u);
  EXPECT_EQ(r[0].per_candidate.size(), 2u);
}

TEST(Search, PerCandidateMetersAreConsistent) {
  Fixture f;
  SearchConfig cfg;
  cfg.k = 1;
  cfg.candidate_count = 4;
  auto r = search(f, cfg);
  ASSERT_EQ(r[0].per_candidate.size(), 4u);
  uint64_t sum = 0;
  for (const auto& c : r[0].per_candidate) {
    EXPECT_GT(c.stats.stage(Stage::kDistance).messages, 0u);
    EXPECT_GT(c.stats.stage(Stage::kQuality).op(OpKind::kCmp), 0u);
    sum += c.stats.total().bytes;
  }
  EXPECT_LT(sum, r[0].comm.total().bytes);
  std::ostringstream csv;
  write_candidate_csv(csv, r[0].per_candidate);
  EXPECT_EQ(csv.str().rfind("candidate_id,stage,op_kind,count,bytes\n", 0), 0u);
  EXPECT_NE(csv.str().find(",quality,cmp,"), std::string::npos);
  std::ostringstream rep;
  write_report(rep, cfg, r[0]);
  EXPECT_NE(rep.str().find("candidates evaluated: 4 of 4"), std::string::npos);
}

TEST(Search, RejectsBadConfig) {
  Fixture f;
  SearchConfig cfg;
  cfg.k = 6;
  cfg.candidate_count = 5;
  EXPECT_THROW(search(f, cfg), std::invalid_argument);
}

TEST(Reference, GapAndEquivalence) {
  ReferenceResult ref;
  ref.qualities = {0.5, 0.9, 0.7, 0.7, 0.1};
  ref.indices = {1, 2, 3};
  EXPECT_NEAR(reference_top_gap(ref, 2), 0.0, 1e-12);
  EXPECT_NEAR(reference_top_gap(ref, 1), 0.2, 1e-12);
  std::vector<size_t> swapped{1, 3, 2};
  EXPECT_TRUE(topk_equivalent(swapped, ref, 1e-9));
  std::vector<size_t> wrong{1, 2, 0};
  EXPECT_FALSE(topk_equivalent(wrong, ref, 1e-2));
  std::vector<size_t> dup{1, 2, 2};
  EXPECT_FALSE(topk_equivalent(dup, ref, 1e-2));
}

TEST(Reference, TopKRevealGoesToInitiatorOnly) {
  testing::run_parties(3, 4, [](Party& p) {
    auto q = testing::input_fixed(p, std::vector<double>{0.1, 0.8, 0.3, 0.8});
    auto top = retrieve_topk_reveal(p, q, 2);
    EXPECT_EQ(top.has_value(), p.id() == 0);
    if (top) EXPECT_EQ(*top, (std::vector<size_t>{1, 3}));
    EXPECT_EQ(p.stats().stage(Stage::kTopK).messages > 0, true);
  });
}

TEST(Reference, TopKOfAllIsDescendingOrder) {
  testing::run_parties(2, 5, [](Party& p) {
    auto q = testing::input_fixed(p, std::vector<double>{0.2, 0.8, 0.5});
    auto two = retrieve_topk_reveal(p, q, 2);
    auto all = retrieve_topk_reveal(p, q, 3);
    if (p.id() == 0) {
      EXPECT_EQ(*two, (std::vector<size_t>{1, 2}));
      EXPECT_EQ(*all, (std::vector<size_t>{1, 2, 0}));
    }
  });
}

}  // namespace
}  // namespace fedst
