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

#include <sstream>
#include <thread>

#include "fedst/mpc.h"
#include "fedst/party.h"
#include "fedst/transport.h"
#include "test_util.h"

namespace fedst {
namespace {

TEST(Frame, HeaderIsLengthThenStage) {
  Frame f{Stage::kQuality, std::vector<uint8_t>(258, 7)};
  auto h = encode_frame_header(f);
  ASSERT_EQ(h.size(), kFrameHeaderBytes);
  EXPECT_EQ(h[0], 0);
  EXPECT_EQ(h[1], 0);
  EXPECT_EQ(h[2], 1);
  EXPECT_EQ(h[3], 2);
  EXPECT_EQ(h[4], static_cast<uint8_t>(Stage::kQuality));
  EXPECT_EQ(f.wire_size(), 263u);
}

TEST(MemoryHub, ChannelsAreFifoAndClosable) {
  MemoryHub hub(3);
  EXPECT_EQ(hub.channel_count(), 6u);
  auto t0 = hub.endpoint(0), t2 = hub.endpoint(2);
  for (uint8_t i = 0; i < 10; ++i) t0->send(2, Frame{Stage::kOther, {i}});
  for (uint8_t i = 0; i < 10; ++i) EXPECT_EQ(t2->recv(0).payload[0], i);
  std::thread waiter([&] { EXPECT_THROW(t2->recv(1), ChannelClosed); });
  hub.shutdown();
  waiter.join();
  EXPECT_THROW(MemoryHub(1), std::invalid_argument);
}

TEST(MemoryHub, InterleavedChannelsKeepPerChannelOrder) {
  MemoryOptions opts;
  opts.schedule_seed = 17;
  MemoryHub hub(3, opts);
  auto t0 = hub.endpoint(0), t1 = hub.endpoint(1), t2 = hub.endpoint(2);
  auto sender = [](Transport& t, uint8_t tag) {
    for (uint8_t i = 0; i < 50; ++i) t.send(0, Frame{Stage::kOther, {tag, i}});
  };
  std::thread a(sender, std::ref(*t1), 1), b(sender, std::ref(*t2), 2);
  for (uint8_t i = 0; i < 50; ++i) {
    int first = i % 2 ? 2 : 1;
    auto f = t0->recv(first);
    EXPECT_EQ(f.payload, (std::vector<uint8_t>{static_cast<uint8_t>(first), i}));
    auto g = t0->recv(3 - first);
    EXPECT_EQ(g.payload, (std::vector<uint8_t>{static_cast<uint8_t>(3 - first), i}));
  }
  a.join();
  b.join();
}

TEST(Endpoint, Parses) {
  Endpoint e = parse_endpoint("10.0.0.2:9000");
  EXPECT_EQ(e.host, "10.0.0.2");
  EXPECT_EQ(e.port, 9000);
  EXPECT_THROW(parse_endpoint("nohost"), std::invalid_argument);
  EXPECT_THROW(parse_endpoint("h:70000"), std::invalid_argument);
}

TEST(CommTrace, MergesAndWritesCsv) {
  CommTrace a, b;
  a.append({0, 0, 1, 21, Stage::kDistance});
  b.append({0, 1, 0, 37, Stage::kTopK});
  std::vector<CommTrace> both{a, b};
  CommTrace m = CommTrace::merge(both);
  EXPECT_EQ(m.size(), 2u);
  EXPECT_EQ(m.total_bytes(), 58u);
  std::ostringstream out;
  m.write_csv(out);
  EXPECT_NE(out.str().find("0,1,0,37,topk"), std::string::npos) << out.str();
}

void exchange(Party& p) {
  int n = p.parties();
  for (int to = 0; to < n; ++to)
    if (to != p.id()) p.send_elements(to, std::vector<Zq>{Zq::from_u64(100 + p.id())});
  for (int from = 0; from < n; ++from)
    if (from != p.id()) EXPECT_EQ(p.recv_elements(from, 1)[0], Zq::from_u64(100 + from));
}

TEST(Tcp, LoopbackMeshExchangesFrames) {
  testing::run_parties(3, 1, exchange, /*tcp=*/true);
}

TEST(Tcp, LargeSimultaneousSendsDoNotDeadlock) {
  testing::run_parties(2, 2, [](Party& p) {
    std::vector<Zq> big(1 << 18, Zq::from_u64(p.id() + 1));
    p.send_elements(1 - p.id(), big);
    auto got = p.recv_elements(1 - p.id(), big.size());
    EXPECT_EQ(got.back(), Zq::from_u64(2 - p.id()));
  }, true);
}

TEST(Party, RecvRejectsFrameFromAnotherStage) {
  EXPECT_THROW(testing::run_parties(2, 3, [](Party& p) {
    if (p.id() == 0) {
      Party::StageScope s(p, Stage::kDistance);
      p.send(1, {1});
    } else {
      Party::StageScope s(p, Stage::kQuality);
      p.recv(0);
    }
  }), std::runtime_error);
}

TEST(Party, FirstFailureUnblocksPeers) {
  EXPECT_THROW(testing::run_parties(3, 4, [](Party& p) {
    if (p.id() == 1) throw std::logic_error("boom");
    p.recv(1);
  }), std::logic_error);
}

TEST(Party, MetersOnlyTheOutermostOperation) {
  auto s = testing::run_parties(2, 5, [](Party& p) {
    Party::StageScope st(p, Stage::kQuality);
    std::vector<double> xs{1.0, 2.0, 3.0};
    auto x = testing::input_fixed(p, xs);
    mpc::lt(p, x, x);
    const auto& t = p.stats().stage(Stage::kQuality);
    EXPECT_EQ(t.op(OpKind::kCmp), 3u);
    EXPECT_EQ(t.op(OpKind::kMul), 0u);
    EXPECT_EQ(t.op(OpKind::kInput), 3u);
    EXPECT_EQ(t.interactive_ops(), 3u);
    EXPECT_GT(t.op_bytes[static_cast<int>(OpKind::kCmp)], 0u);
    EXPECT_EQ(p.stats().stage(Stage::kOther).messages, 0u);
  });
  auto total = s->total_stats().total();
  EXPECT_EQ(total.messages, s->party(0).trace().size() + s->party(1).trace().size());
}

TEST(Party, AdditionIsSilentAndMultiplicationIsOneRound) {
  auto s = testing::run_parties(3, 6, [](Party& p) {
    std::vector<double> xs{2.0}, ys{3.0};
    auto x = testing::input_fixed(p, xs);
    auto y = testing::input_fixed(p, ys);
    CommStats before = p.stats();
    auto sum = mpc::add(x, y);
    EXPECT_EQ((p.stats() - before).total().messages, 0u);
    before = p.stats();
    auto prod = mpc::mul(p, x, y);
    auto d = (p.stats() - before).total();
    EXPECT_EQ(d.rounds, 1u);
    EXPECT_EQ(d.messages, 2u);
    EXPECT_EQ(testing::open_fixed(p, sum)[0], 5.0);
    EXPECT_EQ(testing::open_fixed(p, prod, 2 * kFracBits)[0], 6.0);
  });
  EXPECT_EQ(s->channel_count(), 6u);
}

TEST(Party, TraceBytesMatchStageTotals) {
  auto s = testing::run_parties(2, 7, [](Party& p) {
    {
      Party::StageScope st(p, Stage::kDistance);
      auto x = testing::input_fixed(p, std::vector<double>{1.0, 2.0});
      mpc::mul(p, x, x);
    }
    Party::StageScope st(p, Stage::kTopK);
    auto y = testing::input_fixed(p, std::vector<double>{3.0, 1.0});
    mpc::topk(p, y, 1);
  });
  for (int i = 0; i < 2; ++i) {
    const Party& p = s->party(i);
    uint64_t frames = 0, per_stage = 0;
    for (const auto& r : p.trace().records()) frames += r.bytes;
    for (int st = 0; st < kStageCount; ++st) per_stage += p.stats().stages[st].bytes;
    EXPECT_EQ(frames, p.stats().total().bytes);
    EXPECT_EQ(per_stage, frames);
  }
}

TEST(Party, StatsDifferenceIsPerStage) {
  CommStats a, b;
  a.stages[1].messages = 5;
  a.stages[1].ops[2] = 4;
  b.stages[1].messages = 2;
  b.stages[1].ops[2] = 1;
  CommStats d = a - b;
  EXPECT_EQ(d.stage(Stage::kDistance).messages, 3u);
  EXPECT_EQ(d.stage(Stage::kDistance).op(OpKind::kMul), 3u);
  EXPECT_EQ(d.total().messages, 3u);
}

TEST(Session, RejectsBadConfigs) {
  auto c = memory_configs(3, 1);
  c[2].party_id = 1;
  EXPECT_THROW(Session::start(c), std::invalid_argument);
  auto one = memory_configs(1, 1);
  EXPECT_THROW(Session::start(one), std::invalid_argument);
  PartyConfig cfg;
  cfg.in_memory = false;
  EXPECT_THROW(connect_party(cfg), std::invalid_argument);
}

}  // namespace
}  // namespace fedst
