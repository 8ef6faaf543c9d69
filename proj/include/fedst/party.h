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

#ifndef FEDST_PARTY_H_
#define FEDST_PARTY_H_

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fedst/prg.h"
#include "fedst/ring.h"
#include "fedst/sharing.h"
#include "fedst/transport.h"

namespace fedst {

// Metered operation kinds. Only the outermost operation in a call chain is
// counted, so a division's internal comparisons are not reported as
// comparisons. Bytes go to the outermost operation in progress (kNone if idle).
enum class OpKind : uint8_t { kInput, kOpen, kMul, kTrunc, kCmp, kSel, kDiv, kLog, kNone };
inline constexpr int kOpKindCount = 9;
const char* op_name(OpKind k);

struct StageTotals {
  uint64_t messages = 0;
  uint64_t bytes = 0;
  uint64_t rounds = 0;
  std::array<uint64_t, kOpKindCount> ops{};
  std::array<uint64_t, kOpKindCount> op_bytes{};

  uint64_t op(OpKind k) const { return ops[static_cast<int>(k)]; }
  // Multiplications, comparisons, selections, divisions and logarithms.
  uint64_t interactive_ops() const;
  StageTotals& operator+=(const StageTotals& o);
  StageTotals operator-(const StageTotals& o) const;
};

struct CommStats {
  std::array<StageTotals, kStageCount> stages{};

  const StageTotals& stage(Stage s) const { return stages[static_cast<int>(s)]; }
  StageTotals total() const;
  CommStats operator-(const CommStats& o) const;
};

class Meter {
 public:
  void add_op(Stage s, OpKind k, uint64_t count) { at(s).ops[static_cast<int>(k)] += count; }
  void add_frame(Stage s, OpKind k, uint64_t bytes) {
    auto& t = at(s);
    ++t.messages;
    t.bytes += bytes;
    t.op_bytes[static_cast<int>(k)] += bytes;
  }
  void add_round(Stage s) { ++at(s).rounds; }
  const CommStats& stats() const { return stats_; }

 private:
  StageTotals& at(Stage s) { return stats_.stages[static_cast<int>(s)]; }
  CommStats stats_;
};

struct PartyOptions {
  // Bandwidth shaping: artificial delay per sent byte.
  std::chrono::nanoseconds delay_per_byte{0};
};

// One party's protocol context: transport, dealer pool, private randomness,
// metering and the current stage tag. Used from a single thread.
class Party {
 public:
  Party(int id, int n, Transport& transport, PartyPool& pool, uint64_t seed,
        PartyOptions opts = {});

  int id() const { return id_; }
  int parties() const { return n_; }
  bool is_initiator() const { return id_ == 0; }

  Prg& rng() { return rng_; }
  PartyPool& pool() { return pool_; }
  const Meter& meter() const { return meter_; }
  const CommStats& stats() const { return meter_.stats(); }
  const CommTrace& trace() const { return trace_; }

  Stage stage() const { return stage_; }
  OpKind current_op() const { return depth_ == 0 ? OpKind::kNone : op_; }

  void send(int to, std::vector<uint8_t> payload);
  std::vector<uint8_t> recv(int from);
  void send_elements(int to, std::span<const Zq> values);
  std::vector<Zq> recv_elements(int from, size_t count);
  void note_round() { meter_.add_round(stage_); }

  // Counts `count` operations of kind k unless nested inside another operation.
  class OpScope {
   public:
    OpScope(Party& p, OpKind k, uint64_t count);
    ~OpScope();
    OpScope(const OpScope&) = delete;
    OpScope& operator=(const OpScope&) = delete;

   private:
    Party& p_;
  };

  class StageScope {
   public:
    StageScope(Party& p, Stage s) : p_(p), prev_(p.stage_) { p.stage_ = s; }
    ~StageScope() { p_.stage_ = prev_; }
    StageScope(const StageScope&) = delete;
    StageScope& operator=(const StageScope&) = delete;

   private:
    Party& p_;
    Stage prev_;
  };

 private:
  int id_;
  int n_;
  Transport& transport_;
  PartyPool& pool_;
  Prg rng_;
  PartyOptions opts_;
  Meter meter_;
  CommTrace trace_;
  Stage stage_ = Stage::kOther;
  OpKind op_ = OpKind::kNone;
  int depth_ = 0;
  uint64_t seq_ = 0;
};

struct PartyConfig {
  int party_id = 0;
  int n = 2;
  bool in_memory = true;
  std::vector<Endpoint> endpoints;  // TCP mode: one per party, in party order
  uint64_t seed = 0;                // session seed: dealer and party randomness
  size_t pool_triples = 0;          // pre-dealt before the online phase
  size_t pool_bits = 0;
  std::optional<std::filesystem::path> pool_dir;  // persisted dealer output
};

struct SessionOptions {
  MemoryOptions memory;
  PartyOptions party;
  std::chrono::milliseconds connect_timeout{10000};
};

// Owns everything one party needs to run.
struct PartyHandle {
  std::unique_ptr<Transport> transport;
  std::unique_ptr<PartyPool> pool;
  std::unique_ptr<Party> party;
};

// Joins a TCP mesh as a single party (one process per party). Requires
// cfg.pool_dir since there is no in-process dealer.
PartyHandle connect_party(const PartyConfig& cfg, const SessionOptions& opts = {});

// All n parties in this process, each driven by its own thread.
class Session {
 public:
  static std::unique_ptr<Session> start(std::span<const PartyConfig> configs,
                                        const SessionOptions& opts = {});
  ~Session();

  int parties() const { return static_cast<int>(handles_.size()); }
  size_t channel_count() const;
  Party& party(int id) { return *handles_.at(id).party; }

  // Runs body on one thread per party. If any party throws, all channels are
  // closed so that peers unblock, and the first exception is rethrown.
  void run(const std::function<void(Party&)>& body);

  std::vector<CommTrace> traces() const;
  CommStats total_stats() const;

 private:
  Session() = default;

  std::unique_ptr<MemoryHub> hub_;
  std::unique_ptr<Dealer> dealer_;
  std::vector<PartyHandle> handles_;
};

// Convenience for n in-process parties sharing one seed.
std::vector<PartyConfig> memory_configs(int n, uint64_t seed);
std::vector<PartyConfig> tcp_configs(int n, uint64_t seed, uint16_t base_port);

// Picks a free loopback base port range for tests.
uint16_t pick_free_port_base(int n);

}  // namespace fedst

#endif  // FEDST_PARTY_H_
