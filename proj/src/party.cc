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

#include "fedst/party.h"

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdlib>
#include <cstring>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace fedst {

const char* op_name(OpKind k) {
  switch (k) {
    case OpKind::kInput: return "input";
    case OpKind::kOpen: return "open";
    case OpKind::kMul: return "mul";
    case OpKind::kTrunc: return "trunc";
    case OpKind::kCmp: return "cmp";
    case OpKind::kSel: return "sel";
    case OpKind::kDiv: return "div";
    case OpKind::kLog: return "log";
    case OpKind::kNone: return "none";
  }
  return "?";
}

uint64_t StageTotals::interactive_ops() const {
  return op(OpKind::kMul) + op(OpKind::kCmp) + op(OpKind::kSel) + op(OpKind::kDiv) +
         op(OpKind::kLog);
}

StageTotals& StageTotals::operator+=(const StageTotals& o) {
  messages += o.messages;
  bytes += o.bytes;
  rounds += o.rounds;
  for (int i = 0; i < kOpKindCount; ++i) {
    ops[i] += o.ops[i];
    op_bytes[i] += o.op_bytes[i];
  }
  return *this;
}

StageTotals StageTotals::operator-(const StageTotals& o) const {
  StageTotals r = *this;
  r.messages -= o.messages;
  r.bytes -= o.bytes;
  r.rounds -= o.rounds;
  for (int i = 0; i < kOpKindCount; ++i) {
    r.ops[i] -= o.ops[i];
    r.op_bytes[i] -= o.op_bytes[i];
  }
  return r;
}

StageTotals CommStats::total() const {
  StageTotals t;
  for (const auto& s : stages) t += s;
  return t;
}

CommStats CommStats::operator-(const CommStats& o) const {
  CommStats r;
  for (int i = 0; i < kStageCount; ++i) r.stages[i] = stages[i] - o.stages[i];
  return r;
}

Party::Party(int id, int n, Transport& transport, PartyPool& pool, uint64_t seed,
             PartyOptions opts)
    : id_(id),
      n_(n),
      transport_(transport),
      pool_(pool),
      rng_(seed, "party", static_cast<uint64_t>(id)),
      opts_(opts) {}

void Party::send(int to, std::vector<uint8_t> payload) {
  Frame f{stage_, std::move(payload)};
  uint64_t bytes = f.wire_size();
  trace_.append({seq_++, id_, to, bytes, stage_});
  meter_.add_frame(stage_, current_op(), bytes);
  if (opts_.delay_per_byte.count() > 0) std::this_thread::sleep_for(opts_.delay_per_byte * bytes);
  transport_.send(to, std::move(f));
}

std::vector<uint8_t> Party::recv(int from) {
  Frame f = transport_.recv(from);
  if (f.stage != stage_) throw std::runtime_error("frame stage mismatch");
  return std::move(f.payload);
}

void Party::send_elements(int to, std::span<const Zq> values) {
  std::vector<uint8_t> buf(values.size() * 16);
  for (size_t i = 0; i < values.size(); ++i) {
    auto b = values[i].to_bytes();
    std::memcpy(buf.data() + 16 * i, b.data(), 16);
  }
  send(to, std::move(buf));
}

std::vector<Zq> Party::recv_elements(int from, size_t count) {
  auto buf = recv(from);
  if (buf.size() != count * 16) throw std::runtime_error("unexpected element count");
  std::vector<Zq> out(count);
  for (size_t i = 0; i < count; ++i) out[i] = Zq::from_bytes(std::span<const uint8_t, 16>(buf.data() + 16 * i, 16));
  return out;
}

Party::OpScope::OpScope(Party& p, OpKind k, uint64_t count) : p_(p) {
  if (p.depth_++ == 0) {
    p.op_ = k;
    p.meter_.add_op(p.stage_, k, count);
  }
}

Party::OpScope::~OpScope() {
  if (--p_.depth_ == 0) p_.op_ = OpKind::kNone;
}

PartyHandle connect_party(const PartyConfig& cfg, const SessionOptions& opts) {
  if (!cfg.pool_dir) throw std::invalid_argument("connect_party needs a pool directory");
  if (static_cast<int>(cfg.endpoints.size()) != cfg.n)
    throw std::invalid_argument("need one endpoint per party");
  PartyHandle h;
  h.pool = std::make_unique<PartyPool>(load_party_pool(*cfg.pool_dir, cfg.party_id, cfg.n));
  h.transport = connect_tcp(cfg.party_id, cfg.endpoints, opts.connect_timeout);
  h.party = std::make_unique<Party>(cfg.party_id, cfg.n, *h.transport, *h.pool, cfg.seed,
                                    opts.party);
  return h;
}

std::unique_ptr<Session> Session::start(std::span<const PartyConfig> configs,
                                        const SessionOptions& opts) {
  if (configs.empty()) throw std::invalid_argument("no parties");
  int n = configs[0].n;
  if (n < 2) throw std::invalid_argument("need at least two parties");
  if (static_cast<int>(configs.size()) != n)
    throw std::invalid_argument("config count does not match party count");
  std::vector<bool> seen(n, false);
  for (const auto& c : configs) {
    if (c.n != n) throw std::invalid_argument("inconsistent party count");
    if (c.party_id < 0 || c.party_id >= n) throw std::invalid_argument("party id out of range");
    if (seen[c.party_id]) throw std::invalid_argument("duplicate party id");
    seen[c.party_id] = true;
    if (c.in_memory != configs[0].in_memory) throw std::invalid_argument("mixed transports");
  }

  std::unique_ptr<Session> s(new Session());
  s->handles_.resize(n);
  const PartyConfig* by_id[64] = {};
  if (n > 64) throw std::invalid_argument("too many parties");
  for (const auto& c : configs) by_id[c.party_id] = &c;

  bool use_files = by_id[0]->pool_dir.has_value();
  if (!use_files) {
    s->dealer_ = std::make_unique<Dealer>(n, by_id[0]->seed);
    auto dealt = s->dealer_->deal(by_id[0]->pool_triples, by_id[0]->pool_bits);
    for (int i = 0; i < n; ++i) {
      s->handles_[i].pool = std::make_unique<PartyPool>(std::move(dealt[i]));
      s->dealer_->attach(i, *s->handles_[i].pool);
    }
  } else {
    for (int i = 0; i < n; ++i)
      s->handles_[i].pool =
          std::make_unique<PartyPool>(load_party_pool(*by_id[i]->pool_dir, i, n));
  }

  if (configs[0].in_memory) {
    s->hub_ = std::make_unique<MemoryHub>(n, opts.memory);
    for (int i = 0; i < n; ++i) s->handles_[i].transport = s->hub_->endpoint(i);
  } else {
    // Every party must be listening and dialling at once.
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(n);
    for (int i = 0; i < n; ++i) {
      threads.emplace_back([&, i] {
        try {
          s->handles_[i].transport =
              connect_tcp(i, by_id[i]->endpoints, opts.connect_timeout);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  for (int i = 0; i < n; ++i) {
    auto& h = s->handles_[i];
    h.party = std::make_unique<Party>(i, n, *h.transport, *h.pool, by_id[i]->seed, opts.party);
  }
  return s;
}

Session::~Session() {
  for (auto& h : handles_)
    if (h.transport) h.transport->close();
  handles_.clear();
}

size_t Session::channel_count() const {
  size_t n = handles_.size();
  return n * (n - 1);
}

void Session::run(const std::function<void(Party&)>& body) {
  int n = parties();
  std::vector<std::exception_ptr> errors(n);
  std::mutex mu;
  int first = -1;
  std::vector<std::thread> threads;
  for (int i = 0; i < n; ++i) {
    threads.emplace_back([&, i] {
      try {
        body(*handles_[i].party);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        errors[i] = std::current_exception();
        if (first < 0) {
          first = i;
          for (auto& h : handles_) h.transport->close();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first >= 0) std::rethrow_exception(errors[first]);
}

std::vector<CommTrace> Session::traces() const {
  std::vector<CommTrace> out;
  for (const auto& h : handles_) out.push_back(h.party->trace());
  return out;
}

CommStats Session::total_stats() const {
  CommStats total;
  for (const auto& h : handles_)
    for (int s = 0; s < kStageCount; ++s) total.stages[s] += h.party->stats().stages[s];
  return total;
}

std::vector<PartyConfig> memory_configs(int n, uint64_t seed) {
  std::vector<PartyConfig> out(n);
  for (int i = 0; i < n; ++i) {
    out[i].party_id = i;
    out[i].n = n;
    out[i].seed = seed;
  }
  return out;
}

std::vector<PartyConfig> tcp_configs(int n, uint64_t seed, uint16_t base_port) {
  auto out = memory_configs(n, seed);
  std::vector<Endpoint> eps(n);
  for (int i = 0; i < n; ++i) eps[i].port = static_cast<uint16_t>(base_port + i);
  for (auto& c : out) {
    c.in_memory = false;
    c.endpoints = eps;
  }
  return out;
}

uint16_t pick_free_port_base(int n) {
  // Ask the kernel for an ephemeral port and use the block right below the
  // ephemeral range start it picked. Collisions are unlikely in a test sandbox.
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  socklen_t len = sizeof(addr);
  uint16_t port = 20000;
  if (fd >= 0 && ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0 &&
      ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) == 0)
    port = ntohs(addr.sin_port);
  if (fd >= 0) ::close(fd);
  uint16_t base = static_cast<uint16_t>(20000 + (port % 20000));
  (void)n;
  return base;
}

}  // namespace fedst
