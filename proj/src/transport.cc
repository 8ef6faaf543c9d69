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

#include "fedst/transport.h"

#include <random>
#include <thread>

#include "fedst/prg.h"

namespace fedst {

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::kOther:
      return "other";
    case Stage::kDistance:
      return "distance";
    case Stage::kQuality:
      return "quality";
    case Stage::kTopK:
      return "topk";
  }
  return "unknown";
}

std::vector<uint8_t> encode_frame_header(const Frame& f) {
  if (f.payload.size() >= kMaxFramePayload) throw FrameTooLarge("frame exceeds 2^31 bytes");
  auto len = static_cast<uint32_t>(f.payload.size());
  return {static_cast<uint8_t>(len >> 24), static_cast<uint8_t>(len >> 16),
          static_cast<uint8_t>(len >> 8), static_cast<uint8_t>(len),
          static_cast<uint8_t>(f.stage)};
}

CommTrace::CommTrace(const CommTrace& o) : records_(o.records()) {}

CommTrace& CommTrace::operator=(const CommTrace& o) {
  if (this != &o) {
    auto copy = o.records();
    std::lock_guard<std::mutex> lock(mu_);
    records_ = std::move(copy);
  }
  return *this;
}

void CommTrace::append(const TraceRecord& r) {
  std::lock_guard<std::mutex> lock(mu_);
  records_.push_back(r);
}

std::vector<TraceRecord> CommTrace::records() const {
  std::lock_guard<std::mutex> lock(mu_);
  return records_;
}

size_t CommTrace::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return records_.size();
}

uint64_t CommTrace::total_bytes() const {
  std::lock_guard<std::mutex> lock(mu_);
  uint64_t total = 0;
  for (const auto& r : records_) total += r.bytes;
  return total;
}

CommTrace CommTrace::merge(std::span<const CommTrace> traces) {
  CommTrace out;
  for (const auto& t : traces) {
    for (const auto& r : t.records()) out.records_.push_back(r);
  }
  return out;
}

void CommTrace::write_csv(std::ostream& out) const {
  out << "seq,from,to,bytes,stage\n";
  for (const auto& r : records()) {
    out << r.seq << ',' << r.from << ',' << r.to << ',' << r.bytes << ',' << stage_name(r.stage)
        << '\n';
  }
}

void FrameQueue::push(Frame f) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (closed_) throw ChannelClosed("send on closed channel");
    frames_.push_back(std::move(f));
  }
  cv_.notify_one();
}

Frame FrameQueue::pop() {
  std::unique_lock<std::mutex> lock(mu_);
  cv_.wait(lock, [&] { return !frames_.empty() || closed_; });
  if (frames_.empty()) throw ChannelClosed("recv on closed channel");
  Frame f = std::move(frames_.front());
  frames_.pop_front();
  return f;
}

void FrameQueue::close() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

namespace {

class MemoryTransport : public Transport {
 public:
  MemoryTransport(MemoryHub& hub, int id) : hub_(hub), id_(id) {
    if (hub.options().schedule_seed) {
      jitter_.emplace(*hub.options().schedule_seed, "schedule", static_cast<uint64_t>(id));
    }
  }

  int id() const override { return id_; }
  int parties() const override { return hub_.parties(); }

  void send(int to, Frame frame) override {
    if (frame.payload.size() >= kMaxFramePayload) throw FrameTooLarge("frame exceeds 2^31 bytes");
    if (jitter_) {
      uint64_t r = jitter_->uniform(8);
      if (r == 0) std::this_thread::sleep_for(std::chrono::microseconds(jitter_->uniform(50)));
      else if (r < 4) std::this_thread::yield();
    }
    hub_.queue(id_, to).push(std::move(frame));
  }

  Frame recv(int from) override { return hub_.queue(from, id_).pop(); }

  void close() override { hub_.shutdown(); }

 private:
  MemoryHub& hub_;
  int id_;
  std::optional<Prg> jitter_;
};

}  // namespace

MemoryHub::MemoryHub(int n, MemoryOptions opts) : n_(n), opts_(opts) {
  if (n < 2) throw std::invalid_argument("memory hub: need at least two parties");
  queues_.resize(static_cast<size_t>(n) * n);
  for (auto& q : queues_) q = std::make_unique<FrameQueue>();
}

std::unique_ptr<Transport> MemoryHub::endpoint(int id) {
  if (id < 0 || id >= n_) throw std::out_of_range("memory hub: party id");
  return std::make_unique<MemoryTransport>(*this, id);
}

void MemoryHub::shutdown() {
  for (auto& q : queues_) q->close();
}

Endpoint parse_endpoint(const std::string& s) {
  auto colon = s.rfind(':');
  if (colon == std::string::npos) throw std::invalid_argument("endpoint must be host:port: " + s);
  Endpoint e;
  e.host = s.substr(0, colon);
  int port = std::stoi(s.substr(colon + 1));
  if (port <= 0 || port > 65535) throw std::invalid_argument("endpoint port out of range: " + s);
  e.port = static_cast<uint16_t>(port);
  return e;
}

}  // namespace fedst
