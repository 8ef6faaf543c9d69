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

#ifndef FEDST_TRANSPORT_H_
#define FEDST_TRANSPORT_H_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedst {

// Protocol stage carried in every frame header; partitions all traffic.
enum class Stage : uint8_t { kOther = 0, kDistance = 1, kQuality = 2, kTopK = 3 };
inline constexpr int kStageCount = 4;
const char* stage_name(Stage s);

// Wire frame: 4-byte big-endian payload length, 1-byte stage tag, payload.
inline constexpr size_t kFrameHeaderBytes = 5;
inline constexpr uint64_t kMaxFramePayload = uint64_t{1} << 31;

struct Frame {
  Stage stage = Stage::kOther;
  std::vector<uint8_t> payload;

  size_t wire_size() const { return kFrameHeaderBytes + payload.size(); }
};

std::vector<uint8_t> encode_frame_header(const Frame& f);

class ChannelClosed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FrameTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

struct TraceRecord {
  uint64_t seq = 0;  // per-sender sequence number
  int from = 0;
  int to = 0;
  uint64_t bytes = 0;  // full frame length on the wire
  Stage stage = Stage::kOther;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

// Append-only record of sent frames.
class CommTrace {
 public:
  CommTrace() = default;
  CommTrace(const CommTrace& o);
  CommTrace& operator=(const CommTrace& o);

  void append(const TraceRecord& r);
  std::vector<TraceRecord> records() const;
  size_t size() const;
  uint64_t total_bytes() const;

  // Concatenates several senders' traces in party order.
  static CommTrace merge(std::span<const CommTrace> traces);
  // Columns: seq, from, to, bytes, stage.
  void write_csv(std::ostream& out) const;

 private:
  mutable std::mutex mu_;
  std::vector<TraceRecord> records_;
};

// Blocking FIFO of frames for one directed channel.
class FrameQueue {
 public:
  void push(Frame f);
  Frame pop();
  void close();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Frame> frames_;
  bool closed_ = false;
};

// Reliable FIFO channels between one party and every other party.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual int id() const = 0;
  virtual int parties() const = 0;
  virtual void send(int to, Frame frame) = 0;
  virtual Frame recv(int from) = 0;
  // Unblocks any pending recv with ChannelClosed.
  virtual void close() = 0;
};

struct MemoryOptions {
  // Adds seeded random yields/sleeps on send to perturb thread interleavings.
  std::optional<uint64_t> schedule_seed;
};

// In-process full mesh of n*(n-1) directed channels.
class MemoryHub {
 public:
  explicit MemoryHub(int n, MemoryOptions opts = {});

  int parties() const { return n_; }
  size_t channel_count() const { return static_cast<size_t>(n_) * (n_ - 1); }
  std::unique_ptr<Transport> endpoint(int id);
  void shutdown();

  FrameQueue& queue(int from, int to) { return *queues_[from * n_ + to]; }
  const MemoryOptions& options() const { return opts_; }

 private:
  int n_;
  MemoryOptions opts_;
  std::vector<std::unique_ptr<FrameQueue>> queues_;
};

struct Endpoint {
  std::string host = "127.0.0.1";
  uint16_t port = 0;
};

Endpoint parse_endpoint(const std::string& s);

// Full TCP mesh: party i listens on endpoints[i], dials every lower id and
// accepts every higher id. A reader thread per peer drains frames so that
// concurrent large sends cannot deadlock.
std::unique_ptr<Transport> connect_tcp(int id, const std::vector<Endpoint>& endpoints,
                                       std::chrono::milliseconds timeout);

}  // namespace fedst

#endif  // FEDST_TRANSPORT_H_
