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

#ifndef FEDST_SHAPELET_H_
#define FEDST_SHAPELET_H_

#include <cstdint>
#include <span>
#include <vector>

#include "fedst/mpc.h"
#include "fedst/party.h"

namespace fedst {

// Series values must satisfy |t| < 2^8 so that fixed-point distances stay in range.
inline constexpr double kMaxSeriesMagnitude = 256.0;

struct TimeSeries {
  std::vector<double> values;
  int label = 1;  // 1..C
};

struct ShapeletCandidate {
  std::vector<double> values;
  int source_class = 1;
  size_t sample = 0;  // index within P0's training set
  size_t start = 0;

  size_t length() const { return values.size(); }
};

// Shortest candidate length for series length n.
size_t min_candidate_length(size_t n);

// `count` distinct subsequences of P0's samples with length uniform in
// [min(3, N/4), N] and uniform position. Deterministic in seed.
std::vector<ShapeletCandidate> generate_candidates(std::span<const TimeSeries> td0, size_t count,
                                                   uint64_t seed);

// Minimum over alignments of the squared Euclidean distance.
double shapelet_distance_plain(std::span<const double> s, std::span<const double> t);
double shapelet_distance_plain(const ShapeletCandidate& s, const TimeSeries& t);

// Throws std::out_of_range if any value is outside the supported magnitude.
void check_series_range(std::span<const TimeSeries> data);

// Fixed-point encoding of a series set, row-major.
std::vector<Zq> encode_series(std::span<const TimeSeries> data);

// Squared norm of an encoded vector, exact at scale 2f.
Zq encoded_sqnorm(std::span<const Zq> v);

// Distances (scale f) between a shared candidate of length L and `rows` shared
// series of length n (row-major). Uses L(n-L+1) multiplications per row, one
// truncation per window, then a secure minimum.
mpc::Shares fed_distance_basic(Party& p, const mpc::Shares& s, const mpc::Shares& series,
                               size_t rows, size_t n);

// Same distances for participants' series using the secure dot product:
// s is P0's plaintext candidate (encoded, ignored elsewhere); `mine` holds this
// participant's encoded series (row-major); counts[i] is participant i's
// sample count. One secure multiplication per window. Rows are ordered by
// participant.
mpc::Shares fed_distance_dp(Party& p, std::span<const Zq> s, size_t len, std::span<const Zq> mine,
                            std::span<const size_t> counts, size_t n);

// P0's distances computed locally and shared; other parties pass empty data.
mpc::Shares local_distances(Party& p, const ShapeletCandidate* s, std::span<const TimeSeries> td0,
                            size_t rows);

}  // namespace fedst

#endif  // FEDST_SHAPELET_H_
