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

#ifndef FEDST_DOT_PRODUCT_H_
#define FEDST_DOT_PRODUCT_H_

#include <cstdint>
#include <span>
#include <vector>

#include "fedst/mpc.h"
#include "fedst/prg.h"
#include "fedst/ring.h"

namespace fedst {

// Rows of the masking matrix Q.
inline constexpr size_t kDpRows = 2;

// P0's secret masking material for one dot-product session with a participant.
struct DpMask {
  size_t width = 0;      // L + 1
  std::vector<Zq> q;     // d x d, row-major
  size_t r = 0;          // row of X holding (x, 1)
  std::vector<Zq> x;     // d x width, row-major
  std::vector<Zq> f;     // width
  Zq r1, r2, r3;
  Zq b;                  // column sum of Q at r, never zero
};

// U = Q X, c = sum_{i != r} colsum_i(Q) x_i + R1 R2 f, g = R1 R3 f.
struct DpMessage1 {
  size_t width = 0;
  std::vector<Zq> u;  // d x width
  std::vector<Zq> c;
  std::vector<Zq> g;
};

DpMask dp_make_mask(Prg& rng, std::span<const Zq> x);
DpMessage1 dp_message1(const DpMask& m);

// Wire layout: 4-byte big-endian byte count, then U, c, g row-major as 16-byte
// little-endian elements.
std::vector<uint8_t> encode_message1(const DpMessage1& m);
DpMessage1 decode_message1(std::span<const uint8_t> bytes);

// Participant side for one vector y with blinding value alpha.
struct DpReply {
  Zq a;  // (sum_j U_j - c) . y'
  Zq h;  // g . y'
};
// Precomputes sum_j U_j - c so that each reply costs two inner products.
std::vector<Zq> dp_reply_basis(const DpMessage1& m);
DpReply dp_reply(const DpMessage1& m, std::span<const Zq> basis, std::span<const Zq> y, Zq alpha);

// P0 side: beta = a / b + h R2 / (b R3).
Zq dp_beta(const DpMask& m, const DpReply& reply);

struct DpRawResult {
  Zq beta;   // at P0
  Zq alpha;  // at the participant
};

// INSECURE two-party protocol in which the participant sends both a and h.
// P0 can recover a linear function of y from (a, h); kept only as a test
// reference. Called by every party; only P0 and `pi` communicate. beta is
// meaningful at P0, alpha at pi.
DpRawResult dp_raw_insecure(Party& p, int pi, std::span<const Zq> x, std::span<const Zq> y);

// Secure dot products between P0's vector x and vectors held by participants.
// counts[i] is the number of length-L vectors participant i contributes
// (counts[0] is ignored); `ys` holds this party's vectors. Returns shares of
// x . y at scale 2f ordered by participant, then by vector. Consumes exactly
// one Beaver triple per dot product; P0 sends one Message1 per participant and
// each participant replies with one scalar h per vector.
mpc::Shares dp_batch(Party& p, std::span<const Zq> x, const std::vector<std::vector<Zq>>& ys,
                     std::span<const size_t> counts, size_t L);

// Single dot product between P0's x and participant pi's y.
mpc::Shares dp_secure(Party& p, int pi, std::span<const Zq> x, std::span<const Zq> y, size_t L);

}  // namespace fedst

#endif  // FEDST_DOT_PRODUCT_H_
