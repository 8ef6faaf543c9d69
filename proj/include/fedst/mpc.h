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

#ifndef FEDST_MPC_H_
#define FEDST_MPC_H_

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fedst/party.h"
#include "fedst/ring.h"

// Online MPC operations over additive shares. Every function is called by all
// parties with their own local shares (SPMD); vectors are processed element-wise
// in batched rounds. Values are raw ring elements; the caller tracks scales.
namespace fedst::mpc {

using Shares = std::vector<Zq>;

// Comparison width: operands must satisfy |x - y| < 2^kCmpBits (raw).
inline constexpr int kCmpBits = kIntBits + kFracBits;
// Magnitude bound of a product of two scale-f values (real bound 2^k at scale 2f).
inline constexpr int kProductBits = kIntBits + 2 * kFracBits + 1;
// Comparison sentinel, far outside any value a protocol produces.
inline constexpr int kSentinelBits = 58;

// Largest ell (signed input width) a masked opening supports for n parties.
int max_mask_width(int n);

// ---- Local (non-interactive) operations ----
Shares add(const Shares& x, const Shares& y);
Shares sub(const Shares& x, const Shares& y);
Shares neg(const Shares& x);
Shares scale(const Shares& x, Zq c);
Shares add_public(const Party& p, const Shares& x, std::span<const Zq> c);
Shares add_public(const Party& p, const Shares& x, Zq c);
// Shares of public values (P0 holds them, others hold zero).
Shares constant(const Party& p, std::span<const Zq> c);
Shares constant(const Party& p, size_t count, Zq c);
// owner's share is its value and everyone else holds zero. Only used for values
// whose secrecy is already provided by other masking.
Shares trivial(const Party& p, int owner, std::span<const Zq> values, size_t count);
Zq local_sum(std::span<const Zq> x);

// ---- Communication ----
// owner secret-shares `values` (ignored elsewhere); count must agree.
Shares input(Party& p, int owner, std::span<const Zq> values, size_t count);
std::vector<Zq> open(Party& p, const Shares& x);
// Reveals to `target` only. Empty optional at other parties.
std::optional<std::vector<Zq>> open_to(Party& p, const Shares& x, int target);

// ---- Arithmetic ----
// Beaver multiplication: one triple and one round per element. Scales add.
Shares mul(Party& p, const Shares& x, const Shares& y);
// Probabilistic truncation by m bits of signed inputs |a| < 2^(ell-1).
// Result is floor(a / 2^m) or that plus one.
Shares trunc(Party& p, const Shares& a, int m, int ell = kProductBits);
// Fixed-point product of two scale-f vectors, result at scale f.
Shares fmul(Party& p, const Shares& x, const Shares& y);

// ---- Comparison and selection ----
// Shared bit [a < 0] for |a| <= 2^m, consuming m random bits and m-1 triples.
Shares ltz(Party& p, const Shares& a, int m = kCmpBits);
Shares lt(Party& p, const Shares& x, const Shares& y, int m = kCmpBits);
// b ? x : y
Shares select(Party& p, const Shares& b, const Shares& x, const Shares& y);

// One-hot bit length of non-negative integers x < 2^bits: entry t of the
// result (t = 0..bits, row-major per element) is 1 iff 2^(t-1) <= x < 2^t,
// with t = 0 meaning x = 0 (or x negative). Costs `bits` comparisons each.
std::vector<Shares> bit_length_onehot(Party& p, const Shares& x, int bits);

// ---- Division and logarithm ----
struct PoisonedResult {
  Shares value;
  Shares poisoned;  // shared bit: input outside the domain
};

// x / y at scale f via Goldschmidt iteration. Requires 2^-f <= y < 2^k;
// otherwise the poisoned bit is set. Accuracy: 2^-18 * max(|x/y|, 1).
PoisonedResult div(Party& p, const Shares& x, const Shares& y);
// log2(x) at scale f for x in (0, 2^k) at scale f.
PoisonedResult log2(Party& p, const Shares& x);
// log2(n) at scale f for integers 0 < n < 2^bits at scale 0, bits <= f.
// The value for n = 0 is unspecified; callers multiply it by n.
Shares log2_count(Party& p, const Shares& n, int bits);

// Coefficients of the log2 polynomial on [0.5, 1), in powers of (x - 0.75).
std::span<const double> log2_poly();

// ---- Reductions ----
// Minimum of each of `rows` consecutive groups of `len` values, and the index
// of its first occurrence. len-1 comparisons and len-1 selections per group.
std::pair<Shares, Shares> min_argmin(Party& p, const Shares& v, size_t rows, size_t len);
Shares min_rows(Party& p, const Shares& v, size_t rows, size_t len);
// Maximum per group (earliest index wins ties).
Shares max_rows(Party& p, const Shares& v, size_t rows, size_t len);
// Shared indices of the k largest values in descending order, lower index
// first on ties. Values must lie well inside (-2^58, 2^58).
Shares topk(Party& p, const Shares& v, size_t k);

// Sorts keys ascending and applies the same permutation to each payload.
// Pads to a power of two with sentinel keys and zero payloads internally;
// the outputs keep the input length.
void oblivious_sort(Party& p, Shares& keys, std::vector<Shares>& payloads);

}  // namespace fedst::mpc

namespace fedst {

// Batcher odd-even mergesort for a power-of-two size: layers of disjoint
// compare-exchange gates (i, j) with i < j.
using Gate = std::pair<size_t, size_t>;
std::vector<std::vector<Gate>> batcher_layers(size_t n);
size_t batcher_gate_count(size_t n);
size_t next_pow2(size_t n);

}  // namespace fedst

#endif  // FEDST_MPC_H_
