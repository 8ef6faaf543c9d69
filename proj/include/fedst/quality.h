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

#ifndef FEDST_QUALITY_H_
#define FEDST_QUALITY_H_

#include <span>
#include <vector>

#include "fedst/mpc.h"
#include "fedst/party.h"

namespace fedst {

// ---- Plaintext references ----

// -(p log2 p + (1-p) log2(1-p)), with 0 log 0 = 0.
double entropy_binary(double p);

// Maximum weighted information gain of the binary split "label == y_s" over
// thresholds tau in the distance set, left side being d <= tau.
double ig_plain(std::span<const double> dists, std::span<const int> labels, int y_s);

struct FStat {
  double value = 0.0;
  bool poisoned = false;  // zero within-class variance
};
// Between-class over within-class variance ratio, unweighted class means.
FStat fstat_plain(std::span<const double> dists, std::span<const int> labels, int num_classes);

// ---- Secure ----

// gamma_c for c = 1..C over the concatenation of every party's labels in party
// order. counts[i] is party i's sample count; `labels` are this party's.
std::vector<mpc::Shares> build_class_vectors(Party& p, std::span<const int> labels,
                                             std::span<const size_t> counts, int num_classes);

// One-hot of the candidate's class, input by P0 (y_s ignored elsewhere).
mpc::Shares share_class_onehot(Party& p, int y_s, int num_classes);

// Information gain (scale f) comparing every distance against every threshold.
// M^2 comparisons and C M^2 multiplications for the class counts.
mpc::Shares ig_secure_naive(Party& p, const mpc::Shares& dists,
                            const std::vector<mpc::Shares>& class_vecs, const mpc::Shares& y_vec);

// Information gain (scale f) after obliviously sorting distances with the
// class vectors; per-threshold counts become prefix sums.
mpc::Shares ig_secure_sorted(Party& p, const mpc::Shares& dists,
                             const std::vector<mpc::Shares>& class_vecs, const mpc::Shares& y_vec);

// F-stat (scale f) with C + 1 secure divisions. The within-class denominator
// is floored at one ulp.
mpc::Shares fstat_secure(Party& p, const mpc::Shares& dists,
                         const std::vector<mpc::Shares>& class_vecs);

// Bits needed to represent counts 0..m.
int count_bits(size_t m);

}  // namespace fedst

#endif  // FEDST_QUALITY_H_
