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

#ifndef FEDST_FEDSS_H_
#define FEDST_FEDSS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fedst/mpc.h"
#include "fedst/party.h"
#include "fedst/shapelet.h"

namespace fedst {

enum class Measure { kIG, kFStat };
const char* measure_name(Measure m);

struct SearchConfig {
  size_t k = 5;
  size_t candidate_count = 30;
  Measure measure = Measure::kIG;
  bool use_dp = false;
  bool use_sorted_ig = false;
  std::optional<double> contract_seconds;
  uint64_t seed = 1;
  bool reveal_qualities = false;
  // Also compute the distance table to the selected shapelets for every
  // training sample and reveal it, with labels, to P0.
  bool transform = false;
};

struct CandidateMeter {
  size_t candidate_id = 0;  // index in SC
  CommStats stats;
};

struct SearchResult {
  // Everything below except comm/per_candidate/evaluated_count is filled at P0 only.
  std::vector<ShapeletCandidate> candidates;  // SC
  std::vector<size_t> order;                  // evaluation order over SC
  std::vector<ShapeletCandidate> shapelets;
  std::vector<size_t> revealed_indices;       // SC indices, best first
  std::vector<double> qualities;              // with reveal_qualities, per revealed index
  std::vector<std::vector<double>> table;     // with transform: M x K, rows in party order
  std::vector<int> table_labels;
  size_t evaluated_count = 0;
  CommStats comm;  // this party's totals
  std::vector<CandidateMeter> per_candidate;
  double wall_seconds = 0.0;
};

// Runs the federated shapelet search as one party. Every party calls this with
// its own training data; P0 is the initiator and holds the candidates.
SearchResult fedss_run(Party& p, const SearchConfig& cfg, std::span<const TimeSeries> my_data);

// Indices of the k largest shared qualities, revealed to P0 only (nullopt elsewhere).
std::optional<std::vector<size_t>> retrieve_topk_reveal(Party& p, const mpc::Shares& qualities,
                                                        size_t k);

// Plaintext quality of one candidate over a labelled dataset.
double plain_quality(const ShapeletCandidate& s, std::span<const TimeSeries> data, Measure m,
                     int num_classes);

// Plaintext centralized reference: the k best SC indices (quality descending,
// lower index first on ties) and every candidate's quality.
struct ReferenceResult {
  std::vector<size_t> indices;
  std::vector<double> qualities;  // per SC index
};
ReferenceResult centralized_search(std::span<const ShapeletCandidate> sc,
                                   std::span<const TimeSeries> data, Measure m, size_t k,
                                   int num_classes);

// True when the revealed set is indistinguishable from the reference top-k:
// after sorting, the qualities of both sets agree element-wise within tol.
bool topk_equivalent(std::span<const size_t> revealed, const ReferenceResult& ref, double tol);
// Smallest gap between consecutive qualities among the reference top k+1.
double reference_top_gap(const ReferenceResult& ref, size_t k);

// Per-candidate metering CSV: candidate_id, stage, op_kind, count, bytes.
void write_candidate_csv(std::ostream& out, std::span<const CandidateMeter> meters);
// Human-readable summary.
void write_report(std::ostream& out, const SearchConfig& cfg, const SearchResult& r);

}  // namespace fedst

#endif  // FEDST_FEDSS_H_
