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

#ifndef FEDST_EXPERIMENT_H_
#define FEDST_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fedst/dataset.h"
#include "fedst/fedss.h"
#include "fedst/forest.h"
#include "fedst/party.h"

namespace fedst {

enum class Mode { kLocal, kFederated, kCentralized };
const char* mode_name(Mode m);
Mode parse_mode(const std::string& s);

struct ExperimentSpec {
  Mode mode = Mode::kFederated;
  std::string dataset_name;
  Dataset train;
  Dataset test;
  SearchConfig search;
  int parties = 3;
  uint64_t seed = 1;  // partition, search and forest seeds derive from it
  ForestParams forest;
  bool tcp = false;
  SessionOptions session;
};

// One CSV row. Operation counts are those of a single party (every party runs
// the same operations); bytes_total sums all parties' sent frames.
struct ExperimentRow {
  std::string mode, dataset;
  uint64_t seed = 0;
  int n = 0;
  size_t m = 0, series_len = 0, sc = 0, k = 0;
  std::string measure;
  bool use_dp = false, use_sorted_ig = false;
  std::optional<double> contract_s;
  double accuracy = 0.0, wall_s = 0.0;
  uint64_t mul_count = 0, cmp_count = 0, div_count = 0, log_count = 0, bytes_total = 0;
  size_t evaluated = 0;
  std::vector<size_t> selected;
};

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const ExperimentRow& r);

// Transforms series into rows of distances to the shapelets.
std::vector<std::vector<double>> transform_plain(std::span<const ShapeletCandidate> shapelets,
                                                 std::span<const TimeSeries> data);

ExperimentRow run_experiment(const ExperimentSpec& spec);

// Runs one party of a federated experiment inside a multi-process deployment.
// P0 returns a complete row; other parties return a row without accuracy.
ExperimentRow run_federated_party(const ExperimentSpec& spec, Party& party);

// Runs every configuration of the grid on the same data and seed.
std::vector<ExperimentRow> compare_configurations(const ExperimentSpec& base,
                                                  const std::vector<SearchConfig>& grid);

}  // namespace fedst

#endif  // FEDST_EXPERIMENT_H_
