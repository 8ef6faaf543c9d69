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

#ifndef FEDST_DATASET_H_
#define FEDST_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedst/shapelet.h"

namespace fedst {

struct Dataset {
  std::string name;
  std::vector<TimeSeries> samples;
  int num_classes = 0;

  size_t size() const { return samples.size(); }
  size_t series_length() const { return samples.empty() ? 0 : samples[0].values.size(); }
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// UCR archive TSV: one series per line, label first, tab separated. Labels are
// remapped to 1..C in ascending numeric order.
Dataset load_ucr_tsv(const std::filesystem::path& path);
Dataset parse_ucr_tsv(const std::string& text, const std::string& name = "inline");

// Splits into n parties, round-robin within shuffled classes, so that party
// sizes differ by at most one. Every class needs at least 2n samples.
std::vector<Dataset> partition_stratified(const Dataset& d, int n, uint64_t seed);

struct MotifParams {
  size_t m = 24;  // even
  size_t n = 32;  // >= 16
  double sigma = 0.1;
  uint64_t seed = 1;
};

// Two balanced classes: class 1 embeds a smooth bump of length N/4 at a random
// offset, class 2 is noise only. Generation verifies that the motif itself
// separates the classes with a single distance threshold (accuracy >= 0.95).
Dataset make_synthetic_motif(const MotifParams& params);

// Accuracy of the best single threshold on the distance to the generator's
// motif (the self-check above).
double motif_threshold_accuracy(const Dataset& d);

// Parses "synthetic:M,N"; returns false if `spec` has another form.
bool parse_synthetic_spec(const std::string& spec, size_t& m, size_t& n);

}  // namespace fedst

#endif  // FEDST_DATASET_H_
