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

#ifndef FEDST_FOREST_H_
#define FEDST_FOREST_H_

#include <cstdint>
#include <span>
#include <vector>

namespace fedst {

struct ForestParams {
  int trees = 40;
  int max_depth = 8;
  int min_split = 2;
  int features_per_split = 0;  // 0: round(sqrt(feature count)), at least 1
  uint64_t seed = 1;
};

// Bagged CART ensemble with Gini splits and per-split feature sampling.
class RandomForest {
 public:
  explicit RandomForest(ForestParams params = {}) : params_(params) {}

  // rows: samples x features; labels in 1..num_classes.
  void fit(const std::vector<std::vector<double>>& rows, std::span<const int> labels,
           int num_classes);
  int predict(std::span<const double> row) const;
  double accuracy(const std::vector<std::vector<double>>& rows, std::span<const int> labels) const;

  size_t tree_count() const { return trees_.size(); }

 private:
  struct Node {
    int feature = -1;  // -1: leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    int label = 1;
  };
  using Tree = std::vector<Node>;

  ForestParams params_;
  int num_classes_ = 0;
  std::vector<Tree> trees_;
};

}  // namespace fedst

#endif  // FEDST_FOREST_H_
