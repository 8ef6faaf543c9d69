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

#include "fedst/forest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace fedst {
namespace {

struct Builder {
  const std::vector<std::vector<double>>& x;
  std::span<const int> y;
  int classes;
  int max_depth;
  int min_split;
  int mtry;
  std::mt19937_64& rng;

  double gini(const std::vector<int>& counts, size_t total) const {
    if (total == 0) return 0.0;
    double s = 1.0;
    for (int c : counts) {
      double p = static_cast<double>(c) / total;
      s -= p * p;
    }
    return s;
  }

  int majority(const std::vector<size_t>& idx) const {
    std::vector<int> counts(classes + 1, 0);
    for (size_t i : idx) ++counts[y[i]];
    return static_cast<int>(std::max_element(counts.begin() + 1, counts.end()) - counts.begin());
  }

  template <typename Node>
  int build(std::vector<Node>& tree, std::vector<size_t> idx, int depth) {
    int id = static_cast<int>(tree.size());
    tree.emplace_back();
    tree[id].label = majority(idx);
    bool pure = std::all_of(idx.begin(), idx.end(), [&](size_t i) { return y[i] == y[idx[0]]; });
    if (pure || depth >= max_depth || static_cast<int>(idx.size()) < min_split) return id;

    size_t nf = x[0].size();
    std::vector<size_t> feats(nf);
    std::iota(feats.begin(), feats.end(), size_t{0});
    std::shuffle(feats.begin(), feats.end(), rng);
    feats.resize(std::min<size_t>(mtry, nf));

    double best_score = INFINITY;
    int best_f = -1;
    double best_t = 0.0;
    std::vector<int> left(classes + 1), right(classes + 1);
    for (size_t f : feats) {
      std::vector<size_t> order = idx;
      std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return x[a][f] < x[b][f]; });
      std::fill(left.begin(), left.end(), 0);
      std::fill(right.begin(), right.end(), 0);
      for (size_t i : order) ++right[y[i]];
      for (size_t k = 0; k + 1 < order.size(); ++k) {
        --right[y[order[k]]];
        ++left[y[order[k]]];
        double a = x[order[k]][f], b = x[order[k + 1]][f];
        if (a == b) continue;
        size_t nl = k + 1, nr = order.size() - nl;
        double score = (nl * gini(left, nl) + nr * gini(right, nr)) / order.size();
        if (score < best_score) {
          best_score = score;
          best_f = static_cast<int>(f);
          best_t = 0.5 * (a + b);
        }
      }
    }
    if (best_f < 0) return id;
    std::vector<size_t> li, ri;
    for (size_t i : idx) (x[i][best_f] <= best_t ? li : ri).push_back(i);
    tree[id].feature = best_f;
    tree[id].threshold = best_t;
    int l = build(tree, std::move(li), depth + 1);
    int r = build(tree, std::move(ri), depth + 1);
    tree[id].left = l;
    tree[id].right = r;
    return id;
  }
};

}  // namespace

void RandomForest::fit(const std::vector<std::vector<double>>& rows, std::span<const int> labels,
                       int num_classes) {
  if (rows.empty() || rows.size() != labels.size())
    throw std::invalid_argument("forest: inconsistent training data");
  size_t nf = rows[0].size();
  if (nf == 0) throw std::invalid_argument("forest: no features");
  for (const auto& r : rows)
    if (r.size() != nf) throw std::invalid_argument("forest: ragged rows");
  int distinct = 0;
  std::vector<bool> seen(num_classes + 1, false);
  for (int l : labels) {
    if (l < 1 || l > num_classes) throw std::invalid_argument("forest: label out of range");
    if (!seen[l]) ++distinct;
    seen[l] = true;
  }
  if (distinct < 2) throw std::invalid_argument("forest: training data has a single class");

  num_classes_ = num_classes;
  int mtry = params_.features_per_split > 0
                 ? params_.features_per_split
                 : std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(nf)))));
  std::mt19937_64 rng(params_.seed);
  trees_.clear();
  Builder b{rows, labels, num_classes, params_.max_depth, params_.min_split, mtry, rng};
  std::uniform_int_distribution<size_t> pick(0, rows.size() - 1);
  for (int t = 0; t < params_.trees; ++t) {
    std::vector<size_t> sample(rows.size());
    for (auto& s : sample) s = pick(rng);
    Tree tree;
    b.build(tree, std::move(sample), 0);
    trees_.push_back(std::move(tree));
  }
}

int RandomForest::predict(std::span<const double> row) const {
  if (trees_.empty()) throw std::logic_error("forest: not fitted");
  std::vector<int> votes(num_classes_ + 1, 0);
  for (const auto& tree : trees_) {
    int n = 0;
    while (tree[n].feature >= 0) n = row[tree[n].feature] <= tree[n].threshold ? tree[n].left : tree[n].right;
    ++votes[tree[n].label];
  }
  return static_cast<int>(std::max_element(votes.begin() + 1, votes.end()) - votes.begin());
}

double RandomForest::accuracy(const std::vector<std::vector<double>>& rows,
                              std::span<const int> labels) const {
  if (rows.empty()) return 0.0;
  size_t ok = 0;
  for (size_t i = 0; i < rows.size(); ++i) ok += predict(rows[i]) == labels[i];
  return static_cast<double>(ok) / rows.size();
}

}  // namespace fedst
