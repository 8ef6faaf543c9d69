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

#include "fedst/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "fedst/prg.h"

namespace fedst {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  // Tabs are canonical; commas and spaces also appear in the wild.
  for (char ch : line) {
    if (ch == '\t' || ch == ',' || ch == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_number(const std::string& s, size_t line) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ParseError("line " + std::to_string(line) + ": not a number: '" + s + "'");
  return v;
}

std::vector<double> motif_shape(size_t len) {
  std::vector<double> m(len);
  for (size_t i = 0; i < len; ++i)
    m[i] = std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(len - 1));
  return m;
}

}  // namespace

Dataset parse_ucr_tsv(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> raw_labels;
  std::vector<std::vector<double>> rows;
  size_t lineno = 0, width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() < 2) throw ParseError("line " + std::to_string(lineno) + ": no values");
    std::vector<double> vals;
    for (size_t i = 1; i < fields.size(); ++i) vals.push_back(parse_number(fields[i], lineno));
    if (rows.empty())
      width = vals.size();
    else if (vals.size() != width)
      throw ParseError("line " + std::to_string(lineno) + ": ragged row (" +
                       std::to_string(vals.size()) + " values, expected " + std::to_string(width) +
                       ")");
    raw_labels.push_back(parse_number(fields[0], lineno));
    rows.push_back(std::move(vals));
  }
  std::map<double, int> remap;
  for (double l : raw_labels) remap.emplace(l, 0);
  if (remap.size() < 2) throw ParseError("dataset has fewer than two classes");
  int next = 1;
  for (auto& [k, v] : remap) v = next++;
  Dataset d;
  d.name = name;
  d.num_classes = static_cast<int>(remap.size());
  for (size_t i = 0; i < rows.size(); ++i)
    d.samples.push_back({std::move(rows[i]), remap[raw_labels[i]]});
  return d;
}

Dataset load_ucr_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_ucr_tsv(ss.str(), path.stem().string());
}

std::vector<Dataset> partition_stratified(const Dataset& d, int n, uint64_t seed) {
  if (n < 1) throw std::invalid_argument("partition: need at least one party");
  std::vector<std::vector<size_t>> by_class(d.num_classes);
  for (size_t i = 0; i < d.samples.size(); ++i) {
    int c = d.samples[i].label;
    if (c < 1 || c > d.num_classes) throw std::invalid_argument("partition: label out of range");
    by_class[c - 1].push_back(i);
  }
  for (size_t c = 0; c < by_class.size(); ++c)
    if (by_class[c].size() < static_cast<size_t>(2 * n))
      throw std::invalid_argument("partition: class " + std::to_string(c + 1) + " has " +
                                  std::to_string(by_class[c].size()) +
                                  " samples, need at least " + std::to_string(2 * n));
  Prg rng(seed, "partition");
  std::vector<Dataset> out(n);
  for (int i = 0; i < n; ++i) {
    out[i].name = d.name + "/party" + std::to_string(i);
    out[i].num_classes = d.num_classes;
  }
  size_t k = 0;
  for (auto& idx : by_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (size_t i : idx) out[k++ % n].samples.push_back(d.samples[i]);
  }
  return out;
}

Dataset make_synthetic_motif(const MotifParams& prm) {
  if (prm.m < 2 || prm.m % 2 != 0) throw std::invalid_argument("synthetic: M must be even");
  if (prm.n < 16) throw std::invalid_argument("synthetic: N must be at least 16");
  if (prm.sigma < 0) throw std::invalid_argument("synthetic: negative noise");
  Prg rng(prm.seed, "synthetic");
  size_t mlen = prm.n / 4;
  auto motif = motif_shape(mlen);
  Dataset d;
  d.name = "synthetic_" + std::to_string(prm.m) + "x" + std::to_string(prm.n);
  d.num_classes = 2;
  for (size_t j = 0; j < prm.m; ++j) {
    TimeSeries t;
    t.label = j % 2 == 0 ? 1 : 2;
    t.values.resize(prm.n);
    for (auto& v : t.values) v = prm.sigma * rng.normal();
    if (t.label == 1) {
      size_t off = rng.uniform(prm.n - mlen + 1);
      for (size_t i = 0; i < mlen; ++i) t.values[off + i] += motif[i];
    }
    d.samples.push_back(std::move(t));
  }
  std::shuffle(d.samples.begin(), d.samples.end(), rng);

  if (motif_threshold_accuracy(d) < 0.95)
    throw std::runtime_error("synthetic: generated classes are not separable by the motif");
  return d;
}

double motif_threshold_accuracy(const Dataset& d) {
  if (d.samples.empty()) return 0.0;
  auto motif = motif_shape(d.series_length() / 4);
  std::vector<std::pair<double, int>> dist;
  for (const auto& t : d.samples) dist.emplace_back(shapelet_distance_plain(motif, t.values), t.label);
  std::sort(dist.begin(), dist.end());
  size_t best = 0;
  for (size_t cut = 0; cut <= dist.size(); ++cut) {
    size_t ok = 0;
    for (size_t i = 0; i < dist.size(); ++i) ok += (i < cut) == (dist[i].second == 1);
    best = std::max(best, ok);
  }
  return static_cast<double>(best) / static_cast<double>(dist.size());
}

bool parse_synthetic_spec(const std::string& spec, size_t& m, size_t& n) {
  const std::string prefix = "synthetic:";
  if (spec.rfind(prefix, 0) != 0) return false;
  std::string rest = spec.substr(prefix.size());
  auto comma = rest.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("expected synthetic:M,N");
  try {
    m = std::stoul(rest.substr(0, comma));
    n = std::stoul(rest.substr(comma + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("expected synthetic:M,N");
  }
  return true;
}

}  // namespace fedst
