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

#include "fedst/experiment.h"

#include <chrono>
#include <iomanip>
#include <mutex>
#include <stdexcept>

namespace fedst {
namespace {

using Clock = std::chrono::steady_clock;

std::vector<int> labels_of(std::span<const TimeSeries> data) {
  std::vector<int> out;
  for (const auto& t : data) out.push_back(t.label);
  return out;
}

ExperimentRow base_row(const ExperimentSpec& spec) {
  ExperimentRow r;
  r.mode = mode_name(spec.mode);
  r.dataset = spec.dataset_name.empty() ? spec.train.name : spec.dataset_name;
  r.seed = spec.seed;
  r.n = spec.parties;
  r.m = spec.train.size();
  r.series_len = spec.train.series_length();
  r.sc = spec.search.candidate_count;
  r.k = spec.search.k;
  r.measure = measure_name(spec.search.measure);
  r.use_dp = spec.search.use_dp;
  r.use_sorted_ig = spec.search.use_sorted_ig && spec.search.measure == Measure::kIG;
  r.contract_s = spec.search.contract_seconds;
  return r;
}

ForestParams forest_for(const ExperimentSpec& spec) {
  ForestParams f = spec.forest;
  f.seed = spec.seed;
  return f;
}

double evaluate(const ExperimentSpec& spec, std::span<const ShapeletCandidate> shapelets,
                const std::vector<std::vector<double>>& train_rows, std::span<const int> train_labels) {
  RandomForest rf(forest_for(spec));
  rf.fit(train_rows, train_labels, spec.train.num_classes);
  auto test_rows = transform_plain(shapelets, spec.test.samples);
  auto test_labels = labels_of(spec.test.samples);
  return rf.accuracy(test_rows, test_labels);
}

SearchConfig search_for(const ExperimentSpec& spec) {
  SearchConfig cfg = spec.search;
  cfg.seed = spec.seed;
  return cfg;
}

ExperimentRow run_plain(const ExperimentSpec& spec, const std::vector<Dataset>& parts) {
  auto t0 = Clock::now();
  ExperimentRow row = base_row(spec);
  SearchConfig cfg = search_for(spec);
  const Dataset& p0 = parts[0];
  auto sc = generate_candidates(p0.samples, cfg.candidate_count, cfg.seed);
  std::vector<TimeSeries> pool;
  if (spec.mode == Mode::kLocal) {
    pool = p0.samples;
  } else {
    for (const auto& d : parts) pool.insert(pool.end(), d.samples.begin(), d.samples.end());
  }
  auto ref = centralized_search(sc, pool, cfg.measure, cfg.k, spec.train.num_classes);
  std::vector<ShapeletCandidate> shapelets;
  for (size_t i : ref.indices) shapelets.push_back(sc[i]);
  row.selected = ref.indices;
  row.evaluated = sc.size();
  row.accuracy = evaluate(spec, shapelets, transform_plain(shapelets, pool), labels_of(pool));
  row.wall_s = std::chrono::duration<double>(Clock::now() - t0).count();
  return row;
}

void fill_counts(ExperimentRow& row, const SearchResult& r) {
  auto t = r.comm.total();
  row.mul_count = t.op(OpKind::kMul);
  row.cmp_count = t.op(OpKind::kCmp);
  row.div_count = t.op(OpKind::kDiv);
  row.log_count = t.op(OpKind::kLog);
  row.evaluated = r.evaluated_count;
}

}  // namespace

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::kLocal: return "local";
    case Mode::kFederated: return "federated";
    case Mode::kCentralized: return "centralized";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  if (s == "local") return Mode::kLocal;
  if (s == "federated") return Mode::kFederated;
  if (s == "centralized") return Mode::kCentralized;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

void write_csv_header(std::ostream& out) {
  out << "mode,dataset,seed,n,M,N,SC,K,measure,use_dp,use_sorted_ig,contract_s,accuracy,wall_s,"
         "mul_count,cmp_count,div_count,log_count,bytes_total\n";
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

}  // namespace

void write_csv_row(std::ostream& out, const ExperimentRow& r) {
  out << r.mode << ',' << csv_field(r.dataset) << ',' << r.seed << ',' << r.n << ',' << r.m << ','
      << r.series_len << ',' << r.sc << ',' << r.k << ',' << r.measure << ',' << int(r.use_dp)
      << ',' << int(r.use_sorted_ig) << ',';
  if (r.contract_s)
    out << *r.contract_s;
  else
    out << "none";
  out << ',' << std::setprecision(6) << r.accuracy << ',' << r.wall_s << ',' << r.mul_count << ','
      << r.cmp_count << ',' << r.div_count << ',' << r.log_count << ',' << r.bytes_total << '\n';
}

std::vector<std::vector<double>> transform_plain(std::span<const ShapeletCandidate> shapelets,
                                                 std::span<const TimeSeries> data) {
  std::vector<std::vector<double>> rows;
  for (const auto& t : data) {
    std::vector<double> r;
    for (const auto& s : shapelets) r.push_back(shapelet_distance_plain(s, t));
    rows.push_back(std::move(r));
  }
  return rows;
}

ExperimentRow run_federated_party(const ExperimentSpec& spec, Party& party) {
  auto parts = partition_stratified(spec.train, spec.parties, spec.seed);
  SearchConfig cfg = search_for(spec);
  cfg.transform = true;
  SearchResult r = fedss_run(party, cfg, parts[party.id()].samples);
  ExperimentRow row = base_row(spec);
  fill_counts(row, r);
  row.bytes_total = r.comm.total().bytes;
  row.wall_s = r.wall_seconds;
  if (party.id() == 0) {
    row.selected = r.revealed_indices;
    row.accuracy = evaluate(spec, r.shapelets, r.table, r.table_labels);
  }
  return row;
}

ExperimentRow run_experiment(const ExperimentSpec& spec) {
  if (spec.train.samples.empty() || spec.test.samples.empty())
    throw std::invalid_argument("experiment: empty train or test set");
  if (spec.mode != Mode::kFederated) {
    return run_plain(spec, partition_stratified(spec.train, spec.parties, spec.seed));
  }
  if (spec.parties < 2) throw std::invalid_argument("federated mode needs at least two parties");
  auto t0 = Clock::now();
  auto configs = spec.tcp ? tcp_configs(spec.parties, spec.seed, pick_free_port_base(spec.parties))
                          : memory_configs(spec.parties, spec.seed);
  auto session = Session::start(configs, spec.session);
  std::vector<ExperimentRow> rows(spec.parties);
  session->run([&](Party& p) { rows[p.id()] = run_federated_party(spec, p); });
  ExperimentRow row = rows[0];
  row.bytes_total = session->total_stats().total().bytes;
  row.wall_s = std::chrono::duration<double>(Clock::now() - t0).count();
  return row;
}

std::vector<ExperimentRow> compare_configurations(const ExperimentSpec& base,
                                                  const std::vector<SearchConfig>& grid) {
  std::vector<ExperimentRow> out;
  for (const auto& cfg : grid) {
    ExperimentSpec s = base;
    s.search = cfg;
    out.push_back(run_experiment(s));
  }
  return out;
}

}  // namespace fedst
