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

// fedst: federated shapelet search experiments.
//
//   fedst --mode federated --dataset synthetic:24,32 --parties 3 --k 5 --opt dp,sort
//   fedst deal --parties 3 --seed 7 --triples 1000000 --bits 4000000 --out pools/
//   fedst compare --dataset synthetic:24,32 --out grid.csv

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fedst/experiment.h"
#include "fedst/sharing.h"

namespace {

using namespace fedst;

struct RunOptions {
  std::string mode = "federated";
  std::string dataset = "synthetic:24,32";
  std::string test;
  int parties = 3;
  size_t candidates = 30;
  size_t k = 5;
  std::string measure = "ig";
  std::string opt;
  double contract = 0.0;
  uint64_t seed = 1;
  std::string out;
  std::string transport = "mem";
  std::string listen;
  std::string connect;
  int party_id = -1;
  int trees = 40;
  int depth = 8;
};

std::string default_test_spec(const std::string& train) {
  size_t m = 0, n = 0;
  if (parse_synthetic_spec(train, m, n)) return "synthetic:60," + std::to_string(n);
  std::string t = train;
  auto pos = t.rfind("_TRAIN");
  if (pos == std::string::npos) throw std::invalid_argument("no --test given for " + train);
  t.replace(pos, 6, "_TEST");
  return t;
}

Dataset load_dataset(const std::string& spec, uint64_t seed) {
  size_t m = 0, n = 0;
  if (parse_synthetic_spec(spec, m, n)) return make_synthetic_motif({m, n, 0.1, seed});
  Dataset d = load_ucr_tsv(spec);
  check_series_range(d.samples);
  return d;
}

SearchConfig search_config(const RunOptions& o) {
  SearchConfig cfg;
  cfg.k = o.k;
  cfg.candidate_count = o.candidates;
  if (o.measure == "ig")
    cfg.measure = Measure::kIG;
  else if (o.measure == "fstat")
    cfg.measure = Measure::kFStat;
  else
    throw std::invalid_argument("unknown measure '" + o.measure + "'");
  std::stringstream ss(o.opt);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "dp")
      cfg.use_dp = true;
    else if (item == "sort")
      cfg.use_sorted_ig = true;
    else if (!item.empty())
      throw std::invalid_argument("unknown optimisation '" + item + "'");
  }
  if (o.contract > 0) cfg.contract_seconds = o.contract;
  cfg.seed = o.seed;
  return cfg;
}

ExperimentSpec make_spec(const RunOptions& o) {
  ExperimentSpec spec;
  spec.mode = parse_mode(o.mode);
  spec.dataset_name = o.dataset;
  spec.train = load_dataset(o.dataset, o.seed);
  spec.test = load_dataset(o.test.empty() ? default_test_spec(o.dataset) : o.test, o.seed + 1000003);
  spec.search = search_config(o);
  spec.parties = o.parties;
  spec.seed = o.seed;
  spec.forest.trees = o.trees;
  spec.forest.max_depth = o.depth;
  spec.tcp = o.transport == "tcp";
  if (o.transport != "mem" && o.transport != "tcp")
    throw std::invalid_argument("unknown transport '" + o.transport + "'");
  return spec;
}

void emit(const std::string& path, const std::vector<ExperimentRow>& rows) {
  write_csv_header(std::cout);
  for (const auto& r : rows) write_csv_row(std::cout, r);
  if (path.empty()) return;
  bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (fresh) write_csv_header(out);
  for (const auto& r : rows) write_csv_row(out, r);
}

std::vector<Endpoint> parse_endpoints(const std::string& list) {
  std::vector<Endpoint> eps;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) eps.push_back(parse_endpoint(item));
  return eps;
}

int run_single_party(const RunOptions& o, const ExperimentSpec& spec) {
  const char* dir = std::getenv("FEDST_POOL_DIR");
  if (!dir) throw std::invalid_argument("a single-party TCP run needs FEDST_POOL_DIR (see 'fedst deal')");
  PartyConfig cfg;
  cfg.party_id = o.party_id;
  cfg.n = o.parties;
  cfg.in_memory = false;
  cfg.endpoints = parse_endpoints(o.connect);
  if (!o.listen.empty()) {
    if (o.party_id >= static_cast<int>(cfg.endpoints.size()))
      throw std::invalid_argument("--connect must list every party's endpoint");
    cfg.endpoints[o.party_id] = parse_endpoint(o.listen);
  }
  cfg.seed = o.seed;
  cfg.pool_dir = dir;
  PartyHandle h = connect_party(cfg);
  ExperimentRow row = run_federated_party(spec, *h.party);
  h.transport->close();
  if (o.party_id == 0) emit(o.out, {row});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated shapelet search over additive secret sharing"};
  app.require_subcommand(0, 1);
  RunOptions o;
  app.add_option("--mode", o.mode, "local | federated | centralized")
      ->check(CLI::IsMember({"local", "federated", "centralized"}));
  app.add_option("--dataset", o.dataset, "UCR TSV path or synthetic:M,N");
  app.add_option("--test", o.test, "test set (default: *_TEST.tsv sibling or synthetic:60,N)");
  app.add_option("--parties", o.parties, "number of parties")->check(CLI::Range(1, 8));
  app.add_option("--candidates", o.candidates, "candidate set size");
  app.add_option("--k", o.k, "number of shapelets");
  app.add_option("--measure", o.measure, "ig | fstat")->check(CLI::IsMember({"ig", "fstat"}));
  app.add_option("--opt", o.opt, "comma list of dp, sort");
  app.add_option("--contract", o.contract, "time contract in seconds");
  app.add_option("--seed", o.seed, "seed");
  app.add_option("--out", o.out, "append results to this CSV");
  app.add_option("--transport", o.transport, "mem | tcp");
  app.add_option("--listen", o.listen, "this party's host:port (TCP)");
  app.add_option("--connect", o.connect, "every party's host:port in party order (TCP)");
  app.add_option("--party-id", o.party_id, "run only this party (TCP, one process per party)");
  app.add_option("--trees", o.trees, "random forest size");
  app.add_option("--depth", o.depth, "random forest depth bound");

  auto* deal = app.add_subcommand("deal", "write dealer pool files for multi-process runs");
  int deal_n = 3;
  uint64_t deal_seed = 1;
  size_t deal_triples = 0, deal_bits = 0;
  std::string deal_out;
  deal->add_option("--parties", deal_n)->check(CLI::Range(2, 8));
  deal->add_option("--seed", deal_seed);
  deal->add_option("--triples", deal_triples)->required();
  deal->add_option("--bits", deal_bits)->required();
  deal->add_option("--out", deal_out)->required();

  auto* compare = app.add_subcommand("compare", "run every federated configuration on one dataset");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*deal) {
      write_pool_files(deal_out, deal_n, deal_seed, deal_triples, deal_bits);
      std::cout << "wrote pools for " << deal_n << " parties to " << deal_out << '\n';
      return 0;
    }
    ExperimentSpec spec = make_spec(o);
    if (*compare) {
      spec.mode = Mode::kFederated;
      std::vector<SearchConfig> grid;
      for (int dp = 0; dp < 2; ++dp) {
        for (int sort = 0; sort < 2; ++sort) {
          SearchConfig c = spec.search;
          c.measure = Measure::kIG;
          c.use_dp = dp;
          c.use_sorted_ig = sort;
          grid.push_back(c);
        }
        SearchConfig f = spec.search;
        f.measure = Measure::kFStat;
        f.use_dp = dp;
        f.use_sorted_ig = false;
        grid.push_back(f);
      }
      emit(o.out, compare_configurations(spec, grid));
      return 0;
    }
    if (o.party_id >= 0) return run_single_party(o, spec);
    emit(o.out, {run_experiment(spec)});
  } catch (const std::exception& e) {
    std::cerr << "fedst: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
