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

#include "fedst/fedss.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include "fedst/dot_product.h"
#include "fedst/prg.h"
#include "fedst/quality.h"

namespace fedst {
namespace {

using mpc::Shares;
using Clock = std::chrono::steady_clock;

struct Shape {
  std::vector<size_t> counts;  // samples per party
  size_t series_len = 0;
  int num_classes = 0;
  size_t total() const { return std::accumulate(counts.begin(), counts.end(), size_t{0}); }
};

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<uint8_t>(v >> s));
}

uint64_t get_u64(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
  return v;
}

// Every party announces its sample count, series length and largest label.
Shape exchange_shape(Party& p, std::span<const TimeSeries> data) {
  if (data.empty()) throw std::invalid_argument("search: party has no samples");
  size_t n_len = data[0].values.size();
  int max_label = 0;
  for (const auto& t : data) {
    if (t.values.size() != n_len) throw std::invalid_argument("search: ragged series");
    max_label = std::max(max_label, t.label);
  }
  std::vector<uint8_t> msg;
  put_u64(msg, data.size());
  put_u64(msg, n_len);
  put_u64(msg, static_cast<uint64_t>(max_label));
  for (int j = 0; j < p.parties(); ++j)
    if (j != p.id()) p.send(j, msg);
  Shape s;
  s.counts.assign(p.parties(), 0);
  s.counts[p.id()] = data.size();
  s.series_len = n_len;
  s.num_classes = max_label;
  for (int j = 0; j < p.parties(); ++j) {
    if (j == p.id()) continue;
    auto r = p.recv(j);
    if (r.size() != 24) throw std::runtime_error("search: bad shape message");
    s.counts[j] = get_u64(r.data());
    if (get_u64(r.data() + 8) != n_len) throw std::invalid_argument("search: series lengths differ");
    s.num_classes = std::max<int>(s.num_classes, static_cast<int>(get_u64(r.data() + 16)));
  }
  p.note_round();
  return s;
}

// P0 tells every party whether to evaluate another candidate and its length.
std::pair<bool, size_t> broadcast_step(Party& p, bool go, size_t len) {
  if (p.id() == 0) {
    std::vector<uint8_t> msg = {static_cast<uint8_t>(go)};
    for (int s = 24; s >= 0; s -= 8) msg.push_back(static_cast<uint8_t>(len >> s));
    for (int j = 1; j < p.parties(); ++j) p.send(j, msg);
    p.note_round();
    return {go, len};
  }
  auto r = p.recv(0);
  p.note_round();
  if (r.size() != 5) throw std::runtime_error("search: bad control message");
  size_t l = (size_t{r[1]} << 24) | (size_t{r[2]} << 16) | (size_t{r[3]} << 8) | r[4];
  return {r[0] != 0, l};
}

struct DistanceContext {
  const Shape& shape;
  std::span<const TimeSeries> my_data;
  std::vector<Zq> my_encoded;  // participants only
  Shares shared_series;        // participants' series, basic path only
  bool use_dp = false;
};

// Shared distances (scale f) of every training sample, rows in party order.
Shares candidate_distances(Party& p, const DistanceContext& ctx, const ShapeletCandidate* cand,
                           size_t len) {
  Party::StageScope st(p, Stage::kDistance);
  size_t n_len = ctx.shape.series_len;
  Shares d0 = local_distances(p, cand, p.id() == 0 ? ctx.my_data : std::span<const TimeSeries>{},
                              ctx.shape.counts[0]);
  std::vector<Zq> enc_s;
  if (p.id() == 0) enc_s = encode_vector(cand->values);
  Shares rest;
  if (ctx.use_dp) {
    rest = fed_distance_dp(p, enc_s, len, ctx.my_encoded, ctx.shape.counts, n_len);
  } else {
    Shares s = mpc::input(p, 0, enc_s, len);
    rest = fed_distance_basic(p, s, ctx.shared_series, ctx.shape.total() - ctx.shape.counts[0],
                              n_len);
  }
  d0.insert(d0.end(), rest.begin(), rest.end());
  return d0;
}

}  // namespace

const char* measure_name(Measure m) { return m == Measure::kIG ? "ig" : "fstat"; }

std::optional<std::vector<size_t>> retrieve_topk_reveal(Party& p, const Shares& qualities,
                                                        size_t k) {
  if (k < 1 || k > qualities.size()) throw std::invalid_argument("top-k: k out of range");
  Party::StageScope st(p, Stage::kTopK);
  Shares idx = mpc::topk(p, qualities, k);
  auto opened = mpc::open_to(p, idx, 0);
  if (!opened) return std::nullopt;
  std::vector<size_t> out;
  for (auto v : *opened) out.push_back(static_cast<size_t>(v.value()));
  return out;
}

SearchResult fedss_run(Party& p, const SearchConfig& cfg, std::span<const TimeSeries> my_data) {
  auto t0 = Clock::now();
  if (cfg.k < 1 || cfg.k > cfg.candidate_count)
    throw std::invalid_argument("search: need 1 <= k <= candidate count");
  check_series_range(my_data);
  SearchResult res;
  CommStats start_stats = p.stats();

  Shape shape = exchange_shape(p, my_data);
  if (shape.num_classes < 2) throw std::invalid_argument("search: need at least two classes");
  std::vector<int> labels;
  for (const auto& t : my_data) labels.push_back(t.label);
  auto class_vecs = build_class_vectors(p, labels, shape.counts, shape.num_classes);

  DistanceContext ctx{shape, my_data, {}, {}, cfg.use_dp};
  if (p.id() != 0) ctx.my_encoded = encode_series(my_data);
  if (!cfg.use_dp) {
    // Participants share their series once; P0's rows are computed locally.
    for (int i = 1; i < p.parties(); ++i) {
      Shares s = mpc::input(p, i, p.id() == i ? std::span<const Zq>(ctx.my_encoded)
                                             : std::span<const Zq>{},
                            shape.counts[i] * shape.series_len);
      ctx.shared_series.insert(ctx.shared_series.end(), s.begin(), s.end());
    }
  }

  if (p.id() == 0) {
    res.candidates = generate_candidates(my_data, cfg.candidate_count, cfg.seed);
    res.order.resize(cfg.candidate_count);
    std::iota(res.order.begin(), res.order.end(), size_t{0});
    Prg order_rng(cfg.seed, "order");
    std::shuffle(res.order.begin(), res.order.end(), order_rng);
  }

  Shares qualities;
  for (size_t pos = 0; pos < cfg.candidate_count; ++pos) {
    bool go = true;
    size_t len = 0;
    const ShapeletCandidate* cand = nullptr;
    if (p.id() == 0) {
      cand = &res.candidates[res.order[pos]];
      len = cand->length();
      if (cfg.contract_seconds && pos >= cfg.k) {
        double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
        go = elapsed < *cfg.contract_seconds;
      }
    }
    std::tie(go, len) = broadcast_step(p, go, len);
    if (!go) break;

    CommStats before = p.stats();
    Shares d = candidate_distances(p, ctx, cand, len);
    Shares q;
    {
      Party::StageScope st(p, Stage::kQuality);
      if (cfg.measure == Measure::kFStat) {
        q = fstat_secure(p, d, class_vecs);
      } else {
        Shares y = share_class_onehot(p, cand ? cand->source_class : 0, shape.num_classes);
        q = cfg.use_sorted_ig ? ig_secure_sorted(p, d, class_vecs, y)
                              : ig_secure_naive(p, d, class_vecs, y);
      }
    }
    qualities.push_back(q[0]);
    res.per_candidate.push_back({p.id() == 0 ? res.order[pos] : pos, p.stats() - before});
  }
  res.evaluated_count = qualities.size();

  auto top = retrieve_topk_reveal(p, qualities, cfg.k);
  if (cfg.reveal_qualities) {
    auto opened = mpc::open_to(p, qualities, 0);
    if (opened)
      for (size_t i : *top) res.qualities.push_back(decode_fixed((*opened)[i], kFracBits));
  }
  if (p.id() == 0) {
    for (size_t i : *top) {
      res.revealed_indices.push_back(res.order[i]);
      res.shapelets.push_back(res.candidates[res.order[i]]);
    }
  }

  if (cfg.transform) {
    // Distances of all training rows to the selected shapelets. Lengths are
    // announced by P0 since every distance path needs them.
    Shares table;
    for (size_t k = 0; k < cfg.k; ++k) {
      const ShapeletCandidate* s = p.id() == 0 ? &res.shapelets[k] : nullptr;
      auto [go, len] = broadcast_step(p, true, s ? s->length() : 0);
      (void)go;
      Shares d = candidate_distances(p, ctx, s, len);
      table.insert(table.end(), d.begin(), d.end());
    }
    auto opened = mpc::open_to(p, table, 0);
    Shares label_code(shape.total());
    for (int c = 0; c < shape.num_classes; ++c)
      for (size_t j = 0; j < label_code.size(); ++j)
        label_code[j] += class_vecs[c][j] * Zq::from_u64(c + 1);
    auto lab = mpc::open_to(p, label_code, 0);
    if (opened) {
      size_t m = shape.total();
      res.table.assign(m, std::vector<double>(cfg.k));
      for (size_t k = 0; k < cfg.k; ++k)
        for (size_t j = 0; j < m; ++j) res.table[j][k] = decode_fixed((*opened)[k * m + j], kFracBits);
      for (auto v : *lab) res.table_labels.push_back(static_cast<int>(v.value()));
    }
  }

  res.comm = p.stats() - start_stats;
  res.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return res;
}

double plain_quality(const ShapeletCandidate& s, std::span<const TimeSeries> data, Measure m,
                     int num_classes) {
  std::vector<double> d;
  std::vector<int> labels;
  for (const auto& t : data) {
    d.push_back(shapelet_distance_plain(s, t));
    labels.push_back(t.label);
  }
  if (m == Measure::kIG) return ig_plain(d, labels, s.source_class);
  FStat f = fstat_plain(d, labels, num_classes);
  return f.poisoned ? 0.0 : f.value;
}

ReferenceResult centralized_search(std::span<const ShapeletCandidate> sc,
                                   std::span<const TimeSeries> data, Measure m, size_t k,
                                   int num_classes) {
  if (k < 1 || k > sc.size()) throw std::invalid_argument("reference: k out of range");
  ReferenceResult r;
  for (const auto& s : sc) r.qualities.push_back(plain_quality(s, data, m, num_classes));
  std::vector<size_t> idx(sc.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](size_t a, size_t b) { return r.qualities[a] > r.qualities[b]; });
  r.indices.assign(idx.begin(), idx.begin() + k);
  return r;
}

bool topk_equivalent(std::span<const size_t> revealed, const ReferenceResult& ref, double tol) {
  size_t k = ref.indices.size();
  if (revealed.size() != k) return false;
  std::vector<size_t> uniq(revealed.begin(), revealed.end());
  std::sort(uniq.begin(), uniq.end());
  if (std::adjacent_find(uniq.begin(), uniq.end()) != uniq.end()) return false;
  std::vector<double> a, b;
  for (size_t i : revealed) {
    if (i >= ref.qualities.size()) return false;
    a.push_back(ref.qualities[i]);
  }
  for (size_t i : ref.indices) b.push_back(ref.qualities[i]);
  std::sort(a.rbegin(), a.rend());
  std::sort(b.rbegin(), b.rend());
  for (size_t i = 0; i < k; ++i)
    if (std::fabs(a[i] - b[i]) > tol) return false;
  return true;
}

double reference_top_gap(const ReferenceResult& ref, size_t k) {
  std::vector<double> q = ref.qualities;
  std::sort(q.rbegin(), q.rend());
  size_t upto = std::min(k + 1, q.size());
  double gap = INFINITY;
  for (size_t i = 1; i < upto; ++i) gap = std::min(gap, q[i - 1] - q[i]);
  return gap;
}

void write_candidate_csv(std::ostream& out, std::span<const CandidateMeter> meters) {
  out << "candidate_id,stage,op_kind,count,bytes\n";
  for (const auto& m : meters)
    for (int s = 0; s < kStageCount; ++s) {
      const auto& st = m.stats.stages[s];
      for (int k = 0; k < kOpKindCount; ++k) {
        if (st.ops[k] == 0 && st.op_bytes[k] == 0) continue;
        out << m.candidate_id << ',' << stage_name(static_cast<Stage>(s)) << ','
            << op_name(static_cast<OpKind>(k)) << ',' << st.ops[k] << ',' << st.op_bytes[k] << '\n';
      }
    }
}

void write_report(std::ostream& out, const SearchConfig& cfg, const SearchResult& r) {
  out << "measure: " << measure_name(cfg.measure) << (cfg.use_dp ? " +dp" : "")
      << (cfg.use_sorted_ig && cfg.measure == Measure::kIG ? " +sort" : "") << '\n';
  out << "candidates evaluated: " << r.evaluated_count << " of " << cfg.candidate_count << '\n';
  out << "selected:";
  for (size_t i : r.revealed_indices) out << ' ' << i;
  out << '\n';
  for (size_t k = 0; k < r.shapelets.size(); ++k) {
    const auto& s = r.shapelets[k];
    out << "  shapelet " << k << ": sample " << s.sample << " start " << s.start << " length "
        << s.length() << " class " << s.source_class;
    if (k < r.qualities.size()) out << " quality " << r.qualities[k];
    out << '\n';
  }
  auto t = r.comm.total();
  out << "messages " << t.messages << ", bytes " << t.bytes << ", rounds " << t.rounds << '\n';
  out << "interactive ops " << t.interactive_ops() << " (mul " << t.op(OpKind::kMul) << ", cmp "
      << t.op(OpKind::kCmp) << ", sel " << t.op(OpKind::kSel) << ", div " << t.op(OpKind::kDiv)
      << ", log " << t.op(OpKind::kLog) << ")\n";
  out << "wall time " << r.wall_seconds << " s\n";
}

}  // namespace fedst
