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

#include "fedst/shapelet.h"

#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>

#include "fedst/dot_product.h"
#include "fedst/kernels.h"
#include "fedst/prg.h"

namespace fedst {

size_t min_candidate_length(size_t n) { return std::min<size_t>(3, n / 4); }

std::vector<ShapeletCandidate> generate_candidates(std::span<const TimeSeries> td0, size_t count,
                                                   uint64_t seed) {
  if (td0.empty()) throw std::invalid_argument("candidate generation: empty dataset");
  if (count == 0) throw std::invalid_argument("candidate generation: count must be positive");
  size_t n = td0[0].values.size();
  size_t lo = std::max<size_t>(min_candidate_length(n), 1);
  // Number of distinct (sample, start, length) triples.
  uint64_t space = 0;
  for (size_t len = lo; len <= n; ++len) space += (n - len + 1) * td0.size();
  if (count > space) throw std::invalid_argument("candidate generation: count exceeds subsequences");

  Prg rng(seed, "candidates");
  std::set<std::tuple<size_t, size_t, size_t>> seen;
  std::vector<ShapeletCandidate> out;
  out.reserve(count);
  while (out.size() < count) {
    size_t len = lo + rng.uniform(n - lo + 1);
    size_t sample = rng.uniform(td0.size());
    size_t start = rng.uniform(n - len + 1);
    if (!seen.emplace(sample, start, len).second) continue;
    ShapeletCandidate c;
    const auto& v = td0[sample].values;
    c.values.assign(v.begin() + start, v.begin() + start + len);
    c.source_class = td0[sample].label;
    c.sample = sample;
    c.start = start;
    out.push_back(std::move(c));
  }
  return out;
}

double shapelet_distance_plain(std::span<const double> s, std::span<const double> t) {
  if (s.empty() || s.size() > t.size()) throw std::invalid_argument("shapelet longer than series");
  return kernels::min_window_sqdist(s.data(), s.size(), t.data(), t.size());
}

double shapelet_distance_plain(const ShapeletCandidate& s, const TimeSeries& t) {
  return shapelet_distance_plain(s.values, t.values);
}

void check_series_range(std::span<const TimeSeries> data) {
  for (const auto& ts : data)
    for (double v : ts.values)
      if (!std::isfinite(v) || std::fabs(v) >= kMaxSeriesMagnitude)
        throw std::out_of_range("series value outside (-256, 256)");
}

std::vector<Zq> encode_series(std::span<const TimeSeries> data) {
  std::vector<Zq> out;
  for (const auto& ts : data) {
    auto e = encode_vector(ts.values);
    out.insert(out.end(), e.begin(), e.end());
  }
  return out;
}

Zq encoded_sqnorm(std::span<const Zq> v) {
  Zq s;
  for (auto x : v) s += x * x;
  return s;
}

mpc::Shares fed_distance_basic(Party& p, const mpc::Shares& s, const mpc::Shares& series,
                               size_t rows, size_t n) {
  size_t len = s.size();
  if (len == 0 || len > n) throw std::invalid_argument("shapelet longer than series");
  if (series.size() != rows * n) throw std::invalid_argument("series shape");
  if (rows == 0) return {};
  size_t windows = n - len + 1;
  mpc::Shares diff(rows * windows * len);
  for (size_t r = 0; r < rows; ++r)
    for (size_t w = 0; w < windows; ++w)
      for (size_t i = 0; i < len; ++i)
        diff[(r * windows + w) * len + i] = s[i] - series[r * n + w + i];
  mpc::Shares sq = mpc::mul(p, diff, diff);
  mpc::Shares sums(rows * windows);
  for (size_t k = 0; k < rows * windows; ++k)
    sums[k] = mpc::local_sum(std::span<const Zq>(sq).subspan(k * len, len));
  mpc::Shares d = mpc::trunc(p, sums, kFracBits);
  return mpc::min_rows(p, d, rows, windows);
}

mpc::Shares fed_distance_dp(Party& p, std::span<const Zq> s, size_t len, std::span<const Zq> mine,
                            std::span<const size_t> counts, size_t n) {
  if (len == 0 || len > n) throw std::invalid_argument("shapelet longer than series");
  int np = p.parties();
  size_t windows = n - len + 1;
  std::vector<size_t> wcounts(np, 0);
  size_t rows = 0;
  for (int i = 1; i < np; ++i) {
    wcounts[i] = counts[i] * windows;
    rows += counts[i];
  }
  if (rows == 0) return {};
  std::vector<std::vector<Zq>> ys;
  std::vector<Zq> wnorm;
  if (p.id() != 0) {
    size_t my = counts[p.id()];
    if (mine.size() != my * n) throw std::invalid_argument("series shape");
    for (size_t r = 0; r < my; ++r)
      for (size_t w = 0; w < windows; ++w) {
        auto win = mine.subspan(r * n + w, len);
        ys.emplace_back(win.begin(), win.end());
        wnorm.push_back(encoded_sqnorm(win));
      }
  }
  mpc::Shares z = dp_batch(p, s, ys, wcounts, len);
  // ||S - W||^2 = ||S||^2 - 2 S.W + ||W||^2; the norms are added locally by
  // their owners.
  Zq s_norm = p.id() == 0 ? encoded_sqnorm(s) : Zq();
  size_t off = 0;
  for (int i = 1; i < np; ++i) {
    for (size_t k = 0; k < wcounts[i]; ++k) {
      Zq v = -(z[off + k] + z[off + k]);
      if (p.id() == 0) v += s_norm;
      if (p.id() == i) v += wnorm[k];
      z[off + k] = v;
    }
    off += wcounts[i];
  }
  mpc::Shares d = mpc::trunc(p, z, kFracBits);
  return mpc::min_rows(p, d, rows, windows);
}

mpc::Shares local_distances(Party& p, const ShapeletCandidate* s, std::span<const TimeSeries> td0,
                            size_t rows) {
  std::vector<Zq> vals;
  if (p.id() == 0) {
    if (!s || td0.size() != rows) throw std::invalid_argument("local distances: P0 data");
    for (const auto& t : td0) vals.push_back(encode_fixed(shapelet_distance_plain(*s, t)).value);
  }
  return mpc::trivial(p, 0, vals, rows);
}

}  // namespace fedst
