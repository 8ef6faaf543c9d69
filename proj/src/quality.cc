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

#include "fedst/quality.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedst {
namespace {

using mpc::Shares;

Zq enc(double x) { return encode_fixed(x).value; }
Zq ring_int(int64_t v) { return Zq::from_signed(v); }

double xlog2x(double n) { return n > 0 ? n * std::log2(n) : 0.0; }

void check_inputs(const Shares& dists, const std::vector<Shares>& class_vecs) {
  if (dists.size() < 2) throw std::invalid_argument("quality: need at least two distances");
  if (class_vecs.empty()) throw std::invalid_argument("quality: no classes");
  for (const auto& g : class_vecs)
    if (g.size() != dists.size()) throw std::invalid_argument("quality: class vector length");
}

// n log2 n at scale f for shared integer counts < 2^bits (exactly 0 for n = 0).
Shares xlogx(Party& p, const Shares& n, int bits) {
  return mpc::mul(p, n, mpc::log2_count(p, n, bits));
}

// Sum over classes of onehot[c] * v[c][t].
Shares project(Party& p, const Shares& onehot, const std::vector<Shares>& v) {
  size_t c_count = v.size(), len = v[0].size();
  Shares a, b;
  a.reserve(c_count * len);
  b.reserve(c_count * len);
  for (size_t c = 0; c < c_count; ++c)
    for (size_t t = 0; t < len; ++t) {
      a.push_back(onehot[c]);
      b.push_back(v[c][t]);
    }
  Shares prod = mpc::mul(p, a, b);
  Shares out(len);
  for (size_t c = 0; c < c_count; ++c)
    for (size_t t = 0; t < len; ++t) out[t] += prod[c * len + t];
  return out;
}

// Parent term M log M - A log A - B log B, A the y(S) class size.
Shares parent_term(Party& p, const std::vector<Shares>& class_vecs, const Shares& y_vec, size_t m,
                   int bits) {
  std::vector<Shares> sizes;
  for (const auto& g : class_vecs) sizes.push_back(Shares{mpc::local_sum(g)});
  Shares a = project(p, y_vec, sizes);
  Shares ab = {a[0], mpc::add_public(p, mpc::neg(a), ring_int(static_cast<int64_t>(m)))[0]};
  Shares t = xlogx(p, ab, bits);
  Shares out = {-(t[0] + t[1])};
  return mpc::add_public(p, out, enc(xlog2x(static_cast<double>(m))));
}

// Finalises max over thresholds of (M IG) and divides by M.
Shares finish(Party& p, const Shares& m_ig, size_t m) {
  Shares best = mpc::max_rows(p, m_ig, 1, m_ig.size());
  return mpc::trunc(p, mpc::scale(best, enc(1.0 / static_cast<double>(m))), kFracBits);
}

}  // namespace

double entropy_binary(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("entropy: p outside [0, 1]");
  auto t = [](double x) { return x > 0 ? x * std::log2(x) : 0.0; };
  return -(t(p) + t(1.0 - p));
}

double ig_plain(std::span<const double> dists, std::span<const int> labels, int y_s) {
  size_t m = dists.size();
  if (m < 2 || labels.size() != m) throw std::invalid_argument("ig: inconsistent input");
  size_t pos = 0;
  for (int l : labels) pos += l == y_s;
  double parent = entropy_binary(static_cast<double>(pos) / m);
  double best = 0.0;
  bool first = true;
  for (size_t j = 0; j < m; ++j) {
    double tau = dists[j];
    size_t nl = 0, pl = 0;
    for (size_t i = 0; i < m; ++i)
      if (dists[i] <= tau) {
        ++nl;
        pl += labels[i] == y_s;
      }
    size_t nr = m - nl, pr = pos - pl;
    double h = parent;
    if (nl) h -= static_cast<double>(nl) / m * entropy_binary(static_cast<double>(pl) / nl);
    if (nr) h -= static_cast<double>(nr) / m * entropy_binary(static_cast<double>(pr) / nr);
    if (first || h > best) best = h;
    first = false;
  }
  return best;
}

FStat fstat_plain(std::span<const double> dists, std::span<const int> labels, int num_classes) {
  size_t m = dists.size();
  if (labels.size() != m) throw std::invalid_argument("fstat: inconsistent input");
  if (num_classes < 2 || m <= static_cast<size_t>(num_classes))
    throw std::invalid_argument("fstat: need M > C >= 2");
  std::vector<double> sum(num_classes, 0.0);
  std::vector<size_t> cnt(num_classes, 0);
  double total = 0.0;
  for (size_t j = 0; j < m; ++j) {
    int c = labels[j] - 1;
    if (c < 0 || c >= num_classes) throw std::invalid_argument("fstat: label out of range");
    sum[c] += dists[j];
    ++cnt[c];
    total += dists[j];
  }
  for (size_t c : cnt)
    if (c == 0) throw std::invalid_argument("fstat: empty class");
  double mean = total / m;
  double between = 0.0, within = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    double mc = sum[c] / cnt[c];
    between += (mc - mean) * (mc - mean);
  }
  for (size_t j = 0; j < m; ++j) {
    double mc = sum[labels[j] - 1] / cnt[labels[j] - 1];
    within += (dists[j] - mc) * (dists[j] - mc);
  }
  between /= (num_classes - 1);
  within /= static_cast<double>(m - num_classes);
  if (within == 0.0) return {0.0, true};
  return {between / within, false};
}

int count_bits(size_t m) {
  int b = 1;
  while ((size_t{1} << b) <= m) ++b;
  return b;
}

std::vector<Shares> build_class_vectors(Party& p, std::span<const int> labels,
                                        std::span<const size_t> counts, int num_classes) {
  if (static_cast<int>(counts.size()) != p.parties())
    throw std::invalid_argument("class vectors: counts");
  if (labels.size() != counts[p.id()]) throw std::invalid_argument("class vectors: label count");
  for (int l : labels)
    if (l < 1 || l > num_classes) throw std::invalid_argument("class vectors: label out of range");
  std::vector<Shares> out(num_classes);
  for (int i = 0; i < p.parties(); ++i) {
    size_t mi = counts[i];
    std::vector<Zq> mine;
    if (p.id() == i) {
      mine.resize(mi * num_classes);
      for (int c = 0; c < num_classes; ++c)
        for (size_t j = 0; j < mi; ++j)
          mine[c * mi + j] = Zq::from_u64(labels[j] == c + 1 ? 1 : 0);
    }
    Shares s = mpc::input(p, i, mine, mi * num_classes);
    for (int c = 0; c < num_classes; ++c)
      out[c].insert(out[c].end(), s.begin() + c * mi, s.begin() + (c + 1) * mi);
  }
  return out;
}

Shares share_class_onehot(Party& p, int y_s, int num_classes) {
  std::vector<Zq> v;
  if (p.id() == 0) {
    if (y_s < 1 || y_s > num_classes) throw std::invalid_argument("class out of range");
    v.resize(num_classes);
    v[y_s - 1] = Zq::from_u64(1);
  }
  return mpc::input(p, 0, v, num_classes);
}

Shares ig_secure_naive(Party& p, const Shares& dists, const std::vector<Shares>& class_vecs,
                       const Shares& y_vec) {
  check_inputs(dists, class_vecs);
  size_t m = dists.size(), nc = class_vecs.size();
  int bits = count_bits(m);

  // below[j*m + l] = [tau_j < d_l]; left = 1 - below.
  Shares tau(m * m), d(m * m);
  for (size_t j = 0; j < m; ++j)
    for (size_t l = 0; l < m; ++l) {
      tau[j * m + l] = dists[j];
      d[j * m + l] = dists[l];
    }
  Shares left = mpc::add_public(p, mpc::neg(mpc::lt(p, tau, d)), Zq::from_u64(1));
  tau.clear();
  d.clear();

  // Class counts on the left of each threshold.
  Shares lhs(nc * m * m), rhs(nc * m * m);
  for (size_t c = 0; c < nc; ++c)
    for (size_t j = 0; j < m; ++j)
      for (size_t l = 0; l < m; ++l) {
        lhs[(c * m + j) * m + l] = class_vecs[c][l];
        rhs[(c * m + j) * m + l] = left[j * m + l];
      }
  Shares prod = mpc::mul(p, lhs, rhs);
  lhs.clear();
  rhs.clear();
  std::vector<Shares> cnt(nc, Shares(m));
  for (size_t c = 0; c < nc; ++c)
    for (size_t j = 0; j < m; ++j)
      cnt[c][j] = mpc::local_sum(std::span<const Zq>(prod).subspan((c * m + j) * m, m));

  Shares nl(m);
  for (size_t j = 0; j < m; ++j) nl[j] = mpc::local_sum(std::span<const Zq>(left).subspan(j * m, m));
  Shares a = project(p, y_vec, cnt);  // left, class y(S)
  std::vector<Shares> sizes;
  for (const auto& g : class_vecs) sizes.push_back(Shares{mpc::local_sum(g)});
  Zq total_y = project(p, y_vec, sizes)[0];

  // Six counts per threshold: |L|, a, |L|-a, |R|, A-a, |R|-(A-a).
  Shares counts(6 * m);
  Zq mz = Zq::from_u64(m);
  for (size_t j = 0; j < m; ++j) {
    Zq nr = (p.is_initiator() ? mz : Zq()) - nl[j];
    Zq ar = total_y - a[j];
    counts[j] = nl[j];
    counts[m + j] = a[j];
    counts[2 * m + j] = nl[j] - a[j];
    counts[3 * m + j] = nr;
    counts[4 * m + j] = ar;
    counts[5 * m + j] = nr - ar;
  }
  Shares t = xlogx(p, counts, bits);
  Shares parent = parent_term(p, class_vecs, y_vec, m, bits);
  Shares m_ig(m);
  for (size_t j = 0; j < m; ++j)
    m_ig[j] = parent[0] - t[j] + t[m + j] + t[2 * m + j] - t[3 * m + j] + t[4 * m + j] +
              t[5 * m + j];
  return finish(p, m_ig, m);
}

Shares ig_secure_sorted(Party& p, const Shares& dists, const std::vector<Shares>& class_vecs,
                        const Shares& y_vec) {
  check_inputs(dists, class_vecs);
  size_t m = dists.size(), nc = class_vecs.size();
  int bits = count_bits(m);

  Shares keys = dists;
  std::vector<Shares> payloads = class_vecs;
  mpc::oblivious_sort(p, keys, payloads);

  // Prefix class counts: threshold t keeps sorted positions 0..t on the left.
  std::vector<Shares> cnt(nc, Shares(m));
  for (size_t c = 0; c < nc; ++c) {
    Zq run;
    for (size_t t = 0; t < m; ++t) {
      run += payloads[c][t];
      cnt[c][t] = run;
    }
  }
  Shares a = project(p, y_vec, cnt);
  std::vector<Shares> sizes;
  for (const auto& g : class_vecs) sizes.push_back(Shares{mpc::local_sum(g)});
  Zq total_y = project(p, y_vec, sizes)[0];

  Shares counts(4 * m);
  for (size_t t = 0; t < m; ++t) {
    Zq nl = p.is_initiator() ? Zq::from_u64(t + 1) : Zq();
    Zq nr = p.is_initiator() ? Zq::from_u64(m - t - 1) : Zq();
    Zq ar = total_y - a[t];
    counts[t] = a[t];
    counts[m + t] = nl - a[t];
    counts[2 * m + t] = ar;
    counts[3 * m + t] = nr - ar;
  }
  Shares x = xlogx(p, counts, bits);
  Shares parent = parent_term(p, class_vecs, y_vec, m, bits);
  Shares m_ig(m);
  for (size_t t = 0; t < m; ++t) {
    double sizes_term = xlog2x(static_cast<double>(t + 1)) + xlog2x(static_cast<double>(m - t - 1));
    m_ig[t] = parent[0] + x[t] + x[m + t] + x[2 * m + t] + x[3 * m + t];
    if (p.is_initiator()) m_ig[t] -= enc(sizes_term);
  }

  // A split inside a run of equal distances is not realisable by any
  // threshold; zero it (every valid split scores >= 0).
  Shares cur(keys.begin(), keys.end() - 1), nxt(keys.begin() + 1, keys.end());
  Shares valid = mpc::lt(p, cur, nxt);
  Shares head(m_ig.begin(), m_ig.end() - 1);
  Shares masked = mpc::mul(p, head, valid);
  std::copy(masked.begin(), masked.end(), m_ig.begin());
  return finish(p, m_ig, m);
}

Shares fstat_secure(Party& p, const Shares& dists, const std::vector<Shares>& class_vecs) {
  check_inputs(dists, class_vecs);
  size_t m = dists.size(), nc = class_vecs.size();
  if (nc < 2 || m <= nc) throw std::invalid_argument("fstat: need M > C >= 2");

  // Per-class sums (scale f, gamma has scale 0) and sizes.
  Shares lhs, rhs;
  for (size_t c = 0; c < nc; ++c) {
    lhs.insert(lhs.end(), class_vecs[c].begin(), class_vecs[c].end());
    rhs.insert(rhs.end(), dists.begin(), dists.end());
  }
  Shares prod = mpc::mul(p, lhs, rhs);
  Shares sums(nc), sizes(nc);
  for (size_t c = 0; c < nc; ++c) {
    sums[c] = mpc::local_sum(std::span<const Zq>(prod).subspan(c * m, m));
    sizes[c] = mpc::local_sum(class_vecs[c]) * Zq::pow2(kFracBits);
  }
  Shares means = mpc::div(p, sums, sizes).value;
  // Overall mean with a 36-bit reciprocal of M, so its error stays far below
  // the class-mean error.
  constexpr int kRecip = 36;
  Zq inv_m = Zq::from_u64(static_cast<uint64_t>(std::llround(std::ldexp(1.0, kRecip) / m)));
  Shares overall =
      mpc::trunc(p, Shares{mpc::local_sum(dists) * inv_m}, kRecip, mpc::max_mask_width(p.parties()));

  // Squared terms are summed at scale 2f and brought down to scale
  // f + 10 - log2(M - C) rather than f, so small spreads keep their relative
  // precision and the degrees of freedom can be applied as exact integer
  // factors before the division. Bounds: between, within < 2^30.
  int dof_bits = 0;
  while ((size_t{1} << dof_bits) < m - nc) ++dof_bits;
  const int drop = std::min(kFracBits, kFracBits / 2 + dof_bits);
  const int wide = mpc::max_mask_width(p.parties());
  Shares dev(nc);
  for (size_t c = 0; c < nc; ++c) dev[c] = means[c] - overall[0];
  Shares dev2 = mpc::mul(p, dev, dev);
  Shares between = mpc::trunc(p, Shares{mpc::local_sum(dev2)}, drop, wide);

  // Within-class term: d_c[j] = gamma_c[j] (d_j - mean_c).
  Shares centred(nc * m);
  for (size_t c = 0; c < nc; ++c)
    for (size_t j = 0; j < m; ++j) centred[c * m + j] = dists[j] - means[c];
  Shares dc = mpc::mul(p, lhs, centred);
  Shares sq = mpc::mul(p, dc, dc);
  Shares within = mpc::trunc(p, Shares{mpc::local_sum(sq)}, drop, wide);

  // Floor at 2^-f.
  Shares floor = mpc::constant(p, 1, Zq::pow2(kFracBits - drop));
  Shares tiny = mpc::lt(p, within, floor);
  within = mpc::select(p, tiny, floor, within);
  // Both operands share a scale, so the quotient is at scale f.
  Shares num = mpc::scale(between, Zq::from_u64(m - nc));
  Shares den = mpc::scale(within, Zq::from_u64(nc - 1));
  return mpc::div(p, num, den).value;
}

}  // namespace fedst
