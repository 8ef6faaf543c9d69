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

#include <gtest/gtest.h>

#include <cstring>

#include "fedst/kernels.h"
#include "fedst/prg.h"

namespace fedst::kernels {
namespace {

std::vector<double> random_series(Prg& rng, size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal() * 3;
  return v;
}

TEST(Kernels, ScalarMatchesDirectSum) {
  Prg rng(1, "kernels");
  auto s = random_series(rng, 7), t = random_series(rng, 30);
  std::vector<double> out(24);
  window_sqdist_scalar(s.data(), s.size(), t.data(), t.size(), out.data());
  for (size_t p = 0; p < out.size(); ++p) {
    double d = 0;
    for (size_t i = 0; i < s.size(); ++i) d += (s[i] - t[p + i]) * (s[i] - t[p + i]);
    EXPECT_DOUBLE_EQ(out[p], d);
  }
}

TEST(Kernels, Avx2IsBitIdenticalToScalar) {
  if (!cpu_has_avx2()) GTEST_SKIP() << "no AVX2";
  Prg rng(2, "kernels");
  for (int trial = 0; trial < 300; ++trial) {
    size_t n = 1 + rng.uniform(90);
    size_t len = 1 + rng.uniform(n);
    auto s = random_series(rng, len), t = random_series(rng, n);
    std::vector<double> a(n - len + 1), b(n - len + 1);
    window_sqdist_scalar(s.data(), len, t.data(), n, a.data());
    window_sqdist_avx2(s.data(), len, t.data(), n, b.data());
    ASSERT_EQ(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)), 0)
        << "n=" << n << " len=" << len;
  }
}

TEST(Kernels, DispatchCanBeForced) {
  Isa before = active_isa();
  set_isa(Isa::kScalar);
  EXPECT_EQ(active_isa(), Isa::kScalar);
  EXPECT_STREQ(isa_name(Isa::kScalar), "scalar");
  double s[] = {1, 2}, t[] = {0, 1, 2, 5};
  EXPECT_EQ(min_window_sqdist(s, 2, t, 4), 0.0);
  if (cpu_has_avx2()) {
    set_isa(Isa::kAvx2);
    EXPECT_EQ(min_window_sqdist(s, 2, t, 4), 0.0);
  } else {
    EXPECT_THROW(set_isa(Isa::kAvx2), std::exception);
  }
  set_isa(before);
}

}  // namespace
}  // namespace fedst::kernels
