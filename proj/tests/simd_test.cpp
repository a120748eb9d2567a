// Copyright 2026 The cogroute Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cogroute/simd/kernels.hpp"

namespace cogroute::simd {
namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

class Avx2Test : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!isa_supported(Isa::kAvx2)) GTEST_SKIP() << "no AVX2 on this build or CPU";
  }
};

TEST_F(Avx2Test, AxpyBitIdentical) {
  std::mt19937_64 rng(1);
  for (std::size_t n : {0, 1, 3, 4, 5, 17, 64, 1001}) {
    const auto x = random_vec(rng, n, -10, 10);
    auto y1 = random_vec(rng, n, -10, 10);
    auto y2 = y1;
    scalar::axpy(0.37, x.data(), y1.data(), n);
    avx2::axpy(0.37, x.data(), y2.data(), n);
    EXPECT_EQ(y1, y2) << n;
  }
}

TEST_F(Avx2Test, NearestPointBitIdentical) {
  std::mt19937_64 rng(2);
  for (std::size_t n : {1, 2, 3, 4, 7, 8, 9, 100, 513}) {
    const auto xs = random_vec(rng, n, -1, 1);
    const auto ys = random_vec(rng, n, -1, 1);
    for (int q = 0; q < 20; ++q) {
      const double qx = xs[q % n] + (q % 3 == 0 ? 0.0 : 0.01 * q), qy = ys[q % n];
      const Nearest a = scalar::nearest_point(xs.data(), ys.data(), n, qx, qy);
      const Nearest b = avx2::nearest_point(xs.data(), ys.data(), n, qx, qy);
      EXPECT_EQ(a.index, b.index);
      EXPECT_EQ(a.squared_distance, b.squared_distance);
    }
  }
}

TEST_F(Avx2Test, NearestPointTiesGoToLowestIndex) {
  const std::vector<double> xs{1, 0, 1, 0, 1, 0, 1, 0, 1};
  const std::vector<double> ys(9, 0.0);
  EXPECT_EQ(avx2::nearest_point(xs.data(), ys.data(), 9, 0.0, 0.0).index, 1u);
  EXPECT_EQ(avx2::nearest_point(xs.data(), ys.data(), 9, 1.0, 0.0).index, 0u);
}

TEST_F(Avx2Test, ExpectedDelayAgreesToRounding) {
  std::mt19937_64 rng(3);
  for (std::size_t n : {1, 3, 4, 5, 33, 1000}) {
    const auto load = random_vec(rng, n, 0.0, 12.0);  // some past saturation
    auto prob = random_vec(rng, n, 0.0, 1.0);
    double sum = 0;
    for (double p : prob) sum += p;
    for (double& p : prob) p /= sum;
    const double a = scalar::expected_delay(load.data(), prob.data(), n, 0.1, 0.015, 1e4);
    const double b = avx2::expected_delay(load.data(), prob.data(), n, 0.1, 0.015, 1e4);
    EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a))) << n;
  }
}

TEST(Dispatch, ScalarAlwaysAvailableAndForceable) {
  EXPECT_TRUE(isa_supported(Isa::kScalar));
  const Isa before = active_isa();
  EXPECT_TRUE(force_isa(Isa::kScalar));
  EXPECT_EQ(active_isa(), Isa::kScalar);
  const std::vector<double> x{1, 2, 3};
  std::vector<double> y{1, 1, 1};
  axpy(2.0, x, y);
  EXPECT_EQ(y, (std::vector<double>{3, 5, 7}));
  force_isa(before);
  EXPECT_EQ(isa_name(Isa::kScalar), "scalar");
}

TEST(Dispatch, ExpectedDelayMatchesFormula) {
  // load 0.5, X 1, X2 2 -> 2; load 2 saturates at the cap.
  const std::vector<double> load{0.5, 2.0};
  const std::vector<double> prob{0.75, 0.25};
  EXPECT_NEAR(expected_delay(load, prob, 1.0, 2.0, 100.0), 0.75 * 2.0 + 0.25 * 100.0, 1e-12);
}

}  // namespace
}  // namespace cogroute::simd
