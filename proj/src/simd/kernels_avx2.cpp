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

#include <immintrin.h>

#include <limits>

#include "cogroute/simd/kernels.hpp"

namespace cogroute::simd::avx2 {

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ax = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), ax));
  }
  scalar::axpy(a, x + i, y + i, n - i);
}

Nearest nearest_point(const double* xs, const double* ys, std::size_t n, double qx,
                      double qy) {
  if (n < 8) return scalar::nearest_point(xs, ys, n, qx, qy);

  const __m256d vqx = _mm256_set1_pd(qx);
  const __m256d vqy = _mm256_set1_pd(qy);
  __m256d best_d2 = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256d best_idx = _mm256_setzero_pd();
  __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  const __m256d step = _mm256_set1_pd(4.0);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vqx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vqy);
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    // Strict less keeps the earliest index within each lane.
    const __m256d better = _mm256_cmp_pd(d2, best_d2, _CMP_LT_OQ);
    best_d2 = _mm256_blendv_pd(best_d2, d2, better);
    best_idx = _mm256_blendv_pd(best_idx, idx, better);
    idx = _mm256_add_pd(idx, step);
  }

  alignas(32) double lane_d2[4];
  alignas(32) double lane_idx[4];
  _mm256_store_pd(lane_d2, best_d2);
  _mm256_store_pd(lane_idx, best_idx);
  Nearest best{static_cast<std::size_t>(lane_idx[0]), lane_d2[0]};
  for (int l = 1; l < 4; ++l) {
    const auto li = static_cast<std::size_t>(lane_idx[l]);
    if (lane_d2[l] < best.squared_distance ||
        (lane_d2[l] == best.squared_distance && li < best.index)) {
      best = {li, lane_d2[l]};
    }
  }
  for (; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    const double dx2 = dx * dx;
    const double dy2 = dy * dy;
    const double d2 = dx2 + dy2;
    if (d2 < best.squared_distance) best = {i, d2};
  }
  return best;
}

double expected_delay(const double* load, const double* prob, std::size_t n,
                      double mean_service, double second_moment, double cap) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d xbar = _mm256_set1_pd(mean_service);
  const __m256d x2 = _mm256_set1_pd(second_moment);
  const __m256d vcap = _mm256_set1_pd(cap);
  __m256d acc = _mm256_setzero_pd();

  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d lam = _mm256_loadu_pd(load + k);
    const __m256d rho = _mm256_mul_pd(lam, xbar);
    const __m256d stable = _mm256_cmp_pd(rho, one, _CMP_LT_OQ);
    const __m256d denom = _mm256_mul_pd(two, _mm256_sub_pd(one, rho));
    // Unstable lanes divide by a nonpositive number; the blend discards them.
    const __m256d wait = _mm256_div_pd(_mm256_mul_pd(lam, x2), denom);
    __m256d w = _mm256_min_pd(_mm256_add_pd(wait, xbar), vcap);
    w = _mm256_blendv_pd(vcap, w, stable);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(prob + k), w));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  const double head = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  return head +
         scalar::expected_delay(load + k, prob + k, n - k, mean_service, second_moment, cap);
}

}  // namespace cogroute::simd::avx2
