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

#include "cogroute/simd/kernels.hpp"

namespace cogroute::simd::scalar {

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ax = a * x[i];
    y[i] = y[i] + ax;
  }
}

Nearest nearest_point(const double* xs, const double* ys, std::size_t n, double qx,
                      double qy) {
  Nearest best{0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    const double dx2 = dx * dx;
    const double dy2 = dy * dy;
    const double d2 = dx2 + dy2;
    if (i == 0 || d2 < best.squared_distance) best = {i, d2};
  }
  return best;
}

double expected_delay(const double* load, const double* prob, std::size_t n,
                      double mean_service, double second_moment, double cap) {
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double rho = load[k] * mean_service;
    double w = cap;
    if (rho < 1.0) {
      const double wait = (load[k] * second_moment) / (2.0 * (1.0 - rho));
      w = wait + mean_service;
      if (w > cap) w = cap;
    }
    sum += prob[k] * w;
  }
  return sum;
}

}  // namespace cogroute::simd::scalar
