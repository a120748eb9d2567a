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

#ifndef COGROUTE_SIMD_KERNELS_HPP_
#define COGROUTE_SIMD_KERNELS_HPP_

// Data-parallel inner loops. Every kernel has a scalar reference in
// cogroute::simd::scalar and, on x86-64 builds, an AVX2 variant in
// cogroute::simd::avx2. The free functions in cogroute::simd dispatch to the
// best variant the running CPU supports.
//
// axpy and nearest_point are bit-identical across variants. expected_delay
// reorders its reduction, so variants agree to rounding only.

#include <cstddef>
#include <span>
#include <string_view>

namespace cogroute::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

// ISA chosen at first use: the best supported one, unless the environment
// variable COGROUTE_ISA=scalar asks for the reference path.
Isa active_isa();

// Overrides dispatch (tests and benchmarking). Returns false and leaves the
// selection unchanged when the CPU or build lacks the requested ISA.
bool force_isa(Isa isa);

bool isa_supported(Isa isa);

struct Nearest {
  std::size_t index = 0;
  double squared_distance = 0.0;
};

// y <- y + a * x. Sizes must match.
void axpy(double a, std::span<const double> x, std::span<double> y);

// Nearest of the points (xs[i], ys[i]) to (qx, qy); lowest index wins ties.
// Requires a nonempty input.
Nearest nearest_point(std::span<const double> xs, std::span<const double> ys,
                      double qx, double qy);

// Sum over k of prob[k] * min(cap, W(load[k])) where W is the M/G/1 sojourn
// time load*second_moment / (2(1 - load*mean_service)) + mean_service, and
// W = cap whenever load*mean_service >= 1.
double expected_delay(std::span<const double> load, std::span<const double> prob,
                      double mean_service, double second_moment, double cap);

namespace scalar {
void axpy(double a, const double* x, double* y, std::size_t n);
Nearest nearest_point(const double* xs, const double* ys, std::size_t n, double qx,
                      double qy);
double expected_delay(const double* load, const double* prob, std::size_t n,
                      double mean_service, double second_moment, double cap);
}  // namespace scalar

namespace avx2 {
void axpy(double a, const double* x, double* y, std::size_t n);
Nearest nearest_point(const double* xs, const double* ys, std::size_t n, double qx,
                      double qy);
double expected_delay(const double* load, const double* prob, std::size_t n,
                      double mean_service, double second_moment, double cap);
}  // namespace avx2

}  // namespace cogroute::simd

#endif  // COGROUTE_SIMD_KERNELS_HPP_
