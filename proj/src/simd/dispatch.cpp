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

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "cogroute/simd/kernels.hpp"

namespace cogroute::simd {
namespace {

bool cpu_has_avx2() {
#if defined(COGROUTE_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa initial_isa() {
  if (const char* env = std::getenv("COGROUTE_ISA"); env && std::strcmp(env, "scalar") == 0) {
    return Isa::kScalar;
  }
  return cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

Isa active_isa() { return selected().load(std::memory_order_relaxed); }

bool isa_supported(Isa isa) { return isa == Isa::kScalar || cpu_has_avx2(); }

bool force_isa(Isa isa) {
  if (!isa_supported(isa)) return false;
  selected().store(isa, std::memory_order_relaxed);
  return true;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
#if defined(COGROUTE_WITH_AVX2)
  if (active_isa() == Isa::kAvx2) return avx2::axpy(a, x.data(), y.data(), x.size());
#endif
  scalar::axpy(a, x.data(), y.data(), x.size());
}

Nearest nearest_point(std::span<const double> xs, std::span<const double> ys, double qx,
                      double qy) {
#if defined(COGROUTE_WITH_AVX2)
  if (active_isa() == Isa::kAvx2) return avx2::nearest_point(xs.data(), ys.data(), xs.size(), qx, qy);
#endif
  return scalar::nearest_point(xs.data(), ys.data(), xs.size(), qx, qy);
}

double expected_delay(std::span<const double> load, std::span<const double> prob,
                      double mean_service, double second_moment, double cap) {
#if defined(COGROUTE_WITH_AVX2)
  if (active_isa() == Isa::kAvx2) {
    return avx2::expected_delay(load.data(), prob.data(), load.size(), mean_service,
                                second_moment, cap);
  }
#endif
  return scalar::expected_delay(load.data(), prob.data(), load.size(), mean_service,
                                second_moment, cap);
}

}  // namespace cogroute::simd
