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

#ifndef COGROUTE_METRICS_HPP_
#define COGROUTE_METRICS_HPP_

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cogroute/route.hpp"
#include "cogroute/scenario.hpp"

namespace cogroute {

enum class Algorithm { kGame, kDijkstra, kMa };
inline constexpr std::array<Algorithm, 3> kAlgorithms{Algorithm::kGame, Algorithm::kDijkstra,
                                                      Algorithm::kMa};
std::string_view algorithm_name(Algorithm a);

// Interference received by each PU from the transmitting nodes of a route
// (every node but the last): sum of tx * max(d, d_min)^-alpha over
// transmitters within footprint_radius + interference_range of the PU,
// scaled by weight[k] (pass an empty span for unit weights).
std::vector<double> route_interference(std::span<const Point> route_points,
                                       std::span<const PrimaryUser> pus, const RadioParams& radio,
                                       double d_min, std::span<const double> weight = {});

// Positions of the route's nodes.
std::vector<Point> route_points(const Scenario& scenario, const RoutePath& route);

// Fills hop_delay of every route with the saturated M/G/1 delay at each
// receiving node, where a node's load is its external rate plus the source
// rate of every route in `routes` that it receives. Returns the end-to-end
// delay of each route.
std::vector<double> evaluate_route_delays(const Scenario& scenario, std::vector<RoutePath>& routes);

struct RouteSample {
  std::uint64_t seed = 0;  // deployment seed
  int draw = 0;            // index within the ensemble
  Algorithm algorithm = Algorithm::kGame;
  NodeId source = 0;
  double distance = 0.0;      // straight line to the nearest CPC, km
  double interference = 0.0;  // W, summed over PUs
  double delay = 0.0;         // s
  std::vector<Point> points;
};

struct BinnedCurve {
  std::vector<double> center;  // km
  std::vector<double> mean;    // normalized; NaN for an empty bin
  std::vector<double> median;
  std::vector<int> count;
};

struct CompareReport {
  static constexpr int kBins = 10;
  std::vector<RouteSample> samples;  // draw order, then algorithm, then source
  double interference_max = 0.0;
  double delay_max = 0.0;
  std::vector<double> edges;  // kBins + 1
  std::array<BinnedCurve, 3> interference;  // indexed like kAlgorithms
  std::array<BinnedCurve, 3> delay;
  int redrawn = 0;  // draws replaced because some algorithm found no route
};

// Runs the three algorithms on n_seeds deployments of the configuration
// document. Draw k uses seed derive_seed(base_seed, k) and places its sources
// in stratum k of n_seeds; one PU state per draw is sampled from the
// stationary law. Interference is weighted by each PU's stationary
// occupancy. Metrics are normalized by the maximum over all samples and
// binned in 10 equal-width distance bins. Draws run on `threads` threads and
// merge in draw order.
CompareReport ensemble_compare(std::string_view config_document, std::uint64_t base_seed,
                               int n_seeds, int threads = 1);

// algorithm,bin_center_km,normalized_mean,normalized_median,n
void write_interference_csv(std::ostream& out, const CompareReport& report);
void write_delay_csv(std::ostream& out, const CompareReport& report);
// seed,algorithm,source,hop_index,x,y
void write_routes_csv(std::ostream& out, const CompareReport& report);

double median(std::vector<double> values);

}  // namespace cogroute

#endif  // COGROUTE_METRICS_HPP_
