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

#ifndef COGROUTE_SCENARIO_HPP_
#define COGROUTE_SCENARIO_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cogroute/matrix.hpp"

namespace cogroute {

using NodeId = int;
using StateIndex = std::size_t;

// Planar position in km.
struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Axis-aligned rectangle in km.
struct Region {
  double x_min = -1.0;
  double x_max = 1.0;
  double y_min = -1.0;
  double y_max = 1.0;

  bool contains(Point p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  // Distance from an interior point to the nearest edge.
  double boundary_distance(Point p) const {
    return std::min(std::min(p.x - x_min, x_max - p.x), std::min(p.y - y_min, y_max - p.y));
  }
  bool operator==(const Region&) const = default;
};

struct PrimaryUser {
  int id = 0;
  Point center;
  double footprint_radius = 0.0;  // km
  double tx_power = 1.0;          // W
  std::vector<std::string> channel_states{"unoccupied", "occupied"};
  Matrix transition;  // row-stochastic over channel_states

  std::size_t occupied_state() const;
  bool covers(Point p) const { return distance(p, center) < footprint_radius; }
  bool operator==(const PrimaryUser&) const = default;
};

struct Node {
  NodeId id = 0;
  Point pos;
  bool operator==(const Node&) const = default;
};

struct NodeSet {
  std::vector<Node> sources;
  std::vector<Node> relays;
  std::vector<Node> cpc_stations;

  // Sources followed by relays.
  std::vector<Node> su_nodes() const;
  std::optional<Node> find(NodeId id) const;
  bool is_cpc(NodeId id) const;
  bool is_source(NodeId id) const;
  bool operator==(const NodeSet&) const = default;
};

struct QueueParams {
  double arrival_rate = 0.0;           // packets/s (external arrivals)
  double mean_service = 1.0;           // s
  double second_moment_service = 1.0;  // s^2

  double utilization() const { return arrival_rate * mean_service; }
  bool operator==(const QueueParams&) const = default;
};

struct RadioParams {
  double tx_power = 1.0;             // W
  double path_loss_alpha = 2.5;
  double interference_range = 0.15;  // km; also the SU radio range
  bool operator==(const RadioParams&) const = default;
};

struct FpOptions {
  int max_iters = 2000;
  double stop_tol = 1e-3;
  int window = 20;
  bool operator==(const FpOptions&) const = default;
};

struct GameParams {
  double beta = 0.9;
  double omega = 0.7;
  double grid_resolution = 0.02;  // km
  int level_count = 0;            // 0: ceil(axis span / interference_range)
  double delay_cap = 1e4;         // s
  int flow_passes = 2;
  FpOptions fp;
  // Direction from the source side to the CPC side used to sweep the
  // medial-axis cross sections. Unset: CPC centroid minus source centroid.
  std::optional<Point> sweep;
  bool operator==(const GameParams&) const = default;
};

struct Scenario {
  Region region;
  std::vector<PrimaryUser> pus;
  NodeSet nodes;
  std::map<NodeId, QueueParams> queueing;
  RadioParams radio;
  GameParams game;
  std::uint64_t seed = 0;

  const QueueParams& queue(NodeId id) const;
  Point position(NodeId id) const;
  bool operator==(const Scenario&) const = default;
};

// Selects one random instance of a configuration document.
struct DeploymentDraw {
  std::uint64_t seed = 0;
  // Sources drawn along the configured segment fall into stratum
  // `stratum` of `strata` equal slices.
  int stratum = 0;
  int strata = 1;
};

// Parses and validates a JSON configuration document. Random sections
// (random_relays, random_sources, queueing.random) are expanded with the
// document seed. Throws ParseError or ValidationError.
Scenario load_scenario(std::string_view config_document);
Scenario load_scenario(std::string_view config_document, const DeploymentDraw& draw);

// Canonical serialization of a document: sorted keys, two-space indent,
// shortest round-trip doubles, trailing newline.
std::string canonical_config(std::string_view config_document);

// Seed stored in a document (without expanding it).
std::uint64_t config_seed(std::string_view config_document);

// Explicit canonical document for a scenario (no random sections);
// load_scenario(save_scenario(s)) == s.
std::string save_scenario(const Scenario& scenario);

std::uint64_t scenario_hash(const Scenario& scenario);

// Throws ValidationError naming the first violated invariant.
void validate(const Scenario& scenario);

std::string read_text_file(const std::string& path);

// n points i.i.d. uniform over the region, ids id_start, id_start+1, ...
std::vector<Node> generate_deployment(const Region& region, int n_relays, std::uint64_t seed,
                                      NodeId id_start = 0);

// Product chain over the PU channel states, PU 0 most significant.
struct StateModel {
  std::vector<std::size_t> radices;
  std::vector<std::size_t> occupied_index;
  Matrix transition;
  std::vector<double> stationary;

  std::size_t num_states() const { return transition.rows(); }
  std::vector<std::size_t> decode(StateIndex s) const;
  bool occupied(StateIndex s, std::size_t pu) const;
  // Stationary probability that PU `pu` is occupied.
  double occupancy_probability(std::size_t pu) const;
};

// Kronecker product of the per-PU chains and its stationary law. Throws ReducibleChainError when
// the product chain has more than one closed class.
StateModel build_state_model(std::span<const PrimaryUser> pus);

// Stationary law of a row-stochastic matrix. Direct linear solve, falling back
// to lazy power iteration when the solve is singular or its residual exceeds tol.
std::vector<double> stationary_distribution(const Matrix& p, double tol = 1e-12,
                                            long max_iters = 1'000'000);

// Number of closed communicating classes of the chain graph.
std::size_t closed_class_count(const Matrix& p);

}  // namespace cogroute

#endif  // COGROUTE_SCENARIO_HPP_
