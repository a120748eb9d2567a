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

#ifndef COGROUTE_BASELINES_HPP_
#define COGROUTE_BASELINES_HPP_

#include <span>
#include <utility>
#include <vector>

#include "cogroute/geometry.hpp"
#include "cogroute/route.hpp"
#include "cogroute/scenario.hpp"

namespace cogroute {

// Undirected unit-disk graph with Euclidean edge weights.
struct WeightedGraph {
  std::vector<NodeId> vertices;  // sorted
  std::vector<Point> positions;
  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency;

  std::size_t index_of(NodeId id) const;  // throws Error for unknown ids
  std::size_t edge_count() const;
};

// Edges join vertices at distance <= range; coincident points get a tiny
// positive weight.
WeightedGraph make_graph(std::span<const Node> nodes, double range);

// Every SU node and CPC station of the scenario. State-blind: no node is
// excluded for PU activity.
WeightedGraph make_graph(const Scenario& scenario);

// Shortest path to the closest destination by path weight. Equal distances
// are resolved toward the lower predecessor id, then the lower destination
// id. Throws UnreachableError.
RoutePath dijkstra_route(const WeightedGraph& graph, NodeId source, std::span<const NodeId> dests);

// Relays nearest to each axis point, deduplicated and ordered by
// the arc length of their own projection onto the axis, ties by id.
std::vector<NodeId> axis_chain(const MedialAxis& axis, std::span<const Node> relays);

// Source -> nearest chain node -> forward along the chain -> CPC. The exit
// is the first chain node, at or after the entry, that is the chain node
// nearest to some CPC; that CPC ends the route. If every such exit lies
// behind the entry, the entry hands over directly to the CPC with the last
// exit. Radio range is not enforced. Throws UnreachableError.
RoutePath ma_route(const MedialAxis& axis, const Scenario& scenario, NodeId source,
                   std::span<const NodeId> dests);

}  // namespace cogroute

#endif  // COGROUTE_BASELINES_HPP_
