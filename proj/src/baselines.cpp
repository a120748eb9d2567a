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

#include "cogroute/baselines.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <string>
#include <tuple>

#include "cogroute/errors.hpp"

namespace cogroute {

std::size_t WeightedGraph::index_of(NodeId id) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), id);
  if (it == vertices.end() || *it != id) throw Error("node " + std::to_string(id) + " not in graph");
  return static_cast<std::size_t>(it - vertices.begin());
}

std::size_t WeightedGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& a : adjacency) n += a.size();
  return n / 2;
}

WeightedGraph make_graph(std::span<const Node> nodes, double range) {
  std::vector<Node> sorted(nodes.begin(), nodes.end());
  std::sort(sorted.begin(), sorted.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  WeightedGraph g;
  for (const Node& n : sorted) {
    g.vertices.push_back(n.id);
    g.positions.push_back(n.pos);
  }
  g.adjacency.resize(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      const double d = distance(sorted[i].pos, sorted[j].pos);
      if (d > range) continue;
      const double w = std::max(d, 1e-12);
      g.adjacency[i].emplace_back(j, w);
      g.adjacency[j].emplace_back(i, w);
    }
  return g;
}

WeightedGraph make_graph(const Scenario& sc) {
  std::vector<Node> all = sc.nodes.su_nodes();
  all.insert(all.end(), sc.nodes.cpc_stations.begin(), sc.nodes.cpc_stations.end());
  return make_graph(all, sc.radio.interference_range);
}

RoutePath dijkstra_route(const WeightedGraph& g, NodeId source, std::span<const NodeId> dests) {
  const std::size_t n = g.vertices.size();
  const std::size_t src = g.index_of(source);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<double> dist(n, kInf);
  std::vector<std::size_t> pred(n, kNone);
  std::vector<bool> done(n, false);
  using Item = std::pair<double, std::size_t>;  // vertex index order == id order
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[src] = 0.0;
  heap.emplace(0.0, src);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = true;
    for (auto [v, w] : g.adjacency[u]) {
      if (done[v]) continue;
      const double nd = d + w;
      if (nd < dist[v] || (nd == dist[v] && u < pred[v])) {
        dist[v] = nd;
        pred[v] = u;
        heap.emplace(nd, v);
      }
    }
  }
  std::size_t best = kNone;
  for (NodeId c : dests) {
    const std::size_t k = g.index_of(c);
    if (dist[k] == kInf) continue;
    if (best == kNone || dist[k] < dist[best] || (dist[k] == dist[best] && k < best)) best = k;
  }
  if (best == kNone)
    throw UnreachableError("no CPC reachable from node " + std::to_string(source));
  RoutePath path;
  for (std::size_t k = best; k != kNone; k = pred[k]) path.nodes.push_back(g.vertices[k]);
  std::reverse(path.nodes.begin(), path.nodes.end());
  return path;
}

std::vector<NodeId> axis_chain(const MedialAxis& axis, std::span<const Node> relays) {
  if (axis.empty()) throw UnreachableError("empty medial axis");
  if (relays.empty()) return {};
  std::vector<NodeId> picked;
  for (const Point& p : axis.points) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < relays.size(); ++k) {
      const double d = distance(p, relays[k].pos);
      if (d < bd || (d == bd && relays[k].id < relays[best].id)) {
        bd = d;
        best = k;
      }
    }
    picked.push_back(relays[best].id);
  }
  std::sort(picked.begin(), picked.end());
  picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
  std::vector<std::tuple<double, NodeId>> keyed;
  for (NodeId id : picked) {
    const auto it = std::find_if(relays.begin(), relays.end(),
                                 [&](const Node& n) { return n.id == id; });
    keyed.emplace_back(axis.arc_length[axis.nearest(it->pos).first], id);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<NodeId> chain;
  for (const auto& [arc, id] : keyed) chain.push_back(id);
  return chain;
}

RoutePath ma_route(const MedialAxis& axis, const Scenario& sc, NodeId source,
                   std::span<const NodeId> dests) {
  if (dests.empty()) throw UnreachableError("no CPC station");
  const std::vector<NodeId> chain = axis_chain(axis, sc.nodes.relays);
  RoutePath path;
  path.nodes.push_back(source);
  if (chain.empty()) {
    throw UnreachableError("no relay along the medial axis");
  }
  auto nearest_in_chain = [&](Point p) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < chain.size(); ++k) {
      const double d = distance(p, sc.position(chain[k]));
      if (d < bd) {
        bd = d;
        best = k;
      }
    }
    return best;
  };
  const std::size_t entry = nearest_in_chain(sc.position(source));
  std::vector<NodeId> sorted_dests(dests.begin(), dests.end());
  std::sort(sorted_dests.begin(), sorted_dests.end());
  std::size_t exit = 0;
  NodeId cpc = -1;
  bool ahead = false;
  std::size_t last_exit = 0;
  NodeId last_cpc = sorted_dests.front();
  for (NodeId c : sorted_dests) {
    const std::size_t e = nearest_in_chain(sc.position(c));
    if (e >= entry && (!ahead || e < exit)) {
      ahead = true;
      exit = e;
      cpc = c;
    }
    if (e > last_exit) {
      last_exit = e;
      last_cpc = c;
    }
  }
  if (ahead) {
    for (std::size_t k = entry; k <= exit; ++k)
      if (chain[k] != source) path.nodes.push_back(chain[k]);
  } else {
    if (chain[entry] != source) path.nodes.push_back(chain[entry]);
    cpc = last_cpc;
  }
  path.nodes.push_back(cpc);
  return path;
}

}  // namespace cogroute
