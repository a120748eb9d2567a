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

#ifndef COGROUTE_GEOMETRY_HPP_
#define COGROUTE_GEOMETRY_HPP_

#include <map>
#include <ostream>
#include <span>
#include <vector>

#include "cogroute/scenario.hpp"

namespace cogroute {

// Reference path between PU footprints, ordered from the source side to the
// CPC side.
struct MedialAxis {
  std::vector<Point> points;
  // Perceived PU power (strongest emitter) at each point, W.
  std::vector<double> received_power;
  // Distance from each point to the nearest PU footprint edge, km.
  std::vector<double> clearance;
  // Cumulative polyline length, km; arc_length[0] == 0.
  std::vector<double> arc_length;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
  double length() const { return arc_length.empty() ? 0.0 : arc_length.back(); }
  // Index of the nearest axis point (lowest index on ties) and its distance.
  std::pair<std::size_t, double> nearest(Point p) const;

 private:
  friend MedialAxis make_axis(std::vector<Point>, std::vector<double>, std::vector<double>);
  std::vector<double> xs_;
  std::vector<double> ys_;
};

// Builds an axis from ordered points; fills arc_length and the kernel arrays.
MedialAxis make_axis(std::vector<Point> points, std::vector<double> received_power,
                     std::vector<double> clearance);

// Unit vector from the source side to the CPC side.
Point sweep_direction(const Scenario& scenario);

// Power perceived at p: max over emitters of tx * max(edge distance, res)^-alpha.
// Emitters are the PU footprints (distance measured from the footprint edge)
// and, when there is a single PU, the region boundary with that PU's power.
double perceived_power(const Scenario& scenario, Point p);

// Distance from p to the nearest PU footprint edge (negative inside).
double footprint_clearance(std::span<const PrimaryUser> pus, Point p);

// Grid ridge extraction: every cross section perpendicular to the sweep
// direction contributes the lowest local minimum of perceived power at which
// the dominant emitter changes. Throws NoAxisError.
MedialAxis compute_medial_axis(const Scenario& scenario);

struct Corridor {
  MedialAxis axis;
  double omega = 0.7;
  // Admissible radius (1 + omega) * clearance per axis point.
  std::vector<double> radius;
  // Sorted member ids (sources and relays).
  std::vector<NodeId> members;

  bool contains(NodeId id) const;
};

// Node n is a member iff it is outside every footprint and its distance to
// the nearest axis point p is at most (1 + omega) * clearance(p).
std::vector<NodeId> corridor_members(const MedialAxis& axis, const NodeSet& nodes,
                                     std::span<const PrimaryUser> pus, double omega);

Corridor make_corridor(const Scenario& scenario, MedialAxis axis, double omega);

// Level partition at one PU state. Levels are 1-based in level_of and
// candidates; levels[l - 1] holds the level-l nodes sorted by id.
struct StateHierarchy {
  std::vector<std::vector<NodeId>> levels;
  std::map<NodeId, int> level_of;
  std::map<NodeId, std::vector<NodeId>> candidates;

  std::size_t admitted_count() const { return level_of.size(); }
};

struct HierarchyAssignment {
  int level_count = 0;
  double band_origin = 0.0;  // arc length where band 1 starts
  double band_width = 0.0;
  std::vector<NodeId> cpcs;
  std::map<NodeId, int> band_of;  // sources and corridor nodes not behind them
  std::vector<StateHierarchy> per_state;
};

// Band geometry shared by every state: origin at the sources' projection,
// end at the CPCs' projection, level_count equal-width bands.
HierarchyAssignment assign_bands(const Scenario& scenario, const Corridor& corridor);

// Partition at `state`: sources in level 1, corridor nodes in their bands,
// relays covered by the footprint of an occupied nearest PU dropped, then
// relays without next-level candidates pruned from the top level down.
// Throws UnreachableError when a source has no candidate.
StateHierarchy assign_levels(const Scenario& scenario, const Corridor& corridor,
                             const HierarchyAssignment& bands, const StateModel& states,
                             StateIndex state);

// assign_bands plus assign_levels for every state.
HierarchyAssignment assign_all_levels(const Scenario& scenario, const Corridor& corridor,
                                      const StateModel& states);

// x,y,level rows for the axis points (level of the band each point falls in).
void write_axis_csv(std::ostream& out, const MedialAxis& axis, const HierarchyAssignment& bands);

}  // namespace cogroute

#endif  // COGROUTE_GEOMETRY_HPP_
