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

#include "cogroute/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "cogroute/errors.hpp"
#include "cogroute/simd/kernels.hpp"

namespace cogroute {
namespace {

constexpr double kTieRel = 1e-12;

struct Emission {
  double power;
  int emitter;  // PU index, or -1 for the region boundary
};

Emission dominant_emission(const Scenario& sc, Point p) {
  const double res = sc.game.grid_resolution;
  const double alpha = sc.radio.path_loss_alpha;
  Emission best{-1.0, -2};
  for (std::size_t k = 0; k < sc.pus.size(); ++k) {
    const PrimaryUser& pu = sc.pus[k];
    const double edge = std::max(distance(p, pu.center) - pu.footprint_radius, res);
    const double pw = pu.tx_power * std::pow(edge, -alpha);
    if (pw > best.power) best = {pw, static_cast<int>(k)};
  }
  if (sc.pus.size() == 1) {
    const double edge = std::max(sc.region.boundary_distance(p), res);
    const double pw = sc.pus.front().tx_power * std::pow(edge, -alpha);
    if (pw > best.power) best = {pw, -1};
  }
  return best;
}

bool inside_footprint(std::span<const PrimaryUser> pus, Point p) {
  return std::any_of(pus.begin(), pus.end(), [&](const PrimaryUser& pu) { return pu.covers(p); });
}

struct RowSample {
  Point p;
  Emission e;
};

}  // namespace

std::pair<std::size_t, double> MedialAxis::nearest(Point p) const {
  if (points.empty()) throw NoAxisError("empty medial axis");
  const auto n = simd::nearest_point(xs_, ys_, p.x, p.y);
  return {n.index, std::sqrt(n.squared_distance)};
}

MedialAxis make_axis(std::vector<Point> points, std::vector<double> received_power,
                     std::vector<double> clearance) {
  MedialAxis a;
  a.points = std::move(points);
  a.received_power = std::move(received_power);
  a.clearance = std::move(clearance);
  a.arc_length.resize(a.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    a.arc_length[i] = i == 0 ? 0.0 : a.arc_length[i - 1] + distance(a.points[i - 1], a.points[i]);
    a.xs_.push_back(a.points[i].x);
    a.ys_.push_back(a.points[i].y);
  }
  return a;
}

Point sweep_direction(const Scenario& sc) {
  Point d{0.0, 1.0};
  if (sc.game.sweep) {
    d = *sc.game.sweep;
  } else if (!sc.nodes.sources.empty() && !sc.nodes.cpc_stations.empty()) {
    Point s, c;
    for (const auto& n : sc.nodes.sources) s = {s.x + n.pos.x, s.y + n.pos.y};
    for (const auto& n : sc.nodes.cpc_stations) c = {c.x + n.pos.x, c.y + n.pos.y};
    const double ns = static_cast<double>(sc.nodes.sources.size());
    const double nc = static_cast<double>(sc.nodes.cpc_stations.size());
    const Point diff{c.x / nc - s.x / ns, c.y / nc - s.y / ns};
    if (std::hypot(diff.x, diff.y) > 1e-12) d = diff;
  }
  const double len = std::hypot(d.x, d.y);
  return {d.x / len, d.y / len};
}

double perceived_power(const Scenario& sc, Point p) { return dominant_emission(sc, p).power; }

double footprint_clearance(std::span<const PrimaryUser> pus, Point p) {
  double c = std::numeric_limits<double>::infinity();
  for (const auto& pu : pus) c = std::min(c, distance(p, pu.center) - pu.footprint_radius);
  return c;
}

MedialAxis compute_medial_axis(const Scenario& sc) {
  if (sc.pus.empty()) throw NoAxisError("medial axis needs at least one PU");
  const double res = sc.game.grid_resolution;
  const Point u = sweep_direction(sc);
  const Point w{-u.y, u.x};
  const Region& r = sc.region;
  const Point corners[4] = {{r.x_min, r.y_min}, {r.x_min, r.y_max}, {r.x_max, r.y_min}, {r.x_max, r.y_max}};
  double t_lo = std::numeric_limits<double>::infinity(), t_hi = -t_lo;
  double s_lo = t_lo, s_hi = -t_lo;
  for (const Point& c : corners) {
    const double t = c.x * u.x + c.y * u.y;
    const double s = c.x * w.x + c.y * w.y;
    t_lo = std::min(t_lo, t);
    t_hi = std::max(t_hi, t);
    s_lo = std::min(s_lo, s);
    s_hi = std::max(s_hi, s);
  }
  const auto rows = static_cast<long>(std::floor((t_hi - t_lo) / res + 1e-9));
  const auto cols = static_cast<long>(std::floor((s_hi - s_lo) / res + 1e-9));
  const double eps = 1e-9 * std::max(r.x_max - r.x_min, r.y_max - r.y_min);
  const Region grown{r.x_min - eps, r.x_max + eps, r.y_min - eps, r.y_max + eps};

  std::vector<Point> pts;
  std::vector<double> power;
  std::vector<RowSample> row;
  for (long i = 0; i <= rows; ++i) {
    const double t = t_lo + static_cast<double>(i) * res;
    row.clear();
    for (long j = 0; j <= cols; ++j) {
      const double s = s_lo + static_cast<double>(j) * res;
      const Point p{t * u.x + s * w.x, t * u.y + s * w.y};
      if (!grown.contains(p)) continue;
      row.push_back({p, dominant_emission(sc, p)});
    }

    // Local minima along the row, kept only where the dominant emitter
    // switches across the minimum. A plateau collapses to the end where the
    // switch happens, or to its middle when both ends switch.
    std::size_t chosen = row.size();
    for (std::size_t a = 1; a + 1 < row.size();) {
      std::size_t b = a;
      while (b + 1 < row.size() && row[b + 1].e.power == row[a].e.power) ++b;
      const bool lower_left = row[a - 1].e.power > row[a].e.power;
      const bool lower_right = b + 1 < row.size() && row[b + 1].e.power > row[b].e.power;
      if (lower_left && lower_right) {
        const bool left_switch = row[a - 1].e.emitter != row[a].e.emitter;
        const bool right_switch = row[b + 1].e.emitter != row[b].e.emitter;
        std::size_t m = (a + b) / 2;
        if (left_switch != right_switch) m = left_switch ? a : b;
        const bool switches = left_switch || right_switch || row[a - 1].e.emitter != row[b + 1].e.emitter;
        if (switches && !inside_footprint(sc.pus, row[m].p)) {
          if (chosen == row.size()) {
            chosen = m;
          } else {
            const double pc = row[chosen].e.power, pm = row[m].e.power;
            if (pm < pc * (1.0 - kTieRel)) {
              chosen = m;
            } else if (pm <= pc * (1.0 + kTieRel) && !pts.empty() &&
                       distance(row[m].p, pts.back()) < distance(row[chosen].p, pts.back())) {
              chosen = m;
            }
          }
        }
      }
      a = b + 1;
    }
    if (chosen == row.size()) continue;
    if (!pts.empty() && pts.back() == row[chosen].p) continue;
    pts.push_back(row[chosen].p);
    power.push_back(row[chosen].e.power);
  }
  if (pts.empty()) throw NoAxisError("no medial-axis ridge: footprints cover the region");

  std::vector<double> clearance;
  clearance.reserve(pts.size());
  for (const Point& p : pts) clearance.push_back(footprint_clearance(sc.pus, p));
  return make_axis(std::move(pts), std::move(power), std::move(clearance));
}

bool Corridor::contains(NodeId id) const {
  return std::binary_search(members.begin(), members.end(), id);
}

std::vector<NodeId> corridor_members(const MedialAxis& axis, const NodeSet& nodes,
                                     std::span<const PrimaryUser> pus, double omega) {
  std::vector<NodeId> out;
  for (const Node& n : nodes.su_nodes()) {
    if (inside_footprint(pus, n.pos)) continue;
    const auto [idx, d] = axis.nearest(n.pos);
    if (d <= axis.clearance[idx] * (1.0 + omega)) out.push_back(n.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Corridor make_corridor(const Scenario& sc, MedialAxis axis, double omega) {
  if (!(omega > 0.0 && omega <= 1.0)) throw ValidationError("omega: 0 < omega <= 1 violated");
  Corridor c;
  c.omega = omega;
  c.members = corridor_members(axis, sc.nodes, sc.pus, omega);
  c.radius.reserve(axis.size());
  for (double cl : axis.clearance) c.radius.push_back(cl * (1.0 + omega));
  c.axis = std::move(axis);
  return c;
}

HierarchyAssignment assign_bands(const Scenario& sc, const Corridor& corridor) {
  const MedialAxis& axis = corridor.axis;
  if (corridor.members.empty() && sc.nodes.sources.empty())
    throw UnreachableError("empty corridor");
  if (sc.nodes.cpc_stations.empty()) throw UnreachableError("no CPC station");

  double origin = std::numeric_limits<double>::infinity();
  for (const auto& s : sc.nodes.sources) origin = std::min(origin, axis.arc_length[axis.nearest(s.pos).first]);
  if (sc.nodes.sources.empty()) origin = 0.0;
  double end = -std::numeric_limits<double>::infinity();
  for (const auto& c : sc.nodes.cpc_stations) end = std::max(end, axis.arc_length[axis.nearest(c.pos).first]);
  if (!(end > origin))
    throw UnreachableError("CPC stations do not lie beyond the sources along the medial axis");

  HierarchyAssignment h;
  const double span = end - origin;
  h.level_count = sc.game.level_count > 0
                      ? sc.game.level_count
                      : std::max(1, static_cast<int>(std::ceil(span / sc.radio.interference_range - 1e-9)));
  h.band_origin = origin;
  h.band_width = span / h.level_count;
  for (const auto& c : sc.nodes.cpc_stations) h.cpcs.push_back(c.id);
  std::sort(h.cpcs.begin(), h.cpcs.end());

  auto band = [&](double arc) {
    const int b = static_cast<int>(std::floor((arc - origin) / h.band_width)) + 1;
    return std::clamp(b, 1, h.level_count);
  };
  // Relays projecting behind the sources cannot make forward progress and
  // are left out of the hierarchy.
  for (NodeId id : corridor.members) {
    const double arc = axis.arc_length[axis.nearest(sc.position(id)).first];
    if (arc < origin) continue;
    h.band_of[id] = band(arc);
  }
  for (const auto& s : sc.nodes.sources) h.band_of[s.id] = 1;
  return h;
}

StateHierarchy assign_levels(const Scenario& sc, const Corridor& corridor,
                             const HierarchyAssignment& bands, const StateModel& states,
                             StateIndex state) {
  const int L = bands.level_count;
  const double range = sc.radio.interference_range;

  auto excluded = [&](Point p) {
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < sc.pus.size(); ++k) {
      const double e = distance(p, sc.pus[k].center) - sc.pus[k].footprint_radius;
      if (e < best) {
        best = e;
        nearest = k;
      }
    }
    return !sc.pus.empty() && states.occupied(state, nearest) && sc.pus[nearest].covers(p);
  };

  std::vector<std::vector<NodeId>> levels(static_cast<std::size_t>(L));
  for (const auto& [id, b] : bands.band_of) {
    if (sc.nodes.is_source(id)) {
      levels[0].push_back(id);
      continue;
    }
    if (!corridor.contains(id) || excluded(sc.position(id))) continue;
    levels[static_cast<std::size_t>(b - 1)].push_back(id);
  }

  StateHierarchy h;
  for (NodeId id : levels[static_cast<std::size_t>(L - 1)]) h.candidates[id] = bands.cpcs;
  for (int l = L - 1; l >= 1; --l) {
    auto& here = levels[static_cast<std::size_t>(l - 1)];
    const auto& next = levels[static_cast<std::size_t>(l)];
    std::vector<NodeId> kept;
    for (NodeId id : here) {
      const Point p = sc.position(id);
      std::vector<NodeId> cands;
      for (NodeId c : next)
        if (distance(p, sc.position(c)) <= range) cands.push_back(c);
      if (cands.empty()) {
        if (sc.nodes.is_source(id)) {
          throw UnreachableError("source " + std::to_string(id) + " has no level-" +
                                 std::to_string(l + 1) + " candidate at state " +
                                 std::to_string(state));
        }
        continue;
      }
      h.candidates[id] = std::move(cands);
      kept.push_back(id);
    }
    here = std::move(kept);
  }
  for (int l = 1; l <= L; ++l)
    for (NodeId id : levels[static_cast<std::size_t>(l - 1)]) h.level_of[id] = l;
  h.levels = std::move(levels);
  return h;
}

HierarchyAssignment assign_all_levels(const Scenario& sc, const Corridor& corridor,
                                      const StateModel& states) {
  HierarchyAssignment h = assign_bands(sc, corridor);
  for (StateIndex s = 0; s < states.num_states(); ++s)
    h.per_state.push_back(assign_levels(sc, corridor, h, states, s));
  return h;
}

void write_axis_csv(std::ostream& out, const MedialAxis& axis, const HierarchyAssignment& bands) {
  out << "x,y,level\n";
  char buf[96];
  for (std::size_t i = 0; i < axis.size(); ++i) {
    int level = 0;
    if (bands.band_width > 0.0) {
      level = static_cast<int>(std::floor((axis.arc_length[i] - bands.band_origin) / bands.band_width)) + 1;
      level = std::clamp(level, 1, bands.level_count);
    }
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%d\n", axis.points[i].x, axis.points[i].y, level);
    out << buf;
  }
}

}  // namespace cogroute
