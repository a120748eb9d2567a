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

#include "cogroute/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <optional>
#include <thread>

#include "cogroute/baselines.hpp"
#include "cogroute/dynprog.hpp"
#include "cogroute/errors.hpp"
#include "cogroute/geometry.hpp"
#include "cogroute/queueing.hpp"
#include "cogroute/random.hpp"

namespace cogroute {

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kGame: return "game";
    case Algorithm::kDijkstra: return "dijkstra";
    case Algorithm::kMa: return "ma";
  }
  return "?";
}

std::vector<double> route_interference(std::span<const Point> pts,
                                       std::span<const PrimaryUser> pus, const RadioParams& radio,
                                       double d_min, std::span<const double> weight) {
  std::vector<double> out(pus.size(), 0.0);
  for (std::size_t k = 0; k < pus.size(); ++k) {
    const double cutoff = pus[k].footprint_radius + radio.interference_range;
    double sum = 0.0;
    for (std::size_t h = 0; h + 1 < pts.size(); ++h) {
      const double d = distance(pts[h], pus[k].center);
      if (d > cutoff) continue;
      sum += radio.tx_power * std::pow(std::max(d, d_min), -radio.path_loss_alpha);
    }
    out[k] = weight.empty() ? sum : sum * weight[k];
  }
  return out;
}

std::vector<Point> route_points(const Scenario& sc, const RoutePath& route) {
  std::vector<Point> out;
  out.reserve(route.nodes.size());
  for (NodeId id : route.nodes) out.push_back(sc.position(id));
  return out;
}

std::vector<double> evaluate_route_delays(const Scenario& sc, std::vector<RoutePath>& routes) {
  std::map<NodeId, std::vector<double>> inflow;
  for (const auto& r : routes) {
    if (r.nodes.empty()) continue;
    const double rate = sc.queue(r.nodes.front()).arrival_rate;
    for (std::size_t h = 1; h < r.nodes.size(); ++h) inflow[r.nodes[h]].push_back(rate);
  }
  std::map<NodeId, double> delay;
  for (auto& [id, rates] : inflow) {
    std::sort(rates.begin(), rates.end());
    QueueParams q = sc.queue(id);
    for (double x : rates) q.arrival_rate += x;
    delay[id] = saturated_delay(q, sc.game.delay_cap);
  }
  std::vector<double> total(routes.size(), 0.0);
  for (std::size_t i = 0; i < routes.size(); ++i) {
    auto& r = routes[i];
    r.hop_delay.clear();
    for (std::size_t h = 1; h < r.nodes.size(); ++h) {
      r.hop_delay.push_back(delay.at(r.nodes[h]));
      total[i] += r.hop_delay.back();
    }
  }
  return total;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

namespace {

struct DrawResult {
  std::vector<RouteSample> samples;
  int redrawn = 0;
};

std::optional<std::vector<RouteSample>> try_draw(std::string_view doc, const DeploymentDraw& draw,
                                                 int index) {
  Scenario sc;
  std::vector<std::vector<RoutePath>> routes(kAlgorithms.size());
  try {
    sc = load_scenario(doc, draw);
    const StateModel states = build_state_model(sc.pus);
    const MedialAxis axis = compute_medial_axis(sc);
    const Corridor corridor = make_corridor(sc, axis, sc.game.omega);
    const HierarchyAssignment hier = assign_all_levels(sc, corridor, states);
    const RoutingModel model = make_routing_model(sc, hier, states);
    const GameSolution sol = backward_induction(model, 1);

    Rng state_rng(derive_seed(draw.seed, stream::kStateSample));
    const double u = state_rng.uniform();
    StateIndex state = states.num_states() - 1;
    double acc = 0.0;
    for (StateIndex s = 0; s < states.num_states(); ++s) {
      acc += states.stationary[s];
      if (u < acc) {
        state = s;
        break;
      }
    }
    const WeightedGraph graph = make_graph(sc);
    std::vector<NodeId> cpcs;
    for (const Node& c : sc.nodes.cpc_stations) cpcs.push_back(c.id);
    const std::uint64_t route_seed = derive_seed(draw.seed, stream::kRoutes);
    for (const Node& src : sc.nodes.sources) {
      routes[0].push_back(realize_route(model, sol, state, src.id,
                                        derive_seed(route_seed, static_cast<std::uint64_t>(src.id))));
      routes[0].back().state = state;
      routes[1].push_back(dijkstra_route(graph, src.id, cpcs));
      routes[2].push_back(ma_route(axis, sc, src.id, cpcs));
    }
  } catch (const UnreachableError&) {
    return std::nullopt;
  } catch (const NoAxisError&) {
    return std::nullopt;
  } catch (const DeadEndError&) {
    return std::nullopt;
  }

  std::vector<double> weight;
  {
    const StateModel states = build_state_model(sc.pus);
    for (std::size_t k = 0; k < sc.pus.size(); ++k)
      weight.push_back(states.occupancy_probability(k));
  }
  std::vector<RouteSample> out;
  for (std::size_t a = 0; a < kAlgorithms.size(); ++a) {
    const std::vector<double> delays = evaluate_route_delays(sc, routes[a]);
    for (std::size_t i = 0; i < routes[a].size(); ++i) {
      RouteSample s;
      s.seed = draw.seed;
      s.draw = index;
      s.algorithm = kAlgorithms[a];
      s.source = routes[a][i].nodes.front();
      const Point p = sc.position(s.source);
      s.distance = std::numeric_limits<double>::infinity();
      for (const Node& c : sc.nodes.cpc_stations) s.distance = std::min(s.distance, distance(p, c.pos));
      s.points = route_points(sc, routes[a][i]);
      for (double x : route_interference(s.points, sc.pus, sc.radio, sc.game.grid_resolution, weight))
        s.interference += x;
      s.delay = delays[i];
      out.push_back(std::move(s));
    }
  }
  return out;
}

DrawResult run_draw(std::string_view doc, std::uint64_t base_seed, int k, int n) {
  constexpr int kAttempts = 16;
  const std::uint64_t seed_k = derive_seed(base_seed, static_cast<std::uint64_t>(k));
  DrawResult res;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    DeploymentDraw draw{attempt == 0 ? seed_k : derive_seed(seed_k, stream::kEnsemble + attempt),
                        k, n};
    auto samples = try_draw(doc, draw, k);
    if (samples) {
      res.samples = std::move(*samples);
      return res;
    }
    ++res.redrawn;
  }
  throw UnreachableError("draw " + std::to_string(k) + ": no routable deployment in " +
                         std::to_string(kAttempts) + " attempts");
}

void write_curve_csv(std::ostream& out, const std::array<BinnedCurve, 3>& curves) {
  out << "algorithm,bin_center_km,normalized_mean,normalized_median,n\n";
  char buf[160];
  for (std::size_t a = 0; a < kAlgorithms.size(); ++a) {
    const BinnedCurve& c = curves[a];
    for (std::size_t b = 0; b < c.center.size(); ++b) {
      std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f,%d\n",
                    std::string(algorithm_name(kAlgorithms[a])).c_str(), c.center[b], c.mean[b],
                    c.median[b], c.count[b]);
      out << buf;
    }
  }
}

}  // namespace

CompareReport ensemble_compare(std::string_view doc, std::uint64_t base_seed, int n_seeds,
                               int threads) {
  if (n_seeds < 1) throw Error("ensemble_compare needs n_seeds >= 1");
  std::vector<DrawResult> draws(static_cast<std::size_t>(n_seeds));
  std::vector<std::exception_ptr> errors(draws.size());
  std::atomic<int> cursor{0};
  auto work = [&] {
    for (int k; (k = cursor.fetch_add(1)) < n_seeds;) {
      try {
        draws[static_cast<std::size_t>(k)] = run_draw(doc, base_seed, k, n_seeds);
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
      }
    }
  };
  const int n_threads = std::clamp(threads, 1, n_seeds);
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  CompareReport rep;
  for (auto& d : draws) {
    rep.redrawn += d.redrawn;
    for (auto& s : d.samples) rep.samples.push_back(std::move(s));
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : rep.samples) {
    rep.interference_max = std::max(rep.interference_max, s.interference);
    rep.delay_max = std::max(rep.delay_max, s.delay);
    lo = std::min(lo, s.distance);
    hi = std::max(hi, s.distance);
  }
  const int B = CompareReport::kBins;
  const double width = hi > lo ? (hi - lo) / B : 1.0;
  for (int b = 0; b <= B; ++b) rep.edges.push_back(lo + b * width);
  auto bin_of = [&](double d) { return std::clamp(static_cast<int>((d - lo) / width), 0, B - 1); };

  auto norm = [](double x, double m) { return m > 0.0 ? x / m : 0.0; };
  for (std::size_t a = 0; a < kAlgorithms.size(); ++a) {
    std::vector<std::vector<double>> inter(B), del(B);
    for (const auto& s : rep.samples) {
      if (s.algorithm != kAlgorithms[a]) continue;
      const int b = bin_of(s.distance);
      inter[b].push_back(norm(s.interference, rep.interference_max));
      del[b].push_back(norm(s.delay, rep.delay_max));
    }
    for (auto* pair : {&rep.interference[a], &rep.delay[a]}) {
      const auto& vals = pair == &rep.interference[a] ? inter : del;
      for (int b = 0; b < B; ++b) {
        pair->center.push_back(lo + (b + 0.5) * width);
        pair->count.push_back(static_cast<int>(vals[b].size()));
        double sum = 0.0;
        for (double x : vals[b]) sum += x;
        pair->mean.push_back(vals[b].empty() ? std::numeric_limits<double>::quiet_NaN()
                                             : sum / static_cast<double>(vals[b].size()));
        pair->median.push_back(median(vals[b]));
      }
    }
  }
  return rep;
}

void write_interference_csv(std::ostream& out, const CompareReport& report) {
  write_curve_csv(out, report.interference);
}

void write_delay_csv(std::ostream& out, const CompareReport& report) {
  write_curve_csv(out, report.delay);
}

void write_routes_csv(std::ostream& out, const CompareReport& report) {
  out << "seed,algorithm,source,hop_index,x,y\n";
  char buf[160];
  for (const auto& s : report.samples)
    for (std::size_t h = 0; h < s.points.size(); ++h) {
      std::snprintf(buf, sizeof buf, "%llu,%s,%d,%zu,%.6f,%.6f\n",
                    static_cast<unsigned long long>(s.seed),
                    std::string(algorithm_name(s.algorithm)).c_str(), s.source, h, s.points[h].x,
                    s.points[h].y);
      out << buf;
    }
}

}  // namespace cogroute
