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

#include "cogroute/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "cogroute/errors.hpp"
#include "cogroute/random.hpp"
#include "json.hpp"

namespace cogroute {

using json = nlohmann::json;

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kStationaryResidualTol = 1e-10;

// --- document reading ------------------------------------------------------

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

const json& member(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path, std::string("missing required field '") + key + "'");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

double number_field(const json& j, const char* key, const std::string& path) {
  return number(member(j, key, path), path + "." + key);
}

double number_or(const json& j, const char* key, double fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  return number(j.at(key), path + "." + key);
}

int int_field(const json& j, const char* key, const std::string& path) {
  const json& v = member(j, key, path);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<int>();
}

int int_or(const json& j, const char* key, int fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  return int_field(j, key, path);
}

Point point(const json& j, const std::string& path) {
  if (j.is_array()) {
    if (j.size() != 2) fail(path, "expected [x, y]");
    return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
  }
  return {number_field(j, "x", path), number_field(j, "y", path)};
}

std::pair<double, double> range(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected [lo, hi]");
  const double lo = number(j[0], path + "[0]");
  const double hi = number(j[1], path + "[1]");
  if (hi < lo) fail(path, "range has hi < lo");
  return {lo, hi};
}

Region read_region(const json& j) {
  Region r;
  r.x_min = number_field(j, "x_min", "region");
  r.x_max = number_field(j, "x_max", "region");
  r.y_min = number_field(j, "y_min", "region");
  r.y_max = number_field(j, "y_max", "region");
  return r;
}

PrimaryUser read_pu(const json& j, const std::string& path) {
  PrimaryUser pu;
  pu.id = int_field(j, "id", path);
  pu.center = point(member(j, "center", path), path + ".center");
  pu.footprint_radius = number_field(j, "footprint_radius", path);
  pu.tx_power = number_or(j, "tx_power", 1.0, path);
  if (j.contains("channel_states")) {
    const json& states = j.at("channel_states");
    if (!states.is_array()) fail(path + ".channel_states", "expected an array of labels");
    pu.channel_states.clear();
    for (const auto& s : states) {
      if (!s.is_string()) fail(path + ".channel_states", "expected string labels");
      pu.channel_states.push_back(s.get<std::string>());
    }
  }
  const json& t = member(j, "transition", path);
  if (!t.is_array()) fail(path + ".transition", "expected a matrix");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const std::string rp = path + ".transition[" + std::to_string(i) + "]";
    if (!t[i].is_array()) fail(rp, "expected a row");
    std::vector<double> row;
    for (std::size_t k = 0; k < t[i].size(); ++k) row.push_back(number(t[i][k], rp));
    rows.push_back(std::move(row));
  }
  for (const auto& row : rows)
    if (row.size() != rows.size()) fail(path + ".transition", "matrix must be square");
  pu.transition = Matrix::from_rows(rows);
  return pu;
}

std::vector<Node> read_nodes(const json& j, const char* key) {
  std::vector<Node> out;
  if (!j.contains(key)) return out;
  const json& arr = j.at(key);
  const std::string path = std::string("nodes.") + key;
  if (!arr.is_array()) fail(path, "expected an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    Node n;
    n.id = int_field(arr[i], "id", p);
    n.pos = arr[i].contains("pos") ? point(arr[i].at("pos"), p + ".pos") : point(arr[i], p);
    out.push_back(n);
  }
  return out;
}

QueueParams read_queue(const json& j, const std::string& path, const QueueParams& base) {
  QueueParams q = base;
  q.arrival_rate = number_or(j, "arrival_rate", q.arrival_rate, path);
  q.mean_service = number_or(j, "mean_service", q.mean_service, path);
  q.second_moment_service = number_or(j, "second_moment_service", q.second_moment_service, path);
  return q;
}

json queue_to_json(const QueueParams& q) {
  return json{{"arrival_rate", q.arrival_rate},
              {"mean_service", q.mean_service},
              {"second_moment_service", q.second_moment_service}};
}

json point_to_json(Point p) { return json::array({p.x, p.y}); }

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed configuration document: ") + e.what());
  }
}

std::uint64_t read_seed(const json& doc) {
  if (!doc.contains("seed")) return 0;
  const json& s = doc.at("seed");
  if (!s.is_number_integer()) fail("seed", "expected an unsigned integer");
  if (s.is_number_unsigned()) return s.get<std::uint64_t>();
  const auto v = s.get<std::int64_t>();
  if (v < 0) fail("seed", "expected an unsigned integer");
  return static_cast<std::uint64_t>(v);
}

bool inside_any_footprint(const std::vector<PrimaryUser>& pus, Point p) {
  return std::any_of(pus.begin(), pus.end(), [&](const PrimaryUser& pu) { return pu.covers(p); });
}

std::vector<Node> draw_sources(const json& spec, const Scenario& sc, const DeploymentDraw& draw) {
  const std::string path = "deployment.random_sources";
  const int count = int_field(spec, "count", path);
  if (count < 0) fail(path + ".count", "must be >= 0");
  const NodeId id_start = int_or(spec, "id_start", 1, path);
  const json& along = member(spec, "along", path);
  if (!along.is_array() || along.size() != 2) fail(path + ".along", "expected [[x0,y0],[x1,y1]]");
  const Point a = point(along[0], path + ".along[0]");
  const Point b = point(along[1], path + ".along[1]");
  const double radius = number_or(spec, "cluster_radius", 0.05, path);
  if (draw.strata < 1 || draw.stratum < 0 || draw.stratum >= draw.strata)
    fail(path, "stratum out of range");

  Rng rng(derive_seed(draw.seed, stream::kSources));
  const double t = (draw.stratum + rng.uniform()) / draw.strata;
  const Point c{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
  std::vector<Node> out;
  for (int i = 0; i < count; ++i) {
    Point p = c;
    bool placed = false;
    for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
      const double u = rng.uniform(-radius, radius);
      const double v = rng.uniform(-radius, radius);
      if (u * u + v * v > radius * radius) continue;
      p = {c.x + u, c.y + v};
      placed = sc.region.contains(p) && !inside_any_footprint(sc.pus, p);
    }
    if (!placed) fail(path, "cannot place a source outside the footprints near the segment");
    out.push_back({id_start + i, p});
  }
  return out;
}

void assign_queues(const json& doc, Scenario& sc, const DeploymentDraw& draw) {
  QueueParams base;
  const json empty = json::object();
  const json& q = doc.contains("queueing") ? doc.at("queueing") : empty;
  if (q.contains("default")) base = read_queue(q.at("default"), "queueing.default", base);

  std::vector<std::pair<NodeId, int>> all;  // id, role (0 source, 1 relay, 2 cpc)
  for (const auto& n : sc.nodes.sources) all.emplace_back(n.id, 0);
  for (const auto& n : sc.nodes.relays) all.emplace_back(n.id, 1);
  for (const auto& n : sc.nodes.cpc_stations) all.emplace_back(n.id, 2);
  std::sort(all.begin(), all.end());

  std::optional<Rng> rng;
  std::pair<double, double> rate_range[3];
  std::pair<double, double> service_range, scv_range;
  if (q.contains("random")) {
    const json& r = q.at("random");
    const std::string p = "queueing.random";
    rate_range[0] = range(member(r, "source_arrival_rate", p), p + ".source_arrival_rate");
    rate_range[1] = range(member(r, "relay_arrival_rate", p), p + ".relay_arrival_rate");
    rate_range[2] = r.contains("cpc_arrival_rate")
                        ? range(r.at("cpc_arrival_rate"), p + ".cpc_arrival_rate")
                        : std::pair<double, double>{0.0, 0.0};
    service_range = range(member(r, "mean_service", p), p + ".mean_service");
    scv_range = r.contains("service_scv") ? range(r.at("service_scv"), p + ".service_scv")
                                          : std::pair<double, double>{1.0, 1.0};
    rng.emplace(derive_seed(draw.seed, stream::kQueues));
  }

  for (const auto& [id, role] : all) {
    QueueParams qp = base;
    if (rng) {
      qp.arrival_rate = rng->uniform(rate_range[role].first, rate_range[role].second);
      qp.mean_service = rng->uniform(service_range.first, service_range.second);
      const double scv = rng->uniform(scv_range.first, scv_range.second);
      qp.second_moment_service = qp.mean_service * qp.mean_service * (1.0 + scv);
    }
    sc.queueing[id] = qp;
  }
  if (q.contains("nodes")) {
    const json& per = q.at("nodes");
    if (!per.is_object()) fail("queueing.nodes", "expected an object keyed by node id");
    for (auto it = per.begin(); it != per.end(); ++it) {
      NodeId id = 0;
      try {
        id = std::stoi(it.key());
      } catch (...) {
        fail("queueing.nodes", "key '" + it.key() + "' is not a node id");
      }
      auto found = sc.queueing.find(id);
      if (found == sc.queueing.end()) fail("queueing.nodes", "unknown node id " + it.key());
      found->second = read_queue(it.value(), "queueing.nodes." + it.key(), found->second);
    }
  }
}

Scenario instantiate(const json& doc, const DeploymentDraw& draw) {
  if (!doc.is_object()) throw ValidationError("document: expected a JSON object");
  Scenario sc;
  sc.seed = draw.seed;
  sc.region = read_region(member(doc, "region", "document"));
  const Region& r = sc.region;
  if (!(r.x_min < r.x_max)) fail("region", "x_min < x_max violated");
  if (!(r.y_min < r.y_max)) fail("region", "y_min < y_max violated");

  const json& pus = member(doc, "primary_users", "document");
  if (!pus.is_array()) fail("primary_users", "expected an array");
  for (std::size_t i = 0; i < pus.size(); ++i)
    sc.pus.push_back(read_pu(pus[i], "primary_users[" + std::to_string(i) + "]"));

  const json& nodes = member(doc, "nodes", "document");
  sc.nodes.sources = read_nodes(nodes, "sources");
  sc.nodes.relays = read_nodes(nodes, "relays");
  sc.nodes.cpc_stations = read_nodes(nodes, "cpc_stations");

  if (doc.contains("radio")) {
    const json& j = doc.at("radio");
    sc.radio.tx_power = number_or(j, "tx_power", sc.radio.tx_power, "radio");
    sc.radio.path_loss_alpha = number_or(j, "path_loss_alpha", sc.radio.path_loss_alpha, "radio");
    sc.radio.interference_range =
        number_or(j, "interference_range", sc.radio.interference_range, "radio");
  }
  if (doc.contains("game")) {
    const json& j = doc.at("game");
    GameParams& g = sc.game;
    g.beta = number_or(j, "beta", g.beta, "game");
    g.omega = number_or(j, "omega", g.omega, "game");
    g.grid_resolution = number_or(j, "grid_resolution", g.grid_resolution, "game");
    g.level_count = int_or(j, "level_count", g.level_count, "game");
    g.delay_cap = number_or(j, "delay_cap", g.delay_cap, "game");
    g.flow_passes = int_or(j, "flow_passes", g.flow_passes, "game");
    g.fp.max_iters = int_or(j, "fp_max_iters", g.fp.max_iters, "game");
    g.fp.stop_tol = number_or(j, "fp_stop_tol", g.fp.stop_tol, "game");
    g.fp.window = int_or(j, "fp_window", g.fp.window, "game");
    if (j.contains("sweep")) g.sweep = point(j.at("sweep"), "game.sweep");
  }

  if (doc.contains("deployment")) {
    const json& d = doc.at("deployment");
    if (d.contains("random_relays")) {
      const json& rr = d.at("random_relays");
      const int count = int_field(rr, "count", "deployment.random_relays");
      if (count < 0) fail("deployment.random_relays.count", "must be >= 0");
      const NodeId start = int_or(rr, "id_start", 1000, "deployment.random_relays");
      auto extra = generate_deployment(sc.region, count, derive_seed(draw.seed, stream::kRelays), start);
      sc.nodes.relays.insert(sc.nodes.relays.end(), extra.begin(), extra.end());
    }
    if (d.contains("random_sources")) {
      auto extra = draw_sources(d.at("random_sources"), sc, draw);
      sc.nodes.sources.insert(sc.nodes.sources.end(), extra.begin(), extra.end());
    }
  }

  assign_queues(doc, sc, draw);
  validate(sc);
  return sc;
}

}  // namespace

// --- types -------------------------------------------------------------------

std::size_t PrimaryUser::occupied_state() const {
  auto it = std::find(channel_states.begin(), channel_states.end(), "occupied");
  if (it == channel_states.end())
    throw ValidationError("primary user " + std::to_string(id) + ": no 'occupied' state");
  return static_cast<std::size_t>(it - channel_states.begin());
}

std::vector<Node> NodeSet::su_nodes() const {
  std::vector<Node> out = sources;
  out.insert(out.end(), relays.begin(), relays.end());
  return out;
}

std::optional<Node> NodeSet::find(NodeId id) const {
  for (const auto* list : {&sources, &relays, &cpc_stations})
    for (const auto& n : *list)
      if (n.id == id) return n;
  return std::nullopt;
}

bool NodeSet::is_cpc(NodeId id) const {
  return std::any_of(cpc_stations.begin(), cpc_stations.end(), [&](const Node& n) { return n.id == id; });
}

bool NodeSet::is_source(NodeId id) const {
  return std::any_of(sources.begin(), sources.end(), [&](const Node& n) { return n.id == id; });
}

const QueueParams& Scenario::queue(NodeId id) const {
  auto it = queueing.find(id);
  if (it == queueing.end()) throw ValidationError("no queue parameters for node " + std::to_string(id));
  return it->second;
}

Point Scenario::position(NodeId id) const {
  auto n = nodes.find(id);
  if (!n) throw ValidationError("unknown node id " + std::to_string(id));
  return n->pos;
}

// --- validation --------------------------------------------------------------

void validate(const Scenario& sc) {
  const Region& r = sc.region;
  if (!(r.x_min < r.x_max)) fail("region", "x_min < x_max violated");
  if (!(r.y_min < r.y_max)) fail("region", "y_min < y_max violated");

  std::set<int> pu_ids;
  for (std::size_t k = 0; k < sc.pus.size(); ++k) {
    const PrimaryUser& pu = sc.pus[k];
    const std::string p = "primary_users[" + std::to_string(k) + "]";
    if (!pu_ids.insert(pu.id).second) fail(p, "duplicate PU id");
    if (!(pu.footprint_radius > 0.0)) fail(p, "footprint_radius > 0 violated");
    if (!(pu.tx_power > 0.0)) fail(p, "tx_power > 0 violated");
    const auto& labels = pu.channel_states;
    if (std::find(labels.begin(), labels.end(), "occupied") == labels.end() ||
        std::find(labels.begin(), labels.end(), "unoccupied") == labels.end())
      fail(p, "channel_states must include 'occupied' and 'unoccupied'");
    if (std::set<std::string>(labels.begin(), labels.end()).size() != labels.size())
      fail(p, "duplicate channel state label");
    if (pu.transition.rows() != labels.size() || pu.transition.cols() != labels.size())
      fail(p, "transition must be |channel_states| x |channel_states|");
    for (std::size_t i = 0; i < pu.transition.rows(); ++i) {
      double sum = 0.0;
      for (double v : pu.transition.row(i)) {
        if (!(v >= 0.0 && v <= 1.0)) fail(p, "transition entries in [0,1] violated");
        sum += v;
      }
      if (std::abs(sum - 1.0) > kRowSumTol) {
        std::ostringstream os;
        os << "row-stochastic violated (row " << i << " sums to " << sum << ")";
        fail(p, os.str());
      }
    }
  }

  std::set<NodeId> ids;
  auto check_nodes = [&](const std::vector<Node>& list, const char* name) {
    for (const auto& n : list) {
      const std::string p = std::string("nodes.") + name + " id " + std::to_string(n.id);
      if (!ids.insert(n.id).second) fail(p, "ids unique across nodes violated");
      if (!r.contains(n.pos)) fail(p, "point inside region violated");
    }
  };
  check_nodes(sc.nodes.sources, "sources");
  check_nodes(sc.nodes.relays, "relays");
  check_nodes(sc.nodes.cpc_stations, "cpc_stations");

  for (NodeId id : ids) {
    auto it = sc.queueing.find(id);
    const std::string p = "queueing node " + std::to_string(id);
    if (it == sc.queueing.end()) fail(p, "missing queue parameters");
    const QueueParams& q = it->second;
    if (!(q.arrival_rate >= 0.0)) fail(p, "arrival_rate >= 0 violated");
    if (!(q.mean_service > 0.0)) fail(p, "mean_service > 0 violated");
    if (!(q.second_moment_service >= q.mean_service * q.mean_service))
      fail(p, "second_moment_service >= mean_service^2 violated");
  }
  for (const auto& [id, q] : sc.queueing)
    if (!ids.count(id)) fail("queueing node " + std::to_string(id), "no such node");

  const GameParams& g = sc.game;
  if (!(g.beta > 0.0 && g.beta < 1.0)) fail("game.beta", "0 < beta < 1 violated");
  if (!(g.omega > 0.0 && g.omega <= 1.0)) fail("game.omega", "0 < omega <= 1 violated");
  if (!(g.grid_resolution > 0.0)) fail("game.grid_resolution", "grid_resolution > 0 violated");
  if (g.level_count < 0) fail("game.level_count", "level_count >= 0 violated");
  if (!(g.delay_cap > 0.0)) fail("game.delay_cap", "delay_cap > 0 violated");
  if (g.flow_passes < 1) fail("game.flow_passes", "flow_passes >= 1 violated");
  if (g.fp.max_iters < 1) fail("game.fp_max_iters", "fp_max_iters >= 1 violated");
  if (g.fp.window < 1) fail("game.fp_window", "fp_window >= 1 violated");
  if (!(g.fp.stop_tol > 0.0)) fail("game.fp_stop_tol", "fp_stop_tol > 0 violated");
  if (g.sweep && g.sweep->x == 0.0 && g.sweep->y == 0.0) fail("game.sweep", "zero sweep direction");

  if (!(sc.radio.path_loss_alpha > 0.0)) fail("radio.path_loss_alpha", "path_loss_alpha > 0 violated");
  if (!(sc.radio.tx_power > 0.0)) fail("radio.tx_power", "tx_power > 0 violated");
  if (!(sc.radio.interference_range > 0.0))
    fail("radio.interference_range", "interference_range > 0 violated");
}

// --- documents -----------------------------------------------------------------

Scenario load_scenario(std::string_view config_document) {
  const json doc = parse_json(config_document);
  return instantiate(doc, DeploymentDraw{read_seed(doc), 0, 1});
}

Scenario load_scenario(std::string_view config_document, const DeploymentDraw& draw) {
  return instantiate(parse_json(config_document), draw);
}

std::uint64_t config_seed(std::string_view config_document) {
  return read_seed(parse_json(config_document));
}

std::string canonical_config(std::string_view config_document) {
  return parse_json(config_document).dump(2) + "\n";
}

std::string save_scenario(const Scenario& sc) {
  json doc;
  doc["region"] = {{"x_min", sc.region.x_min},
                   {"x_max", sc.region.x_max},
                   {"y_min", sc.region.y_min},
                   {"y_max", sc.region.y_max}};
  doc["primary_users"] = json::array();
  for (const auto& pu : sc.pus) {
    json t = json::array();
    for (std::size_t i = 0; i < pu.transition.rows(); ++i) {
      json row = json::array();
      for (double v : pu.transition.row(i)) row.push_back(v);
      t.push_back(row);
    }
    doc["primary_users"].push_back({{"id", pu.id},
                                    {"center", point_to_json(pu.center)},
                                    {"footprint_radius", pu.footprint_radius},
                                    {"tx_power", pu.tx_power},
                                    {"channel_states", pu.channel_states},
                                    {"transition", t}});
  }
  auto nodes_json = [](const std::vector<Node>& list) {
    json arr = json::array();
    for (const auto& n : list) arr.push_back({{"id", n.id}, {"pos", point_to_json(n.pos)}});
    return arr;
  };
  doc["nodes"] = {{"sources", nodes_json(sc.nodes.sources)},
                  {"relays", nodes_json(sc.nodes.relays)},
                  {"cpc_stations", nodes_json(sc.nodes.cpc_stations)}};
  json per = json::object();
  for (const auto& [id, q] : sc.queueing) per[std::to_string(id)] = queue_to_json(q);
  doc["queueing"] = {{"nodes", per}};
  doc["radio"] = {{"tx_power", sc.radio.tx_power},
                  {"path_loss_alpha", sc.radio.path_loss_alpha},
                  {"interference_range", sc.radio.interference_range}};
  const GameParams& g = sc.game;
  doc["game"] = {{"beta", g.beta},
                 {"omega", g.omega},
                 {"grid_resolution", g.grid_resolution},
                 {"level_count", g.level_count},
                 {"delay_cap", g.delay_cap},
                 {"flow_passes", g.flow_passes},
                 {"fp_max_iters", g.fp.max_iters},
                 {"fp_stop_tol", g.fp.stop_tol},
                 {"fp_window", g.fp.window}};
  if (g.sweep) doc["game"]["sweep"] = point_to_json(*g.sweep);
  doc["seed"] = sc.seed;
  return doc.dump(2) + "\n";
}

std::uint64_t scenario_hash(const Scenario& sc) {
  const std::string text = save_scenario(sc);
  return fnv1a64(text.data(), text.size());
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<Node> generate_deployment(const Region& region, int n_relays, std::uint64_t seed,
                                      NodeId id_start) {
  std::vector<Node> out;
  if (n_relays <= 0) return out;
  out.reserve(static_cast<std::size_t>(n_relays));
  Rng rng(seed);
  for (int i = 0; i < n_relays; ++i) {
    const double x = rng.uniform(region.x_min, region.x_max);
    const double y = rng.uniform(region.y_min, region.y_max);
    out.push_back({id_start + i, {x, y}});
  }
  return out;
}

// --- state model ---------------------------------------------------------------

std::vector<std::size_t> StateModel::decode(StateIndex s) const {
  std::vector<std::size_t> idx(radices.size());
  for (std::size_t k = radices.size(); k-- > 0;) {
    idx[k] = s % radices[k];
    s /= radices[k];
  }
  return idx;
}

bool StateModel::occupied(StateIndex s, std::size_t pu) const {
  return decode(s).at(pu) == occupied_index.at(pu);
}

double StateModel::occupancy_probability(std::size_t pu) const {
  double p = 0.0;
  for (StateIndex s = 0; s < num_states(); ++s)
    if (occupied(s, pu)) p += stationary[s];
  return p;
}

std::size_t closed_class_count(const Matrix& p) {
  // Kosaraju SCC on the support graph, then count classes with no exit edge.
  const std::size_t n = p.rows();
  std::vector<std::vector<std::size_t>> fwd(n), rev(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (p(i, j) > 0.0) {
        fwd[i].push_back(j);
        rev[j].push_back(i);
      }
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> order;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{s, 0}};
    seen[s] = 1;
    while (!stack.empty()) {
      auto& [v, e] = stack.back();
      if (e < fwd[v].size()) {
        const std::size_t w = fwd[v][e++];
        if (!seen[w]) {
          seen[w] = 1;
          stack.emplace_back(w, 0);
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }
  std::vector<std::size_t> comp(n, n);
  std::size_t ncomp = 0;
  for (std::size_t k = n; k-- > 0;) {
    const std::size_t s = order[k];
    if (comp[s] != n) continue;
    std::vector<std::size_t> stack{s};
    comp[s] = ncomp;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w : rev[v])
        if (comp[w] == n) {
          comp[w] = ncomp;
          stack.push_back(w);
        }
    }
    ++ncomp;
  }
  std::vector<char> leaks(ncomp, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : fwd[i])
      if (comp[i] != comp[j]) leaks[comp[i]] = 1;
  return static_cast<std::size_t>(std::count(leaks.begin(), leaks.end(), 0));
}

std::vector<double> stationary_distribution(const Matrix& p, double tol, long max_iters) {
  const std::size_t n = p.rows();
  // Direct solve of pi (P - I) = 0 with the last balance row swapped for sum(pi) = 1.
  Matrix a = p.transpose();
  for (std::size_t i = 0; i < n; ++i) a(i, i) -= 1.0;
  for (std::size_t j = 0; j < n; ++j) a(n - 1, j) = 1.0;
  std::vector<double> rhs(n, 0.0);
  rhs[n - 1] = 1.0;
  std::vector<double> pi;
  try {
    pi = lu_solve(a, rhs);
  } catch (const Error&) {
    pi.clear();
  }
  bool ok = pi.size() == n;
  for (double& v : pi) {
    if (!std::isfinite(v) || v < -1e-12) ok = false;
    v = std::max(v, 0.0);
  }
  if (ok && max_abs_diff(vecmat(pi, p), pi) < tol) return pi;

  pi.assign(n, 1.0 / static_cast<double>(n));
  for (long it = 0; it < max_iters; ++it) {
    // Lazy step pi <- (pi + pi P) / 2 converges for periodic chains too.
    std::vector<double> next = vecmat(pi, p);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = 0.5 * (next[i] + pi[i]);
      sum += next[i];
    }
    for (double& v : next) v /= sum;
    const double change = max_abs_diff(next, pi);
    pi = std::move(next);
    if (change < tol) break;
  }
  return pi;
}

StateModel build_state_model(std::span<const PrimaryUser> pus) {
  if (pus.empty()) throw ValidationError("build_state_model: at least one PU required");
  StateModel m;
  m.transition = Matrix::identity(1);
  for (const auto& pu : pus) {
    m.radices.push_back(pu.channel_states.size());
    m.occupied_index.push_back(pu.occupied_state());
    m.transition = kronecker(m.transition, pu.transition);
  }
  if (closed_class_count(m.transition) != 1)
    throw ReducibleChainError("PU state chain has no unique stationary distribution");
  m.stationary = stationary_distribution(m.transition);
  const auto pip = vecmat(m.stationary, m.transition);
  if (max_abs_diff(pip, m.stationary) >= kStationaryResidualTol)
    throw Error("stationary distribution did not converge to 1e-10");
  return m;
}

}  // namespace cogroute
