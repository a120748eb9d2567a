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

#include "cogroute/dynprog.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <thread>

#include "cogroute/errors.hpp"
#include "cogroute/queueing.hpp"
#include "cogroute/random.hpp"

namespace cogroute {

int RoutingModel::level_of(NodeId id) const {
  for (const auto& h : per_state) {
    auto it = h.level_of.find(id);
    if (it != h.level_of.end()) return it->second;
  }
  return 0;
}

std::vector<NodeId> RoutingModel::level_nodes(int l) const {
  std::set<NodeId> ids;
  for (const auto& h : per_state)
    if (l >= 1 && l <= static_cast<int>(h.levels.size()))
      ids.insert(h.levels[static_cast<std::size_t>(l - 1)].begin(),
                 h.levels[static_cast<std::size_t>(l - 1)].end());
  return {ids.begin(), ids.end()};
}

RoutingModel make_routing_model(const Scenario& sc, const HierarchyAssignment& hierarchy,
                                const StateModel& states) {
  RoutingModel m;
  m.states = states;
  m.level_count = hierarchy.level_count;
  m.per_state = hierarchy.per_state;
  for (const Node& n : sc.nodes.sources) m.sources.push_back(n.id);
  std::sort(m.sources.begin(), m.sources.end());
  m.cpcs = hierarchy.cpcs;
  for (const auto& h : m.per_state)
    for (const auto& [id, l] : h.level_of) m.queues[id] = sc.queue(id);
  for (NodeId c : m.cpcs) m.queues[c] = sc.queue(c);
  m.beta = sc.game.beta;
  m.delay_cap = sc.game.delay_cap;
  m.flow_passes = sc.game.flow_passes;
  m.fp = sc.game.fp;
  return m;
}

std::vector<double> value_iteration(std::span<const double> r, const Matrix& p, double beta,
                                    double tol) {
  const std::size_t n = r.size();
  if (p.rows() != n || p.cols() != n) throw DimensionError("value iteration: P is not |r| x |r|");
  std::vector<double> v(r.begin(), r.end());
  if (beta == 0.0) return v;
  // ||v_k - v*|| <= beta / (1 - beta) * ||v_k - v_{k-1}||.
  const double stop = tol * (1.0 - beta) / beta;
  std::vector<double> next(n);
  for (long it = 0; it < 100'000'000; ++it) {
    double delta = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      double acc = 0.0;
      const auto row = p.row(s);
      for (std::size_t t = 0; t < n; ++t) acc += row[t] * v[t];
      next[s] = r[s] + beta * acc;
      delta = std::max(delta, std::abs(next[s] - v[s]));
    }
    v.swap(next);
    if (delta <= stop) break;
  }
  return v;
}

std::vector<double> solve_markov_values(std::span<const double> r, const Matrix& p, double beta) {
  const std::size_t n = r.size();
  if (p.rows() != n || p.cols() != n)
    throw DimensionError("solve_markov_values: P is " + std::to_string(p.rows()) + "x" +
                         std::to_string(p.cols()) + " but r has " + std::to_string(n) +
                         " entries");
  if (!(beta >= 0.0 && beta < 1.0)) throw Error("solve_markov_values: beta must be in [0, 1)");
  if (beta == 0.0) return {r.begin(), r.end()};
  if (n > 1024) return value_iteration(r, p, beta, 1e-10);
  Matrix a(n, n);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t) a(s, t) = (s == t ? 1.0 : 0.0) - beta * p(s, t);
  return lu_solve(std::move(a), {r.begin(), r.end()});
}

std::vector<AuditEntry> GameSolution::unresolved() const {
  std::vector<AuditEntry> out;
  for (const auto& e : audit)
    if (!e.converged) out.push_back(e);
  return out;
}

StageGame build_stage_game(const RoutingModel& model, StateIndex state, int level,
                           const ValueTable& continuation,
                           const std::map<NodeId, double>& upstream_rate) {
  const StateHierarchy& h = model.per_state.at(state);
  if (level < 1 || level > static_cast<int>(h.levels.size()))
    throw Error("level " + std::to_string(level) + " out of range");
  const bool terminal = level == model.level_count;
  CongestionLevel cl;
  std::vector<std::vector<double>> cont;
  for (NodeId id : h.levels[static_cast<std::size_t>(level - 1)]) {
    cl.players.push_back(id);
    const auto& cands = h.candidates.at(id);
    cl.candidates.push_back(cands);
    cl.upstream_rate.push_back(upstream_rate.at(id));
    std::vector<double> c(cands.size(), 0.0);
    for (std::size_t a = 0; a < cands.size(); ++a) {
      cl.resources[cands[a]] = model.queues.at(cands[a]);
      if (terminal) continue;
      auto it = continuation.value.find(cands[a]);
      if (it == continuation.value.end() || it->second.size() <= state)
        throw MissingContinuationError("no value for node " + std::to_string(cands[a]) +
                                       " at state " + std::to_string(state));
      c[a] = it->second[state];
    }
    cont.push_back(std::move(c));
  }
  return StageGame(state, level, std::move(cl), std::move(cont), model.delay_cap);
}

std::map<NodeId, double> forwarded_rates(const RoutingModel& model, StateIndex state,
                                         const StrategyTable* strategy) {
  const StateHierarchy& h = model.per_state.at(state);
  std::map<NodeId, double> inflow;
  std::map<NodeId, double> rate;
  for (std::size_t l = 0; l < h.levels.size(); ++l) {
    for (NodeId id : h.levels[l]) {
      const double r = model.queues.at(id).arrival_rate + inflow[id];
      rate[id] = r;
      const auto& cands = h.candidates.at(id);
      const MixedStrategy* f = nullptr;
      if (strategy) {
        auto it = strategy->strategy.find(id);
        if (it != strategy->strategy.end() && state < it->second.size() &&
            it->second[state].size() == cands.size())
          f = &it->second[state];
      }
      for (std::size_t a = 0; a < cands.size(); ++a)
        inflow[cands[a]] += r * (f ? (*f)[a] : 1.0 / static_cast<double>(cands.size()));
    }
  }
  return rate;
}

namespace {

// Expected total arrival at every node of the hierarchy and every CPC.
std::map<NodeId, double> arrivals(const RoutingModel& model, StateIndex state,
                                  const std::map<NodeId, double>& rate,
                                  const StrategyTable& strategy) {
  const StateHierarchy& h = model.per_state.at(state);
  std::map<NodeId, double> out;
  for (const auto& [id, l] : h.level_of) out[id] = model.queues.at(id).arrival_rate;
  for (NodeId c : model.cpcs) out[c] = model.queues.at(c).arrival_rate;
  // Sum in (sender id) order for a reproducible rounding pattern.
  for (const auto& [id, l] : h.level_of) {
    const auto& cands = strategy.candidates(id, state);
    const auto& f = strategy.at(id, state);
    for (std::size_t a = 0; a < cands.size(); ++a) out[cands[a]] += rate.at(id) * f[a];
  }
  return out;
}

struct LevelResult {
  std::vector<NodeId> players;
  Profile profile;
  std::vector<double> value;
  std::vector<double> delay;
  AuditEntry audit;
};

// Byte image of everything a stage game's solution depends on.
std::string game_key(const StageGame& g) {
  std::string key;
  auto put = [&key](const auto& v) {
    key.append(reinterpret_cast<const char*>(&v), sizeof v);
  };
  const CongestionLevel& c = g.congestion();
  for (std::size_t i = 0; i < c.num_players(); ++i) {
    put(c.players[i]);
    put(c.upstream_rate[i]);
    put(c.candidates[i].size());
    for (std::size_t a = 0; a < c.candidates[i].size(); ++a) {
      const QueueParams& q = c.resources.at(c.candidates[i][a]);
      put(c.candidates[i][a]);
      put(q.arrival_rate);
      put(q.mean_service);
      put(q.second_moment_service);
      put(g.continuation(i, a));
    }
  }
  return key;
}

void check_levels(const RoutingModel& model) {
  if (model.level_count < 1) throw Error("routing model needs at least one level");
  if (model.per_state.size() != model.states.num_states())
    throw DimensionError("one hierarchy per PU state required");
  std::map<NodeId, int> seen;
  for (const auto& h : model.per_state) {
    if (static_cast<int>(h.levels.size()) != model.level_count)
      throw DimensionError("hierarchy level count differs from the model's");
    for (const auto& [id, l] : h.level_of) {
      auto [it, fresh] = seen.emplace(id, l);
      if (!fresh && it->second != l)
        throw Error("node " + std::to_string(id) + " changes level across states");
    }
  }
}

}  // namespace

GameSolution backward_induction(const RoutingModel& model, int threads) {
  check_levels(model);
  const std::size_t S = model.states.num_states();
  const int L = model.level_count;
  const int passes = std::max(1, model.flow_passes);
  threads = std::max(1, threads);

  GameSolution sol;
  for (int pass = 0; pass < passes; ++pass) {
    std::vector<std::map<NodeId, double>> rates(S);
    for (StateIndex s = 0; s < S; ++s)
      rates[s] = forwarded_rates(model, s, pass == 0 ? nullptr : &sol.strategies);

    GameSolution next;
    next.upstream_rate = rates;
    for (int l = L; l >= 1; --l) {
      // States whose games have identical inputs share one solve.
      std::vector<StageGame> games;
      std::vector<std::size_t> game_of(S);
      {
        std::map<std::string, std::size_t> seen;
        for (StateIndex s = 0; s < S; ++s) {
          StageGame g = build_stage_game(model, s, l, next.values, rates[s]);
          auto [it, fresh] = seen.emplace(game_key(g), games.size());
          game_of[s] = it->second;
          if (fresh) games.push_back(std::move(g));
        }
      }
      std::vector<LevelResult> solved(games.size());
      std::atomic<std::size_t> cursor{0};
      auto work = [&] {
        for (std::size_t k; (k = cursor.fetch_add(1)) < games.size();) {
          const StageGame& game = games[k];
          LevelResult& out = solved[k];
          out.players = game.congestion().players;
          out.audit.players = static_cast<int>(game.num_players());
          if (game.num_players() == 0) {
            out.audit.converged = true;
            continue;
          }
          FpResult fp = fictitious_play(game, model.fp);
          out.value = equilibrium_value(game, fp.profile);
          out.delay.resize(game.num_players());
          for (std::size_t i = 0; i < game.num_players(); ++i) {
            const auto d = game.action_delays(i, fp.profile);
            double e = 0.0;
            for (std::size_t a = 0; a < d.size(); ++a) e += fp.profile[i][a] * d[a];
            out.delay[i] = e;
          }
          out.profile = std::move(fp.profile);
          out.audit.iterations = fp.trace.iterations;
          out.audit.converged = fp.trace.converged;
          out.audit.nash_gap = fp.trace.nash_gap;
        }
      };
      const int n_threads = static_cast<int>(std::min<std::size_t>(threads, games.size()));
      if (n_threads <= 1) {
        work();
      } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
      }
      std::vector<LevelResult> results(S);
      for (StateIndex s = 0; s < S; ++s) {
        results[s] = solved[game_of[s]];
        results[s].audit.state = s;
        results[s].audit.level = l;
      }

      // Merge in state order.
      for (NodeId id : model.level_nodes(l)) {
        next.values.stage[id].assign(S, model.delay_cap);
        next.values.stage_delay[id].assign(S, model.delay_cap);
        next.strategies.actions[id].assign(S, {});
        next.strategies.strategy[id].assign(S, {});
      }
      for (StateIndex s = 0; s < S; ++s) {
        const LevelResult& res = results[s];
        const StateHierarchy& h = model.per_state[s];
        for (std::size_t i = 0; i < res.players.size(); ++i) {
          const NodeId id = res.players[i];
          next.values.stage[id][s] = res.value[i];
          next.values.stage_delay[id][s] = res.delay[i];
          next.strategies.actions[id][s] = h.candidates.at(id);
          next.strategies.strategy[id][s] = res.profile[i];
        }
        next.audit.push_back(res.audit);
      }
      for (NodeId id : model.level_nodes(l))
        next.values.value[id] =
            solve_markov_values(next.values.stage[id], model.states.transition, model.beta);
    }
    sol = std::move(next);
  }
  sol.arrival.resize(S);
  for (StateIndex s = 0; s < S; ++s)
    sol.arrival[s] = arrivals(model, s, sol.upstream_rate[s], sol.strategies);
  return sol;
}

RoutePath realize_route(const RoutingModel& model, const GameSolution& solution, StateIndex state,
                        NodeId source, std::uint64_t seed) {
  Rng rng(seed);
  RoutePath path;
  path.state = state;
  path.nodes.push_back(source);
  const auto& cpcs = model.cpcs;
  NodeId at = source;
  while (std::find(cpcs.begin(), cpcs.end(), at) == cpcs.end()) {
    auto it = solution.strategies.strategy.find(at);
    if (it == solution.strategies.strategy.end() || it->second.at(state).empty())
      throw DeadEndError("node " + std::to_string(at) + " has no strategy at state " +
                         std::to_string(state));
    const auto& f = it->second[state];
    const auto& cands = solution.strategies.candidates(at, state);
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t pick = cands.size() - 1;
    for (std::size_t a = 0; a < cands.size(); ++a) {
      acc += f[a];
      if (u < acc) {
        pick = a;
        break;
      }
    }
    // Guard against rounding in the cumulative sum landing on a
    // zero-probability tail entry.
    while (pick > 0 && f[pick] == 0.0) --pick;
    at = cands[pick];
    path.nodes.push_back(at);
    QueueParams q = model.queues.at(at);
    q.arrival_rate = solution.arrival.at(state).at(at);
    path.hop_delay.push_back(saturated_delay(q, model.delay_cap));
    if (path.nodes.size() > static_cast<std::size_t>(model.level_count) + 1 &&
        std::find(cpcs.begin(), cpcs.end(), at) == cpcs.end())
      throw DeadEndError("route from " + std::to_string(source) + " does not reach a CPC");
  }
  return path;
}

std::vector<double> local_utility(const RoutingModel& model, const GameSolution& solution,
                                  NodeId node) {
  return solve_markov_values(solution.values.stage_delay.at(node), model.states.transition,
                             model.beta);
}

void write_strategies_csv(std::ostream& out, const GameSolution& solution) {
  out << "node,state,action,probability\n";
  char buf[128];
  for (const auto& [id, per_state] : solution.strategies.strategy)
    for (std::size_t s = 0; s < per_state.size(); ++s) {
      const auto& cands = solution.strategies.actions.at(id)[s];
      for (std::size_t a = 0; a < cands.size(); ++a) {
        std::snprintf(buf, sizeof buf, "%d,%zu,%d,%.12g\n", id, s, cands[a], per_state[s][a]);
        out << buf;
      }
    }
}

void write_values_csv(std::ostream& out, const GameSolution& solution) {
  out << "node,state,value,stage_value\n";
  char buf[128];
  for (const auto& [id, v] : solution.values.value)
    for (std::size_t s = 0; s < v.size(); ++s) {
      std::snprintf(buf, sizeof buf, "%d,%zu,%.12g,%.12g\n", id, s, v[s],
                    solution.values.stage.at(id)[s]);
      out << buf;
    }
}

void write_audit_csv(std::ostream& out, const GameSolution& solution) {
  out << "state,level,players,iterations,converged,nash_gap\n";
  char buf[128];
  for (const auto& e : solution.audit) {
    std::snprintf(buf, sizeof buf, "%zu,%d,%d,%d,%d,%.6g\n", e.state, e.level, e.players,
                  e.iterations, e.converged ? 1 : 0, e.nash_gap);
    out << buf;
  }
}

}  // namespace cogroute
