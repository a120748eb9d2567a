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

#ifndef COGROUTE_DYNPROG_HPP_
#define COGROUTE_DYNPROG_HPP_

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <vector>

#include "cogroute/geometry.hpp"
#include "cogroute/matrix.hpp"
#include "cogroute/route.hpp"
#include "cogroute/scenario.hpp"
#include "cogroute/stagegame.hpp"

namespace cogroute {

// Everything the multi-stage game needs, detached from geometry so that
// hierarchies can also be supplied directly.
struct RoutingModel {
  StateModel states;
  int level_count = 0;
  std::vector<StateHierarchy> per_state;
  std::vector<NodeId> sources;
  std::vector<NodeId> cpcs;
  std::map<NodeId, QueueParams> queues;  // every SU node and CPC
  double beta = 0.9;
  double delay_cap = 1e4;
  int flow_passes = 2;
  FpOptions fp;

  // Level of a node (the same at every state where it is admitted), 0 if
  // it is never admitted.
  int level_of(NodeId id) const;
  // Nodes of level l admitted at some state, sorted.
  std::vector<NodeId> level_nodes(int l) const;
};

RoutingModel make_routing_model(const Scenario& scenario, const HierarchyAssignment& hierarchy,
                                const StateModel& states);

// Solves (I - beta P) v = r: directly for |S| <= 1024, by value iteration
// to 1e-10 beyond. beta == 0 returns r unchanged. Throws DimensionError.
std::vector<double> solve_markov_values(std::span<const double> r, const Matrix& p, double beta);

// v <- r + beta P v from v = r until the sup-norm error bound is below tol.
std::vector<double> value_iteration(std::span<const double> r, const Matrix& p, double beta,
                                    double tol = 1e-10);

struct ValueTable {
  // v_i over states, for every node of level 1..L.
  std::map<NodeId, std::vector<double>> value;
  // r_{i,l_i}(s): equilibrium stage value (delay plus continuation);
  // delay_cap at states where the node is not admitted.
  std::map<NodeId, std::vector<double>> stage;
  // Expected stage delay alone under the equilibrium, same convention.
  std::map<NodeId, std::vector<double>> stage_delay;

  const std::vector<double>& v(NodeId id) const { return value.at(id); }
};

struct StrategyTable {
  // Per node and state: the candidate list and the mixed strategy over it.
  // Both empty where the node is not admitted.
  std::map<NodeId, std::vector<std::vector<NodeId>>> actions;
  std::map<NodeId, std::vector<MixedStrategy>> strategy;

  const MixedStrategy& at(NodeId id, StateIndex s) const { return strategy.at(id).at(s); }
  const std::vector<NodeId>& candidates(NodeId id, StateIndex s) const {
    return actions.at(id).at(s);
  }
};

struct AuditEntry {
  StateIndex state = 0;
  int level = 0;
  int players = 0;
  int iterations = 0;
  bool converged = false;
  double nash_gap = 0.0;
};

struct GameSolution {
  StrategyTable strategies;
  ValueTable values;
  // Rates the final pass was solved with, per state: forwarded rate of each
  // player and expected total arrival at every node (CPCs included).
  std::vector<std::map<NodeId, double>> upstream_rate;
  std::vector<std::map<NodeId, double>> arrival;
  // One entry per (state, level) game, level-descending then state order.
  std::vector<AuditEntry> audit;

  std::vector<AuditEntry> unresolved() const;
};

// Game at (state, level) with the given forwarded rates and the values of
// level l + 1 as continuation (zero at the top level). Throws
// MissingContinuationError.
StageGame build_stage_game(const RoutingModel& model, StateIndex state, int level,
                           const ValueTable& continuation,
                           const std::map<NodeId, double>& upstream_rate);

// Forwarded rates at one state when every node follows `strategy`
// (uniform over candidates where `strategy` has no entry): sources forward
// their external rate, relays their expected total arrival.
std::map<NodeId, double> forwarded_rates(const RoutingModel& model, StateIndex state,
                                         const StrategyTable* strategy);

// Level-descending backward induction with fictitious-play stage
// equilibria, repeated flow_passes times to settle the forwarded rates.
// Games of one level run on up to `threads` threads; results do not depend
// on the thread count.
GameSolution backward_induction(const RoutingModel& model, int threads = 1);

// Samples each hop from the mixed strategies at `state`. Throws DeadEndError.
RoutePath realize_route(const RoutingModel& model, const GameSolution& solution, StateIndex state,
                        NodeId source, std::uint64_t seed);

// W_i: discounted sum of the node's own expected stage delays.
std::vector<double> local_utility(const RoutingModel& model, const GameSolution& solution,
                                  NodeId node);

// node,state,action,probability
void write_strategies_csv(std::ostream& out, const GameSolution& solution);
// node,state,value,stage_value
void write_values_csv(std::ostream& out, const GameSolution& solution);
// state,level,players,iterations,converged,nash_gap
void write_audit_csv(std::ostream& out, const GameSolution& solution);

}  // namespace cogroute

#endif  // COGROUTE_DYNPROG_HPP_
