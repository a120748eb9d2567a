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

#ifndef COGROUTE_QUEUEING_HPP_
#define COGROUTE_QUEUEING_HPP_

#include <map>
#include <span>
#include <vector>

#include "cogroute/scenario.hpp"

namespace cogroute {

// Pollaczek-Khinchin mean sojourn time of an M/G/1 queue:
// lambda * E[X^2] / (2 (1 - rho)) + E[X]. Throws InstabilityError if rho >= 1.
double pk_delay(const QueueParams& q);

// Sojourn time saturated at `cap`: cap when rho >= 1, min(cap, pk) otherwise.
double saturated_delay(const QueueParams& q, double cap);

// One level of the routing game seen as a congestion game: each player
// forwards `upstream_rate[i]` packets/s to one of its candidates, whose queue
// also receives its own external arrivals.
struct CongestionLevel {
  std::vector<NodeId> players;
  std::vector<std::vector<NodeId>> candidates;  // per player, nonempty
  std::vector<double> upstream_rate;            // per player
  // Queue of every candidate; arrival_rate is the external rate.
  std::map<NodeId, QueueParams> resources;

  std::size_t num_players() const { return players.size(); }
};

struct LevelLoadProfile {
  std::map<NodeId, double> rate;  // total arrival rate per candidate node
};

// rate(c) = external(c) + sum of upstream rates of the players choosing c,
// for every candidate of the level. Throws InvalidActionError.
LevelLoadProfile aggregate_loads(const CongestionLevel& level, std::span<const NodeId> actions);

// Delay seen by `chooser` at its chosen node under the aggregate loads,
// saturated at delay_cap. Throws InvalidActionError.
double stage_payoff(const CongestionLevel& level, std::size_t chooser,
                    std::span<const NodeId> actions, double delay_cap);

}  // namespace cogroute

#endif  // COGROUTE_QUEUEING_HPP_
