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

#include "cogroute/queueing.hpp"

#include <algorithm>
#include <string>

#include "cogroute/errors.hpp"

namespace cogroute {

double pk_delay(const QueueParams& q) {
  const double rho = q.utilization();
  if (rho >= 1.0) {
    throw InstabilityError("M/G/1 unstable: rho = " + std::to_string(rho) + " >= 1");
  }
  return q.arrival_rate * q.second_moment_service / (2.0 * (1.0 - rho)) + q.mean_service;
}

double saturated_delay(const QueueParams& q, double cap) {
  if (q.utilization() >= 1.0) return cap;
  return std::min(cap, pk_delay(q));
}

LevelLoadProfile aggregate_loads(const CongestionLevel& level, std::span<const NodeId> actions) {
  if (actions.size() != level.num_players())
    throw InvalidActionError("one action per player required");
  LevelLoadProfile out;
  for (const auto& cands : level.candidates)
    for (NodeId c : cands) {
      auto it = level.resources.find(c);
      if (it == level.resources.end())
        throw InvalidActionError("no queue for candidate " + std::to_string(c));
      out.rate[c] = it->second.arrival_rate;
    }
  // Contributions are summed in sorted order so that relabeling the
  // choosers cannot change the result, not even in the last bit.
  std::map<NodeId, std::vector<double>> inflow;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto& cands = level.candidates[i];
    if (std::find(cands.begin(), cands.end(), actions[i]) == cands.end()) {
      throw InvalidActionError("node " + std::to_string(actions[i]) + " is not a candidate of " +
                               std::to_string(level.players[i]));
    }
    inflow[actions[i]].push_back(level.upstream_rate[i]);
  }
  for (auto& [c, rates] : inflow) {
    std::sort(rates.begin(), rates.end());
    for (double r : rates) out.rate[c] += r;
  }
  return out;
}

double stage_payoff(const CongestionLevel& level, std::size_t chooser,
                    std::span<const NodeId> actions, double delay_cap) {
  const LevelLoadProfile loads = aggregate_loads(level, actions);
  const NodeId target = actions[chooser];
  QueueParams q = level.resources.at(target);
  q.arrival_rate = loads.rate.at(target);
  return saturated_delay(q, delay_cap);
}

}  // namespace cogroute
