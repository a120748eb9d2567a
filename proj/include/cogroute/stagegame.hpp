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

#ifndef COGROUTE_STAGEGAME_HPP_
#define COGROUTE_STAGEGAME_HPP_

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "cogroute/queueing.hpp"
#include "cogroute/scenario.hpp"

namespace cogroute {

// Probability per action; a point of the simplex.
using MixedStrategy = std::vector<double>;
// One mixed strategy per player.
using Profile = std::vector<MixedStrategy>;

// Finite simultaneous-move game in which every player minimizes cost.
class CostGame {
 public:
  virtual ~CostGame() = default;
  virtual std::size_t num_players() const = 0;
  virtual std::size_t num_actions(std::size_t player) const = 0;
  // Cost to `player` of a joint action (one action index per player).
  virtual double cost(std::size_t player, std::span<const std::size_t> joint) const = 0;
  // Expected cost of each of `player`'s actions when every other player j
  // plays profile[j] independently. The default enumerates joint actions.
  virtual std::vector<double> action_costs(std::size_t player, const Profile& profile) const;
};

// Game given by an explicit cost table; joint actions are laid out
// row-major with player 0 most significant.
class TabularGame : public CostGame {
 public:
  TabularGame(std::vector<std::size_t> action_counts, std::vector<std::vector<double>> costs);

  std::size_t num_players() const override { return counts_.size(); }
  std::size_t num_actions(std::size_t player) const override { return counts_.at(player); }
  double cost(std::size_t player, std::span<const std::size_t> joint) const override;

 private:
  std::vector<std::size_t> counts_;
  std::vector<std::vector<double>> costs_;  // [player][flat joint index]
};

// Level-l game at one PU state: cost = saturated delay at the chosen node
// plus the chosen node's continuation value. The payoff oracle is evaluated
// on demand. Expected costs use the exact distribution of the load the
// other players put on a candidate while at most kExactContenders of them
// choose it with probability strictly between 0 and 1; beyond that the load
// is replaced by a normal with the same mean and variance.
class StageGame : public CostGame {
 public:
  static constexpr std::size_t kExactContenders = 10;

  StageGame(StateIndex state, int level, CongestionLevel congestion,
            std::vector<std::vector<double>> continuation, double delay_cap);

  StateIndex state() const { return state_; }
  int level() const { return level_; }
  const CongestionLevel& congestion() const { return congestion_; }
  double delay_cap() const { return delay_cap_; }
  double continuation(std::size_t player, std::size_t action) const {
    return continuation_[player][action];
  }

  std::size_t num_players() const override { return congestion_.num_players(); }
  std::size_t num_actions(std::size_t player) const override {
    return congestion_.candidates.at(player).size();
  }
  double cost(std::size_t player, std::span<const std::size_t> joint) const override;
  std::vector<double> action_costs(std::size_t player, const Profile& profile) const override;

  // Expected stage delay alone (no continuation) of each action.
  std::vector<double> action_delays(std::size_t player, const Profile& profile) const;

 private:
  struct Contender {
    std::size_t player;
    std::size_t action;
  };
  StateIndex state_;
  int level_;
  CongestionLevel congestion_;
  std::vector<std::vector<double>> continuation_;
  double delay_cap_;
  std::map<NodeId, std::vector<Contender>> contenders_;
};

// Exact distribution of a sum of independent weighted Bernoulli loads, as
// sorted (load, probability) support points with equal loads merged.
struct LoadDistribution {
  std::vector<double> load;
  std::vector<double> prob;

  explicit LoadDistribution(double base);
  // Adds `rate` with probability p.
  void add(double rate, double p);
};

// Gauss-Hermite rule for weight exp(-x^2); weights sum to sqrt(pi).
struct GaussHermite {
  static constexpr std::size_t kPoints = 20;
  std::array<double, kPoints> node;
  std::array<double, kPoints> weight;
};
const GaussHermite& gauss_hermite();

struct FictitiousPlayTrace {
  // best_responses[k][i]: action of player i at iteration k + 1.
  std::vector<std::vector<std::size_t>> best_responses;
  // frequencies[k]: empirical profile after iteration k + 1 (recorded only
  // when requested).
  std::vector<Profile> frequencies;
  bool converged = false;
  int iterations = 0;
  // Largest unilateral improvement available in the returned profile.
  double nash_gap = 0.0;
};

struct FpResult {
  Profile profile;
  FictitiousPlayTrace trace;
};

// Simultaneous fictitious play from a uniform prior belief. Each iteration
// every player best-responds (lowest index on ties) to the others' empirical
// frequencies of the previous iteration. Stops when no frequency moved by
// stop_tol or more over the last `window` iterations and returns the
// empirical profile; otherwise returns the profile with the smallest Nash
// gap seen, with converged == false.
FpResult fictitious_play(const CostGame& game, const FpOptions& options,
                         bool record_frequencies = false);

// Expected cost of every player under the profile. Throws NonSimplexError.
std::vector<double> equilibrium_value(const CostGame& game, const Profile& profile);

// max over players of (expected cost - best pure deviation cost).
double nash_gap(const CostGame& game, const Profile& profile);

// Largest absolute expected action cost under the profile.
double payoff_scale(const CostGame& game, const Profile& profile);

// Throws NonSimplexError unless every entry is >= 0 and each vector sums to
// 1 within 1e-9.
void check_simplex(const CostGame& game, const Profile& profile);

Profile uniform_profile(const CostGame& game);

}  // namespace cogroute

#endif  // COGROUTE_STAGEGAME_HPP_
