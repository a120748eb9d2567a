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

#include "cogroute/stagegame.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

#include "cogroute/errors.hpp"
#include "cogroute/simd/kernels.hpp"

namespace cogroute {

std::vector<double> CostGame::action_costs(std::size_t player, const Profile& profile) const {
  const std::size_t n = num_players();
  std::vector<double> out(num_actions(player), 0.0);
  std::vector<std::size_t> joint(n, 0);
  // Odometer over the other players' supports.
  std::vector<std::vector<std::size_t>> support(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == player) {
      support[j] = {0};
      continue;
    }
    for (std::size_t a = 0; a < profile[j].size(); ++a)
      if (profile[j][a] > 0.0) support[j].push_back(a);
  }
  std::vector<std::size_t> pos(n, 0);
  while (true) {
    double w = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      joint[j] = support[j][pos[j]];
      if (j != player) w *= profile[j][joint[j]];
    }
    for (std::size_t a = 0; a < out.size(); ++a) {
      joint[player] = a;
      out[a] += w * cost(player, joint);
    }
    std::size_t j = 0;
    for (; j < n; ++j) {
      if (++pos[j] < support[j].size()) break;
      pos[j] = 0;
    }
    if (j == n) break;
  }
  return out;
}

TabularGame::TabularGame(std::vector<std::size_t> action_counts,
                         std::vector<std::vector<double>> costs)
    : counts_(std::move(action_counts)), costs_(std::move(costs)) {
  std::size_t total = 1;
  for (std::size_t c : counts_) {
    if (c == 0) throw DimensionError("every player needs at least one action");
    total *= c;
  }
  if (costs_.size() != counts_.size()) throw DimensionError("one cost table per player required");
  for (const auto& t : costs_)
    if (t.size() != total) throw DimensionError("cost table size does not match the joint space");
}

double TabularGame::cost(std::size_t player, std::span<const std::size_t> joint) const {
  std::size_t flat = 0;
  for (std::size_t j = 0; j < counts_.size(); ++j) flat = flat * counts_[j] + joint[j];
  return costs_.at(player)[flat];
}

StageGame::StageGame(StateIndex state, int level, CongestionLevel congestion,
                     std::vector<std::vector<double>> continuation, double delay_cap)
    : state_(state),
      level_(level),
      congestion_(std::move(congestion)),
      continuation_(std::move(continuation)),
      delay_cap_(delay_cap) {
  const std::size_t n = congestion_.num_players();
  if (congestion_.candidates.size() != n || congestion_.upstream_rate.size() != n ||
      continuation_.size() != n) {
    throw DimensionError("stage game: per-player arrays disagree in size");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& cands = congestion_.candidates[i];
    if (cands.empty())
      throw InvalidActionError("player " + std::to_string(congestion_.players[i]) +
                               " has no candidate");
    if (continuation_[i].size() != cands.size())
      throw MissingContinuationError("player " + std::to_string(congestion_.players[i]) +
                                     ": continuation missing for some candidate");
    for (std::size_t a = 0; a < cands.size(); ++a) {
      if (!congestion_.resources.count(cands[a]))
        throw InvalidActionError("no queue for candidate " + std::to_string(cands[a]));
      contenders_[cands[a]].push_back({i, a});
    }
  }
}

double StageGame::cost(std::size_t player, std::span<const std::size_t> joint) const {
  std::vector<NodeId> actions(joint.size());
  for (std::size_t j = 0; j < joint.size(); ++j)
    actions[j] = congestion_.candidates[j].at(joint[j]);
  return stage_payoff(congestion_, player, actions, delay_cap_) +
         continuation_[player][joint[player]];
}

std::vector<double> StageGame::action_delays(std::size_t player, const Profile& profile) const {
  const auto& cands = congestion_.candidates[player];
  std::vector<double> out(cands.size());
  std::vector<double> rate, prob;
  for (std::size_t a = 0; a < cands.size(); ++a) {
    const QueueParams& q = congestion_.resources.at(cands[a]);
    double base = q.arrival_rate + congestion_.upstream_rate[player];
    rate.clear();
    prob.clear();
    for (const Contender& c : contenders_.at(cands[a])) {
      if (c.player == player) continue;
      const double p = profile[c.player][c.action];
      const double r = congestion_.upstream_rate[c.player];
      if (p <= 0.0 || r == 0.0) continue;
      if (p >= 1.0) {
        base += r;
      } else {
        rate.push_back(r);
        prob.push_back(p);
      }
    }
    if (rate.size() <= kExactContenders) {
      LoadDistribution dist(base);
      for (std::size_t k = 0; k < rate.size(); ++k) dist.add(rate[k], prob[k]);
      out[a] = simd::expected_delay(dist.load, dist.prob, q.mean_service,
                                    q.second_moment_service, delay_cap_);
      continue;
    }
    // Many uncertain contenders: moment-matched normal load, integrated by
    // Gauss-Hermite quadrature and clipped to the feasible load range.
    double mean = base, var = 0.0, top = base;
    for (std::size_t k = 0; k < rate.size(); ++k) {
      mean += rate[k] * prob[k];
      var += rate[k] * rate[k] * prob[k] * (1.0 - prob[k]);
      top += rate[k];
    }
    const GaussHermite& gh = gauss_hermite();
    const double sd = std::sqrt(2.0 * var);
    std::array<double, GaussHermite::kPoints> load{}, weight{};
    for (std::size_t k = 0; k < GaussHermite::kPoints; ++k) {
      load[k] = std::clamp(mean + sd * gh.node[k], base, top);
      weight[k] = gh.weight[k] / std::sqrt(std::numbers::pi);
    }
    out[a] = simd::expected_delay(load, weight, q.mean_service, q.second_moment_service,
                                  delay_cap_);
  }
  return out;
}

std::vector<double> StageGame::action_costs(std::size_t player, const Profile& profile) const {
  std::vector<double> out = action_delays(player, profile);
  for (std::size_t a = 0; a < out.size(); ++a) out[a] += continuation_[player][a];
  return out;
}

const GaussHermite& gauss_hermite() {
  static const GaussHermite gh = [] {
    // Newton iteration on the orthonormal Hermite recurrence.
    GaussHermite g{};
    constexpr int n = static_cast<int>(GaussHermite::kPoints);
    const double pim4 = std::pow(std::numbers::pi, -0.25);
    double z = 0.0;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      if (i == 0)
        z = std::sqrt(2.0 * n + 1) - 1.85575 * std::pow(2.0 * n + 1, -0.16667);
      else if (i == 1)
        z -= 1.14 * std::pow(n, 0.426) / z;
      else if (i == 2)
        z = 1.86 * z - 0.86 * g.node[0];
      else if (i == 3)
        z = 1.91 * z - 0.91 * g.node[1];
      else
        z = 2.0 * z - g.node[static_cast<std::size_t>(i - 2)];
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p1 = pim4, p2 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
        }
        pp = std::sqrt(2.0 * n) * p2;
        const double z1 = z;
        z = z1 - p1 / pp;
        if (std::abs(z - z1) <= 1e-15) break;
      }
      g.node[static_cast<std::size_t>(i)] = z;
      g.node[static_cast<std::size_t>(n - 1 - i)] = -z;
      g.weight[static_cast<std::size_t>(i)] = g.weight[static_cast<std::size_t>(n - 1 - i)] = 2.0 / (pp * pp);
    }
    return g;
  }();
  return gh;
}

LoadDistribution::LoadDistribution(double base) : load{base}, prob{1.0} {}

void LoadDistribution::add(double rate, double p) {
  if (p <= 0.0 || rate == 0.0) return;
  if (p >= 1.0) {
    for (double& x : load) x += rate;
    return;
  }
  const std::size_t n = load.size();
  std::vector<double> nl, np;
  nl.reserve(2 * n);
  np.reserve(2 * n);
  auto push = [&](double x, double w) {
    if (!nl.empty() && nl.back() == x) {
      np.back() += w;
    } else {
      nl.push_back(x);
      np.push_back(w);
    }
  };
  // Merge the unshifted and shifted copies, both already sorted.
  std::size_t i = 0, j = 0;
  while (i < n || j < n) {
    const double shifted = j < n ? load[j] + rate : std::numeric_limits<double>::infinity();
    if (i < n && load[i] <= shifted) {
      push(load[i], prob[i] * (1.0 - p));
      ++i;
    } else {
      push(shifted, prob[j] * p);
      ++j;
    }
  }
  load = std::move(nl);
  prob = std::move(np);
}

Profile uniform_profile(const CostGame& game) {
  Profile p(game.num_players());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const std::size_t m = game.num_actions(i);
    p[i].assign(m, 1.0 / static_cast<double>(m));
  }
  return p;
}

void check_simplex(const CostGame& game, const Profile& profile) {
  if (profile.size() != game.num_players())
    throw NonSimplexError("profile has " + std::to_string(profile.size()) + " strategies for " +
                          std::to_string(game.num_players()) + " players");
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i].size() != game.num_actions(i))
      throw NonSimplexError("strategy of player " + std::to_string(i) + " has wrong length");
    double sum = 0.0;
    for (double f : profile[i]) {
      if (!(f >= 0.0) || f > 1.0 + 1e-9)
        throw NonSimplexError("strategy of player " + std::to_string(i) +
                              " has an entry outside [0, 1]");
      sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw NonSimplexError("strategy of player " + std::to_string(i) + " sums to " +
                            std::to_string(sum));
  }
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// Nash gap of a profile whose per-player action costs are already known.
double gap_of(const Profile& profile, const std::vector<std::vector<double>>& costs) {
  double gap = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double best = *std::min_element(costs[i].begin(), costs[i].end());
    gap = std::max(gap, dot(profile[i], costs[i]) - best);
  }
  return gap;
}

}  // namespace

std::vector<double> equilibrium_value(const CostGame& game, const Profile& profile) {
  check_simplex(game, profile);
  std::vector<double> out(game.num_players());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = dot(profile[i], game.action_costs(i, profile));
  return out;
}

double nash_gap(const CostGame& game, const Profile& profile) {
  check_simplex(game, profile);
  std::vector<std::vector<double>> costs(game.num_players());
  for (std::size_t i = 0; i < costs.size(); ++i) costs[i] = game.action_costs(i, profile);
  return gap_of(profile, costs);
}

double payoff_scale(const CostGame& game, const Profile& profile) {
  double scale = 0.0;
  for (std::size_t i = 0; i < game.num_players(); ++i)
    for (double c : game.action_costs(i, profile)) scale = std::max(scale, std::abs(c));
  return scale;
}

FpResult fictitious_play(const CostGame& game, const FpOptions& options,
                         bool record_frequencies) {
  if (options.max_iters < 1) throw Error("fictitious play needs max_iters >= 1");
  const std::size_t n = game.num_players();
  const std::size_t window = static_cast<std::size_t>(std::max(1, options.window));

  FpResult result;
  FictitiousPlayTrace& trace = result.trace;
  Profile belief = uniform_profile(game);
  std::vector<std::vector<double>> counts(n);
  for (std::size_t i = 0; i < n; ++i) counts[i].assign(game.num_actions(i), 0.0);

  std::deque<Profile> history;  // empirical profiles of the last window+1 iterations
  Profile best_profile;
  double best_gap = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> costs(n);

  for (int k = 1; k <= options.max_iters; ++k) {
    std::vector<std::size_t> br(n);
    for (std::size_t i = 0; i < n; ++i) {
      costs[i] = game.action_costs(i, belief);
      br[i] = static_cast<std::size_t>(std::min_element(costs[i].begin(), costs[i].end()) -
                                       costs[i].begin());
    }
    // From the second iteration on, the belief is an empirical profile and
    // the costs just computed certify its Nash gap for free.
    if (k > 1) {
      const double gap = gap_of(belief, costs);
      if (gap < best_gap) {
        best_gap = gap;
        best_profile = belief;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      counts[i][br[i]] += 1.0;
      for (std::size_t a = 0; a < counts[i].size(); ++a) belief[i][a] = counts[i][a] / k;
    }
    trace.best_responses.push_back(br);
    if (record_frequencies) trace.frequencies.push_back(belief);
    trace.iterations = k;

    history.push_back(belief);
    if (history.size() > window + 1) history.pop_front();
    if (history.size() == window + 1) {
      double change = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < belief[i].size(); ++a)
          change = std::max(change, std::abs(belief[i][a] - history.front()[i][a]));
      if (change < options.stop_tol) {
        trace.converged = true;
        break;
      }
    }
  }

  const double final_gap = nash_gap(game, belief);
  if (trace.converged || final_gap <= best_gap || best_profile.empty()) {
    result.profile = std::move(belief);
    trace.nash_gap = final_gap;
  } else {
    result.profile = std::move(best_profile);
    trace.nash_gap = best_gap;
  }
  return result;
}

}  // namespace cogroute
