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


#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cogroute/dynprog.hpp"
#include "cogroute/errors.hpp"
#include "cogroute/runner.hpp"
#include "oracles.hpp"

namespace cogroute {
namespace {

TEST(MarkovValues, BetaZeroReturnsRewardExactly) {
  std::mt19937_64 rng(1);
  const Matrix p = oracle::random_stochastic(7, rng);
  const std::vector<double> r{1.5, -2, 3.25, 0, 1e-7, 4, 9};
  EXPECT_EQ(solve_markov_values(r, p, 0.0), r);
}

TEST(MarkovValues, SingleStateGeometricSeries) {
  const std::vector<double> r{1.0};
  EXPECT_NEAR(solve_markov_values(r, Matrix::identity(1), 0.5)[0], 2.0, 1e-15);
}

TEST(MarkovValues, TwoStateSwap) {
  const Matrix p = Matrix::from_rows({{0, 1}, {1, 0}});
  const std::vector<double> r{1, 0};
  const auto v = solve_markov_values(r, p, 0.5);
  const auto oracle_v = oracle::value_iteration(r, p, 0.5);
  EXPECT_NEAR(v[0], 4.0 / 3, 1e-12);
  EXPECT_NEAR(v[1], 2.0 / 3, 1e-12);
  EXPECT_NEAR(v[0], oracle_v[0], 1e-10);
  EXPECT_NEAR(v[1], oracle_v[1], 1e-10);
}

TEST(MarkovValues, DimensionMismatchThrows) {
  const std::vector<double> r{1, 2, 3};
  EXPECT_THROW(solve_markov_values(r, Matrix::identity(2), 0.5), DimensionError);
  EXPECT_THROW(solve_markov_values(r, Matrix(3, 2), 0.5), DimensionError);
}

TEST(MarkovValues, AgreesWithValueIterationOracle) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng() % 40;
    const Matrix p = oracle::random_stochastic(n, rng);
    std::vector<double> r(n);
    for (double& x : r) x = 10 * u(rng);
    const double beta = 0.95 * u(rng);
    const auto v = solve_markov_values(r, p, beta);
    const auto w = oracle::value_iteration(r, p, beta);
    EXPECT_LT(max_abs_diff(v, w), 1e-8);
  }
}

TEST(MarkovValues, LargeChainUsesIterationAndStillSolves) {
  std::mt19937_64 rng(3);
  const std::size_t n = 1100;
  const Matrix p = oracle::random_stochastic(n, rng);
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = static_cast<double>(i % 13);
  const double beta = 0.6;
  const auto v = solve_markov_values(r, p, beta);
  // Bellman residual.
  double worst = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) acc += p(s, t) * v[t];
    worst = std::max(worst, std::abs(v[s] - r[s] - beta * acc));
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(MarkovValues, TruncatedSumWithinTailBound) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + trial;
    const Matrix p = oracle::random_stochastic(n, rng);
    std::vector<double> r(n);
    double rmax = 0;
    for (double& x : r) rmax = std::max(rmax, x = static_cast<double>(rng() % 100) / 7.0);
    const double beta = 0.9;
    const auto v = solve_markov_values(r, p, beta);
    // sum_{t<50} beta^t P^t r
    std::vector<double> term = r, total(n, 0.0);
    for (int t = 0; t < 50; ++t) {
      for (std::size_t s = 0; s < n; ++s) total[s] += term[s];
      std::vector<double> next(n, 0.0);
      for (std::size_t s = 0; s < n; ++s)
        for (std::size_t k = 0; k < n; ++k) next[s] += beta * p(s, k) * term[k];
      term = next;
    }
    const double bound = std::pow(beta, 50) * rmax / (1 - beta);
    for (std::size_t s = 0; s < n; ++s) {
      EXPECT_GE(v[s], total[s] - 1e-9);
      EXPECT_LE(v[s] - total[s], bound + 1e-9);
    }
  }
}

// Source 1 -> relay 2 -> CPC 3 with a single PU state.
RoutingModel chain_model() {
  std::mt19937_64 rng(0);
  RoutingModel m = oracle::random_model(rng, 2, {1, 1}, 1, 1, false);
  m.cpcs = {3};
  for (auto& h : m.per_state) h.candidates[2] = {3};
  m.queues.erase(4);
  m.queues.erase(5);
  m.queues[1] = {0.4, 0.2, 0.08};
  m.queues[2] = {0.1, 0.3, 0.15};
  m.queues[3] = {0.0, 0.1, 0.02};
  m.beta = 0.8;
  return m;
}

TEST(BackwardInduction, SingletonChainClosedForm) {
  const RoutingModel m = chain_model();
  ASSERT_EQ(m.states.num_states(), 1u);
  const GameSolution sol = backward_induction(m);
  const double u1 = oracle::delay(0.5, 0.3, 0.15, 1e4);  // relay sees 0.1 + 0.4
  const double u2 = oracle::delay(0.5, 0.1, 0.02, 1e4);  // CPC sees the relay's 0.5
  const double v_relay = u2 / (1 - m.beta);
  EXPECT_NEAR(sol.values.v(2)[0], v_relay, 1e-12);
  EXPECT_NEAR(sol.values.v(1)[0], (u1 + v_relay) / (1 - m.beta), 1e-12);
  EXPECT_NEAR(local_utility(m, sol, 1)[0], u1 / (1 - m.beta), 1e-12);
  EXPECT_TRUE(sol.unresolved().empty());
  const RoutePath path = realize_route(m, sol, 0, 1, 42);
  EXPECT_EQ(path.nodes, (std::vector<NodeId>{1, 2, 3}));
  ASSERT_EQ(path.hop_delay.size(), 2u);
  EXPECT_NEAR(path.hop_delay[0], u1, 1e-12);
  EXPECT_NEAR(path.hop_delay[1], u2, 1e-12);
}

TEST(BackwardInduction, SmallInstancesAreEpsilonNash) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 12; ++trial) {
    const RoutingModel m = oracle::random_model(rng, 2, {2, 2}, 2, 2, trial % 2 == 1);
    const GameSolution sol = backward_induction(m);
    const oracle::NashCheck c = oracle::check_stationary_nash(m, sol);
    EXPECT_GT(c.deviations, 0);
    EXPECT_LE(c.worst_improvement, 1e-2 * c.scale) << "trial " << trial;
    EXPECT_LE(c.value_mismatch, 1e-6 * std::max(1.0, c.scale)) << "trial " << trial;
  }
}

TEST(BackwardInduction, StateDependentCandidatesAreHonored) {
  std::mt19937_64 rng(6);
  const RoutingModel m = oracle::random_model(rng, 3, {2, 3, 2}, 3, 2, true);
  const GameSolution sol = backward_induction(m);
  for (StateIndex s = 0; s < m.states.num_states(); ++s)
    for (const auto& [id, cands] : m.per_state[s].candidates) {
      EXPECT_EQ(sol.strategies.candidates(id, s), cands);
      EXPECT_EQ(sol.strategies.at(id, s).size(), cands.size());
    }
  const NodeId dropped = m.level_nodes(2).back();
  for (StateIndex s = 0; s < m.states.num_states(); ++s)
    if (m.states.occupied(s, 0)) {
      EXPECT_TRUE(sol.strategies.strategy.at(dropped)[s].empty());
      EXPECT_EQ(sol.values.stage.at(dropped)[s], m.delay_cap);
    }
}

TEST(BackwardInduction, RejectsNodeChangingLevelAcrossStates) {
  std::mt19937_64 rng(7);
  RoutingModel m = oracle::random_model(rng, 2, {1, 2}, 2, 2, false);
  auto& h = m.per_state[1];
  const NodeId moved = h.levels[1].front();
  h.levels[1].erase(h.levels[1].begin());
  h.levels[0].push_back(moved);
  h.level_of[moved] = 1;
  EXPECT_THROW(backward_induction(m), Error);
}

class Fig3Solution : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    pipeline_ = new Pipeline(load_scenario(read_text_file(oracle::config_path("fig3.json"))));
    pipeline_->solution();
  }
  static void TearDownTestSuite() { delete pipeline_; }
  static Pipeline* pipeline_;
};
Pipeline* Fig3Solution::pipeline_ = nullptr;

TEST_F(Fig3Solution, AuditCleanAndStrategiesOnSimplex) {
  const GameSolution& sol = pipeline_->solution();
  EXPECT_TRUE(sol.unresolved().empty());
  EXPECT_EQ(sol.audit.size(), 3u * 4u);
  for (const auto& [id, per_state] : sol.strategies.strategy)
    for (std::size_t s = 0; s < per_state.size(); ++s) {
      const auto& f = per_state[s];
      EXPECT_EQ(f.size(), sol.strategies.candidates(id, s).size());
      double sum = 0;
      for (double x : f) {
        EXPECT_GE(x, 0.0);
        sum += x;
      }
      if (!f.empty()) {
        EXPECT_NEAR(sum, 1.0, 1e-9);
      }
    }
}

TEST_F(Fig3Solution, BellmanConsistency) {
  const RoutingModel& m = pipeline_->model();
  const GameSolution& sol = pipeline_->solution();
  const Matrix& p = m.states.transition;
  for (const auto& [id, v] : sol.values.value) {
    const auto& r = sol.values.stage.at(id);
    for (StateIndex s = 0; s < v.size(); ++s) {
      double acc = 0;
      for (StateIndex t = 0; t < v.size(); ++t) acc += p(s, t) * v[t];
      EXPECT_NEAR(v[s], r[s] + m.beta * acc, 1e-8 * std::max(1.0, std::abs(v[s])));
    }
  }
}

TEST_F(Fig3Solution, ThreadCountDoesNotChangeResults) {
  const RoutingModel& m = pipeline_->model();
  const GameSolution one = backward_induction(m, 1);
  const GameSolution four = backward_induction(m, 4);
  std::ostringstream a, b;
  write_strategies_csv(a, one);
  write_values_csv(a, one);
  write_audit_csv(a, one);
  write_strategies_csv(b, four);
  write_values_csv(b, four);
  write_audit_csv(b, four);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(one.values.value, four.values.value);
}

TEST_F(Fig3Solution, RealizedRoutesFollowLevels) {
  const RoutingModel& m = pipeline_->model();
  const GameSolution& sol = pipeline_->solution();
  for (StateIndex s = 0; s < m.states.num_states(); ++s)
    for (NodeId src : m.sources) {
      const RoutePath a = realize_route(m, sol, s, src, 9);
      EXPECT_EQ(a, realize_route(m, sol, s, src, 9));
      ASSERT_EQ(a.hops(), static_cast<std::size_t>(m.level_count));
      for (std::size_t h = 0; h + 1 < a.nodes.size(); ++h)
        EXPECT_EQ(m.per_state[s].level_of.at(a.nodes[h]), static_cast<int>(h) + 1);
      EXPECT_NE(std::find(m.cpcs.begin(), m.cpcs.end(), a.nodes.back()), m.cpcs.end());
    }
}

TEST(RealizeRoute, SampledHopsMatchMixedStrategy) {
  std::mt19937_64 rng(8);
  RoutingModel m = oracle::random_model(rng, 2, {1, 3}, 3, 1, false);
  for (auto& h : m.per_state) h.candidates[1] = h.levels[1];
  const GameSolution base = backward_induction(m);
  GameSolution sol = base;
  sol.strategies.strategy[1][0] = {0.2, 0.5, 0.3};
  constexpr int kPaths = 100000;
  std::map<NodeId, int> first, second;
  for (int k = 0; k < kPaths; ++k) {
    const RoutePath p = realize_route(m, sol, 0, 1, 1000 + k);
    ++first[p.nodes[1]];
    ++second[p.nodes[2]];
  }
  const auto& cands = sol.strategies.candidates(1, 0);
  for (std::size_t a = 0; a < 3; ++a) {
    const double f = sol.strategies.at(1, 0)[a];
    const double sd = std::sqrt(f * (1 - f) / kPaths);
    EXPECT_NEAR(first[cands[a]] / double(kPaths), f, 3 * sd);
  }
  // Second hop: mixture over the relays' own strategies.
  std::map<NodeId, double> expect;
  for (std::size_t a = 0; a < 3; ++a) {
    const NodeId relay = cands[a];
    const auto& rc = sol.strategies.candidates(relay, 0);
    for (std::size_t b = 0; b < rc.size(); ++b)
      expect[rc[b]] += sol.strategies.at(1, 0)[a] * sol.strategies.at(relay, 0)[b];
  }
  for (const auto& [c, f] : expect) {
    const double sd = std::sqrt(f * (1 - f) / kPaths);
    EXPECT_NEAR(second[c] / double(kPaths), f, 3 * sd + 1e-12);
  }
}

TEST(RealizeRoute, PureStrategiesGiveUniquePath) {
  std::mt19937_64 rng(9);
  const RoutingModel m = oracle::random_model(rng, 3, {1, 2, 2}, 2, 1, false);
  GameSolution sol = backward_induction(m);
  for (auto& [id, per] : sol.strategies.strategy)
    for (auto& f : per)
      if (!f.empty()) {
        std::fill(f.begin(), f.end(), 0.0);
        f.back() = 1.0;
      }
  const RoutePath a = realize_route(m, sol, 0, 1, 1), b = realize_route(m, sol, 0, 1, 2);
  EXPECT_EQ(a.nodes, b.nodes);
  NodeId at = 1;
  for (std::size_t h = 1; h < a.nodes.size(); ++h) {
    at = sol.strategies.candidates(at, 0).back();
    EXPECT_EQ(a.nodes[h], at);
  }
}

TEST(RealizeRoute, MissingStrategyIsDeadEnd) {
  std::mt19937_64 rng(10);
  const RoutingModel m = oracle::random_model(rng, 2, {1, 1}, 1, 1, false);
  GameSolution sol = backward_induction(m);
  sol.strategies.strategy.erase(2);
  EXPECT_THROW(realize_route(m, sol, 0, 1, 1), DeadEndError);
}

TEST(Csv, HeadersAndDeterministicFormatting) {
  const RoutingModel m = chain_model();
  const GameSolution sol = backward_induction(m);
  std::ostringstream s, v, a;
  write_strategies_csv(s, sol);
  write_values_csv(v, sol);
  write_audit_csv(a, sol);
  EXPECT_EQ(s.str().substr(0, s.str().find('\n')), "node,state,action,probability");
  EXPECT_EQ(v.str().substr(0, v.str().find('\n')), "node,state,value,stage_value");
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "state,level,players,iterations,converged,nash_gap");
  EXPECT_NE(s.str().find("1,0,2,1\n"), std::string::npos) << s.str();
}

}  // namespace
}  // namespace cogroute
